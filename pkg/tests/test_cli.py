import json
import subprocess
import sys

import pytest

from hyperstutter.cli import EXIT_FALSE, EXIT_OK, EXIT_USAGE, main, run


@pytest.fixture
def files(tmp_path):
    def write(name, text):
        p = tmp_path / name
        p.write_text(text)
        return str(p)
    return write


def _strip_clock(text):
    d = json.loads(text)
    d.pop("wall_clock_seconds")
    return d


def test_parse_each_logic(files, capsys):
    assert run(["parse", "--logic", "pltl", files("a.pl", "p U (q S r)")])[0] == EXIT_OK
    assert run(["parse", files("a.hl", "A x. E y. G[p] (p@x <-> p@y)")])[0] == EXIT_OK
    assert run(["parse", "--logic", "soa", files("a.soa", "forall y. exists z. y < z")])[0] == EXIT_OK
    out = capsys.readouterr().out.splitlines()
    assert out[-1] == "forall y. exists z. y < z"


def test_parse_error_exits_two(files, capsys):
    assert run(["parse", "--logic", "hyper", files("bad.hl", "E x. p@x U")])[0] == EXIT_USAGE
    assert "error" in capsys.readouterr().err


def test_missing_file_and_unknown_command(capsys):
    assert run(["parse", "/nonexistent/file"])[0] == EXIT_USAGE
    assert run(["frobnicate"])[0] == EXIT_USAGE
    assert run([])[0] == EXIT_USAGE


def test_classify(files, capsys):
    code, rep = run(["classify", files("c.hl", "A x. A y. <x> X p@x")])
    assert code == EXIT_OK and rep.results["fragment"] == "HyperLTL_C"


def test_eval_true_false(files):
    t = files("t.tr", "a = {p} | {}\nb = | {}\n")
    assert run(["eval", "--traces", t, "--formula", files("f.hl", "E x. p@x")])[0] == EXIT_OK
    assert run(["eval", "--traces", t, "--formula", files("g.hl", "A x. p@x")])[0] == EXIT_FALSE


def test_eval_with_assignment_and_context(files):
    t = files("t.tr", "a = {} {p} | {}\nb = | {}\n")
    f = files("f.hl", "X p@x")
    assert run(["eval", "--traces", t, "--formula", f, "--assignment", "x=a@0"])[0] == EXIT_OK
    assert run(["eval", "--traces", t, "--formula", f, "--assignment", "x=a@1"])[0] == EXIT_FALSE
    assert run(["eval", "--traces", t, "--formula", f, "--assignment", "x=a,y=b",
                "--context", "y"])[0] == EXIT_FALSE
    assert run(["eval", "--traces", t, "--formula", f, "--assignment", "x=zz@0"])[0] == EXIT_USAGE
    assert run(["eval", "--traces", t, "--formula", f])[0] == EXIT_USAGE


def test_check_ts(files):
    ts = files("s.ts", "vertices:\n v {p}\nedges:\n v -> v\ninitial:\n v\n")
    code, rep = run(["check-ts", "--system", ts, "--formula", files("f.hl", "A x. G p@x"),
                     "--prefix-bound", "2", "--loop-bound", "2"])
    assert code == EXIT_OK and rep.results["pool_size"] == 1
    assert rep.results["prefix_bound"] == 2 and any("bounded" in c for c in rep.caveats)
    assert run(["check-ts", "--system", ts, "--formula", files("g.hl", "E x. F !p@x")])[0] == EXIT_FALSE


def test_pnf(files, capsys):
    f = files("n.hl", "E x. F E y. (p@x & p@y)")
    code, rep = run(["pnf", f, "--verify", "--models", "2", "--lpos", "8", "--emit-fresh-map"])
    assert code == EXIT_OK
    assert set(rep.results["fresh_map"].values()) == {"pos"}
    assert rep.summary()["total"] == 2
    t = files("m.tr", "a = {} {p} | {}\n")
    assert run(["pnf", f, "--verify", "--traces", t])[0] == EXIT_OK


def test_soa_eval(files):
    assert run(["soa-eval", files("s.soa", "exists Y. forall y. y in Y"), "--bound", "3"])[0] == EXIT_OK
    assert run(["soa-eval", files("t.soa", "forall y. exists z. y < z"), "--bound", "3"])[0] == EXIT_FALSE
    assert run(["soa-eval", files("u.soa", "y < z"), "--bound", "3"])[0] == EXIT_USAGE


@pytest.mark.parametrize("variant,label", [("s", "HyperLTL_S"), ("c", "HyperLTL_C")])
def test_reduce(files, tmp_path, variant, label):
    soa = files("r.soa", "forall y1. exists y2. exists y3. y1 + y2 = y3 & y1 * y2 = y3")
    pool = tmp_path / "pool.tr"
    code, rep = run(["reduce", "--variant", variant, "--soa", soa, "--bound", "2",
                     "--emit-pool", str(pool), "--verify"])
    assert code == EXIT_OK and rep.ok
    assert rep.results["fragment"] == label
    assert pool.read_text().strip()


def test_verify_gadgets(capsys):
    code, rep = run(["verify-gadgets", "--variant", "s", "--bound", "4"])
    assert code == EXIT_OK
    fams = rep.summary()["families"]
    assert fams["add"] == {"total": 25, "agree": 25}


def test_verify_gadgets_c_records_witness():
    code, rep = run(["verify-gadgets", "--variant", "c", "--bound", "2"])
    assert code == EXIT_OK
    assert rep.results["product_3_7"]["x0_period"] == 7


def test_minimal_z(capsys):
    assert run(["minimal-z", "3", "7"])[0] == EXIT_OK
    assert capsys.readouterr().out.strip() == "3"
    assert run(["minimal-z", "4", "3"])[0] == EXIT_USAGE


def test_json_report(files, tmp_path):
    out = tmp_path / "r.json"
    f = files("n.hl", "E x. F E y. (p@x & p@y)")
    args = ["pnf", f, "--verify", "--models", "3", "--seed", "5", "--json", str(out)]
    run(args)
    first = out.read_text()
    run(args)
    second = out.read_text()
    assert _strip_clock(first) == _strip_clock(second)
    d = json.loads(first)
    assert d["schema"] == 1 and d["command"] == args
    s = d["summary"]
    assert s["total"] == len(d["cases"]) and s["agree"] + s["disagree"] == s["total"]
    assert all({"inputs", "expected", "actual", "agree"} <= set(c) for c in d["cases"])


def test_seed_changes_models(files, tmp_path):
    f = files("n.hl", "E x. F E y. (p@x & p@y)")
    reps = [run(["pnf", f, "--verify", "--models", "3", "--seed", str(s)])[1] for s in (1, 2)]
    assert [c.inputs for c in reps[0].cases] != [c.inputs for c in reps[1].cases]


def test_main_returns_code(files):
    assert main(["minimal-z", "1", "2"]) == EXIT_OK


def test_console_script(files):
    r = subprocess.run([sys.executable, "-m", "hyperstutter.cli", "minimal-z", "2", "5"],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "2"
