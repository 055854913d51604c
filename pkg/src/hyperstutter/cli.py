"""Command line entry point: ``hyperstutter <command> ...``."""
from __future__ import annotations

import argparse
import random
import sys
import time
from pathlib import Path

from .hyper import EvaluationError, check_system, check_traceset, evaluate
from .logic import TRUE_PROP, UNIVERSAL, classify_fragment, props
from .parser import FormulaSyntaxError, parse_hyper, parse_pltl, print_hyper, print_pltl
from .pnf import prenex_boolean, to_pnf, verify_pnf
from .report import Report
from .soa import (
    SoaSyntaxError, aux_bound, eval_soa_bounded, first_order_vars, normalize_flat, parse_soa, print_soa,
    separate_repeats,
)
from .traces import (
    POS_PROP, LassoTrace, PointedTrace, TraceSet, format_trace_set, parse_trace_set, parse_transition_system,
)
from . import reduce_c, reduce_s

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from e


def _verdict(rep: Report, key: str, value: bool) -> int:
    rep.results[key] = value
    print("true" if value else "false")
    return EXIT_OK if value else EXIT_FALSE


# -- commands --------------------------------------------------------------------

def cmd_parse(args, rep):
    text = _read(args.file)
    if args.logic == "pltl":
        out = print_pltl(parse_pltl(text))
    elif args.logic == "hyper":
        out = print_hyper(parse_hyper(text))
    else:
        out = print_soa(parse_soa(text))
    rep.results["printed"] = out
    print(out)
    return EXIT_OK


def cmd_classify(args, rep):
    f = parse_hyper(_read(args.file))
    frag = classify_fragment(f)
    rep.results.update(fragment=frag.label, prenex=frag.prenex, past_free=frag.past_free)
    print(frag.label)
    return EXIT_OK


def _parse_assignment(text: str, l: TraceSet) -> dict:
    out = {}
    for item in filter(None, (s.strip() for s in text.split(","))):
        var, sep, rest = item.partition("=")
        name, at, pos = rest.partition("@")
        if not sep or not var.strip():
            raise UsageError(f"bad assignment entry {item!r}, expected name=trace@pos")
        name = name.strip()
        if name not in l:
            raise UsageError(f"no trace named {name!r}")
        try:
            i = int(pos) if at else 0
        except ValueError:
            raise UsageError(f"bad position in {item!r}") from None
        if i < 0:
            raise UsageError(f"negative position in {item!r}")
        out[var.strip()] = PointedTrace(l[name], i)
    return out


def _parse_context(text: str):
    if text.strip() == "universal":
        return UNIVERSAL
    vs = frozenset(v.strip() for v in text.split(",") if v.strip())
    if not vs:
        raise UsageError("an explicit context needs at least one variable")
    return vs


def cmd_eval(args, rep):
    l = parse_trace_set(_read(args.traces))
    f = parse_hyper(_read(args.formula))
    if not args.assignment and args.context == "universal":
        return _verdict(rep, "holds", check_traceset(l, f))
    a = _parse_assignment(args.assignment or "", l)
    return _verdict(rep, "holds", evaluate(l, a, _parse_context(args.context), f))


def cmd_check_ts(args, rep):
    ts = parse_transition_system(_read(args.system))
    f = parse_hyper(_read(args.formula))
    v = check_system(ts, f, args.prefix_bound, args.loop_bound)
    rep.results.update(holds=v.holds, pool_size=v.pool_size,
                       prefix_bound=v.prefix_bound, loop_bound=v.loop_bound)
    rep.caveats.append(v.label)
    print(v.label)
    return EXIT_OK if v.holds else EXIT_FALSE


def _random_model(rng: random.Random, names) -> TraceSet:
    def tr():
        let = lambda: frozenset(p for p in names if rng.random() < 0.4)
        return LassoTrace([let() for _ in range(rng.randint(0, 3))],
                          [let() for _ in range(rng.randint(1, 3))])
    return TraceSet.from_traces(tr() for _ in range(rng.randint(1, 3)))


def cmd_pnf(args, rep):
    f = parse_hyper(_read(args.file))
    res = to_pnf(f, literal=args.literal)
    out = print_hyper(res.formula)
    rep.results.update(prenex=out, fresh_vars=list(res.fresh_vars), rules=list(res.rules))
    print(out)
    if args.emit_fresh_map:
        rep.results["fresh_map"] = res.fresh_map()
        for x, kind in res.fresh_map().items():
            print(f"{x}: {kind}")
    if not args.verify:
        return EXIT_OK
    if args.traces:
        models = [parse_trace_set(_read(args.traces))]
    else:
        rng = random.Random(args.seed)
        names = sorted(props(f) - {TRUE_PROP, POS_PROP}) or ["p"]
        models = [_random_model(rng, names) for _ in range(args.models)]
    for i, l in enumerate(models):
        v = verify_pnf(f, l, n=args.bound, max_n=args.max_bound, result=res)
        rep.add("pnf", {"model": i, "traces": format_trace_set(l).splitlines()}, v.lhs, v.rhs)
        if v.inconclusive:
            rep.caveats.append(f"model {i}: inconclusive at {v.bound} position traces")
    print(rep.text(with_results=False))
    return EXIT_OK if rep.ok else EXIT_FALSE


def cmd_soa_eval(args, rep):
    f = parse_soa(_read(args.file))
    rep.caveats.append(f"numbers range over 0..{args.bound}")
    return _verdict(rep, "holds", eval_soa_bounded(f, args.bound))


def cmd_reduce(args, rep):
    f = normalize_flat(parse_soa(_read(args.soa)))
    h = reduce_s.hyp_s(f) if args.variant == "s" else reduce_c.hyp_c(f)
    flat = prenex_boolean(h)
    rep.results.update(formula=print_hyper(flat), fragment=classify_fragment(flat).label)
    print(print_hyper(flat))
    if args.variant == "s":
        pool = reduce_s.pool_s(first_order_vars(separate_repeats(f)), args.bound)
    else:
        pool = reduce_c.pool_c(max(args.bound, 2), number_bound=args.bound)
    if args.emit_pool:
        Path(args.emit_pool).write_text(format_trace_set(pool))
    if not args.verify:
        return EXIT_OK
    expected = eval_soa_bounded(f, args.bound)
    actual = check_traceset(pool, h)
    rep.add("end-to-end", {"bound": args.bound, "variant": args.variant}, expected, actual)
    rep.caveats.append(f"numbers range over 0..{args.bound}")
    if any(v.startswith("_") for v in first_order_vars(f)):
        rep.caveats.append(f"auxiliary terms reach {aux_bound(args.bound)} in arithmetic "
                           f"but only {args.bound} in the pool")
    print(f"arithmetic: {expected}, hyper: {actual}")
    return EXIT_OK if expected == actual else EXIT_FALSE


def cmd_verify_gadgets(args, rep):
    if args.variant == "s":
        rep.extend(reduce_s.verify_gadgets_s(args.bound))
    else:
        rep.extend(reduce_c.verify_gadgets_c(args.bound))
        w = reduce_c.product_witness(3, 7)
        rep.results["product_3_7"] = w
    print(rep.text())
    return EXIT_OK if rep.ok else EXIT_FALSE


def cmd_minimal_z(args, rep):
    try:
        z = reduce_c.minimal_z(args.n1, args.n2)
    except ValueError as e:
        raise UsageError(str(e)) from e
    rep.results["z"] = z
    print(z)
    return EXIT_OK


# -- argument parsing ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="FILE", default=argparse.SUPPRESS,
                        help="write a structured report to FILE")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized checks")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help="accepted for compatibility; evaluation is single-threaded")

    p = argparse.ArgumentParser(prog="hyperstutter", parents=[common],
                                description="Hyperproperties with stuttering and contexts on lasso traces.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        return sp

    sp = add("parse", cmd_parse, "parse and print a formula")
    sp.add_argument("file")
    sp.add_argument("--logic", choices=["pltl", "hyper", "soa"], default="hyper")

    sp = add("classify", cmd_classify, "report the smallest fragment of a sentence")
    sp.add_argument("file")

    sp = add("eval", cmd_eval, "model check a sentence on a trace set")
    sp.add_argument("--traces", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--assignment", metavar="VAR=TRACE@POS,...",
                    help="bind free variables to named traces")
    sp.add_argument("--context", default="universal", metavar="x,y|universal")

    sp = add("check-ts", cmd_check_ts, "bounded model check against a transition system")
    sp.add_argument("--system", required=True)
    sp.add_argument("--formula", required=True)
    sp.add_argument("--prefix-bound", type=int, default=3)
    sp.add_argument("--loop-bound", type=int, default=3)

    sp = add("pnf", cmd_pnf, "prenex normal form")
    sp.add_argument("file")
    sp.add_argument("--literal", action="store_true",
                    help="omit the change-point restriction on position variables")
    sp.add_argument("--verify", action="store_true")
    sp.add_argument("--traces", help="model for --verify (default: random models)")
    sp.add_argument("--models", type=int, default=5)
    sp.add_argument("--lpos", "--bound", dest="bound", type=int, default=32,
                    help="largest position trace used by --verify")
    sp.add_argument("--max-bound", type=int, default=128)
    sp.add_argument("--emit-fresh-map", action="store_true",
                    help="list the introduced variables with their kind")

    sp = add("soa-eval", cmd_soa_eval, "bounded evaluation of an arithmetic sentence")
    sp.add_argument("file")
    sp.add_argument("--bound", type=int, required=True)

    sp = add("reduce", cmd_reduce, "translate an arithmetic sentence")
    sp.add_argument("--variant", choices=["s", "c"], required=True)
    sp.add_argument("--soa", required=True)
    sp.add_argument("--bound", type=int, default=3)
    sp.add_argument("--emit-pool", metavar="FILE")
    sp.add_argument("--verify", action="store_true")

    sp = add("verify-gadgets", cmd_verify_gadgets, "check the arithmetic gadgets on a grid")
    sp.add_argument("--variant", choices=["s", "c"], required=True)
    sp.add_argument("--bound", type=int, default=4)

    sp = add("minimal-z", cmd_minimal_z, "smallest block count aligning periods n2 and n2-1")
    sp.add_argument("n1", type=int)
    sp.add_argument("n2", type=int)
    return p


def run(argv) -> tuple:
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return (EXIT_USAGE if e.code else EXIT_OK), None
    args.seed = getattr(args, "seed", 0)
    rep = Report(command=argv)
    start = time.perf_counter()
    try:
        code = args.func(args, rep)
    except (UsageError, FormulaSyntaxError, SoaSyntaxError, EvaluationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        code = EXIT_USAGE
    rep.wall_clock = round(time.perf_counter() - start, 3)
    rep.results["exit_code"] = code
    out = getattr(args, "json", None)
    if out:
        Path(out).write_text(rep.to_json())
    return code, rep


def main(argv=None) -> int:
    code, _ = run(sys.argv[1:] if argv is None else argv)
    return code


if __name__ == "__main__":
    sys.exit(main())
