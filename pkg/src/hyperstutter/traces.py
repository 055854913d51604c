"""Lasso traces, trace sets and transition systems."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import lcm
from typing import Iterable, Iterator, Mapping

Letter = frozenset
EMPTY_LETTER: Letter = frozenset()
POS_PROP = "#"


def letter(*props: str) -> Letter:
    return frozenset(props)


@dataclass(frozen=True)
class LassoTrace:
    """The infinite word ``prefix . loop^omega``."""
    prefix: tuple
    loop: tuple

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(frozenset(a) for a in self.prefix))
        object.__setattr__(self, "loop", tuple(frozenset(a) for a in self.loop))
        if not self.loop:
            raise ValueError("loop must be nonempty")

    def letter_at(self, i: int) -> Letter:
        if i < len(self.prefix):
            return self.prefix[i]
        return self.loop[(i - len(self.prefix)) % len(self.loop)]

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.prefix), len(self.loop)

    def props(self) -> set[str]:
        out = set()
        for a in self.prefix + self.loop:
            out |= a
        return out

    def canonical_key(self) -> tuple:
        """Shortest equivalent lasso; two traces are equal iff their keys are."""
        loop = list(self.loop)
        n = len(loop)
        for d in range(1, n + 1):
            if n % d == 0 and loop == loop[:d] * (n // d):
                loop = loop[:d]
                break
        prefix = list(self.prefix)
        while prefix and prefix[-1] == loop[-1]:
            prefix.pop()
            loop = [loop[-1]] + loop[:-1]
        return tuple(prefix), tuple(loop)

    def same_denotation(self, other: "LassoTrace") -> bool:
        return self.canonical_key() == other.canonical_key()

    def __str__(self):
        return format_trace(self)


def letter_at(t: LassoTrace, i: int) -> Letter:
    return t.letter_at(i)


@dataclass(frozen=True)
class PointedTrace:
    trace: LassoTrace
    position: int


def position_trace(i: int) -> LassoTrace:
    """The trace carrying a single ``#`` at position ``i``."""
    return LassoTrace((EMPTY_LETTER,) * i + (letter(POS_PROP),), (EMPTY_LETTER,))


def constant_trace(a: Iterable[str] = ()) -> LassoTrace:
    return LassoTrace((), (frozenset(a),))


def pointwise_union(a: LassoTrace, b: LassoTrace) -> LassoTrace:
    k = max(len(a.prefix), len(b.prefix))
    p = lcm(len(a.loop), len(b.loop))
    prefix = tuple(a.letter_at(i) | b.letter_at(i) for i in range(k))
    loop = tuple(a.letter_at(i) | b.letter_at(i) for i in range(k, k + p))
    return LassoTrace(prefix, loop)


class TraceSet(Mapping):
    """Ordered, uniquely named collection of traces."""

    def __init__(self, entries: Iterable[tuple[str, LassoTrace]] = ()):
        self._entries: dict[str, LassoTrace] = {}
        for name, t in entries:
            if name in self._entries:
                raise ValueError(f"duplicate trace name {name!r}")
            self._entries[name] = t

    @classmethod
    def from_traces(cls, traces: Iterable[LassoTrace], stem="t", dedup=True) -> "TraceSet":
        seen, out = set(), []
        for t in traces:
            key = t.canonical_key()
            if dedup and key in seen:
                continue
            seen.add(key)
            out.append((f"{stem}{len(out)}", t))
        return cls(out)

    def __getitem__(self, name):
        return self._entries[name]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def traces(self) -> list[LassoTrace]:
        return list(self._entries.values())

    def union(self, other: "TraceSet") -> "TraceSet":
        """Merge by denotation, renaming clashes."""
        keys = {t.canonical_key() for t in self.traces()}
        entries = list(self._entries.items())
        for name, t in other.items():
            if t.canonical_key() in keys:
                continue
            keys.add(t.canonical_key())
            new = name
            while new in self._entries or any(new == n for n, _ in entries):
                new += "'"
            entries.append((new, t))
        return TraceSet(entries)

    def __repr__(self):
        return f"TraceSet({len(self)} traces)"


@dataclass
class TransitionSystem:
    vertices: dict[str, Letter]
    edges: dict[str, list[str]] = field(default_factory=dict)
    initial: list[str] = field(default_factory=list)

    def validate(self):
        for v in self.vertices:
            if not self.edges.get(v):
                raise ValueError(f"vertex {v!r} has no outgoing edge")
        for v, ws in self.edges.items():
            for w in [v, *ws]:
                if w not in self.vertices:
                    raise ValueError(f"unknown vertex {w!r}")
        for v in self.initial:
            if v not in self.vertices:
                raise ValueError(f"unknown initial vertex {v!r}")


def lasso_runs(ts: TransitionSystem, prefix_bound: int, loop_bound: int) -> Iterator[tuple[list, list]]:
    """All runs ``(stem, cycle)`` with ``|stem| <= prefix_bound`` and ``1 <= |cycle| <= loop_bound``."""
    limit = prefix_bound + loop_bound

    def extend(path):
        n = len(path)
        for k in range(max(0, n - loop_bound), min(prefix_bound, n - 1) + 1):
            if path[k] in ts.edges.get(path[-1], ()):
                yield path[:k], path[k:]
        if n < limit:
            for w in ts.edges.get(path[-1], ()):
                yield from extend(path + [w])

    for v in ts.initial:
        yield from extend([v])


def system_traces(ts: TransitionSystem, prefix_bound: int, loop_bound: int) -> TraceSet:
    if prefix_bound < 0 or loop_bound < 1:
        raise ValueError("bounds must be prefix >= 0 and loop >= 1")
    lab = ts.vertices
    return TraceSet.from_traces(
        LassoTrace([lab[v] for v in stem], [lab[v] for v in cyc])
        for stem, cyc in lasso_runs(ts, prefix_bound, loop_bound)
    )


# --------------------------------------------------------------------------
# Text formats
# --------------------------------------------------------------------------

_LETTER_RE = re.compile(r"\{([^{}]*)\}")


def parse_letters(text: str) -> tuple:
    text = text.strip()
    out = []
    pos = 0
    for m in _LETTER_RE.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"malformed letter sequence near {text[pos:m.start()]!r}")
        out.append(frozenset(p.strip() for p in m.group(1).split(",") if p.strip()))
        pos = m.end()
    if text[pos:].strip():
        raise ValueError(f"malformed letter sequence near {text[pos:]!r}")
    return tuple(out)


def parse_trace(text: str) -> LassoTrace:
    if text.count("|") != 1:
        raise ValueError("a trace needs exactly one '|' between prefix and loop")
    pre, loop = text.split("|")
    return LassoTrace(parse_letters(pre), parse_letters(loop))


def _strip_comment(line: str) -> str:
    return line.split("--", 1)[0].strip()


def parse_trace_set(text: str) -> TraceSet:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'name = letters | letters'")
        name, body = line.split("=", 1)
        try:
            entries.append((name.strip(), parse_trace(body)))
        except ValueError as e:
            raise ValueError(f"line {lineno}: {e}") from None
    return TraceSet(entries)


def format_letter(a: Letter) -> str:
    return "{" + ",".join(sorted(a)) + "}"


def format_trace(t: LassoTrace) -> str:
    pre = " ".join(format_letter(a) for a in t.prefix)
    loop = " ".join(format_letter(a) for a in t.loop)
    return f"{pre} | {loop}".strip()


def format_trace_set(l: TraceSet) -> str:
    return "".join(f"{n} = {format_trace(t)}\n" for n, t in l.items())


def parse_transition_system(text: str) -> TransitionSystem:
    ts = TransitionSystem({}, {}, [])
    section = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip_comment(raw)
        if not line:
            continue
        if line.endswith(":") and line[:-1].strip() in ("vertices", "edges", "initial"):
            section = line[:-1].strip()
            continue
        if section == "vertices":
            m = re.fullmatch(r"(\S+)\s*(\{[^{}]*\})?", line)
            if not m:
                raise ValueError(f"line {lineno}: expected 'vertex {{props}}'")
            ts.vertices[m.group(1)] = parse_letters(m.group(2) or "{}")[0]
            ts.edges.setdefault(m.group(1), [])
        elif section == "edges":
            parts = [p.strip() for p in line.split("->")]
            if len(parts) != 2 or not all(parts):
                raise ValueError(f"line {lineno}: expected 'v -> w'")
            ts.edges.setdefault(parts[0], []).append(parts[1])
        elif section == "initial":
            ts.initial.extend(line.replace(",", " ").split())
        else:
            raise ValueError(f"line {lineno}: content outside a section")
    ts.validate()
    return ts
