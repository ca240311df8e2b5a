"""Accepting families: predicates on sets of permanent states.

A family is stored symbolically.  A set ``F`` of states belongs to the family
of an automaton when ``F`` consists of permanent states and the predicate
holds on it.  Explicit lists are one kind of predicate among others.

Concrete syntax (used when a family is not an explicit list)::

    true   in(q)   card{q1,q2} >= k   groups{{q1,q2},{q3}} >= k
    within{q1,q2}   is{q1,q2}   !e   e & e   e | e   (e)

``groups`` counts how many of the listed groups meet ``F``; ``card`` is the
special case of singleton groups.  ``within`` states ``F`` is a subset and
``is`` that ``F`` equals the given set.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import InvalidInputError, ResourceLimitError, SyntaxErrorAt
from .guards import COMPARATORS, _tokenize


class Family:
    def accepts(self, f: frozenset) -> bool:
        raise NotImplementedError

    def states(self) -> frozenset:
        return frozenset()

    def render(self) -> str:
        return _render(self, 0)

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class AllSets(Family):
    def accepts(self, f):
        return True


ALL = AllSets()


@dataclass(frozen=True)
class Explicit(Family):
    sets: frozenset  # of frozensets

    def accepts(self, f):
        return frozenset(f) in self.sets

    def states(self):
        return frozenset().union(*self.sets) if self.sets else frozenset()


@dataclass(frozen=True)
class Count(Family):
    """Number of ``groups`` that intersect ``F``, compared with ``k``."""

    groups: tuple  # of frozensets
    op: str
    k: int

    def __post_init__(self):
        if self.op not in COMPARATORS:
            raise InvalidInputError(f"unknown comparison {self.op!r}")

    def accepts(self, f):
        hits = sum(1 for grp in self.groups if grp & f)
        return COMPARATORS[self.op](hits, self.k)

    def states(self):
        return frozenset().union(*self.groups) if self.groups else frozenset()


@dataclass(frozen=True)
class Within(Family):
    allowed: frozenset

    def accepts(self, f):
        return frozenset(f) <= self.allowed

    def states(self):
        return self.allowed


@dataclass(frozen=True)
class FNot(Family):
    arg: Family

    def accepts(self, f):
        return not self.arg.accepts(f)

    def states(self):
        return self.arg.states()


@dataclass(frozen=True)
class FAnd(Family):
    args: tuple

    def accepts(self, f):
        return all(a.accepts(f) for a in self.args)

    def states(self):
        return frozenset().union(*(a.states() for a in self.args))


@dataclass(frozen=True)
class FOr(Family):
    args: tuple

    def accepts(self, f):
        return any(a.accepts(f) for a in self.args)

    def states(self):
        return frozenset().union(*(a.states() for a in self.args))


NONE = FNot(ALL)


def present(q: str) -> Family:
    return Count((frozenset([q]),), ">=", 1)


def absent(q: str) -> Family:
    return Count((frozenset([q]),), "=", 0)


def card(states: Iterable[str], op: str, k: int) -> Family:
    return Count(tuple(frozenset([q]) for q in sorted(states)), op, k)


def explicit(sets: Iterable[Iterable[str]]) -> Explicit:
    return Explicit(frozenset(frozenset(s) for s in sets))


def fneg(f: Family) -> Family:
    if isinstance(f, FNot):
        return f.arg
    return FNot(f)


def fand(*fs: Family) -> Family:
    flat = []
    for f in fs:
        if f == ALL:
            continue
        flat.extend(f.args if isinstance(f, FAnd) else [f])
    if not flat:
        return ALL
    return flat[0] if len(flat) == 1 else FAnd(tuple(flat))


def f_or(*fs: Family) -> Family:
    flat = []
    for f in fs:
        if f == NONE:
            continue
        if f == ALL:
            return ALL
        flat.extend(f.args if isinstance(f, FOr) else [f])
    if not flat:
        return NONE
    return flat[0] if len(flat) == 1 else FOr(tuple(flat))


def map_states(f: Family, fn: Callable[[str], Iterable[str]]) -> Family:
    """Replace every state ``q`` by the set ``fn(q)`` of states.

    Used when a family over one automaton is lifted to a construction whose
    states project onto it: ``F' |-> {q | fn(q) meets F'}``.  Explicit sets are
    rewritten into ``groups`` and ``within`` atoms.
    """
    def img(states):
        return frozenset(x for q in states for x in fn(q))

    if isinstance(f, AllSets):
        return f
    if isinstance(f, Count):
        return Count(tuple(img(g) for g in f.groups), f.op, f.k)
    if isinstance(f, Within):
        return Within(img(f.allowed))
    if isinstance(f, Explicit):
        options = []
        for e in sorted(f.sets, key=lambda s: sorted(s)):
            groups = tuple(img([q]) for q in sorted(e))
            options.append(fand(Count(groups, ">=", len(groups)) if groups else ALL, Within(img(e))))
        return f_or(*options)
    if isinstance(f, FNot):
        return fneg(map_states(f.arg, fn))
    if isinstance(f, FAnd):
        return fand(*(map_states(a, fn) for a in f.args))
    if isinstance(f, FOr):
        return f_or(*(map_states(a, fn) for a in f.args))
    raise TypeError(f"not a family: {f!r}")


def rename(f: Family, mapping: Mapping[str, str]) -> Family:
    if isinstance(f, Explicit):
        return Explicit(frozenset(frozenset(mapping.get(q, q) for q in s) for s in f.sets))
    return map_states(f, lambda q: [mapping.get(q, q)])


def restrict(f: Family, kept: frozenset) -> Family:
    """Drop states outside ``kept``; the predicate is unchanged on subsets of ``kept``."""
    if isinstance(f, Explicit):
        return Explicit(frozenset(s for s in f.sets if s <= kept))
    if isinstance(f, Count):
        return Count(tuple(g & kept for g in f.groups), f.op, f.k)
    if isinstance(f, Within):
        return Within(f.allowed & kept)
    if isinstance(f, FNot):
        return fneg(restrict(f.arg, kept))
    if isinstance(f, FAnd):
        return fand(*(restrict(a, kept) for a in f.args))
    if isinstance(f, FOr):
        return f_or(*(restrict(a, kept) for a in f.args))
    return f


def expand(f: Family, permanent: Iterable[str], cap: int = 1 << 16) -> list[frozenset]:
    """The family as an explicit list of nonempty subsets of ``permanent``."""
    perm = sorted(permanent)
    if isinstance(f, Explicit):
        return sorted((s for s in f.sets if s and s <= frozenset(perm)), key=lambda s: (len(s), sorted(s)))
    if (1 << len(perm)) > cap:
        raise ResourceLimitError(f"expanding a family over {len(perm)} permanent states")
    out = []
    for r in range(1, len(perm) + 1):
        for combo in itertools.combinations(perm, r):
            s = frozenset(combo)
            if f.accepts(s):
                out.append(s)
    return out


def compile_family(f: Family, index: Mapping[str, int]) -> Callable[[int], bool]:
    """Closure over a bitmask of states."""

    def mask(states):
        return sum(1 << index[q] for q in states if q in index)

    if isinstance(f, AllSets):
        return lambda m: True
    if isinstance(f, Explicit):
        masks = frozenset(mask(s) for s in f.sets if all(q in index for q in s))
        return lambda m: m in masks
    if isinstance(f, Count):
        gms = tuple(mask(g) for g in f.groups)
        cmp, k = COMPARATORS[f.op], f.k
        return lambda m: cmp(sum(1 for g in gms if g & m), k)
    if isinstance(f, Within):
        outside = ~mask(f.allowed)
        return lambda m: not (m & outside)
    if isinstance(f, FNot):
        inner = compile_family(f.arg, index)
        return lambda m: not inner(m)
    if isinstance(f, FAnd):
        parts = tuple(compile_family(a, index) for a in f.args)
        return lambda m: all(p(m) for p in parts)
    if isinstance(f, FOr):
        parts = tuple(compile_family(a, index) for a in f.args)
        return lambda m: any(p(m) for p in parts)
    raise TypeError(f"not a family: {f!r}")


def compile_family_bounds(f: Family, index: Mapping[str, int]) -> Callable[[frozenset], bool | None]:
    """Three-valued version of :func:`compile_family`.

    The closure takes a set of bitmasks, one per node, each holding the
    states the node may still end in.  It returns ``True`` or ``False`` when
    every final set compatible with these masks gives that answer, and
    ``None`` otherwise.
    """

    def mask(states):
        return sum(1 << index[q] for q in states if q in index)

    def build(f):
        if isinstance(f, AllSets):
            return lambda rs, may, exact: True
        if isinstance(f, Explicit):
            masks = tuple(mask(s) for s in f.sets if all(q in index for q in s))
            members = frozenset(masks)

            def explicit(rs, may, exact):
                if exact:
                    return may in members
                must = 0
                for r in rs:
                    if not r & (r - 1):
                        must |= r
                for s in masks:
                    if must & ~s == 0 and s & ~may == 0 and all(r & s for r in rs):
                        return None
                return False
            return explicit
        if isinstance(f, Count):
            gms = tuple(mask(g) for g in f.groups)
            cmp, k = COMPARATORS[f.op], f.k

            def count(rs, may, exact):
                lo = sum(1 for g in gms if any(r & ~g == 0 for r in rs))
                hi = sum(1 for g in gms if g & may)
                first = cmp(lo, k)
                if all(cmp(x, k) == first for x in range(lo + 1, hi + 1)):
                    return first
                return None
            return count
        if isinstance(f, Within):
            outside = ~mask(f.allowed)

            def within(rs, may, exact):
                if not may & outside:
                    return True
                if any(r & outside == r for r in rs):
                    return False
                return None
            return within
        if isinstance(f, FNot):
            inner = build(f.arg)

            def fnot(rs, may, exact):
                r = inner(rs, may, exact)
                return None if r is None else not r
            return fnot
        if isinstance(f, (FAnd, FOr)):
            parts = tuple(build(a) for a in f.args)
            stop = isinstance(f, FOr)

            def junction(rs, may, exact):
                unknown = False
                for p in parts:
                    r = p(rs, may, exact)
                    if r is None:
                        unknown = True
                    elif r is stop:
                        return stop
                return None if unknown else not stop
            return junction
        raise TypeError(f"not a family: {f!r}")

    fn = build(f)

    def run(rs):
        may = 0
        exact = True
        for r in rs:
            may |= r
            if r & (r - 1):
                exact = False
        return fn(rs, may, exact)
    return run


# rendering and parsing -----------------------------------------------------------------


def _set(states) -> str:
    return "{" + ",".join(sorted(states)) + "}"


def _render(f: Family, outer: int) -> str:
    if isinstance(f, AllSets):
        return "true"
    if isinstance(f, Explicit):
        return "(" + " | ".join(f"is{_set(s)}" for s in sorted(f.sets, key=sorted)) + ")" if f.sets else "!true"
    if isinstance(f, Count):
        if len(f.groups) == 1 and len(f.groups[0]) == 1 and f.op == ">=" and f.k == 1:
            return f"in({next(iter(f.groups[0]))})"
        if all(len(g) == 1 for g in f.groups):
            return f"card{_set(q for g in f.groups for q in g)} {f.op} {f.k}"
        return "groups{" + ",".join(_set(g) for g in f.groups) + "}" + f" {f.op} {f.k}"
    if isinstance(f, Within):
        return f"within{_set(f.allowed)}"
    if isinstance(f, FNot):
        return "!" + _render(f.arg, 3)
    prec = 2 if isinstance(f, FAnd) else 1
    sep = " & " if prec == 2 else " | "
    text = sep.join(_render(a, prec) for a in f.args)
    return f"({text})" if prec <= outer else text


class _FamilyParser:
    def __init__(self, text):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, value=None, kind=None):
        tok = self.toks[self.i]
        if kind == "name" and tok[0] == "num":
            tok = ("name", tok[1], tok[2])
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            raise SyntaxErrorAt(f"expected {value or kind!r} but found {tok[1] or 'end of input'!r}",
                                self.text, tok[2])
        self.i += 1
        return tok

    def parse(self):
        f = self.disj()
        self.take(kind="end")
        return f

    def disj(self):
        args = [self.conj()]
        while self.peek()[1] == "|":
            self.take("|")
            args.append(self.conj())
        return args[0] if len(args) == 1 else FOr(tuple(args))

    def conj(self):
        args = [self.unary()]
        while self.peek()[1] == "&":
            self.take("&")
            args.append(self.unary())
        return args[0] if len(args) == 1 else FAnd(tuple(args))

    def names(self):
        self.take("{")
        out = []
        if self.peek()[1] != "}":
            out.append(self.take(kind="name")[1])
            while self.peek()[1] == ",":
                self.take(",")
                out.append(self.take(kind="name")[1])
        self.take("}")
        return frozenset(out)

    def comparison(self):
        op = self.take(kind="op")[1]
        if op == "==":
            op = "="
        if op not in COMPARATORS:
            raise SyntaxErrorAt(f"expected a comparison, found {op!r}", self.text, self.toks[self.i - 1][2])
        return op, int(self.take(kind="num")[1])

    def unary(self):
        kind, val, pos = self.peek()
        if val == "!":
            self.take()
            return FNot(self.unary())
        if val == "(":
            self.take()
            f = self.disj()
            self.take(")")
            return f
        if kind == "name":
            self.take()
            if val == "true":
                return ALL
            if val == "false":
                return NONE
            if val == "in":
                self.take("(")
                q = self.take(kind="name")[1]
                self.take(")")
                return present(q)
            if val == "card":
                states = self.names()
                op, k = self.comparison()
                return card(states, op, k)
            if val == "groups":
                self.take("{")
                groups = [self.names()]
                while self.peek()[1] == ",":
                    self.take(",")
                    groups.append(self.names())
                self.take("}")
                op, k = self.comparison()
                return Count(tuple(groups), op, k)
            if val == "within":
                return Within(self.names())
            if val == "is":
                return Explicit(frozenset([self.names()]))
        raise SyntaxErrorAt(f"unexpected {val or 'end of input'!r}", self.text, pos)


def parse_family(text: str) -> Family:
    return _FamilyParser(text).parse()


def family_to_json(f: Family):
    if isinstance(f, Explicit):
        return [sorted(s) for s in sorted(f.sets, key=lambda s: (len(s), sorted(s)))]
    return f.render()


def family_from_json(data) -> Family:
    if isinstance(data, str):
        return parse_family(data)
    if isinstance(data, list):
        sets = []
        for item in data:
            if not isinstance(item, list) or not all(isinstance(q, str) for q in item):
                raise InvalidInputError("accepting sets must be lists of state names")
            sets.append(item)
        return explicit(sets)
    raise InvalidInputError("accepting must be a list of state lists or a family expression")
