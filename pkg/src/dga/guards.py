"""Transition guards: boolean predicates over the neighbour state sets.

A guard is evaluated on a family ``S`` mapping each edge symbol to the set of
states seen among the incoming neighbours along that symbol.

Concrete syntax::

    true   has(q)@g   has{q1,q2}@g   eq({q1,q2})@g   card@g >= k   !e   e & e   e | e   (e)

``has{..}`` holds when at least one of the listed states is seen.

``@g`` may be omitted when the edge alphabet has a single symbol.
"""

from __future__ import annotations

import itertools
import operator
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import InvalidInputError, SyntaxErrorAt

COMPARATORS: dict[str, Callable[[int, int], bool]] = {
    ">=": operator.ge,
    "<=": operator.le,
    ">": operator.gt,
    "<": operator.lt,
    "=": operator.eq,
    "!=": operator.ne,
}

# characters that may not appear in state names
RESERVED = set("(){},@&|!<>=[]* \t\n\"'")
NAME_RE = re.compile(r"[^(){},@&|!<>=\s\"']+")


def check_name(name: str) -> str:
    if not isinstance(name, str) or not name or not NAME_RE.fullmatch(name):
        raise InvalidInputError(f"invalid state name {name!r}")
    return name


class Guard:
    """Base class of guard expressions."""

    def evaluate(self, s: Mapping[str, frozenset]) -> bool:
        raise NotImplementedError

    def states(self) -> frozenset:
        return frozenset()

    def gammas(self) -> frozenset:
        return frozenset()

    def render(self, gamma_implicit: bool = False) -> str:
        return _render(self, gamma_implicit, 0)

    def __str__(self):
        return self.render()


@dataclass(frozen=True)
class TrueGuard(Guard):
    def evaluate(self, s):
        return True


TRUE = TrueGuard()


@dataclass(frozen=True)
class Member(Guard):
    """``state`` occurs among the ``gamma``-incoming neighbours."""

    state: str
    gamma: str | None = None

    def evaluate(self, s):
        return self.state in s.get(self.gamma, ())

    def states(self):
        return frozenset([self.state])

    def gammas(self):
        return frozenset([self.gamma])


@dataclass(frozen=True)
class MemberAny(Guard):
    """Some state of ``values`` occurs among the ``gamma``-incoming neighbours."""

    gamma: str | None
    values: frozenset

    def evaluate(self, s):
        return not self.values.isdisjoint(s.get(self.gamma, ()))

    def states(self):
        return frozenset(self.values)

    def gammas(self):
        return frozenset([self.gamma])


def member_any(states: Iterable[str], gamma: str | None) -> Guard:
    vals = frozenset(states)
    if not vals:
        return FALSE
    if len(vals) == 1:
        return Member(next(iter(vals)), gamma)
    return MemberAny(gamma, vals)


@dataclass(frozen=True)
class Equals(Guard):
    gamma: str | None
    values: frozenset

    def evaluate(self, s):
        return frozenset(s.get(self.gamma, ())) == self.values

    def states(self):
        return frozenset(self.values)

    def gammas(self):
        return frozenset([self.gamma])


@dataclass(frozen=True)
class CardCmp(Guard):
    gamma: str | None
    op: str
    k: int

    def __post_init__(self):
        if self.op not in COMPARATORS:
            raise InvalidInputError(f"unknown comparison {self.op!r}")

    def evaluate(self, s):
        return COMPARATORS[self.op](len(s.get(self.gamma, ())), self.k)

    def gammas(self):
        return frozenset([self.gamma])


@dataclass(frozen=True)
class Not(Guard):
    arg: Guard

    def evaluate(self, s):
        return not self.arg.evaluate(s)

    def states(self):
        return self.arg.states()

    def gammas(self):
        return self.arg.gammas()


@dataclass(frozen=True)
class And(Guard):
    args: tuple

    def evaluate(self, s):
        return all(a.evaluate(s) for a in self.args)

    def states(self):
        return frozenset().union(*(a.states() for a in self.args))

    def gammas(self):
        return frozenset().union(*(a.gammas() for a in self.args))


@dataclass(frozen=True)
class Or(Guard):
    args: tuple

    def evaluate(self, s):
        return any(a.evaluate(s) for a in self.args)

    def states(self):
        return frozenset().union(*(a.states() for a in self.args))

    def gammas(self):
        return frozenset().union(*(a.gammas() for a in self.args))


FALSE = Not(TRUE)


def neg(g: Guard) -> Guard:
    if isinstance(g, Not):
        return g.arg
    return Not(g)


def conj(*gs: Guard) -> Guard:
    flat = []
    for g in gs:
        if g == TRUE:
            continue
        if g == FALSE:
            return FALSE
        flat.extend(g.args if isinstance(g, And) else [g])
    if not flat:
        return TRUE
    return flat[0] if len(flat) == 1 else And(tuple(flat))


def disj(*gs: Guard) -> Guard:
    flat = []
    for g in gs:
        if g == FALSE:
            continue
        if g == TRUE:
            return TRUE
        flat.extend(g.args if isinstance(g, Or) else [g])
    if not flat:
        return FALSE
    return flat[0] if len(flat) == 1 else Or(tuple(flat))


def avoid(states: Iterable[str], gammas: Iterable[str]) -> Guard:
    """Every neighbour set avoids ``states``."""
    return conj(*(neg(member_any(states, g)) for g in gammas))


def map_atoms(g: Guard, fn: Callable[[Guard], Guard]) -> Guard:
    """Rebuild ``g`` replacing every atom ``a`` by ``fn(a)``."""
    if isinstance(g, Not):
        return neg(map_atoms(g.arg, fn))
    if isinstance(g, And):
        return conj(*(map_atoms(a, fn) for a in g.args))
    if isinstance(g, Or):
        return disj(*(map_atoms(a, fn) for a in g.args))
    if isinstance(g, TrueGuard):
        return g
    return fn(g)


def resolve_gamma(g: Guard, gamma: Iterable[str]) -> Guard:
    """Fill in the omitted edge symbol when there is exactly one."""
    gamma = tuple(gamma)

    def fix(atom):
        if atom.gamma is not None:
            if atom.gamma not in gamma:
                raise InvalidInputError(f"guard refers to unknown edge symbol {atom.gamma!r}")
            return atom
        if len(gamma) != 1:
            raise InvalidInputError("guard atoms need an explicit @edge-symbol when there are several")
        if isinstance(atom, Member):
            return Member(atom.state, gamma[0])
        if isinstance(atom, Equals):
            return Equals(gamma[0], atom.values)
        if isinstance(atom, MemberAny):
            return MemberAny(gamma[0], atom.values)
        return CardCmp(gamma[0], atom.op, atom.k)

    return map_atoms(g, fix)


def restrict_states(g: Guard, kept: frozenset) -> Guard:
    """Specialise a guard to neighbour sets drawn from ``kept``."""

    def fix(atom):
        if isinstance(atom, Member) and atom.state not in kept:
            return FALSE
        if isinstance(atom, Equals) and not atom.values <= kept:
            return FALSE
        if isinstance(atom, MemberAny) and not atom.values <= kept:
            return member_any(atom.values & kept, atom.gamma)
        return atom

    return map_atoms(g, fix)


def rename_states(g: Guard, mapping: Mapping[str, str]) -> Guard:
    def fix(atom):
        if isinstance(atom, Member):
            return Member(mapping.get(atom.state, atom.state), atom.gamma)
        if isinstance(atom, Equals):
            return Equals(atom.gamma, frozenset(mapping.get(q, q) for q in atom.values))
        if isinstance(atom, MemberAny):
            return MemberAny(atom.gamma, frozenset(mapping.get(q, q) for q in atom.values))
        return atom

    return map_atoms(g, fix)


# compilation to closures over bitmask tuples ------------------------------------------


def _atom_mask(atom, index, gindex):
    if isinstance(atom, Member):
        return gindex[atom.gamma], 1 << index[atom.state]
    return gindex[atom.gamma], sum(1 << index[q] for q in atom.values)


def compile_guard(g: Guard, index: Mapping[str, int], gindex: Mapping[str, int]) -> Callable[[tuple], bool]:
    """Closure taking one state bitmask per edge symbol.

    Conjunctions of negated memberships and disjunctions of memberships on the
    same edge symbol collapse to single mask tests.
    """
    if isinstance(g, TrueGuard):
        return lambda s: True
    if isinstance(g, Member):
        gi, bit = gindex[g.gamma], 1 << index[g.state]
        return lambda s: bool(s[gi] & bit)
    if isinstance(g, Equals):
        gi = gindex[g.gamma]
        m = sum(1 << index[q] for q in g.values)
        return lambda s: s[gi] == m
    if isinstance(g, MemberAny):
        gi = gindex[g.gamma]
        m = sum(1 << index[q] for q in g.values)
        return lambda s: bool(s[gi] & m)
    if isinstance(g, CardCmp):
        gi, k, cmp = gindex[g.gamma], g.k, COMPARATORS[g.op]
        return lambda s: cmp(s[gi].bit_count(), k)
    if isinstance(g, Not):
        if isinstance(g.arg, (Member, MemberAny)):
            gi, bit = _atom_mask(g.arg, index, gindex)
            return lambda s: not (s[gi] & bit)
        inner = compile_guard(g.arg, index, gindex)
        return lambda s: not inner(s)
    if isinstance(g, And):
        forbidden: dict[int, int] = {}
        rest = []
        for a in g.args:
            if isinstance(a, Not) and isinstance(a.arg, (Member, MemberAny)):
                gi, m = _atom_mask(a.arg, index, gindex)
                forbidden[gi] = forbidden.get(gi, 0) | m
            else:
                rest.append(compile_guard(a, index, gindex))
        checks = tuple(forbidden.items())
        parts = tuple(rest)
        if not parts:
            if len(checks) == 1:
                (gi, m), = checks
                return lambda s: not (s[gi] & m)
            return lambda s: all(not (s[gi] & m) for gi, m in checks)
        return lambda s: all(not (s[gi] & m) for gi, m in checks) and all(p(s) for p in parts)
    if isinstance(g, Or):
        wanted: dict[int, int] = {}
        rest = []
        for a in g.args:
            if isinstance(a, (Member, MemberAny)):
                gi, m = _atom_mask(a, index, gindex)
                wanted[gi] = wanted.get(gi, 0) | m
            else:
                rest.append(compile_guard(a, index, gindex))
        checks = tuple(wanted.items())
        parts = tuple(rest)
        return lambda s: any(s[gi] & m for gi, m in checks) or any(p(s) for p in parts)
    raise TypeError(f"not a guard: {g!r}")


# abstract evaluation, used to decide validity and satisfiability ------------------------


def evaluate_abstract(g: Guard, present: Mapping[str, frozenset], extra: Mapping[str, int]) -> bool:
    """Evaluate on a neighbour family described by the mentioned states present
    and a count of further, unmentioned states per edge symbol."""
    if isinstance(g, TrueGuard):
        return True
    if isinstance(g, Member):
        return g.state in present[g.gamma]
    if isinstance(g, MemberAny):
        return not g.values.isdisjoint(present[g.gamma])
    if isinstance(g, Equals):
        return extra[g.gamma] == 0 and present[g.gamma] == g.values
    if isinstance(g, CardCmp):
        return COMPARATORS[g.op](len(present[g.gamma]) + extra[g.gamma], g.k)
    if isinstance(g, Not):
        return not evaluate_abstract(g.arg, present, extra)
    if isinstance(g, And):
        return all(evaluate_abstract(a, present, extra) for a in g.args)
    if isinstance(g, Or):
        return any(evaluate_abstract(a, present, extra) for a in g.args)
    raise TypeError(f"not a guard: {g!r}")


def abstract_families(mentioned: Iterable[str], universe, gammas: Iterable[str], cap: int = 1 << 16,
                      extra_cap: Mapping[str, int] | None = None):
    """All abstract neighbour families over ``universe`` distinguishing ``mentioned``.

    ``universe`` is a set of states or a mapping from edge symbol to such a
    set.  ``extra_cap`` bounds the count of unmentioned states per edge symbol
    when larger counts cannot change the value of the guard at hand.  Yields
    ``(present, extra)`` pairs, or returns ``None`` if there would be more
    than ``cap`` of them.
    """
    gammas = sorted(gammas)
    if isinstance(universe, Mapping):
        per = {gm: frozenset(universe[gm]) for gm in gammas}
    else:
        per = dict.fromkeys(gammas, frozenset(universe))
    mentioned = frozenset(mentioned)
    options = []
    total = 1
    for gm in gammas:
        ment = sorted(mentioned & per[gm])
        others = len(per[gm]) - len(ment)
        if extra_cap is not None and gm in extra_cap:
            others = min(others, extra_cap[gm])
        total *= (1 << len(ment)) * (others + 1)
        if total > cap:
            return None
        subsets = [frozenset(c) for r in range(len(ment) + 1) for c in itertools.combinations(ment, r)]
        options.append([(sub, x) for sub in subsets for x in range(others + 1)])

    def gen():
        for combo in itertools.product(*options):
            yield ({gm: c[0] for gm, c in zip(gammas, combo)},
                   {gm: c[1] for gm, c in zip(gammas, combo)})

    return gen()


def _extra_needed(g: Guard, gammas) -> dict:
    """How many unmentioned states per edge symbol are worth distinguishing.

    Without cardinality atoms only "none" versus "some" matters; with them,
    counts beyond the largest threshold plus one behave alike.
    """
    need = dict.fromkeys(gammas, 0)
    stack = [g]
    while stack:
        h = stack.pop()
        if isinstance(h, (Not,)):
            stack.append(h.arg)
        elif isinstance(h, (And, Or)):
            stack.extend(h.args)
        elif isinstance(h, Equals) and h.gamma in need:
            need[h.gamma] = max(need[h.gamma], 1)
        elif isinstance(h, CardCmp) and h.gamma in need:
            need[h.gamma] = max(need[h.gamma], h.k + 1)
    return need


def _restrict_per_gamma(g: Guard, per: Mapping[str, frozenset]) -> Guard:
    def fix(atom):
        kept = per.get(atom.gamma)
        if kept is None:
            return atom
        if isinstance(atom, Member) and atom.state not in kept:
            return FALSE
        if isinstance(atom, Equals) and not atom.values <= kept:
            return FALSE
        if isinstance(atom, MemberAny) and not atom.values <= kept:
            return member_any(atom.values & kept, atom.gamma)
        return atom

    return map_atoms(g, fix)


def _top_conjuncts(g: Guard) -> list:
    """Conjuncts of ``g``, pushing negations through disjunctions."""
    out, stack = [], [g]
    while stack:
        h = stack.pop()
        if isinstance(h, And):
            stack.extend(h.args)
        elif isinstance(h, Not) and isinstance(h.arg, Or):
            stack.extend(neg(x) for x in h.arg.args)
        elif h != TRUE:
            out.append(h)
    return out


def satisfiable(g: Guard, universe: Iterable[str], gammas: Iterable[str], max_mentioned: int = 12):
    """Whether some neighbour family over ``universe`` satisfies ``g``.

    Returns ``True``/``False`` when decided exactly and ``None`` when the
    guard mentions too many states of the universe to enumerate.
    """
    universe = frozenset(universe)
    per = dict.fromkeys(gammas, universe)
    g = _restrict_per_gamma(g, per)
    # top-level exclusions shrink the universe of their edge symbol instead of
    # being enumerated; restricting may expose further ones
    while g != FALSE:
        rest, shrunk = [], False
        for a in _top_conjuncts(g):
            if isinstance(a, Not) and isinstance(a.arg, (Member, MemberAny)) and a.arg.gamma in per:
                per[a.arg.gamma] = per[a.arg.gamma] - a.arg.states()
                shrunk = True
            else:
                rest.append(a)
        g = conj(*rest)
        if not shrunk:
            break
        # atoms about states outside the universe are false on such families
        g = _restrict_per_gamma(g, per)
    if g == FALSE:
        return False
    mentioned = g.states()
    if len(mentioned) > max_mentioned:
        return None
    fams = abstract_families(mentioned, per, per.keys(), extra_cap=_extra_needed(g, per.keys()))
    if fams is None:
        return None
    return any(evaluate_abstract(g, p, x) for p, x in fams)


def valid(g: Guard, universe: Iterable[str], gammas: Iterable[str], max_mentioned: int = 12):
    res = satisfiable(neg(g), universe, gammas, max_mentioned)
    return None if res is None else not res


# rendering and parsing -----------------------------------------------------------------

_PREC = {Or: 1, And: 2, Not: 3}


def _suffix(gamma, implicit):
    return "" if implicit or gamma is None else f"@{gamma}"


def _render(g: Guard, implicit: bool, outer: int) -> str:
    if isinstance(g, TrueGuard):
        return "true"
    if isinstance(g, Member):
        return f"has({g.state}){_suffix(g.gamma, implicit)}"
    if isinstance(g, MemberAny):
        return "has{" + ",".join(sorted(g.values)) + "}" + _suffix(g.gamma, implicit)
    if isinstance(g, Equals):
        return "eq({" + ",".join(sorted(g.values)) + "})" + _suffix(g.gamma, implicit)
    if isinstance(g, CardCmp):
        return f"card{_suffix(g.gamma, implicit)} {g.op} {g.k}"
    prec = _PREC[type(g)]
    if isinstance(g, Not):
        text = "!" + _render(g.arg, implicit, prec)
    else:
        sep = " & " if isinstance(g, And) else " | "
        text = sep.join(_render(a, implicit, prec) for a in g.args)
    return f"({text})" if prec < outer or (prec == outer and not isinstance(g, Not)) else text


_TOKEN = re.compile(r"\s*(?:(?P<op>>=|<=|!=|[()\{\},@&|!<>=])|(?P<num>\d+(?![^(){},@&|!<>=\s]))|(?P<name>[^(){},@&|!<>=\s]+))")


def _tokenize(text: str):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise SyntaxErrorAt("unexpected character", text, pos)
        kind = m.lastgroup
        start = m.start(kind)
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str):
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
            want = value or kind
            raise SyntaxErrorAt(f"expected {want!r} but found {tok[1] or 'end of input'!r}", self.text, tok[2])
        self.i += 1
        return tok

    def parse(self) -> Guard:
        g = self.disjunction()
        self.take(kind="end")
        return g

    def disjunction(self):
        args = [self.conjunction()]
        while self.peek()[1] == "|":
            self.take("|")
            args.append(self.conjunction())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conjunction(self):
        args = [self.unary()]
        while self.peek()[1] == "&":
            self.take("&")
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def gamma_suffix(self):
        if self.peek()[1] == "@":
            self.take("@")
            return self.take(kind="name")[1]
        return None

    def unary(self):
        kind, val, pos = self.peek()
        if val == "!":
            self.take("!")
            return Not(self.unary())
        if val == "(":
            self.take("(")
            g = self.disjunction()
            self.take(")")
            return g
        if kind == "name" and val == "true":
            self.take()
            return TRUE
        if kind == "name" and val == "false":
            self.take()
            return FALSE
        if kind == "name" and val == "has":
            self.take()
            if self.peek()[1] == "{":
                values = self.state_set()
                return MemberAny(self.gamma_suffix(), values)
            self.take("(")
            q = self.take(kind="name")[1]
            self.take(")")
            return Member(q, self.gamma_suffix())
        if kind == "name" and val == "eq":
            self.take()
            self.take("(")
            values = self.state_set()
            self.take(")")
            return Equals(self.gamma_suffix(), values)
        if kind == "name" and val == "card":
            self.take()
            gm = self.gamma_suffix()
            op = self.take(kind="op")[1]
            if op == "==":
                op = "="
            if op not in COMPARATORS:
                raise SyntaxErrorAt(f"expected a comparison, found {op!r}", self.text, self.toks[self.i - 1][2])
            k = int(self.take(kind="num")[1])
            return CardCmp(gm, op, k)
        raise SyntaxErrorAt(f"unexpected {val or 'end of input'!r}", self.text, pos)

    def state_set(self):
        self.take("{")
        names = []
        if self.peek()[1] != "}":
            names.append(self.take(kind="name")[1])
            while self.peek()[1] == ",":
                self.take(",")
                names.append(self.take(kind="name")[1])
        self.take("}")
        return frozenset(names)


def parse_guard(text: str) -> Guard:
    """Parse the concrete guard syntax."""
    return _Parser(text).parse()
