"""Alternating distributed graph automata.

An automaton has existential, universal and permanent states, an initial
state per node label, guarded rules for the nonpermanent states and an
accepting family over the permanent states.  Permanent states loop on
themselves implicitly and have no rules.  Levels are never stored; they are
derived from the rules by :func:`validate`.
"""

from __future__ import annotations

import enum
import itertools
import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

from . import families as fam
from . import guards as gd
from .errors import InvalidAutomatonError, InvalidInputError
from .graphs import Alphabet, LabeledGraph


class StateKind(str, enum.Enum):
    EXISTENTIAL = "E"
    UNIVERSAL = "A"
    PERMANENT = "P"

    @classmethod
    def parse(cls, text: str) -> "StateKind":
        try:
            return cls(text)
        except ValueError:
            raise InvalidInputError(f"state kind must be E, A or P, got {text!r}") from None

    def dual(self) -> "StateKind":
        if self is StateKind.EXISTENTIAL:
            return StateKind.UNIVERSAL
        if self is StateKind.UNIVERSAL:
            return StateKind.EXISTENTIAL
        return self


E, A, P = StateKind.EXISTENTIAL, StateKind.UNIVERSAL, StateKind.PERMANENT


@dataclass(frozen=True)
class State:
    name: str
    kind: StateKind


@dataclass(frozen=True)
class Rule:
    """If ``guard`` holds, ``successors`` are among the options of ``source``."""

    source: str
    guard: gd.Guard
    successors: tuple[str, ...]


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str


@dataclass(frozen=True)
class Validation:
    ok: bool
    levels: dict
    diagnostics: tuple

    def raise_if_invalid(self):
        if not self.ok:
            raise InvalidAutomatonError(self.diagnostics)


@dataclass(frozen=True, eq=False)
class Automaton:
    sigma: Alphabet
    gamma: Alphabet
    states: tuple[State, ...]
    init: Mapping[str, str]
    rules: tuple[Rule, ...]
    accepting: fam.Family

    @classmethod
    def build(cls, sigma, gamma, states: Iterable, init: Mapping[str, str], rules: Iterable,
              accepting) -> "Automaton":
        """Friendly constructor.

        ``states`` may be ``(name, kind)`` pairs, ``rules`` may be
        ``(source, guard, successors)`` triples with guards given as text, and
        ``accepting`` may be a list of state lists or a family expression.
        """
        sigma = Alphabet.of(sigma)
        gamma = Alphabet.of(gamma)
        sts = []
        for s in states:
            if isinstance(s, State):
                sts.append(s)
            else:
                name, kind = s
                sts.append(State(name, kind if isinstance(kind, StateKind) else StateKind.parse(kind)))
        rls = []
        for r in rules:
            if isinstance(r, Rule):
                rls.append(Rule(r.source, gd.resolve_gamma(r.guard, gamma), tuple(r.successors)))
                continue
            src, guard, succ = r
            if isinstance(guard, str):
                guard = gd.parse_guard(guard)
            if isinstance(succ, str):
                succ = [succ]
            rls.append(Rule(src, gd.resolve_gamma(guard, gamma), tuple(succ)))
        if not isinstance(accepting, fam.Family):
            accepting = fam.family_from_json(accepting)
        return cls(sigma, gamma, tuple(sts), dict(init), tuple(rls), accepting)

    # basic queries ----------------------------------------------------------------

    @cached_property
    def kinds(self) -> dict[str, StateKind]:
        return {s.name: s.kind for s in self.states}

    @cached_property
    def state_names(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states)

    def kind(self, q: str) -> StateKind:
        return self.kinds[q]

    def of_kind(self, kind: StateKind) -> tuple[str, ...]:
        return tuple(s.name for s in self.states if s.kind is kind)

    @property
    def permanent(self) -> frozenset:
        return frozenset(self.of_kind(P))

    @property
    def nonpermanent(self) -> tuple[str, ...]:
        return tuple(s.name for s in self.states if s.kind is not P)

    @cached_property
    def rules_by_source(self) -> dict[str, tuple[Rule, ...]]:
        out: dict[str, list] = {s.name: [] for s in self.states}
        for r in self.rules:
            out.setdefault(r.source, []).append(r)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def validation(self) -> Validation:
        return validate(self)

    @property
    def levels(self) -> dict[str, int]:
        v = self.validation
        v.raise_if_invalid()
        return v.levels

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def length(self) -> int:
        lv = self.levels
        nonperm = [lv[q] for q in self.nonpermanent]
        return max(nonperm) + 1 if nonperm else 0

    def level(self, i: int) -> tuple[str, ...]:
        lv = self.levels
        return tuple(s.name for s in self.states if lv[s.name] == i)

    def level_kind(self, i: int) -> StateKind | None:
        names = self.level(i)
        return self.kind(names[0]) if names else None

    def level_kinds(self) -> list[StateKind]:
        return [self.level_kind(i) for i in range(self.length)]

    def accepts_set(self, f: Iterable[str]) -> bool:
        f = frozenset(f)
        return f <= self.permanent and self.accepting.accepts(f)

    @cached_property
    def engine(self):
        from ._engine import Engine
        return Engine(self)

    def __repr__(self):
        return (f"Automaton(sigma={list(self.sigma)}, gamma={list(self.gamma)}, "
                f"states={len(self.states)}, rules={len(self.rules)})")


siz = lambda a: a.size  # noqa: E731
length = lambda a: a.length  # noqa: E731


def validate(a: Automaton) -> Validation:
    """Check the level discipline and name references.

    Level 0 holds the nonpermanent states without incoming transitions; every
    transition between nonpermanent states climbs exactly one level.  A rule
    lists its successors syntactically, so an unsatisfiable guard still counts
    as a transition here.
    """
    diags: list[Diagnostic] = []

    def bad(code, msg):
        diags.append(Diagnostic(code, msg))

    names = [s.name for s in a.states]
    seen = set()
    for s in a.states:
        try:
            gd.check_name(s.name)
        except InvalidInputError as exc:
            bad("E_NAME", str(exc))
        if s.name in seen:
            bad("E_DUPLICATE_STATE", f"state {s.name!r} is declared twice")
        seen.add(s.name)
    kinds = {s.name: s.kind for s in a.states}
    perm = {q for q, k in kinds.items() if k is P}
    if not perm:
        bad("E_NO_PERMANENT", "at least one permanent state is required")

    for sym in a.sigma:
        if sym not in a.init:
            bad("E_INIT_PARTIAL", f"no initial state for label {sym!r}")
    for sym, q in a.init.items():
        if sym not in a.sigma:
            bad("E_INIT_LABEL", f"initial state given for unknown label {sym!r}")
        if q not in kinds:
            bad("E_UNKNOWN_STATE", f"initial state {q!r} is not declared")

    edges: dict[str, set] = {q: set() for q in names}
    incoming: dict[str, set] = {q: set() for q in names}
    for r in a.rules:
        if r.source not in kinds:
            bad("E_UNKNOWN_STATE", f"rule source {r.source!r} is not declared")
            continue
        if kinds[r.source] is P:
            bad("E_PERMANENT_SOURCE", f"permanent state {r.source!r} cannot have rules")
        if not r.successors:
            bad("E_EMPTY_SUCCESSORS", f"a rule of {r.source!r} has no successors")
        for q in r.successors:
            if q not in kinds:
                bad("E_UNKNOWN_STATE", f"rule successor {q!r} is not declared")
                continue
            edges[r.source].add(q)
            if kinds[r.source] is not P:
                incoming[q].add(r.source)
        for q in r.guard.states():
            if q not in kinds:
                bad("E_UNKNOWN_STATE", f"guard of {r.source!r} mentions undeclared state {q!r}")
        for g in r.guard.gammas():
            if g not in a.gamma:
                bad("E_UNKNOWN_GAMMA", f"guard of {r.source!r} uses edge symbol {g!r}")
    for q in a.accepting.states():
        if q not in kinds:
            bad("E_UNKNOWN_STATE", f"accepting family mentions undeclared state {q!r}")
        elif kinds[q] is not P:
            bad("E_ACCEPTING_NONPERMANENT", f"accepting family mentions nonpermanent state {q!r}")

    levels: dict[str, int] = {}
    nonperm = [q for q in names if kinds.get(q) is not P]
    frontier = [q for q in nonperm if not incoming[q]]
    for q in frontier:
        levels[q] = 0
    i = 0
    while frontier:
        nxt = []
        for p in frontier:
            for q in sorted(edges[p]):
                if q not in kinds or kinds[q] is P:
                    continue
                if q in levels:
                    if levels[q] != i + 1:
                        bad("E_LEVEL_CONFLICT",
                            f"{p!r} on level {i} leads to {q!r} which is on level {levels[q]}")
                    continue
                levels[q] = i + 1
                nxt.append(q)
        frontier = nxt
        i += 1
        if i > len(names) + 1:
            break
    # a predecessor seen later might sit on a different level than recorded
    for p in nonperm:
        for q in edges.get(p, ()):
            if q in levels and p in levels and kinds.get(q) is not P and levels[q] != levels[p] + 1:
                msg = f"{p!r} on level {levels[p]} leads to {q!r} on level {levels[q]}"
                if Diagnostic("E_LEVEL_CONFLICT", msg) not in diags:
                    bad("E_LEVEL_CONFLICT", msg)
    for q in nonperm:
        if q not in levels:
            bad("E_CYCLE", f"nonpermanent state {q!r} is not reachable from level 0 along rules (cycle)")
    top = max((levels[q] for q in nonperm if q in levels), default=-1) + 1
    for q in perm:
        levels[q] = top
    for sym, q in a.init.items():
        if q in kinds and kinds[q] is not P and levels.get(q) != 0:
            bad("E_INIT_LEVEL", f"initial state {q!r} for {sym!r} is not on level 0 (skipped level)")
    by_level: dict[int, set] = {}
    for q in nonperm:
        if q in levels:
            by_level.setdefault(levels[q], set()).add(kinds[q])
    for lvl, ks in sorted(by_level.items()):
        if len(ks) > 1:
            bad("E_MIXED_LEVEL", f"level {lvl} mixes existential and universal states")
    return Validation(not diags, levels, tuple(diags))


# neighbourhoods and configurations ------------------------------------------------------


def eval_guard(guard: gd.Guard, s: Mapping[str, Iterable[str]]) -> bool:
    return guard.evaluate({k: frozenset(v) for k, v in s.items()})


def local_successors(a: Automaton, q: str, s: Mapping[str, Iterable[str]]) -> frozenset:
    """The options ``delta(q, S)``; permanent states keep themselves."""
    if a.kind(q) is P:
        return frozenset([q])
    fam_s = {g: frozenset(s.get(g, ())) for g in a.gamma}
    out = set()
    for r in a.rules_by_source.get(q, ()):
        if r.guard.evaluate(fam_s):
            out.update(r.successors)
    return frozenset(out)


class ConfigurationKind(str, enum.Enum):
    PERMANENT = "permanent"
    EXISTENTIAL = "existential"
    UNIVERSAL = "universal"


@dataclass(frozen=True)
class Configuration:
    graph: LabeledGraph
    states: tuple[str, ...]

    def state_set(self) -> frozenset:
        return frozenset(self.states)

    def __str__(self):
        return "[" + ", ".join(self.states) + "]"


def configuration_kind(a: Automaton, c: Configuration) -> ConfigurationKind:
    ks = {a.kind(q) for q in c.states}
    if ks <= {P}:
        return ConfigurationKind.PERMANENT
    if E in ks and A in ks:
        raise InvalidInputError("configuration mixes existential and universal states")
    return ConfigurationKind.EXISTENTIAL if E in ks else ConfigurationKind.UNIVERSAL


def is_accepting(a: Automaton, c: Configuration) -> bool:
    return configuration_kind(a, c) is ConfigurationKind.PERMANENT and a.accepts_set(c.state_set())


def check_universe(a: Automaton, g: LabeledGraph) -> None:
    if a.gamma != g.gamma:
        raise InvalidInputError(f"graph edge symbols {list(g.gamma)} differ from automaton {list(a.gamma)}")
    for lab in g.labels:
        if lab not in a.sigma:
            raise InvalidInputError(f"node label {lab!r} is outside the automaton's alphabet")


def initial_configuration(a: Automaton, g: LabeledGraph) -> Configuration:
    check_universe(a, g)
    return Configuration(g, tuple(a.init[lab] for lab in g.labels))


def neighbour_sets(a: Automaton, c: Configuration, v: int) -> dict[str, frozenset]:
    ins = c.graph.in_lists[v]
    return {g: frozenset(c.states[u] for u in ins[i]) for i, g in enumerate(a.gamma)}


def global_successors(a: Automaton, c: Configuration) -> list[Configuration]:
    """All configurations reachable in one synchronous round, in a fixed order."""
    options = [sorted(local_successors(a, c.states[v], neighbour_sets(a, c, v))) for v in c.graph.nodes]
    if any(not o for o in options):
        return []
    return [Configuration(c.graph, tuple(p)) for p in itertools.product(*options)]


# classification --------------------------------------------------------------------------


class Variant(str, enum.Enum):
    ADGA = "ADGA"
    NDGA = "NDGA"
    DDGA = "DDGA"


@dataclass(frozen=True)
class DeterminismCheck:
    deterministic: bool | None  # None: too many families to check
    witness: tuple | None = None


def determinism_check(a: Automaton, cap: int = 1 << 16) -> DeterminismCheck:
    """At most one option for every state and level-consistent neighbour family.

    A rule with several successors must be unsatisfiable, and so must the
    conjunction of two rules of the same state with different successors.
    The witness names the state and the guard that can hold.
    """
    lv = a.levels
    perm = sorted(a.permanent)
    undecided = False
    checks = 0
    for q in a.nonpermanent:
        pool = sorted(set(a.level(lv[q])) | set(perm))
        rules = a.rules_by_source.get(q, ())
        cases = [r.guard for r in rules if len(set(r.successors)) > 1]
        cases += [gd.conj(r1.guard, r2.guard) for r1, r2 in itertools.combinations(rules, 2)
                  if set(r1.successors) != set(r2.successors)]
        for g in cases:
            checks += 1
            if checks > cap:
                return DeterminismCheck(None)
            res = gd.satisfiable(g, pool, a.gamma.symbols)
            if res is True:
                return DeterminismCheck(False, (q, g.render(len(a.gamma) == 1)))
            if res is None:
                undecided = True
    return DeterminismCheck(None if undecided else True)


def classify(a: Automaton) -> Variant:
    """ADGA if there are universal states, DDGA if additionally deterministic and
    nonblocking, NDGA otherwise.  Undecided determinism counts as NDGA."""
    a.validation.raise_if_invalid()
    if a.of_kind(A):
        return Variant.ADGA
    det = determinism_check(a)
    if det.deterministic:
        from .transforms import is_nonblocking
        if is_nonblocking(a).nonblocking:
            return Variant.DDGA
    return Variant.NDGA


# JSON ------------------------------------------------------------------------------------


def automaton_to_json(a: Automaton) -> dict:
    implicit = len(a.gamma) == 1
    return {
        "sigma": list(a.sigma),
        "gamma": list(a.gamma),
        "states": [{"name": s.name, "kind": s.kind.value} for s in a.states],
        "init": {sym: a.init[sym] for sym in a.sigma if sym in a.init},
        "rules": [{"from": r.source, "guard": r.guard.render(implicit), "to": list(r.successors)}
                  for r in a.rules],
        "accepting": fam.family_to_json(a.accepting),
    }


def automaton_from_json(data: Mapping | str, check: bool = True) -> Automaton:
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InvalidInputError(f"automaton is not valid JSON: {exc}") from exc
    try:
        states = [(s["name"], s["kind"]) for s in data["states"]]
        rules = []
        for r in data.get("rules", []):
            to = r["to"]
            rules.append((r["from"], r.get("guard", "true"), [to] if isinstance(to, str) else list(to)))
        a = Automaton.build(data["sigma"], data.get("gamma") or ["_"], states, data["init"], rules,
                            data.get("accepting", []))
    except (KeyError, TypeError) as exc:
        raise InvalidInputError(f"malformed automaton document: missing or bad field {exc}") from exc
    if check:
        a.validation.raise_if_invalid()
    return a


def rename_states(a: Automaton, mapping: Mapping[str, str]) -> Automaton:
    """Rename states; names not in ``mapping`` are kept."""
    m = lambda q: mapping.get(q, q)  # noqa: E731
    return Automaton(
        a.sigma, a.gamma,
        tuple(State(m(s.name), s.kind) for s in a.states),
        {k: m(v) for k, v in a.init.items()},
        tuple(Rule(m(r.source), gd.rename_states(r.guard, mapping), tuple(m(q) for q in r.successors))
              for r in a.rules),
        fam.rename(a.accepting, mapping),
    )
