"""Constructions on automata: normal forms, dualisation and closure operations.

Every construction returns the new automaton together with a
:class:`TransformReport` recording sizes, lengths and the fresh state names.
Fresh names carry a ``#`` so they cannot clash with the usual state names.
"""

from __future__ import annotations

import dataclasses
import enum
import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from . import families as fam
from . import guards as gd
from .automaton import (A, E, P, Automaton, Rule, State, Variant, classify, rename_states)
from .errors import AlphabetMismatchError, ContractError, InvalidInputError, ResourceLimitError
from .graphs import Alphabet, enumerate_graphs


@dataclass
class TransformReport:
    construction: str
    input_sizes: tuple
    input_lengths: tuple
    output_size: int
    output_length: int
    fresh_states: tuple = ()
    notes: tuple = ()
    steps: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict, repr=False)

    def to_json(self) -> dict:
        out = {
            "construction": self.construction,
            "input_sizes": list(self.input_sizes),
            "input_lengths": list(self.input_lengths),
            "output_size": self.output_size,
            "output_length": self.output_length,
            "fresh_states": list(self.fresh_states),
        }
        if self.notes:
            out["notes"] = list(self.notes)
        if self.steps:
            out["steps"] = [s.to_json() if isinstance(s, TransformReport) else s for s in self.steps]
        return out


def _report(name, inputs, out, fresh=(), notes=()):
    return TransformReport(name, tuple(a.size for a in inputs), tuple(a.length for a in inputs),
                           out.size, out.length, tuple(fresh), tuple(notes))


class _Names:
    """Supplier of names not yet in use."""

    def __init__(self, taken: Iterable[str]):
        self.taken = set(taken)

    def __call__(self, base: str) -> str:
        name = base
        k = 1
        while name in self.taken:
            name = f"{base}#{k}"
            k += 1
        self.taken.add(name)
        return name


def _replace(a: Automaton, **kw) -> Automaton:
    return dataclasses.replace(a, **kw)


# nonblocking -----------------------------------------------------------------------------


def make_nonblocking(a: Automaton) -> tuple[Automaton, TransformReport]:
    """Route every blocked state into a permanent stop state of its level.

    A configuration that would block ends up containing stop states; it is
    accepting iff the lowest stop level present is universal.  When all
    nonpermanent levels have the same kind a single stop state suffices.
    """
    lv = a.levels
    n_levels = a.length
    if n_levels == 0:
        out = _replace(a)
        return out, _report("nonblocking", [a], out)
    fresh = _Names(a.state_names)
    merged = not a.of_kind(E) or not a.of_kind(A)
    if merged:
        single = fresh("#stop")
        stops = {i: single for i in range(n_levels)}
    else:
        stops = {i: fresh(f"#stop{i}") for i in range(n_levels)}
    stop_names = sorted(set(stops.values()))
    dom = gd.avoid(stop_names, a.gamma)
    rules = []
    for q in a.nonpermanent:
        own = a.rules_by_source.get(q, ())
        for r in own:
            rules.append(Rule(q, gd.conj(r.guard, dom), r.successors))
        covered = gd.conj(dom, gd.disj(*(r.guard for r in own)))
        rules.append(Rule(q, gd.neg(covered), (stops[lv[q]],)))
    kinds = a.level_kinds()
    old = fam.fand(fam.Within(a.permanent), a.accepting)
    clauses = []
    if merged:
        if not a.of_kind(E):
            clauses.append(fam.present(single))
    else:
        for i in range(n_levels):
            if kinds[i] is A:
                clauses.append(fam.fand(fam.present(stops[i]), *(fam.absent(stops[j]) for j in range(i))))
    states = a.states + tuple(State(s, P) for s in stop_names)
    out = _replace(a, states=states, rules=tuple(rules), accepting=fam.f_or(old, *clauses))
    return out, _report("nonblocking", [a], out, stop_names)


class NonblockingStatus(str, enum.Enum):
    SYNTACTIC = "syntactically-complete"
    UP_TO_CAP = "nonblocking-up-to-cap"
    BLOCKING = "blocking"


@dataclass(frozen=True)
class NonblockingReport:
    status: NonblockingStatus
    cap: int | None = None
    witness: tuple | None = None  # (graph, configuration state names)

    @property
    def nonblocking(self) -> bool:
        return self.status is not NonblockingStatus.BLOCKING


def syntactically_complete(a: Automaton) -> bool | None:
    """Whether every nonpermanent state has an option for every neighbour family."""
    universe = a.state_names
    verdict = True
    for q in a.nonpermanent:
        cover = gd.disj(*(r.guard for r in a.rules_by_source.get(q, ())))
        res = gd.valid(cover, universe, a.gamma.symbols)
        if res is False:
            return False
        if res is None:
            verdict = None
    return verdict


def is_nonblocking(a: Automaton, universe_cap: int = 3) -> NonblockingReport:
    """Syntactic totality if it can be shown, otherwise exhaustive search for a
    blocked reachable configuration on all graphs with at most ``universe_cap`` nodes."""
    if syntactically_complete(a):
        return NonblockingReport(NonblockingStatus.SYNTACTIC)
    eng = a.engine
    try:
        graphs = list(enumerate_graphs(universe_cap, a.sigma, a.gamma))
    except ResourceLimitError:
        graphs = []
        for n in range(1, universe_cap + 1):
            try:
                graphs.extend(enumerate_graphs(n, a.sigma, a.gamma, n_min=n))
            except ResourceLimitError:
                break
    for g in graphs:
        seen = set()
        stack = [eng.initial(g)]
        while stack:
            c = stack.pop()
            if c in seen:
                continue
            seen.add(c)
            if eng.kind(c) == "P":
                continue
            succ = eng.successors(g, c)
            if not succ:
                return NonblockingReport(NonblockingStatus.BLOCKING, universe_cap, (g, eng.names_of(c)))
            stack.extend(succ)
    return NonblockingReport(NonblockingStatus.UP_TO_CAP, universe_cap)


# trimming --------------------------------------------------------------------------------


def potentially_reachable(a: Automaton) -> tuple[frozenset, frozenset]:
    """Least set closed under initial states and satisfiable rules.

    A rule of ``p`` counts when its guard holds for some neighbour family drawn
    from the reachable states of ``p``'s level and the reachable permanent
    states.  Guards too large to decide are assumed satisfiable.
    Returns the reachable states and the indices of the rules that can fire.
    """
    lv = a.levels
    perm = a.permanent
    reach = set(a.init.values())
    fired = set()
    changed = True
    while changed:
        changed = False
        for idx, r in enumerate(a.rules):
            if idx in fired or r.source not in reach:
                continue
            pool = frozenset(q for q in reach if q in perm or lv[q] == lv[r.source])
            if gd.satisfiable(r.guard, pool, a.gamma.symbols) is False:
                continue
            fired.add(idx)
            for q in r.successors:
                if q not in reach:
                    reach.add(q)
                    changed = True
    return frozenset(reach), frozenset(fired)


def trim(a: Automaton) -> tuple[Automaton, TransformReport]:
    reach, fired = potentially_reachable(a)
    notes = []
    if not reach & a.permanent:
        # keep one permanent state so the result stays well-formed
        keep = next(s.name for s in a.states if s.kind is P)
        reach = reach | {keep}
        notes.append(f"kept unreachable permanent state {keep} to stay well-formed")
    states = tuple(s for s in a.states if s.name in reach)
    rules = []
    for idx, r in enumerate(a.rules):
        if idx not in fired:
            continue
        g = gd.restrict_states(r.guard, reach)
        if g == gd.FALSE:
            continue
        rules.append(Rule(r.source, g, tuple(q for q in r.successors if q in reach)))
    kept_perm = frozenset(s.name for s in states if s.kind is P)
    out = _replace(a, states=states, rules=tuple(rules), accepting=fam.restrict(a.accepting, kept_perm))
    return out, _report("trim", [a], out, notes=notes)


# alternating normal form -----------------------------------------------------------------


def is_anf(a: Automaton) -> bool:
    ks = a.level_kinds()
    return all(ks[i] != ks[i + 1] for i in range(len(ks) - 1))


def to_anf(a: Automaton) -> tuple[Automaton, TransformReport]:
    """Insert a copy of the opposite kind between adjacent nonpermanent levels of
    equal kind.  The copies just pass the state on."""
    lv = a.levels
    kinds = a.level_kinds()
    dup = {i + 1 for i in range(len(kinds) - 1) if kinds[i] == kinds[i + 1]}
    if not dup:
        out = _replace(a)
        return out, _report("anf", [a], out)
    fresh = _Names(a.state_names)
    copies = {q: fresh(f"{q}#c") for s in a.states if s.kind is not P and lv[s.name] in dup for q in [s.name]}
    rules = []
    for r in a.rules:
        if lv[r.source] + 1 in dup:
            rules.append(Rule(r.source, r.guard, tuple(copies.get(q, q) for q in r.successors)))
        else:
            rules.append(r)
    new_states = []
    for s in a.states:
        new_states.append(s)
    for q, c in copies.items():
        new_states.append(State(c, a.kind(q).dual()))
        rules.append(Rule(c, gd.TRUE, (q,)))
    out = _replace(a, states=tuple(new_states), rules=tuple(rules))
    return out, _report("anf", [a], out, list(copies.values()))


def insert_leading_level(a: Automaton) -> tuple[Automaton, TransformReport]:
    """Prepend a level of the kind opposite to level 0 that just passes states on."""
    if a.length == 0:
        raise ContractError("an automaton without nonpermanent levels has no level 0 to precede")
    kind = a.level_kind(0).dual()
    fresh = _Names(a.state_names)
    copies = {q: fresh(f"{q}#d") for q in a.level(0)}
    init = {sym: copies.get(q, q) for sym, q in a.init.items()}
    states = tuple(State(c, kind) for c in copies.values()) + a.states
    rules = tuple(Rule(c, gd.TRUE, (q,)) for q, c in copies.items()) + a.rules
    out = _replace(a, states=states, init=init, rules=rules)
    return out, _report("leading-level", [a], out, list(copies.values()))


# dualisation -----------------------------------------------------------------------------


def dual(a: Automaton) -> tuple[Automaton, TransformReport]:
    """Swap existential and universal states and complement the accepting family."""
    states = tuple(State(s.name, s.kind.dual()) for s in a.states)
    out = _replace(a, states=states, accepting=fam.fneg(a.accepting))
    return out, _report("dual", [a], out)


def complement_ddga(a: Automaton) -> tuple[Automaton, TransformReport]:
    if classify(a) is not Variant.DDGA:
        raise ContractError("complement by flipping the accepting family needs a deterministic automaton")
    out = _replace(a, accepting=fam.fneg(a.accepting))
    return out, _report("complement-ddga", [a], out)


# union and intersection ------------------------------------------------------------------


def _same_universe(a1: Automaton, a2: Automaton) -> None:
    if a1.sigma != a2.sigma or a1.gamma != a2.gamma:
        raise AlphabetMismatchError(
            f"automata over distinct universes: {a1.sigma!r}/{a1.gamma!r} vs {a2.sigma!r}/{a2.gamma!r}")


def normalize(a: Automaton) -> tuple[Automaton, list]:
    """Nonblocking, then trimmed, then in alternating normal form."""
    b, r1 = make_nonblocking(a)
    c, r2 = trim(b)
    d, r3 = to_anf(c)
    return d, [r1, r2, r3]


def harmonize(a1: Automaton, a2: Automaton) -> tuple[Automaton, list]:
    """Make the level kinds of ``a2`` agree with ``a1`` on their common levels.

    Both inputs must be in alternating normal form; at most one leading level
    is inserted into ``a2``.
    """
    k1, k2 = a1.level_kinds(), a2.level_kinds()
    steps = []
    if min(len(k1), len(k2)) > 0 and k1[0] != k2[0]:
        a2, rep = insert_leading_level(a2)
        steps.append(rep)
        k2 = a2.level_kinds()
    m = min(len(k1), len(k2))
    if k1[:m] != k2[:m]:
        raise ContractError("level kinds cannot be harmonised; are both automata in alternating normal form?")
    return a2, steps


def _disjoint(a1: Automaton, a2: Automaton) -> tuple[Automaton, Automaton]:
    if set(a1.state_names) & set(a2.state_names):
        a1 = rename_states(a1, {q: f"{q}#1" for q in a1.state_names})
        a2 = rename_states(a2, {q: f"{q}#2" for q in a2.state_names})
    return a1, a2


def _combine(a1: Automaton, a2: Automaton, universal: bool) -> tuple[Automaton, TransformReport]:
    _same_universe(a1, a2)
    name = "intersection" if universal else "union"
    n1, steps1 = normalize(a1)
    n2, steps2 = normalize(a2)
    n2, steps3 = harmonize(n1, n2)
    n1, n2 = _disjoint(n1, n2)
    fresh = _Names(set(n1.state_names) | set(n2.state_names))
    top_kind = A if universal else E
    tops = {sym: fresh(f"#{'i' if universal else 'u'}{k}") for k, sym in enumerate(n1.sigma)}
    sink = fresh("#acc" if universal else "#rej")
    q_top = frozenset(tops.values())
    q1, q2 = frozenset(n1.state_names), frozenset(n2.state_names)
    everything = q_top | q1 | q2 | {sink}
    gam = n1.gamma.symbols
    dom_top = gd.avoid(everything - q_top, gam)
    dom1 = gd.avoid(everything - q1, gam)
    dom2 = gd.avoid(everything - q2, gam)
    rules = []
    for sym, t in tops.items():
        rules.append(Rule(t, dom_top, (n1.init[sym], n2.init[sym])))
        rules.append(Rule(t, gd.neg(dom_top), (sink,)))
    for comp, dom in ((n1, dom1), (n2, dom2)):
        for q in comp.nonpermanent:
            for r in comp.rules_by_source.get(q, ()):
                rules.append(Rule(q, gd.conj(r.guard, dom), r.successors))
            rules.append(Rule(q, gd.neg(dom), (sink,)))
    states = tuple(State(t, top_kind) for t in tops.values()) + n1.states + n2.states + (State(sink, P),)
    f1 = fam.fand(fam.Within(n1.permanent), n1.accepting)
    f2 = fam.fand(fam.Within(n2.permanent), n2.accepting)
    if universal:
        impure = fam.fneg(fam.f_or(fam.Within(n1.permanent), fam.Within(n2.permanent)))
        accepting = fam.f_or(f1, f2, impure)
    else:
        accepting = fam.f_or(f1, f2)
    out = Automaton(n1.sigma, n1.gamma, states, dict(tops), tuple(rules), accepting)
    rep = TransformReport(name, (a1.size, a2.size), (a1.length, a2.length), out.size, out.length,
                          tuple(tops.values()) + (sink,))
    rep.steps = steps1 + steps2 + steps3
    rep.notes = (f"normalised sizes {n1.size} and {n2.size}, lengths {n1.length} and {n2.length}",)
    rep.artifacts["normalized"] = (n1, n2)
    return out, rep


def union(a1: Automaton, a2: Automaton) -> tuple[Automaton, TransformReport]:
    """Nodes first agree existentially on which automaton to simulate; a node that
    sees states of the other automaton rejects."""
    return _combine(a1, a2, universal=False)


def intersection(a1: Automaton, a2: Automaton) -> tuple[Automaton, TransformReport]:
    """Dual of :func:`union`: the pathfinder picks the automaton, mixtures accept."""
    return _combine(a1, a2, universal=True)


# alphabets -------------------------------------------------------------------------------


def project(a: Automaton, h: Mapping[str, str], sigma_prime: Iterable[str] | None = None
            ) -> tuple[Automaton, TransformReport]:
    """Automaton for the image of the language under the relabeling ``h``.

    Each node guesses a preimage of its label in a new existential round.
    """
    missing = [x for x in a.sigma if x not in h]
    if missing:
        raise InvalidInputError(f"projection map is undefined on {missing}")
    sig2 = Alphabet.of(sigma_prime if sigma_prime is not None else sorted(set(h[x] for x in a.sigma)))
    for x in a.sigma:
        if h[x] not in sig2:
            raise InvalidInputError(f"projection sends {x!r} to {h[x]!r} outside the target alphabet")
    t, rep_trim = trim(a)
    fresh = _Names(t.state_names)
    tops = {b: fresh(f"#p{k}") for k, b in enumerate(sig2)}
    gam = t.gamma.symbols
    dom_top = gd.avoid(t.state_names, gam)
    dom_old = gd.avoid(tops.values(), gam)
    rules = []
    for b, q in tops.items():
        pre = sorted({t.init[x] for x in t.sigma if h[x] == b})
        if pre:
            rules.append(Rule(q, dom_top, tuple(pre)))
    for r in t.rules:
        rules.append(Rule(r.source, gd.conj(r.guard, dom_old), r.successors))
    states = tuple(State(q, E) for q in tops.values()) + t.states
    out = Automaton(sig2, t.gamma, states, dict(tops), tuple(rules), t.accepting)
    rep = _report("project", [a], out, tops.values())
    rep.steps = [rep_trim]
    rep.notes = (f"trimmed input size {t.size}, length {t.length}",)
    rep.artifacts["trimmed"] = t
    return out, rep


def closure_law(rep: TransformReport, sigma_size: int | None = None) -> bool | None:
    """Check the exact size and length equalities of a closure construction.

    Union and intersection are measured against their normalised inputs and
    projection against its trimmed input, as the constructions assume.  A
    product has at most one state per pair of states of its nonblocking
    inputs and keeps their length.  Returns
    ``None`` for reports without such a law.
    """
    if rep.construction in ("union", "intersection"):
        n1, n2 = rep.artifacts["normalized"]
        return (rep.output_size == n1.size + n2.size + len(n1.sigma) + 1
                and rep.output_length == max(n1.length, n2.length) + 1)
    if rep.construction == "project":
        t = rep.artifacts["trimmed"]
        k = len(rep.fresh_states) if sigma_size is None else sigma_size
        return rep.output_size == t.size + k and rep.output_length == t.length + 1
    if rep.construction in ("dual", "complement-ddga"):
        return rep.output_size == rep.input_sizes[0] and rep.output_length == rep.input_lengths[0]
    if rep.construction.startswith("product-"):
        n1, n2 = rep.artifacts["normalized"]
        return (rep.output_size <= n1.size * n2.size
                and rep.output_length == max(n1.length, n2.length))
    return None


def extend_alphabet(a: Automaton, embed: Mapping[str, str]) -> tuple[Automaton, TransformReport]:
    """Automaton over the keys of ``embed`` that treats a label ``x`` like ``embed[x]``."""
    for x, y in embed.items():
        if y not in a.sigma:
            raise InvalidInputError(f"label {x!r} maps to {y!r}, which the automaton does not know")
    out = _replace(a, sigma=Alphabet.of(sorted(embed)), init={x: a.init[y] for x, y in embed.items()})
    return out, _report("extend-alphabet", [a], out)


# products of nondeterministic automata -------------------------------------------------------


def _lift_guard(g: gd.Guard, groups: Mapping[str, list], cap: int = 1 << 12) -> gd.Guard:
    """Translate a guard about one component to a guard about pair states."""
    comp_states = sorted(groups)
    all_pairs = sorted(p for ps in groups.values() for p in ps)

    def member(q, gamma):
        return gd.disj(*(gd.Member(p, gamma) for p in groups.get(q, [])))

    def equals(values, gamma):
        inside = {p for q in values for p in groups.get(q, [])}
        if any(not groups.get(q) for q in values):
            return gd.FALSE
        return gd.conj(*(member(q, gamma) for q in sorted(values)),
                       gd.avoid([p for p in all_pairs if p not in inside], [gamma]))

    def fix(atom):
        if isinstance(atom, gd.Member):
            return member(atom.state, atom.gamma)
        if isinstance(atom, gd.MemberAny):
            return gd.member_any([p for q in atom.values for p in groups.get(q, [])], atom.gamma)
        if isinstance(atom, gd.Equals):
            return equals(atom.values, atom.gamma)
        if isinstance(atom, gd.CardCmp):
            if (1 << len(comp_states)) > cap:
                raise ResourceLimitError("cardinality guard over too many states to lift into a product")
            cmp = gd.COMPARATORS[atom.op]
            options = [equals(frozenset(c), atom.gamma)
                       for r in range(len(comp_states) + 1) if cmp(r, atom.k)
                       for c in itertools.combinations(comp_states, r)]
            return gd.disj(*options)
        return atom

    return gd.map_atoms(g, fix)


def product(a1: Automaton, a2: Automaton, mode: str) -> tuple[Automaton, TransformReport]:
    """Synchronous product of two nondeterministic automata.

    ``mode`` is ``"and"`` or ``"or"`` and decides how the accepting families are
    combined.  Only pairs whose nonpermanent components sit on the same level
    are states, so the level discipline carries over.
    """
    if mode not in ("and", "or"):
        raise InvalidInputError("product mode must be 'and' or 'or'")
    _same_universe(a1, a2)
    for x in (a1, a2):
        if x.of_kind(A):
            raise ContractError("products are defined for automata without universal states")
    b1, r1 = make_nonblocking(a1)
    b2, r2 = make_nonblocking(a2)
    lv1, lv2 = b1.levels, b2.levels

    def pname(q1, q2):
        return f"[{q1}*{q2}]"

    pairs = []
    for s1 in b1.states:
        for s2 in b2.states:
            if s1.kind is P or s2.kind is P or lv1[s1.name] == lv2[s2.name]:
                pairs.append((s1.name, s2.name))
    pair_set = set(pairs)
    groups1: dict = {q: [] for q in b1.state_names}
    groups2: dict = {q: [] for q in b2.state_names}
    for q1, q2 in pairs:
        groups1[q1].append(pname(q1, q2))
        groups2[q2].append(pname(q1, q2))
    states = []
    rules = []
    for q1, q2 in pairs:
        perm = b1.kind(q1) is P and b2.kind(q2) is P
        states.append(State(pname(q1, q2), P if perm else E))
        if perm:
            continue
        rs1 = b1.rules_by_source.get(q1, ()) if b1.kind(q1) is not P else (Rule(q1, gd.TRUE, (q1,)),)
        rs2 = b2.rules_by_source.get(q2, ()) if b2.kind(q2) is not P else (Rule(q2, gd.TRUE, (q2,)),)
        for x in rs1:
            g1 = _lift_guard(x.guard, groups1)
            for y in rs2:
                succ = tuple(pname(s, t) for s in x.successors for t in y.successors if (s, t) in pair_set)
                if not succ:
                    continue
                g = gd.conj(g1, _lift_guard(y.guard, groups2))
                if g == gd.FALSE:
                    continue
                rules.append(Rule(pname(q1, q2), g, succ))
    perm_pairs = {pname(q1, q2) for q1, q2 in pairs if b1.kind(q1) is P and b2.kind(q2) is P}
    f1 = fam.map_states(fam.fand(fam.Within(b1.permanent), b1.accepting),
                        lambda q: [p for p in groups1.get(q, []) if p in perm_pairs])
    f2 = fam.map_states(fam.fand(fam.Within(b2.permanent), b2.accepting),
                        lambda q: [p for p in groups2.get(q, []) if p in perm_pairs])
    accepting = fam.fand(f1, f2) if mode == "and" else fam.f_or(f1, f2)
    init = {sym: pname(b1.init[sym], b2.init[sym]) for sym in b1.sigma}
    out = Automaton(b1.sigma, b1.gamma, tuple(states), init, tuple(rules), accepting)
    rep = _report(f"product-{mode}", [a1, a2], out)
    rep.steps = [r1, r2]
    rep.artifacts["normalized"] = (b1, b2)
    return out, rep


# miscellany ------------------------------------------------------------------------------


def compact_names(a: Automaton, prefix: str = "s") -> Automaton:
    """Rename the states to ``prefix0, prefix1, ...`` in declaration order."""
    return rename_states(a, {q: f"{prefix}{i}" for i, q in enumerate(a.state_names)})


OPERATIONS = ("dual", "nonblocking", "trim", "anf", "union", "intersection", "project",
              "product-and", "product-or", "complement-ddga")
