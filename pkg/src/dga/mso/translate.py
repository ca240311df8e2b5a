"""Translation of an automaton into an equivalent sentence.

The sentence states that the automaton wins its acceptance game.  Round
``i`` of a play is described by set variables ``U{i}_{k}``, one for each
state ``q`` (with index ``k``) that can occur in that round; a node in
``U{i}_{k}`` is in state ``q`` after ``i`` rounds.  Round 0 is read off the
labels.  Moves of the automaton become existential set quantifiers,
moves of the pathfinder universal ones.
"""

from __future__ import annotations

import itertools

from .. import families as fam
from ..automaton import Automaton, StateKind
from ..errors import ResourceLimitError
from .syntax import (BOTTOM, Edge, ExistsNode, ForallNode, Formula, Implies, In, Lab, Not, conj, disj,
                     exists_all, forall_all)

FAMILY_CAP = 1 << 16


class _Rounds:
    def __init__(self, a: Automaton):
        self.a = a
        self.n = a.length
        lv = a.levels
        perm = sorted(a.permanent, key=a.state_names.index)
        self.q = []
        for i in range(self.n + 1):
            level = [s for s in a.nonpermanent if lv[s] == i] if i < self.n else []
            self.q.append(level + perm)
        self.var = {(i, q): f"U{i}_{a.state_names.index(q)}"
                    for i in range(1, self.n + 1) for q in self.q[i]}
        self.gammas = list(a.gamma)
        self.edge_gamma = {g: (None if len(self.gammas) == 1 else g) for g in self.gammas}

    def variables(self, i: int) -> list[str]:
        return [self.var[i, q] for q in self.q[i]]

    def state(self, i: int, q: str, x: str) -> Formula:
        if i == 0:
            return disj(*(Lab(b, x) for b in self.a.sigma if self.a.init[b] == q))
        if (i, q) not in self.var:
            return BOTTOM
        return In(x, self.var[i, q])

    def edge(self, u, g, v):
        return Edge(u, self.edge_gamma[g], v)

    def neigh(self, i: int, p: str, s: tuple, v: str) -> Formula:
        """``v`` is in state ``p`` and sees exactly the states ``s[g]`` along each ``g``."""
        seen = [ExistsNode("u", conj(self.state(i, r, "u"), self.edge("u", g, v)))
                for g, sg in zip(self.gammas, s) for r in sg]
        only = ForallNode("u", conj(*(Implies(self.edge("u", g, v), disj(*(self.state(i, r, "u") for r in sg)))
                                      for g, sg in zip(self.gammas, s))))
        return conj(self.state(i, p, v), *seen, only)

    def families(self, i: int):
        states = self.q[i]
        subsets = [tuple(c) for k in range(len(states) + 1) for c in itertools.combinations(states, k)]
        total = len(subsets) ** len(self.gammas) * len(states)
        if total > FAMILY_CAP:
            raise ResourceLimitError(f"round {i} would need {total} neighbourhood cases")
        return itertools.product(subsets, repeat=len(self.gammas))

    def legal(self, i: int) -> Formula:
        """Round ``i`` is a legal successor of round ``i - 1``."""
        eng = self.a.engine
        v = "v"
        unique = [Not(conj(self.state(i, q, v), self.state(i, r, v)))
                  for q, r in itertools.combinations(self.q[i], 2)]
        moves = []
        for s in self.families(i - 1):
            masks = tuple(sum(1 << eng.index[r] for r in sg) for sg in s)
            for p in self.q[i - 1]:
                succ = [eng.names[k] for k in eng.options(eng.index[p], masks)]
                moves.append(Implies(self.neigh(i - 1, p, s, v), disj(*(self.state(i, q, v) for q in succ))))
        # uniqueness first: it rejects most candidate assignments cheaply
        return ForallNode(v, conj(*unique, *moves))

    def win_last(self) -> Formula:
        n = self.n
        perm = self.q[n]
        out = []
        for f in fam.expand(self.a.accepting, perm, FAMILY_CAP):
            members = sorted(f, key=perm.index)
            out.append(conj(*(ExistsNode("v", self.state(n, q, "v")) for q in members),
                            ForallNode("v", disj(*(self.state(n, q, "v") for q in members)))))
        return disj(*out)


def automaton_to_sentence(a: Automaton) -> Formula:
    """A sentence that holds in a graph iff ``a`` accepts it."""
    r = _Rounds(a)
    win = r.win_last()
    for i in range(r.n, 0, -1):
        if a.level_kind(i - 1) is StateKind.EXISTENTIAL:
            win = exists_all(r.variables(i), conj(r.legal(i), win))
        else:
            win = forall_all(r.variables(i), Implies(r.legal(i), win))
    return win
