"""Integer-indexed form of an automaton used by the solvers.

States become indices, neighbour families become tuples of bitmasks and the
options of a state for a given family are memoised.
"""

from __future__ import annotations

import itertools
from functools import cached_property

from . import families as fam
from . import guards as gd


class Engine:
    def __init__(self, a):
        a.validation.raise_if_invalid()
        self.automaton = a
        self.names = a.state_names
        self.index = {q: i for i, q in enumerate(self.names)}
        gindex = {g: i for i, g in enumerate(a.gamma)}
        self.n_gamma = len(a.gamma)
        self.kinds = tuple(s.kind.value for s in a.states)
        self.existential_mask = sum(1 << i for i, k in enumerate(self.kinds) if k == "E")
        self.universal_mask = sum(1 << i for i, k in enumerate(self.kinds) if k == "A")
        self.permanent_mask = sum(1 << i for i, k in enumerate(self.kinds) if k == "P")
        self.init = {sym: self.index[q] for sym, q in a.init.items()}
        self.rules = [[] for _ in self.names]
        for r in a.rules:
            fn = gd.compile_guard(r.guard, self.index, gindex)
            self.rules[self.index[r.source]].append((fn, tuple(sorted(self.index[q] for q in r.successors))))
        self._accept = fam.compile_family(a.accepting, self.index)
        self._accept_bounds = fam.compile_family_bounds(a.accepting, self.index)
        self._cache: dict = {}
        self._forced: dict = {}
        self._final: dict = {}

    @cached_property
    def outlook(self):
        """Per state: the permanent states it can still reach, and whether
        some state it can reach might have no applicable rule.

        Permanent states reach themselves.  A state counts as safe when the
        disjunction of its guards is provably valid over the states of its
        level and the permanent ones.
        """
        a = self.automaton
        levels = a.levels
        perm = [q for q in self.names if a.kind(q).value == "P"]
        by_level: dict = {}
        for q in a.nonpermanent:
            by_level.setdefault(levels[q], []).append(q)
        succ = [set() for _ in self.names]
        stuck = [False] * len(self.names)
        for q in a.nonpermanent:
            i = self.index[q]
            rules = a.rules_by_source.get(q, ())
            for r in rules:
                succ[i].update(self.index[p] for p in r.successors)
            pool = by_level[levels[q]] + perm
            stuck[i] = gd.valid(gd.disj(*(r.guard for r in rules)), pool, a.gamma) is not True
        reach = [0] * len(self.names)
        unsafe = [False] * len(self.names)
        # successors sit on higher levels, so process levels top down
        order = sorted(range(len(self.names)),
                       key=lambda i: (0, 0) if self.kinds[i] == "P" else (1, -levels[self.names[i]]))
        for i in order:
            if self.kinds[i] == "P":
                reach[i] = 1 << i
                continue
            m, bad = 0, stuck[i]
            for j in succ[i]:
                m |= reach[j]
                bad = bad or unsafe[j]
            reach[i], unsafe[i] = m, bad
        return tuple(reach), tuple(unsafe)

    def forced(self, config: tuple):
        """The winner from ``config`` if it no longer depends on the play.

        ``True`` or ``False`` when every final configuration reachable from
        ``config`` is accepting, respectively rejecting, and no node can get
        blocked on the way; ``None`` otherwise.  Final configurations are
        judged directly.
        """
        return self.forced_mask(self.mask(config))

    def forced_mask(self, m: int):
        hit = self._forced.get(m, 0)
        if hit != 0:
            return hit
        if not m & ~self.permanent_mask:
            res = self._accept(m)
        else:
            reach, unsafe = self.outlook
            rs = set()
            res = None
            q, rest = 0, m
            while rest:
                if rest & 1:
                    if unsafe[q]:
                        break
                    rs.add(reach[q])
                rest >>= 1
                q += 1
            else:
                res = self._accept_bounds(rs)
        self._forced[m] = res
        return res

    @cached_property
    def rounds(self) -> tuple:
        """Level of each state; permanent states get -1."""
        lv = self.automaton.levels
        return tuple(-1 if k == "P" else lv[q] for q, k in zip(self.names, self.kinds))

    def round_of(self, config: tuple) -> int:
        rounds = self.rounds
        return max(rounds[q] for q in config)

    def options(self, q: int, s: tuple) -> tuple:
        key = (q, s)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if self.kinds[q] == "P":
            res = (q,)
        else:
            out = set()
            for fn, succ in self.rules[q]:
                if fn(s):
                    out.update(succ)
            res = tuple(sorted(out))
        self._cache[key] = res
        return res

    def initial(self, graph) -> tuple:
        return tuple(self.init[lab] for lab in graph.labels)

    def families(self, graph, config: tuple) -> list:
        out = []
        for per in graph.in_lists:
            s = []
            for ins in per:
                m = 0
                for u in ins:
                    m |= 1 << config[u]
                s.append(m)
            out.append(tuple(s))
        return out

    def choices(self, graph, config: tuple):
        """Per-node options, or ``None`` if some node is blocked."""
        opts = []
        for v, s in enumerate(self.families(graph, config)):
            o = self.options(config[v], s)
            if not o:
                return None
            opts.append(o)
        return opts

    def successors(self, graph, config: tuple) -> list:
        opts = self.choices(graph, config)
        if opts is None:
            return []
        return list(itertools.product(*opts))

    def mask(self, config: tuple) -> int:
        m = 0
        for q in config:
            m |= 1 << q
        return m

    def kind(self, config: tuple) -> str:
        """'E', 'A' or 'P' for existential, universal or permanent configurations."""
        return self.kind_of_mask(self.mask(config))

    def kind_of_mask(self, m: int) -> str:
        if m & self.existential_mask:
            return "E"
        if m & self.universal_mask:
            return "A"
        return "P"

    def accepting(self, config: tuple) -> bool:
        m = self.mask(config)
        return not (m & ~self.permanent_mask) and self._accept(m)

    def accepts_mask(self, m: int) -> bool:
        hit = self._final.get(m)
        if hit is None:
            hit = self._final[m] = self._accept(m)
        return hit

    def names_of(self, config: tuple) -> tuple:
        return tuple(self.names[q] for q in config)
