"""Compilation of formulas into alternating distributed graph automata.

A formula with free variables ``V`` becomes an automaton over the pair
alphabet ``Sigma x 2^V`` that accepts an encoded graph exactly when the
encoded assignment satisfies the formula.  Atoms have small hand-built
automata, connectives use the closure constructions of
:mod:`dga.transforms` and quantifiers use projection.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .. import families as fam
from .. import guards as gd
from .. import transforms as tf
from ..automaton import Automaton, Rule, State, StateKind
from ..errors import InvalidInputError
from ..graphs import Alphabet
from . import syntax as sx
from .semantics import pair_alphabet, pair_label, split_label

E, A, P = StateKind.EXISTENTIAL, StateKind.UNIVERSAL, StateKind.PERMANENT

_LOCAL_F = fam.explicit([["yes"], ["yes", "maybe"]])
_ONE_F = fam.parse_family("(in(black) & !in(white)) | (!in(black) & in(white))")


@dataclass
class CompileStep:
    operation: str
    formula: str
    size: int
    length: int
    report: tf.TransformReport | None = None

    def to_json(self) -> dict:
        out = {"operation": self.operation, "formula": self.formula, "size": self.size, "length": self.length}
        if self.report is not None:
            out["report"] = self.report.to_json()
        return out


@dataclass
class CompileReport:
    formula: str
    free: tuple
    output_size: int = 0
    output_length: int = 0
    steps: list = field(default_factory=list)

    def laws_hold(self) -> bool:
        """Every closure step meets its size and length equalities."""
        for st in self.steps:
            if st.report is not None and tf.closure_law(st.report) is False:
                return False
        return True

    def to_json(self) -> dict:
        return {"formula": self.formula, "free": list(self.free), "output_size": self.output_size,
                "output_length": self.output_length, "steps": [s.to_json() for s in self.steps]}


def _subsets(vs):
    vs = sorted(vs)
    return [frozenset(c) for k in range(len(vs) + 1) for c in itertools.combinations(vs, k)]


def base_automaton(atom: sx.Formula, sigma: Alphabet, gamma: Alphabet) -> Automaton:
    """The automaton of an atomic formula over ``Sigma x 2^free(atom)``."""
    sigma, gamma = Alphabet.of(sigma), Alphabet.of(gamma)
    states = [State(q, P) for q in ("yes", "no", "maybe")]

    def local(variables, answer):
        init = {pair_label(a, m): answer(a, m) for a in sigma for m in _subsets(variables)}
        return Automaton(pair_alphabet(sigma, variables), gamma, tuple(states), init, (), _LOCAL_F)

    if isinstance(atom, sx.Lab):
        x, b = atom.var, atom.label
        return local([x], lambda a, m: ("yes" if a == b else "no") if m == {x} else "maybe")
    if isinstance(atom, sx.Eq):
        x, y = atom.left, atom.right
        if x == y:
            return local([x], lambda a, m: "yes" if m == {x} else "maybe")
        return local([x, y], lambda a, m: "yes" if m == {x, y} else ("no" if m in ({x}, {y}) else "maybe"))
    if isinstance(atom, sx.In):
        x, big = atom.var, atom.setvar
        return local([x, big], lambda a, m: "yes" if m == {x, big} else ("no" if m == {x} else "maybe"))
    if isinstance(atom, sx.Edge):
        tau = atom.gamma
        if tau is None:
            if len(gamma) != 1:
                raise InvalidInputError("an edge atom without symbol needs a single edge symbol")
            tau = gamma.symbols[0]
        x, y = atom.src, atom.dst
        if x == y:
            # a self-loop test: the node holding x listens to itself
            variables = [x]

            def answer(a, m):
                return "q_xy" if m == {x} else "maybe"
        else:
            variables = [x, y]

            def answer(a, m):
                return {frozenset([x]): "q_x", frozenset([y]): "q_y",
                        frozenset([x, y]): "q_xy"}.get(m, "maybe")
        init = {pair_label(a, m): answer(a, m) for a in sigma for m in _subsets(variables)}
        sts = tuple(State(q, E) for q in ("q_x", "q_y", "q_xy")) + tuple(states)
        heard_x, heard_xy = gd.Member("q_x", tau), gd.Member("q_xy", tau)
        rules = (
            Rule("q_x", gd.TRUE, ("maybe",)),
            Rule("q_y", heard_x, ("yes",)),
            Rule("q_y", gd.neg(heard_x), ("no",)),
            Rule("q_xy", heard_xy, ("yes",)),
            Rule("q_xy", gd.neg(heard_xy), ("no",)),
        )
        return Automaton(pair_alphabet(sigma, variables), gamma, sts, init, rules, _LOCAL_F)
    raise InvalidInputError(f"not an atom: {atom!r}")


def exactly_one(x: str, variables, sigma: Alphabet, gamma: Alphabet) -> Automaton:
    """Accepts an encoded graph iff exactly one node carries ``x``.

    Each such node universally picks black or white; the pathfinder wins
    with two nodes by picking different colours, and with none there is no
    colour at all.
    """
    variables = sorted(variables)
    sigma, gamma = Alphabet.of(sigma), Alphabet.of(gamma)
    if x not in variables:
        raise InvalidInputError(f"{x} is not among the encoded variables")
    init = {pair_label(a, m): ("q_x" if x in m else "q_notx") for a in sigma for m in _subsets(variables)}
    states = (State("q_x", A), State("q_notx", P), State("black", P), State("white", P))
    rules = (Rule("q_x", gd.TRUE, ("black", "white")),)
    return Automaton(pair_alphabet(sigma, variables), gamma, states, init, rules, _ONE_F)


def _embed(sigma, old_vars, new_vars) -> dict:
    """Label map that lets an automaton over ``old_vars`` ignore the others."""
    old = frozenset(old_vars)
    return {pair_label(a, m): pair_label(a, m & old) for a in sigma for m in _subsets(new_vars)}


class _Compiler:
    def __init__(self, sigma: Alphabet, gamma: Alphabet, trim: bool, report: CompileReport):
        self.sigma = sigma
        self.gamma = gamma
        self.trim = trim
        self.report = report

    def log(self, op, f, a, rep=None):
        self.report.steps.append(CompileStep(op, sx.render(f), a.size, a.length, rep))

    def tidy(self, a: Automaton) -> Automaton:
        if self.trim:
            a, _ = tf.trim(a)
        return tf.compact_names(a)

    def extend(self, a: Automaton, old, new) -> Automaton:
        if set(old) == set(new):
            return a
        out, _ = tf.extend_alphabet(a, _embed(self.sigma, old, new))
        return out

    def run(self, f: sx.Formula) -> tuple[Automaton, tuple]:
        """Automaton for ``f`` and the sorted tuple of its free variables."""
        if isinstance(f, (sx.Lab, sx.Eq, sx.In, sx.Edge)):
            a = self.tidy(base_automaton(f, self.sigma, self.gamma))
            self.log("atom", f, a)
            return a, tuple(sorted(set(sx.atom_vars(f))))
        if isinstance(f, sx.Const):
            # true as "every node equals itself"
            t = sx.ForallNode("t", sx.Eq("t", "t"))
            return self.run(t if f.value else sx.Not(t))
        if isinstance(f, sx.Not):
            pushed = _push_not(f.arg)
            if pushed is not None:
                return self.run(pushed)
            inner, fv = self.run(f.arg)
            a, rep = tf.dual(inner)
            self.log("dual", f, a, rep)
            return a, fv
        if isinstance(f, sx.Implies):
            return self.run(sx.Or((sx.Not(f.left), f.right)))
        if isinstance(f, sx.Iff):
            return self.run(sx.And((sx.Or((sx.Not(f.left), f.right)), sx.Or((sx.Not(f.right), f.left)))))
        if isinstance(f, (sx.And, sx.Or)):
            return self.junction(f)
        if isinstance(f, (sx.ExistsNode, sx.ForallNode)) and _is_local(f.body, f.var):
            return self.local(f)
        if isinstance(f, (sx.ForallNode, sx.ForallSet)):
            chain, body = _chain(f, (sx.ForallNode, sx.ForallSet))
            inner = sx.Not(body)
            for q in reversed(chain):
                ex = sx.ExistsNode if isinstance(q, sx.ForallNode) else sx.ExistsSet
                inner = ex(q.var, inner)
            return self.run(sx.Not(inner))
        if isinstance(f, (sx.ExistsNode, sx.ExistsSet)):
            return self.exists(f)
        raise InvalidInputError(f"not a formula: {f!r}")

    def local(self, f):
        """``exists x`` or ``forall x`` over a body that only looks at the node
        holding ``x``: every node tests the body on its own label."""
        x, body = f.var, f.body
        fv = tuple(sorted(sx.free_vars(f)))
        init = {}
        for a in self.sigma:
            for m in _subsets(fv):
                init[pair_label(a, m)] = "ok" if _local_truth(body, x, a, m | {x}) else "bad"
        accepting = fam.present("ok") if isinstance(f, sx.ExistsNode) else fam.Within(frozenset(["ok"]))
        states = (State("ok", P), State("bad", P))
        a = self.tidy(Automaton(pair_alphabet(self.sigma, fv), self.gamma, states, init, (), accepting))
        self.log("local", f, a)
        return a, fv

    def junction(self, f):
        """Fold the operands with union or intersection.

        Operands without universal states are combined by the synchronous
        product instead, which adds no round.
        """
        conj = isinstance(f, sx.And)
        acc, fv = self.run(f.args[0])
        for c in f.args[1:]:
            b, fv2 = self.run(c)
            both = tuple(sorted(set(fv) | set(fv2)))
            x, y = self.extend(acc, fv, both), self.extend(b, fv2, both)
            if not x.of_kind(A) and not y.of_kind(A):
                out, rep = tf.product(x, y, "and" if conj else "or")
            else:
                out, rep = (tf.intersection if conj else tf.union)(x, y)
            acc, fv = self.tidy(out), both
            self.log(rep.construction, f, acc, rep)
        return acc, fv

    def exists(self, f):
        """A block of existential quantifiers becomes a single projection.

        Each quantified node variable is first forced onto exactly one node.
        """
        chain, body = _chain(f, (sx.ExistsNode, sx.ExistsSet))
        inner, fv = self.run(body)
        # graphs are nonempty, so a vacuous quantifier changes nothing; an
        # inner binding of a repeated variable shadows the outer ones
        bound, seen = [], set()
        for q in reversed(chain):
            if q.var in fv and q.var not in seen:
                bound.append(q)
            seen.add(q.var)
        if not bound:
            return inner, fv
        for q in bound:
            if isinstance(q, sx.ExistsNode):
                one = exactly_one(q.var, fv, self.sigma, self.gamma)
                inner, rep = tf.intersection(inner, one)
                inner = self.tidy(inner)
                self.log("exactly-one", q, inner, rep)
        drop = {q.var for q in bound}
        rest = tuple(v for v in fv if v not in drop)
        h = {lab: pair_label(*_drop(lab, drop)) for lab in inner.sigma}
        out, rep = tf.project(inner, h, pair_alphabet(self.sigma, rest))
        a = self.tidy(out)
        self.log("project", f, a, rep)
        return a, rest


def _is_local(body, x) -> bool:
    for g in sx.subformulas(body):
        if isinstance(g, (sx.Edge,) + sx.QUANTIFIERS):
            return False
        if isinstance(g, (sx.Lab, sx.Eq, sx.In)) and any(sx.is_node_var(v) and v != x for v in sx.atom_vars(g)):
            return False
    return True


def _local_truth(f, x, a, m) -> bool:
    """Truth of a local body at a node labelled ``a`` carrying the variables ``m``."""
    if isinstance(f, sx.Const):
        return f.value
    if isinstance(f, sx.Lab):
        return f.label == a
    if isinstance(f, sx.Eq):
        return True
    if isinstance(f, sx.In):
        return f.setvar in m
    if isinstance(f, sx.Not):
        return not _local_truth(f.arg, x, a, m)
    if isinstance(f, sx.And):
        return all(_local_truth(c, x, a, m) for c in f.args)
    if isinstance(f, sx.Or):
        return any(_local_truth(c, x, a, m) for c in f.args)
    if isinstance(f, sx.Implies):
        return not _local_truth(f.left, x, a, m) or _local_truth(f.right, x, a, m)
    if isinstance(f, sx.Iff):
        return _local_truth(f.left, x, a, m) == _local_truth(f.right, x, a, m)
    raise InvalidInputError(f"not a local formula: {f!r}")


def _push_not(f):
    """An equivalent of ``!f`` with the negation moved below a connective,
    or ``None`` when ``f`` is an atom or a quantifier."""
    if isinstance(f, sx.Not):
        return f.arg
    if isinstance(f, sx.And):
        return sx.Or(tuple(sx.Not(c) for c in f.args))
    if isinstance(f, sx.Or):
        return sx.And(tuple(sx.Not(c) for c in f.args))
    if isinstance(f, sx.Implies):
        return sx.And((f.left, sx.Not(f.right)))
    if isinstance(f, sx.Iff):
        return sx.Or((sx.And((f.left, sx.Not(f.right))), sx.And((sx.Not(f.left), f.right))))
    return None


def _chain(f, kinds):
    """Leading quantifiers of ``f`` of the given kinds, and the body below them."""
    chain = []
    while isinstance(f, kinds):
        chain.append(f)
        f = f.body
    return chain, f


def _drop(label: str, variables):
    a, m = split_label(label)
    return a, m - set(variables)


def compile_formula(f: sx.Formula | str, sigma, gamma, trim: bool = True
                    ) -> tuple[Automaton, CompileReport]:
    """Automaton over ``Sigma x 2^free(f)`` equivalent to ``f``.

    For a sentence the node alphabet is ``Sigma`` itself.  States are renamed
    to ``s0, s1, ...`` after every step.
    """
    if isinstance(f, str):
        f = sx.parse(f)
    sigma, gamma = Alphabet.of(sigma), Alphabet.of(gamma)
    sx.check_well_formed(f, sigma, gamma)
    for a in sigma:
        if split_label(a)[1]:
            raise InvalidInputError(f"label {a!r} looks like an encoded pair")
    report = CompileReport(sx.render(f), tuple(sorted(sx.free_vars(f))))
    a, fv = _Compiler(sigma, gamma, trim, report).run(f)
    report.output_size, report.output_length = a.size, a.length
    return a, report


compile = compile_formula
