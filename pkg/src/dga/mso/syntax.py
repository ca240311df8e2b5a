"""Abstract syntax, parser and printer for monadic second-order formulas on graphs.

Concrete syntax::

    lab[a](x)    x ->[g] y    x -> y    x = y    x in X    true    false
    !f    f & g    f | g    f => g    f <=> g
    exists x (f)    forall X (f)    exists x, y, Z (f)

Node variables start with a lower-case letter, set variables with an
upper-case one.  ``!`` binds tightest, then ``&``, ``|``, ``=>`` (right
associative) and ``<=>``.  A quantifier scopes over the unary formula that
follows its variable list, so the body is normally parenthesised.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator

from ..errors import InvalidInputError, SyntaxErrorAt

KEYWORDS = frozenset({"exists", "forall", "in", "lab", "true", "false"})
_VAR_RE = re.compile(r"[A-Za-z][A-Za-z0-9_']*\Z")


def is_node_var(name: str) -> bool:
    return name[:1].islower()


def is_set_var(name: str) -> bool:
    return name[:1].isupper()


def check_var(name: str, kind: str | None = None) -> str:
    if not isinstance(name, str) or not _VAR_RE.match(name) or name in KEYWORDS:
        raise InvalidInputError(f"bad variable name {name!r}")
    if kind == "node" and not is_node_var(name):
        raise InvalidInputError(f"node variables start with a lower-case letter: {name!r}")
    if kind == "set" and not is_set_var(name):
        raise InvalidInputError(f"set variables start with an upper-case letter: {name!r}")
    return name


class Formula:
    __slots__ = ()

    def __str__(self):
        return render(self)

    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)


@dataclass(frozen=True, slots=True)
class Const(Formula):
    value: bool


TOP = Const(True)
BOTTOM = Const(False)


@dataclass(frozen=True, slots=True)
class Lab(Formula):
    label: str
    var: str


@dataclass(frozen=True, slots=True)
class Edge(Formula):
    """``src ->[gamma] dst``; ``gamma`` is ``None`` for the single edge symbol."""

    src: str
    gamma: str | None
    dst: str


@dataclass(frozen=True, slots=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True, slots=True)
class In(Formula):
    var: str
    setvar: str


@dataclass(frozen=True, slots=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True, slots=True)
class And(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Or(Formula):
    args: tuple[Formula, ...]


@dataclass(frozen=True, slots=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True, slots=True)
class ExistsNode(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ForallNode(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ExistsSet(Formula):
    var: str
    body: Formula


@dataclass(frozen=True, slots=True)
class ForallSet(Formula):
    var: str
    body: Formula


QUANTIFIERS = (ExistsNode, ForallNode, ExistsSet, ForallSet)


# smart constructors -----------------------------------------------------------------------


def conj(*fs: Formula) -> Formula:
    """Conjunction with the empty case mapped to ``true``."""
    fs = tuple(fs)
    if not fs:
        return TOP
    return fs[0] if len(fs) == 1 else And(fs)


def disj(*fs: Formula) -> Formula:
    fs = tuple(fs)
    if not fs:
        return BOTTOM
    return fs[0] if len(fs) == 1 else Or(fs)


def exists(var: str, body: Formula) -> Formula:
    return ExistsNode(var, body) if is_node_var(var) else ExistsSet(var, body)


def forall(var: str, body: Formula) -> Formula:
    return ForallNode(var, body) if is_node_var(var) else ForallSet(var, body)


def exists_all(variables, body: Formula) -> Formula:
    for v in reversed(list(variables)):
        body = exists(v, body)
    return body


def forall_all(variables, body: Formula) -> Formula:
    for v in reversed(list(variables)):
        body = forall(v, body)
    return body


# traversal --------------------------------------------------------------------------------


def children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Not):
        return (f.arg,)
    if isinstance(f, (And, Or)):
        return f.args
    if isinstance(f, (Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, QUANTIFIERS):
        return (f.body,)
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(children(g))


def atom_vars(f: Formula) -> tuple[str, ...]:
    if isinstance(f, Lab):
        return (f.var,)
    if isinstance(f, (Edge,)):
        return (f.src, f.dst)
    if isinstance(f, Eq):
        return (f.left, f.right)
    if isinstance(f, In):
        return (f.var, f.setvar)
    return ()


def free_vars(f: Formula) -> frozenset:
    """Variables with a free occurrence in ``f``."""
    out = set()
    # iterative walk carrying the bound set; formulas produced by translation are deep
    stack = [(f, frozenset())]
    while stack:
        g, bound = stack.pop()
        if isinstance(g, QUANTIFIERS):
            stack.append((g.body, bound | {g.var}))
            continue
        for v in atom_vars(g):
            if v not in bound:
                out.add(v)
        for c in children(g):
            stack.append((c, bound))
    return frozenset(out)


def is_sentence(f: Formula) -> bool:
    return not free_vars(f)


def labels_of(f: Formula) -> frozenset:
    return frozenset(g.label for g in subformulas(f) if isinstance(g, Lab))


def gammas_of(f: Formula) -> frozenset:
    return frozenset(g.gamma for g in subformulas(f) if isinstance(g, Edge))


def size(f: Formula) -> int:
    return sum(1 for _ in subformulas(f))


def check_well_formed(f: Formula, sigma=None, gamma=None) -> None:
    """Variable sorts must match their positions; labels and edge symbols must be known."""
    sig = set(sigma) if sigma is not None else None
    gam = list(gamma) if gamma is not None else None
    for g in subformulas(f):
        if isinstance(g, Lab):
            check_var(g.var, "node")
            if sig is not None and g.label not in sig:
                raise InvalidInputError(f"label {g.label!r} is not in the node alphabet")
        elif isinstance(g, Edge):
            check_var(g.src, "node")
            check_var(g.dst, "node")
            if gam is not None:
                if g.gamma is None and len(gam) != 1:
                    raise InvalidInputError("an edge atom without symbol needs a single edge symbol")
                if g.gamma is not None and g.gamma not in gam:
                    raise InvalidInputError(f"edge symbol {g.gamma!r} is not in the edge alphabet")
        elif isinstance(g, Eq):
            check_var(g.left, "node")
            check_var(g.right, "node")
        elif isinstance(g, In):
            check_var(g.var, "node")
            check_var(g.setvar, "set")
        elif isinstance(g, (ExistsNode, ForallNode)):
            check_var(g.var, "node")
        elif isinstance(g, (ExistsSet, ForallSet)):
            check_var(g.var, "set")


# printing ---------------------------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}
_ATOM = 6


def _prec(f: Formula) -> int:
    if isinstance(f, Not):
        return 5
    return _PREC.get(type(f), _ATOM)


def _bracket(text: str, inner: int, needed: int) -> str:
    return f"({text})" if inner < needed else text


def _check_token(text: str) -> str:
    if not text or "]" in text or "[" in text:
        raise InvalidInputError(f"cannot print symbol {text!r}")
    return text


def render(f: Formula) -> str:
    """Text that :func:`parse` turns back into ``f``."""
    parts: list[str] = []
    _render(f, parts)
    return "".join(parts)


def _render(f: Formula, out: list) -> None:
    if isinstance(f, Const):
        out.append("true" if f.value else "false")
    elif isinstance(f, Lab):
        out.append(f"lab[{_check_token(f.label)}]({f.var})")
    elif isinstance(f, Edge):
        arrow = "->" if f.gamma is None else f"->[{_check_token(f.gamma)}]"
        out.append(f"{f.src} {arrow} {f.dst}")
    elif isinstance(f, Eq):
        out.append(f"{f.left} = {f.right}")
    elif isinstance(f, In):
        out.append(f"{f.var} in {f.setvar}")
    elif isinstance(f, Not):
        out.append("!")
        _child(f.arg, 5, out)
    elif isinstance(f, (And, Or)):
        p = _prec(f)
        sep = " & " if isinstance(f, And) else " | "
        for i, c in enumerate(f.args):
            if i:
                out.append(sep)
            # nested chains of the same operator keep their grouping
            _child(c, p + 1 if type(c) is type(f) else p, out)
    elif isinstance(f, Implies):
        _child(f.left, 3, out)
        out.append(" => ")
        _child(f.right, 2, out)
    elif isinstance(f, Iff):
        _child(f.left, 1, out)
        out.append(" <=> ")
        _child(f.right, 2, out)
    elif isinstance(f, QUANTIFIERS):
        word = "exists" if isinstance(f, (ExistsNode, ExistsSet)) else "forall"
        same = (ExistsNode, ExistsSet) if word == "exists" else (ForallNode, ForallSet)
        names = [f.var]
        body = f.body
        while isinstance(body, same):
            names.append(body.var)
            body = body.body
        out.append(f"{word} {', '.join(names)} (")
        _render(body, out)
        out.append(")")
    else:
        raise InvalidInputError(f"not a formula: {f!r}")


def _child(f: Formula, needed: int, out: list) -> None:
    if _prec(f) < needed:
        out.append("(")
        _render(f, out)
        out.append(")")
    else:
        _render(f, out)


# parsing ----------------------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<op><=>|=>|->|[()\[\],=!&|])
  | (?P<ident>[A-Za-z][A-Za-z0-9_']*)
""", re.X)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message, pos=None):
        raise SyntaxErrorAt(message, self.text, self.pos if pos is None else pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip()
        if self.pos >= len(self.text):
            return ("end", "")
        m = _TOKEN.match(self.text, self.pos)
        if not m:
            self.error(f"unexpected character {self.text[self.pos]!r}")
        return (m.lastgroup, m.group(m.lastgroup))

    def take(self, value=None, kind=None):
        tok = self.peek()
        if (value is not None and tok[1] != value) or (kind is not None and tok[0] != kind):
            want = repr(value) if value is not None else kind
            got = repr(tok[1]) if tok[0] != "end" else "end of input"
            self.error(f"expected {want}, found {got}")
        self.pos += len(tok[1])
        return tok[1]

    def bracketed(self):
        """Raw text between ``[`` and ``]``."""
        self.take("[")
        end = self.text.find("]", self.pos)
        if end < 0:
            self.error("unterminated '['")
        raw = self.text[self.pos:end].strip()
        if not raw:
            self.error("empty symbol")
        self.pos = end + 1
        return raw

    def parse(self) -> Formula:
        f = self.iff()
        if self.peek()[0] != "end":
            self.error(f"unexpected {self.peek()[1]!r}")
        return f

    def iff(self):
        left = self.implies()
        while self.peek() == ("op", "<=>"):
            self.take()
            left = Iff(left, self.implies())
        return left

    def implies(self):
        left = self.disj()
        if self.peek() == ("op", "=>"):
            self.take()
            return Implies(left, self.implies())
        return left

    def disj(self):
        args = [self.conj()]
        while self.peek() == ("op", "|"):
            self.take()
            args.append(self.conj())
        return args[0] if len(args) == 1 else Or(tuple(args))

    def conj(self):
        args = [self.unary()]
        while self.peek() == ("op", "&"):
            self.take()
            args.append(self.unary())
        return args[0] if len(args) == 1 else And(tuple(args))

    def unary(self):
        kind, value = self.peek()
        if (kind, value) == ("op", "!"):
            self.take()
            return Not(self.unary())
        if (kind, value) == ("op", "("):
            self.take()
            f = self.iff()
            self.take(")")
            return f
        if kind == "ident" and value in ("exists", "forall"):
            return self.quantifier()
        return self.atom()

    def variable(self):
        self.skip()
        start = self.pos
        name = self.take(kind="ident")
        if name in KEYWORDS:
            self.error(f"keyword {name!r} used as a variable", start)
        return name, start

    def quantifier(self):
        word = self.take(kind="ident")
        names = [self.variable()]
        while self.peek() == ("op", ","):
            self.take()
            names.append(self.variable())
        body = self.unary()
        for name, _ in reversed(names):
            body = exists(name, body) if word == "exists" else forall(name, body)
        return body

    def node_var(self):
        name, start = self.variable()
        if not is_node_var(name):
            self.error(f"expected a node variable, found set variable {name!r}", start)
        return name

    def atom(self):
        kind, value = self.peek()
        if kind == "end":
            self.error("unexpected end of input")
        if kind != "ident":
            self.error(f"unexpected {value!r}")
        if value in ("true", "false"):
            self.take()
            return TOP if value == "true" else BOTTOM
        if value == "lab":
            self.take()
            label = self.bracketed()
            self.take("(")
            x = self.node_var()
            self.take(")")
            return Lab(label, x)
        x = self.node_var()
        kind, value = self.peek()
        if (kind, value) == ("op", "->"):
            self.take()
            self.skip()
            gamma = self.bracketed() if self.text.startswith("[", self.pos) else None
            return Edge(x, gamma, self.node_var())
        if (kind, value) == ("op", "="):
            self.take()
            return Eq(x, self.node_var())
        if (kind, value) == ("ident", "in"):
            self.take()
            name, start = self.variable()
            if not is_set_var(name):
                self.error(f"expected a set variable, found {name!r}", start)
            return In(x, name)
        self.error("expected '->', '=' or 'in' after a node variable")


def parse(text: str) -> Formula:
    """Parse a formula; errors carry the character offset."""
    if not isinstance(text, str):
        raise InvalidInputError("formula text must be a string")
    return _Parser(text).parse()
