"""LTL formulas over configurations and their text syntax.

Grammar, loosest binding first::

    formula := impl
    impl    := or ( "->" impl )?               right associative
    or      := and ( "\\/" and )*
    and     := until ( "/\\" until )*
    until   := unary ( ("U" | "R") until )?    right associative
    unary   := ("~" | "[]" | "<>" | "X") unary | atom | "(" formula ")"
    atom    := "true" | "false" | "enabled" | "t-enabled"
             | "reachable" "(" token ( ";" token )* ")"
    token   := LABEL | LABEL "@" INT | 'p("LABEL" | INT | INT)'
"""
from __future__ import annotations

import re
from dataclasses import dataclass

__all__ = [
    "Formula", "Atom", "Const", "Not", "And", "Or", "Implies", "Next", "Until", "Release",
    "Always", "Eventually", "FormulaSyntaxError", "parse", "nnf", "negate", "subformulas", "atoms",
    "TRUE", "FALSE",
]


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, text: str = "", pos: int = -1):
        if pos >= 0:
            message = f"{message} at column {pos + 1}: {text!r}"
        super().__init__(message)
        self.pos = pos


class Formula:
    """Base class; subclasses are frozen dataclasses so formulas hash and compare structurally."""

    def __invert__(self):
        return Not(self)

    def __and__(self, other):
        return And(self, other)

    def __or__(self, other):
        return Or(self, other)


@dataclass(frozen=True)
class Atom(Formula):
    """Atomic proposition.

    ``kind`` is ``"enabled"``, ``"t-enabled"`` or ``"reachable"``. A
    reachable pattern is a sorted tuple of ``(label, place_id, count)``;
    ``place_id`` is None for patterns that match by label only.
    """

    kind: str
    pattern: tuple[tuple[str, int | None, int], ...] = ()

    def __post_init__(self):
        if self.kind not in ("enabled", "t-enabled", "reachable"):
            raise ValueError(f"unknown atom kind {self.kind!r}")
        if any(c < 1 for _, _, c in self.pattern):
            raise ValueError("pattern counts must be positive")

    @classmethod
    def reachable(cls, tokens) -> Atom:
        """Build from ``[(label, place_id_or_None), ...]``, one entry per token."""
        counts: dict[tuple[str, int | None], int] = {}
        for label, pid in tokens:
            counts[(label, pid)] = counts.get((label, pid), 0) + 1
        pattern = tuple(sorted(((l, p, c) for (l, p), c in counts.items()),
                               key=lambda e: (e[0], -1 if e[1] is None else e[1])))
        return cls("reachable", pattern)

    def __str__(self):
        if self.kind != "reachable":
            return self.kind
        toks = []
        for label, pid, count in self.pattern:
            toks += [label if pid is None else f"{label}@{pid}"] * count
        return f"reachable({' ; '.join(toks)})"


@dataclass(frozen=True)
class Const(Formula):
    value: bool

    def __str__(self):
        return "true" if self.value else "false"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def __str__(self):
        return f"~ {_wrap(self.arg)}"


@dataclass(frozen=True)
class Next(Formula):
    arg: Formula

    def __str__(self):
        return f"X {_wrap(self.arg)}"


@dataclass(frozen=True)
class Always(Formula):
    arg: Formula

    def __str__(self):
        return f"[] {_wrap(self.arg)}"


@dataclass(frozen=True)
class Eventually(Formula):
    arg: Formula

    def __str__(self):
        return f"<> {_wrap(self.arg)}"


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} /\\ {_wrap(self.right)}"


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} \\/ {_wrap(self.right)}"


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} -> {_wrap(self.right)}"


@dataclass(frozen=True)
class Until(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} U {_wrap(self.right)}"


@dataclass(frozen=True)
class Release(Formula):
    left: Formula
    right: Formula

    def __str__(self):
        return f"{_wrap(self.left)} R {_wrap(self.right)}"


_UNARY = (Not, Next, Always, Eventually)
_BINARY = (And, Or, Implies, Until, Release)


def _wrap(f: Formula) -> str:
    if isinstance(f, (Atom, Const)) or isinstance(f, _UNARY):
        return str(f)
    return f"({f})"


# -- parser ------------------------------------------------------------------

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<op>\[\]|<>|->|/\\|\\/|~|\(|\)|;|@|\|)
  | (?P<string>"(?:[^"\\]|\\.)*")
  | (?P<int>\d+)
  | (?P<word>[A-Za-z_](?:[A-Za-z0-9_']|-(?!>))*)
""", re.VERBOSE)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise FormulaSyntaxError("unexpected character", text, pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise FormulaSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", self.text, pos)

    def error(self, message: str):
        raise FormulaSyntaxError(message, self.text, self.peek()[2])

    def formula(self) -> Formula:
        left = self.disjunction()
        if self.peek()[1] == "->":
            self.take()
            return Implies(left, self.formula())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek()[1] == "\\/":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.until()
        while self.peek()[1] == "/\\":
            self.take()
            left = And(left, self.until())
        return left

    def until(self) -> Formula:
        left = self.unary()
        kind, val, _ = self.peek()
        if kind == "word" and val in ("U", "R"):
            self.take()
            right = self.until()
            return Until(left, right) if val == "U" else Release(left, right)
        return left

    def unary(self) -> Formula:
        kind, val, pos = self.peek()
        if val in ("~", "[]", "<>") or (kind == "word" and val == "X"):
            self.take()
            arg = self.unary()
            return {"~": Not, "[]": Always, "<>": Eventually, "X": Next}[val](arg)
        if val == "(":
            self.take()
            f = self.formula()
            self.expect(")")
            return f
        if kind == "word":
            self.take()
            if val == "true":
                return TRUE
            if val == "false":
                return FALSE
            if val in ("enabled", "t-enabled"):
                return Atom(val)
            if val == "reachable":
                return self.reachable()
            raise FormulaSyntaxError(f"unknown proposition {val!r}", self.text, pos)
        self.error("expected a formula")

    def reachable(self) -> Atom:
        self.expect("(")
        tokens = []
        if self.peek()[1] != ")":
            tokens.append(self.place_token())
            while self.peek()[1] == ";":
                self.take()
                tokens.append(self.place_token())
        self.expect(")")
        return Atom.reachable(tokens)

    def place_token(self) -> tuple[str, int | None]:
        kind, val, pos = self.take()
        if kind == "word" and val == "p" and self.peek()[1] == "(":
            # Maude form p("A" | 3 | 2147483647); the capacity is ignored.
            self.take()
            k2, label, p2 = self.take()
            if k2 != "string":
                raise FormulaSyntaxError("expected a quoted label", self.text, p2)
            self.expect("|")
            k3, num, p3 = self.take()
            if k3 != "int":
                raise FormulaSyntaxError("expected a place id", self.text, p3)
            if self.peek()[1] == "|":
                self.take()
                if self.take()[0] != "int":
                    self.error("expected a capacity")
            self.expect(")")
            return label[1:-1], int(num)
        if kind == "string":
            label = val[1:-1]
        elif kind in ("word", "int"):
            label = val
        else:
            raise FormulaSyntaxError("expected a place label", self.text, pos)
        if self.peek()[1] == "@":
            self.take()
            k2, num, p2 = self.take()
            if k2 != "int":
                raise FormulaSyntaxError("expected a place id after '@'", self.text, p2)
            return label, int(num)
        return label, None


def parse(text: str) -> Formula:
    """Parse the text syntax into a :class:`Formula`."""
    p = _Parser(text)
    f = p.formula()
    if p.peek()[0] != "end":
        p.error("unexpected trailing input")
    return f


# -- transformations ---------------------------------------------------------

def negate(f: Formula) -> Formula:
    return nnf(Not(f))


def nnf(f: Formula) -> Formula:
    """Negation normal form over true/false, literals, and, or, X, U, R.

    ``<>`` and ``[]`` are expanded to ``true U`` and ``false R``; implication
    is rewritten with or.
    """
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, And):
        return And(nnf(f.left), nnf(f.right))
    if isinstance(f, Or):
        return Or(nnf(f.left), nnf(f.right))
    if isinstance(f, Implies):
        return Or(nnf(Not(f.left)), nnf(f.right))
    if isinstance(f, Next):
        return Next(nnf(f.arg))
    if isinstance(f, Until):
        return Until(nnf(f.left), nnf(f.right))
    if isinstance(f, Release):
        return Release(nnf(f.left), nnf(f.right))
    if isinstance(f, Eventually):
        return Until(TRUE, nnf(f.arg))
    if isinstance(f, Always):
        return Release(FALSE, nnf(f.arg))
    if isinstance(f, Not):
        g = f.arg
        if isinstance(g, Atom):
            return f
        if isinstance(g, Const):
            return Const(not g.value)
        if isinstance(g, Not):
            return nnf(g.arg)
        if isinstance(g, And):
            return Or(nnf(Not(g.left)), nnf(Not(g.right)))
        if isinstance(g, Or):
            return And(nnf(Not(g.left)), nnf(Not(g.right)))
        if isinstance(g, Implies):
            return And(nnf(g.left), nnf(Not(g.right)))
        if isinstance(g, Next):
            return Next(nnf(Not(g.arg)))
        if isinstance(g, Until):
            return Release(nnf(Not(g.left)), nnf(Not(g.right)))
        if isinstance(g, Release):
            return Until(nnf(Not(g.left)), nnf(Not(g.right)))
        if isinstance(g, Eventually):
            return Release(FALSE, nnf(Not(g.arg)))
        if isinstance(g, Always):
            return Until(TRUE, nnf(Not(g.arg)))
    raise TypeError(f"not a formula: {f!r}")


def subformulas(f: Formula):
    """Post-order traversal (children before parents)."""
    if isinstance(f, _UNARY):
        yield from subformulas(f.arg)
    elif isinstance(f, _BINARY):
        yield from subformulas(f.left)
        yield from subformulas(f.right)
    yield f


def atoms(f: Formula) -> set[Atom]:
    return {g for g in subformulas(f) if isinstance(g, Atom)}


def depth(f: Formula) -> int:
    if isinstance(f, _UNARY):
        return 1 + depth(f.arg)
    if isinstance(f, _BINARY):
        return 1 + max(depth(f.left), depth(f.right))
    return 0
