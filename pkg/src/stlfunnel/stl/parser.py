"""Recursive-descent parser for the STL text DSL.

Grammar (whitespace-insensitive, numbers are decimal seconds)::

    formula  := conj ('|' conj)*
    conj     := unary ('&' unary)*
    unary    := '!' unary | 'F' [bounds] unary | 'G' [bounds] unary
              | primary ['U' [bounds] unary]
    primary  := '(' formula ')' | 'true' | IDENT
    bounds   := '[' number ',' (number | 'inf') ']'

Omitted bounds mean ``[0, inf]``. ``a | b`` is sugar for ``!(!a & !b)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from .formula import Always, And, Atom, Eventually, Not, StlFormula, TrueF, Until


class StlParseError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnknownPredicateError(StlParseError):
    pass


_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>\d+(?:\.\d*)?(?:[eE][-+]?\d+)?|\.\d+(?:[eE][-+]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>[!&|()\[\],])
    """,
    re.VERBOSE,
)

_KEYWORDS = {"F", "G", "U", "true", "inf"}


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _tokenize(text):
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise StlParseError(f"unexpected character {text[pos]!r}", *_linecol(text, pos))
        kind = m.lastgroup
        if kind != "ws":
            word = m.group()
            if kind == "ident" and word in _KEYWORDS:
                kind = word
            toks.append(_Tok(kind, word, pos))
        pos = m.end()
    toks.append(_Tok("eof", "", len(text)))
    return toks


def _linecol(text, pos):
    line = text.count("\n", 0, pos) + 1
    col = pos - (text.rfind("\n", 0, pos) + 1) + 1
    return line, col


class _Parser:
    def __init__(self, text, table):
        self.text = text
        self.table = table
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.toks[self.i]

    def error(self, message, tok=None, cls=StlParseError):
        tok = tok or self.tok
        return cls(message, *_linecol(self.text, tok.pos))

    def accept(self, text):
        if self.tok.text == text and self.tok.kind in ("op", text):
            self.i += 1
            return True
        return False

    def expect(self, text):
        if not self.accept(text):
            found = self.tok.text or "end of input"
            raise self.error(f"expected {text!r}, found {found!r}")

    def parse(self):
        phi = self.formula()
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return phi

    def formula(self):
        phi = self.conj()
        while self.accept("|"):
            rhs = self.conj()
            phi = Not(And(Not(phi), Not(rhs)))
        return phi

    def conj(self):
        phi = self.unary()
        while self.accept("&"):
            phi = And(phi, self.unary())
        return phi

    def unary(self):
        if self.accept("!"):
            return Not(self.unary())
        if self.tok.kind in ("F", "G"):
            op = self.tok.kind
            self.i += 1
            a, b = self.bounds()
            child = self.unary()
            return Eventually(a, b, child) if op == "F" else Always(a, b, child)
        left = self.primary()
        if self.tok.kind == "U":
            self.i += 1
            a, b = self.bounds()
            return Until(a, b, left, self.unary())
        return left

    def primary(self):
        tok = self.tok
        if self.accept("("):
            phi = self.formula()
            self.expect(")")
            return phi
        if tok.kind == "true":
            self.i += 1
            return TrueF()
        if tok.kind == "ident":
            self.i += 1
            if tok.text not in self.table:
                raise self.error(f"unknown predicate {tok.text!r}", tok, UnknownPredicateError)
            return Atom(self.table[tok.text])
        found = tok.text or "end of input"
        raise self.error(f"expected a predicate, 'true' or '(', found {found!r}")

    def number(self, allow_inf):
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return float(tok.text)
        if allow_inf and tok.kind == "inf":
            self.i += 1
            return math.inf
        raise self.error(f"expected a number, found {tok.text or 'end of input'!r}")

    def bounds(self):
        if self.tok.text != "[":
            return 0.0, math.inf
        start = self.tok
        self.i += 1
        a = self.number(allow_inf=False)
        self.expect(",")
        b = self.number(allow_inf=True)
        self.expect("]")
        if a > b:
            raise self.error(f"reversed time bounds [{a}, {b}]", start)
        return a, b


def parse_formula(text: str, predicate_table) -> StlFormula:
    """Parse ``text`` against a name -> Predicate table."""
    return _Parser(text, predicate_table).parse()
