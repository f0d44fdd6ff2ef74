"""Canonical text form: parsing expressions into rational functions.

Grammar (whitespace-insensitive):

    expr    :=  term (('+' | '-') term)*
    term    :=  factor (('*' | '/') factor)*
    factor  :=  '-'* power
    power   :=  atom ('^' unsigned_int)?
    atom    :=  unsigned_int | name "'"* | '(' expr ')'

Derivative marks map to internal names: u' -> u_1, y'' -> y_2.  Printing is
the inverse (see poly.format_poly / RatFunc.__str__), so canonical output
parses back to an equal value.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import ParseError, UndeclaredSymbol
from .poly import PolyRing, deriv_name
from .domains import RatFunc

__all__ = ["parse_expr", "tokenize"]

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)('*)|(\*\*|[-+*/^()])|(\S))")


def tokenize(text: str, line_no=None):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group(5):
            raise ParseError(f"unexpected character {m.group(5)!r}", line_no, m.start(5) + 1)
        if m.group(1):
            tokens.append(("int", int(m.group(1)), m.start(1)))
        elif m.group(2):
            tokens.append(("name", (m.group(2), len(m.group(3))), m.start(2)))
        else:
            op = m.group(4)
            if op == "**":
                op = "^"
            tokens.append(("op", op, m.start(4)))
        pos = m.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, ring: PolyRing, line_no=None):
        self.toks = tokens
        self.i = 0
        self.ring = ring
        self.line = line_no

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.line, tok[2] + 1)

    def parse(self) -> RatFunc:
        v = self.expr()
        if self.peek()[0] != "end":
            self.error("trailing input")
        return v

    def expr(self) -> RatFunc:
        v = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.next()[1]
            rhs = self.term()
            v = v + rhs if op == "+" else v - rhs
        return v

    def term(self) -> RatFunc:
        v = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.next()[1]
            rhs = self.factor()
            if op == "*":
                v = v * rhs
            else:
                if rhs.is_zero():
                    self.error("division by zero in expression")
                v = v / rhs
        return v

    def factor(self) -> RatFunc:
        neg = False
        while self.peek()[0] == "op" and self.peek()[1] == "-":
            self.next()
            neg = not neg
        v = self.power()
        return -v if neg else v

    def power(self) -> RatFunc:
        v = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.next()
            t = self.peek()
            if t[0] != "int":
                self.error("exponent must be an unsigned integer")
            self.next()
            v = v ** t[1]
        return v

    def atom(self) -> RatFunc:
        kind, val, pos = self.peek()
        if kind == "int":
            self.next()
            return RatFunc.const(self.ring, Fraction(val))
        if kind == "name":
            self.next()
            base, primes = val
            name = deriv_name(base, primes) if primes else base
            if not self.ring.universe.has(name):
                raise UndeclaredSymbol(
                    f"undeclared symbol {base + chr(39) * primes!r}", self.line, pos + 1)
            return RatFunc.from_poly(self.ring.var(name))
        if kind == "op" and val == "(":
            self.next()
            v = self.expr()
            t = self.peek()
            if not (t[0] == "op" and t[1] == ")"):
                self.error("expected ')'")
            self.next()
            return v
        self.error("expected a number, name or '('")


def parse_expr(text: str, ring: PolyRing, line_no=None) -> RatFunc:
    """Parse canonical text into a RatFunc over `ring`."""
    return _Parser(tokenize(text, line_no), ring, line_no).parse()
