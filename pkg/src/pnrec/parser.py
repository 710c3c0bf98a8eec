"""Text format for polynomials.

Grammar (``*`` is mandatory between factors)::

    expr   := term (("+" | "-") term)*
    term   := unary ("*" unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INT)?
    atom   := INT ("/" INT)? | NAME | "(" expr ")"
"""
from __future__ import annotations

import re
from fractions import Fraction

from .graded import GradedAlgebraError, Polynomial, VariableTable, monomial_sort_key


class ParseError(GradedAlgebraError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\S))")


def _tokenize(text: str):
    def boff(i):
        return len(text[:i].encode("utf-8"))

    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:  # trailing whitespace
            break
        if m.group(1) is not None:
            tokens.append(("int", m.group(1), boff(m.start(1))))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), boff(m.start(2))))
        else:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise ParseError(f"unexpected character {ch!r}", boff(m.start(3)))
            tokens.append((ch, ch, boff(m.start(3))))
        pos = m.end()
    tokens.append(("end", "", len(text.encode("utf-8"))))
    return tokens


class _Parser:
    def __init__(self, text: str, table: VariableTable):
        self.text = text
        self.table = table
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            expected = "end of input" if kind == "end" else repr(kind)
            found = "end of input" if tok[0] == "end" else repr(tok[1])
            raise ParseError(f"expected {expected}, found {found}", tok[2])
        self.pos += 1
        return tok

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise ParseError("empty expression", 0)
        result = self.expr()
        self.take("end")
        return result

    def expr(self):
        value = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self):
        value = self.unary()
        while self.peek()[0] == "*":
            self.take()
            value = value * self.unary()
        return value

    def unary(self):
        kind = self.peek()[0]
        if kind == "-":
            self.take()
            return -self.unary()
        if kind == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        start = self.peek()
        base = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "int":
                raise ParseError("exponent must be a nonnegative integer", tok[2])
            self.take()
            exp = int(tok[1])
            if start[0] == "name" and self.table[start[1]].odd and exp >= 2:
                raise ParseError(f"odd variable {start[1]!r} raised to power {exp}", tok[2])
            return base ** exp
        return base

    def atom(self):
        tok = self.peek()
        kind = tok[0]
        if kind == "int":
            self.take()
            value = Fraction(int(tok[1]))
            if self.peek()[0] == "/":
                self.take()
                den = self.take("int")
                if int(den[1]) == 0:
                    raise ParseError("zero denominator", den[2])
                value = value / int(den[1])
            return self.table.const(value)
        if kind == "name":
            self.take()
            if tok[1] not in self.table:
                raise ParseError(f"unknown variable {tok[1]!r}", tok[2])
            return self.table.var(tok[1])
        if kind == "(":
            self.take()
            value = self.expr()
            self.take(")")
            return value
        found = "end of input" if kind == "end" else repr(tok[1])
        raise ParseError(f"unexpected {found}", tok[2])


def parse_expression(text: str, table: VariableTable) -> Polynomial:
    """Parse ``text`` into a normalized polynomial over ``table``."""
    return _Parser(text, table).parse()


def format_polynomial(f: Polynomial) -> str:
    """Canonical text: sorted terms, coefficients as ``a`` or ``a/b``."""
    if not f.terms:
        return "0"
    names = f.table.names
    parts = []
    for mono in sorted(f.terms, key=monomial_sort_key):
        c = f.terms[mono]
        sign = "-" if c < 0 else "+"
        c = abs(c)
        factors = [names[v] if e == 1 else f"{names[v]}^{e}" for v, e in mono]
        coeff = str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
        if not factors:
            body = coeff
        elif c == 1:
            body = "*".join(factors)
        else:
            body = "*".join([coeff] + factors)
        parts.append((sign, body))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += sign + body
    return out
