"""Recursive-descent parser for rational-function expressions in ``T``.

Grammar::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" ["-"] INT)?
    atom   := INT | NAME | "T" | "(" expr ")"

``NAME`` must be bound in the constant table.  Decimal points and
exponent notation are rejected, so every value stays rational.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Mapping

from .errors import NonRationalLiteral, ParseError, UnboundConstant
from .ratfun import RatFun

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


def _normalize(text: str) -> str:
    return text.replace("−", "-").replace("·", "*").replace("×", "*")


class _Parser:
    def __init__(self, text: str, consts: Mapping[str, Fraction], line: int | None, col0: int):
        self.text = _normalize(text)
        self.consts = consts
        self.line = line
        self.col0 = col0
        self.toks: list[tuple[str, str, int]] = []
        pos = 0
        s = self.text
        while pos < len(s):
            if s[pos:].strip() == "":
                break
            m = _TOKEN.match(s, pos)
            if not m:
                self.fail(f"unexpected character {s[pos:].lstrip()[0]!r}", pos + len(s[pos:]) - len(s[pos:].lstrip()))
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def fail(self, msg: str, pos: int, cls=ParseError):
        raise cls(msg, self.line, self.col0 + pos + 1)

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect(self, op: str):
        kind, val, pos = self.take()
        if kind != "op" or val != op:
            self.fail(f"expected {op!r}", pos)

    def parse(self) -> RatFun:
        if not self.toks:
            self.fail("empty expression", 0)
        out = self.expr()
        kind, val, pos = self.peek()
        if kind is not None:
            self.fail(f"unexpected {val!r}", pos)
        return out

    def expr(self) -> RatFun:
        out = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.term()
                out = out + rhs if val == "+" else out - rhs
            else:
                return out

    def term(self) -> RatFun:
        out = self.unary()
        while True:
            kind, val, pos = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.unary()
                if val == "*":
                    out = out * rhs
                else:
                    if rhs.is_zero():
                        self.fail("division by zero", pos)
                    out = out / rhs
            else:
                return out

    def unary(self) -> RatFun:
        kind, val, _ = self.peek()
        if kind == "op" and val in "+-":
            self.take()
            inner = self.unary()
            return -inner if val == "-" else inner
        return self.power()

    def power(self) -> RatFun:
        base = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            k2, v2, p2 = self.peek()
            if k2 == "op" and v2 == "-":
                self.take()
                sign = -1
            k3, v3, p3 = self.take()
            if k3 != "num" or not v3.isdigit():
                self.fail("exponent must be an integer", p3)
            e = sign * int(v3)
            if e < 0 and base.is_zero():
                self.fail("negative power of zero", pos)
            return base ** e
        return base

    def atom(self) -> RatFun:
        kind, val, pos = self.take()
        if kind == "num":
            if not val.isdigit():
                self.fail(f"non-rational literal {val!r}; use num/den", pos, NonRationalLiteral)
            return RatFun.const(int(val))
        if kind == "name":
            if val == "T":
                return RatFun.T()
            if val not in self.consts:
                self.fail(f"unbound constant {val!r}", pos, UnboundConstant)
            return RatFun.const(self.consts[val])
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        if kind is None:
            self.fail("unexpected end of expression", pos)
        self.fail(f"unexpected {val!r}", pos)


def parse_expr(text: str, consts: Mapping[str, Fraction] | None = None,
               line: int | None = None, col: int = 0) -> RatFun:
    return _Parser(text, consts or {}, line, col).parse()


_RATIONAL = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+))?\s*$")


def parse_rational_literal(text: str, line: int | None = None, col: int = 0) -> Fraction:
    m = _RATIONAL.match(_normalize(text))
    if not m:
        raise NonRationalLiteral(f"not a rational literal: {text.strip()!r}", line, col + 1)
    den = int(m.group(2)) if m.group(2) else 1
    if den == 0:
        raise NonRationalLiteral("zero denominator", line, col + 1)
    return Fraction(int(m.group(1)), den)
