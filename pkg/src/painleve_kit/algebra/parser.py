"""Recursive-descent parser for the expression grammar.

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := ("+" | "-") unary | power
    power  := atom ("^" INT)?
    atom   := INT | IDENT | "sqrt" "(" expr ")" | "(" expr ")"

Identifiers may contain letters, digits and underscores. ``**`` is accepted
as a synonym for ``^``.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .context import Context, default_context
from .polynomial import Polynomial
from .radicals import sqrt_exact
from .ratfunc import RationalFunction


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} at line {line}, column {column}")
        self.line = line
        self.column = column


_TOKEN = re.compile(
    r"(?P<ws>\s+)|(?P<int>\d+)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>\*\*|[-+*/^()])"
)


def _tokenize(text: str):
    pos = 0
    line, col = 1, 1
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        val = m.group()
        if kind != "ws":
            out.append((kind, "^" if val == "**" else val, line, col))
        for ch in val:
            if ch == "\n":
                line, col = line + 1, 1
            else:
                col += 1
        pos = m.end()
    out.append(("eof", "", line, col))
    return out


def _guess_kind(name: str) -> str:
    return "time" if name == "t" else "parameter"


class _Parser:
    def __init__(self, text: str, ctx: Context, strict: bool, kinds):
        self.toks = _tokenize(text)
        self.i = 0
        self.ctx = ctx
        self.strict = strict
        self.kinds = kinds or {}

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, val):
        tok = self.take()
        if tok[1] != val:
            raise ParseError(f"expected {val!r}, found {tok[1] or 'end of input'!r}", tok[2], tok[3])
        return tok

    def parse(self) -> RationalFunction:
        if self.peek()[0] == "eof":
            tok = self.peek()
            raise ParseError("empty expression", tok[2], tok[3])
        val = self.expr()
        tok = self.peek()
        if tok[0] != "eof":
            raise ParseError(f"unexpected token {tok[1]!r}", tok[2], tok[3])
        return val

    def expr(self):
        val = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            val = val + rhs if op == "+" else val - rhs
        return val

    def term(self):
        val = self.unary()
        while self.peek()[1] in ("*", "/"):
            tok = self.take()
            rhs = self.unary()
            if tok[1] == "*":
                val = val * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("zero denominator", tok[2], tok[3])
                val = val / rhs
        return val

    def unary(self):
        if self.peek()[1] == "-":
            self.take()
            return -self.unary()
        if self.peek()[1] == "+":
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            tok = self.take()
            if tok[0] != "int":
                raise ParseError("exponent must be a positive integer", tok[2], tok[3])
            n = int(tok[1])
            if n < 1:
                raise ParseError("exponent must be a positive integer", tok[2], tok[3])
            base = base ** n
        return base

    def atom(self):
        tok = self.take()
        kind, val, line, col = tok
        if kind == "int":
            return RationalFunction.constant(self.ctx, Fraction(int(val)))
        if kind == "ident":
            if val == "sqrt" and self.peek()[1] == "(":
                self.take()
                inner = self.expr()
                self.expect(")")
                return sqrt_exact(inner)
            if not self.ctx.has(val):
                if self.strict:
                    raise ParseError(f"unknown symbol {val!r}", line, col)
                self.ctx.declare(val, self.kinds.get(val, _guess_kind(val)))
            return RationalFunction.coerce(self.ctx, self.ctx.var(val))
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ParseError(f"unexpected token {val or 'end of input'!r}", line, col)


def parse(text: str, ctx: Context | None = None, *, strict: bool = False, kinds=None) -> RationalFunction:
    """Parse ``text`` into a RationalFunction.

    Unknown identifiers are declared on the fly unless ``strict``; ``kinds``
    optionally maps names to symbol kinds for those declarations.
    """
    ctx = ctx or default_context()
    return _Parser(text, ctx, strict, kinds).parse()


def parse_polynomial(text: str, ctx: Context | None = None, **kw) -> Polynomial:
    return parse(text, ctx, **kw).as_polynomial()
