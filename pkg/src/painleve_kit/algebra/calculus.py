"""Differentiation and simultaneous substitution for rational functions."""

from __future__ import annotations

from .context import Context, Symbol
from .polynomial import Polynomial
from .radicals import sqrt_exact
from .ratfunc import RationalFunction


def symbol_index(ctx: Context, symbol) -> int:
    if isinstance(symbol, int):
        return symbol
    if isinstance(symbol, Symbol):
        return symbol.index
    if isinstance(symbol, str):
        return ctx.lookup(symbol).index
    if isinstance(symbol, RationalFunction):
        symbol = symbol.num if symbol.den == 1 else None
    if isinstance(symbol, Polynomial) and symbol.is_monomial():
        (mono, c), = symbol.terms.items()
        if c == 1 and len(mono) == 1 and mono[0][1] == 1:
            return mono[0][0]
    raise TypeError(f"not a symbol: {symbol!r}")


def _radical_derivative(ctx: Context, r: int, s: int) -> RationalFunction:
    cache = ctx.__dict__.setdefault("_deriv_cache", {})
    key = (r, s)
    if key not in cache:
        p, radicand = ctx.rule(r)
        d = poly_derivative(radicand, s)
        rpow = Polynomial.monomial(ctx, ((r, p - 1),), p)
        cache[key] = d / RationalFunction.coerce(ctx, rpow)
    return cache[key]


def poly_derivative(p: Polynomial, s: int) -> RationalFunction:
    ctx = p.ctx
    out = RationalFunction.coerce(ctx, p.diff_plain(s))
    for r in p.symbols():
        if r == s or ctx.rule(r) is None or not ctx.depends_on(r, s):
            continue
        out = out + RationalFunction.coerce(ctx, p.diff_plain(r)) * _radical_derivative(ctx, r, s)
    return out


def differentiate(f, symbol) -> RationalFunction:
    """Partial derivative; radicals whose radicand involves ``symbol`` follow the chain rule."""
    f = RationalFunction.coerce(f.ctx, f)
    s = symbol_index(f.ctx, symbol)
    dn = poly_derivative(f.num, s)
    if f.den.is_constant():
        return dn / f.den.constant_value()
    dd = poly_derivative(f.den, s)
    den = RationalFunction.coerce(f.ctx, f.den)
    if dd.is_zero():
        return dn / den
    return (dn * den - RationalFunction.coerce(f.ctx, f.num) * dd) / (den * den)


def _images(ctx: Context, mapping) -> dict:
    out = {}
    for k, v in mapping.items():
        out[symbol_index(ctx, k)] = RationalFunction.coerce(ctx, v)
    return out


def substitute(f, mapping) -> RationalFunction:
    """Replace symbols simultaneously. Radicals over replaced symbols are re-rooted exactly."""
    ctx = f.ctx
    images = mapping if isinstance(mapping, _Images) else _Images(ctx, _images(ctx, mapping))
    f = RationalFunction.coerce(ctx, f)
    num = images.poly(f.num)
    if f.den.is_constant():
        return num / f.den.constant_value()
    return num / images.poly(f.den)


class _Images:
    def __init__(self, ctx: Context, base: dict):
        self.ctx = ctx
        self.base = base
        self.powers: dict = {}
        self.derived: dict = {}

    def image(self, idx: int):
        if idx in self.base:
            return self.base[idx]
        if idx in self.derived:
            return self.derived[idx]
        rule = self.ctx.rule(idx)
        img = None
        if rule is not None:
            p, radicand = rule
            if any(self.ctx.depends_on(i, j) for i in radicand.symbols() for j in self.base):
                if p != 2:
                    raise ValueError("only square-root symbols can follow a substitution")
                img = sqrt_exact(self.poly(radicand))
        self.derived[idx] = img
        return img

    def power(self, idx: int, e: int):
        key = (idx, e)
        if key not in self.powers:
            self.powers[key] = self.image(idx) ** e
        return self.powers[key]

    def poly(self, p: Polynomial) -> RationalFunction:
        ctx = self.ctx
        acc = RationalFunction.constant(ctx, 0)
        groups: dict = {}
        for mono, c in p.terms.items():
            keep = []
            sub = []
            for idx, e in mono:
                if self.image(idx) is None:
                    keep.append((idx, e))
                else:
                    sub.append((idx, e))
            groups.setdefault(tuple(sub), {})[tuple(keep)] = c
        for sub, rest in groups.items():
            part = RationalFunction.coerce(ctx, Polynomial(ctx, rest))
            for idx, e in sub:
                part = part * self.power(idx, e)
            acc = acc + part
        return acc


def substitution(ctx: Context, mapping) -> _Images:
    """Reusable substitution (caches powers across calls)."""
    return _Images(ctx, _images(ctx, mapping))
