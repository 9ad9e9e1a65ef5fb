"""Evaluate exact expressions on Laurent series; move series through maps."""

from __future__ import annotations

from ..algebra import Context, Polynomial, RationalFunction, parse
from ..algebra.calculus import symbol_index
from .laurent import LaurentSeries, SeriesError, time_series


class SeriesEvaluator:
    """Substitute series for some symbols of exact expressions.

    Symbols not in ``series`` stay in the coefficients. Radicals whose radicand
    involves a substituted symbol become series square roots; their sign is
    taken from ``radical_signs`` (by radical name, default +1).
    """

    def __init__(self, ctx: Context, series: dict, radical_signs=None, depth: int = 12):
        self.ctx = ctx
        self.series = {symbol_index(ctx, k): v for k, v in series.items()}
        self.signs = dict(radical_signs or {})
        self.depth = depth
        self._powers: dict = {}
        self._radicals: dict = {}

    def _involved(self, idx: int) -> bool:
        return any(self.ctx.depends_on(idx, j) for j in self.series)

    def symbol(self, idx: int) -> LaurentSeries | None:
        if idx in self.series:
            return self.series[idx]
        if idx in self._radicals:
            return self._radicals[idx]
        out = None
        rule = self.ctx.rule(idx)
        if rule is not None and self._involved(idx):
            p, radicand = rule
            if p != 2:
                raise SeriesError("only square roots can depend on substituted symbols")
            name = self.ctx.symbol_at(idx).name
            out = self.poly(radicand).sqrt(self.signs.get(name, 1), depth=self.depth)
        self._radicals[idx] = out
        return out

    def power(self, idx: int, e: int) -> LaurentSeries:
        key = (idx, e)
        if key not in self._powers:
            if e == 1:
                self._powers[key] = self.symbol(idx)
            else:
                half = self.power(idx, e // 2)
                sq = half * half
                self._powers[key] = sq * self.symbol(idx) if e % 2 else sq
        return self._powers[key]

    def poly(self, p: Polynomial) -> LaurentSeries:
        ctx = self.ctx
        groups: dict = {}
        for mono, c in p.terms.items():
            keep, sub = [], []
            for idx, e in mono:
                (sub if self.symbol(idx) is not None else keep).append((idx, e))
            groups.setdefault(tuple(sub), {})[tuple(keep)] = c
        acc = LaurentSeries.zero(ctx)
        for sub, rest in groups.items():
            coeff = RationalFunction.coerce(ctx, Polynomial(ctx, rest, normalized=True))
            part = LaurentSeries.constant(ctx, coeff)
            for idx, e in sub:
                part = part * self.power(idx, e)
            acc = acc + part
        return acc

    def rational(self, f) -> LaurentSeries:
        f = RationalFunction.coerce(self.ctx, f)
        num = self.poly(f.num)
        if f.den.is_constant():
            return num.scale(RationalFunction.constant(self.ctx, 1 / f.den.constant_value()))
        den = self.poly(f.den)
        return num * den.inverse(self.depth)


def _depth_of(series) -> int:
    best = 0
    for s in series:
        if s.order is not None:
            best = max(best, s.order - s.valuation)
    return best or 12


def map_series(m, s, *, t0: str = "t0", radical_signs=None):
    """Substitute a series pair (or a series and its derivative) into the map components."""
    if isinstance(s, LaurentSeries):
        s = (s, s.derivative())
    ctx = m.ctx
    series = dict(zip(m.source_vars, s))
    series[m.time] = time_series(ctx, t0)
    ev = SeriesEvaluator(ctx, series, radical_signs, depth=_depth_of(s))
    return tuple(ev.rational(c) for c in m.components)


def change_of_unknown(s: LaurentSeries, f, var: str | None = None, *, t0: str = "t0") -> LaurentSeries:
    """f(s) for a rational function f of one unknown (time may also appear)."""
    ctx = s.ctx
    if isinstance(f, str):
        f = parse(f, ctx)
    f = RationalFunction.coerce(ctx, f)
    if var is None:
        cands = [i for i in f.symbols() if ctx.symbol_at(i).kind == "coordinate"]
        if len(cands) != 1:
            raise ValueError("name the unknown of the change explicitly")
        var = cands[0]
    series = {var: s}
    if ctx.has("t"):
        series["t"] = time_series(ctx, t0)
    ev = SeriesEvaluator(ctx, series, depth=_depth_of([s]))
    if not f.den.is_constant():
        den = ev.poly(f.den)
        if den.is_zero():
            raise SeriesError("the change has a pole along this series")
    return ev.rational(f)
