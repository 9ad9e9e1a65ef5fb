"""Truncated Laurent series in tau = t - t0 with exact coefficients."""

from __future__ import annotations

import json
from fractions import Fraction

from ..algebra import Context, RationalFunction, format_rational
from ..algebra.radicals import sqrt_exact


class SeriesError(ArithmeticError):
    pass


class LaurentSeries:
    """sum_k coeffs[k] * tau**(valuation + k) + O(tau**order).

    ``order`` is the absolute exponent of the first unknown term; None means
    the series is exact (a Laurent polynomial). Leading zeros are stripped, so
    ``coeffs[0]`` is nonzero unless the series is zero to its order.
    """

    __slots__ = ("ctx", "valuation", "coeffs", "order")

    def __init__(self, ctx: Context, valuation: int, coeffs, order=None):
        self.ctx = ctx
        coeffs = [RationalFunction.coerce(ctx, c) for c in coeffs]
        if order is not None:
            keep = max(0, order - valuation)
            coeffs = coeffs[:keep]
        while coeffs and coeffs[0].is_zero():
            coeffs.pop(0)
            valuation += 1
        while coeffs and order is None and coeffs[-1].is_zero():
            coeffs.pop()
        if not coeffs:
            valuation = order if order is not None else 0
        self.valuation = valuation
        self.coeffs = coeffs
        self.order = order

    # -- constructors ----------------------------------------------------
    @classmethod
    def constant(cls, ctx: Context, value) -> "LaurentSeries":
        return cls(ctx, 0, [value])

    @classmethod
    def monomial(cls, ctx: Context, exponent: int, coeff=1) -> "LaurentSeries":
        return cls(ctx, exponent, [coeff])

    @classmethod
    def zero(cls, ctx: Context, order=None) -> "LaurentSeries":
        return cls(ctx, 0 if order is None else order, [], order)

    # -- access ----------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.coeffs

    def top(self) -> float:
        return float("inf") if self.order is None else self.order

    def coefficient(self, k: int) -> RationalFunction:
        if self.order is not None and k >= self.order:
            raise SeriesError(f"coefficient of tau^{k} is beyond the truncation order {self.order}")
        i = k - self.valuation
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return RationalFunction.constant(self.ctx, 0)

    def terms(self):
        """(exponent, coefficient) pairs for the nonzero known terms."""
        return [(self.valuation + i, c) for i, c in enumerate(self.coeffs) if not c.is_zero()]

    def truncate(self, order: int) -> "LaurentSeries":
        if self.order is not None and order > self.order:
            order = self.order
        return LaurentSeries(self.ctx, self.valuation, self.coeffs, order)

    def map_coefficients(self, fn) -> "LaurentSeries":
        return LaurentSeries(self.ctx, self.valuation, [fn(c) for c in self.coeffs], self.order)

    # -- arithmetic ------------------------------------------------------
    def _wrap(self, other):
        if isinstance(other, LaurentSeries):
            return other
        return LaurentSeries.constant(self.ctx, RationalFunction.coerce(self.ctx, other))

    def __add__(self, other):
        o = self._wrap(other)
        order = _min_order(self.order, o.order)
        lo = min(self.valuation, o.valuation)
        hi = max(self.valuation + len(self.coeffs), o.valuation + len(o.coeffs))
        if order is not None:
            hi = min(hi, order)
        out = []
        for k in range(lo, hi):
            out.append(self.coefficient(k) + o.coefficient(k))
        return LaurentSeries(self.ctx, lo, out, order)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.ctx, self.valuation, [-c for c in self.coeffs], self.order)

    def __sub__(self, other):
        return self + (-self._wrap(other))

    def __rsub__(self, other):
        return self._wrap(other) + (-self)

    def scale(self, c) -> "LaurentSeries":
        c = RationalFunction.coerce(self.ctx, c)
        return LaurentSeries(self.ctx, self.valuation, [x * c for x in self.coeffs], self.order)

    def __mul__(self, other):
        if not isinstance(other, LaurentSeries):
            return self.scale(other)
        o = other
        val = self.valuation + o.valuation
        order = _min_order(
            None if self.order is None else self.order + o.valuation,
            None if o.order is None else o.order + self.valuation,
        )
        if self.is_zero() or o.is_zero():
            return LaurentSeries.zero(self.ctx, order)
        n = len(self.coeffs) + len(o.coeffs) - 1
        if order is not None:
            n = min(n, order - val)
        zero = RationalFunction.constant(self.ctx, 0)
        out = []
        for k in range(max(n, 0)):
            acc = zero
            for i in range(max(0, k - len(o.coeffs) + 1), min(k + 1, len(self.coeffs))):
                a, b = self.coeffs[i], o.coeffs[k - i]
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + a * b
            out.append(acc)
        return LaurentSeries(self.ctx, val, out, order)

    __rmul__ = __mul__

    def shift(self, k: int) -> "LaurentSeries":
        """Multiply by tau**k."""
        return LaurentSeries(self.ctx, self.valuation + k, self.coeffs,
                             None if self.order is None else self.order + k)

    def inverse(self, depth: int | None = None) -> "LaurentSeries":
        """Reciprocal; an exact non-monomial input is expanded ``depth`` terms."""
        if self.is_zero():
            raise SeriesError("reciprocal of a series that is zero to its truncation order")
        rel = len(self.coeffs) if self.order is None else self.order - self.valuation
        if self.order is None and len(self.coeffs) > 1:
            rel = depth if depth is not None else 12
        a0inv = self.coeffs[0].inverse()
        b = [a0inv]
        zero = RationalFunction.constant(self.ctx, 0)
        for k in range(1, rel):
            acc = zero
            for i in range(1, min(k, len(self.coeffs) - 1) + 1):
                acc = acc + self.coeffs[i] * b[k - i]
            b.append(-(acc * a0inv))
        exact = self.order is None and len(self.coeffs) == 1
        return LaurentSeries(self.ctx, -self.valuation, b, None if exact else -self.valuation + rel)

    def __truediv__(self, other):
        if isinstance(other, LaurentSeries):
            return self * other.inverse(self._depth_hint())
        return self.scale(RationalFunction.coerce(self.ctx, other).inverse())

    def __rtruediv__(self, other):
        return self._wrap(other) * self.inverse()

    def _depth_hint(self) -> int:
        return len(self.coeffs) if self.order is not None else 12

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = LaurentSeries.constant(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            n >>= 1
            if n:
                base = base * base
        return out

    def sqrt(self, sign: int = 1, depth: int | None = None) -> "LaurentSeries":
        """Square root with leading coefficient ``sign * sqrt(c0)``."""
        if self.is_zero():
            raise SeriesError("no Laurent square root of a zero series")
        if self.valuation % 2:
            raise SeriesError("no Laurent square root: odd leading exponent")
        rel = (self.order - self.valuation) if self.order is not None else (depth or 12)
        if self.order is None and len(self.coeffs) == 1:
            rel = 1
        r0 = sqrt_exact(self.coeffs[0])
        if sign < 0:
            r0 = -r0
        inv2r0 = (r0 * 2).inverse()
        r = [r0]
        zero = RationalFunction.constant(self.ctx, 0)
        for k in range(1, rel):
            ck = self.coeffs[k] if k < len(self.coeffs) else zero
            acc = zero
            for i in range(1, k):
                acc = acc + r[i] * r[k - i]
            r.append((ck - acc) * inv2r0)
        exact = self.order is None and len(self.coeffs) == 1
        half = self.valuation // 2
        return LaurentSeries(self.ctx, half, r, None if exact else half + rel)

    def derivative(self) -> "LaurentSeries":
        """Termwise d/dtau."""
        out = [c * (self.valuation + i) for i, c in enumerate(self.coeffs)]
        return LaurentSeries(self.ctx, self.valuation - 1, out,
                             None if self.order is None else self.order - 1)

    # -- comparison ------------------------------------------------------
    def equals(self, other: "LaurentSeries", through: int | None = None) -> bool:
        """Coefficientwise equality on the exponents both series know (or below ``through``)."""
        hi = _min_order(self.order, other.order)
        if through is not None:
            hi = through if hi is None else min(hi, through)
        lo = min(self.valuation, other.valuation)
        if hi is None:
            hi = max(self.valuation + len(self.coeffs), other.valuation + len(other.coeffs))
        return all(self.coefficient(k) == other.coefficient(k) for k in range(lo, hi))

    # -- output ----------------------------------------------------------
    def format(self, local: str = "tau") -> str:
        out = ""
        for k, c in self.terms():
            cs = format_rational(c)
            neg = False
            if " + " in cs or " - " in cs:
                cs = f"({cs})"
            elif cs.startswith("-"):
                neg, cs = True, cs[1:]
            if k != 0:
                power = local if k == 1 else f"{local}^{k}"
                cs = power if cs == "1" else f"{cs}*{power}"
            if not out:
                out = f"-{cs}" if neg else cs
            else:
                out += f" - {cs}" if neg else f" + {cs}"
        out = out or "0"
        if self.order is not None:
            out += f" + O({local}^{self.order})"
        return out

    def __str__(self) -> str:
        return self.format()

    def __repr__(self) -> str:
        return f"LaurentSeries({self.format()})"

    def to_json(self) -> dict:
        return {
            "valuation": self.valuation,
            "order": self.order,
            "terms": [[k, format_rational(c)] for k, c in self.terms()],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))


def _min_order(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


def tau_series(ctx: Context) -> LaurentSeries:
    return LaurentSeries.monomial(ctx, 1)


def time_series(ctx: Context, t0: str = "t0") -> LaurentSeries:
    """t = t0 + tau as an exact series."""
    return LaurentSeries(ctx, 0, [ctx.var(t0, "parameter"), Fraction(1)])


def from_terms(ctx: Context, terms: dict, order=None) -> LaurentSeries:
    if not terms:
        return LaurentSeries.zero(ctx, order)
    lo = min(terms)
    hi = max(terms)
    zero = RationalFunction.constant(ctx, 0)
    coeffs = [terms.get(k, zero) for k in range(lo, hi + 1)]
    return LaurentSeries(ctx, lo, coeffs, order)
