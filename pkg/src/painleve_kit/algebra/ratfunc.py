"""Quotients of polynomials, kept unreduced except for cheap cancellations.

There is no multivariate GCD here. Construction cancels common monomial
factors and rational content, rationalizes monomial denominators that carry
radical symbols, and tries exact division; equality is decided by
cross-multiplication.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational

from .context import Context
from .polynomial import Polynomial, mono_div, mono_gcd, mono_lcm, mono_mul


def _rationalize(num: Polynomial, den: Polynomial):
    ctx = den.ctx
    for _ in range(64):
        if not den.is_monomial():
            return num, den
        (mono, _c), = den.terms.items()
        fix = []
        for idx, e in mono:
            rule = ctx.rule(idx)
            if rule is not None:
                fix.append((idx, rule[0] - e))
        if not fix:
            return num, den
        fix = tuple(fix)
        num = num.mul_monomial(fix)
        den = den.mul_monomial(fix)
    return num, den


def _canon(num: Polynomial, den: Polynomial):
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    ctx = num.ctx
    if num.is_zero():
        return num, Polynomial.constant(ctx, 1)
    if den.is_constant():
        c = den.constant_value()
        return (num.scale(1 / c), Polynomial.constant(ctx, 1)) if c != 1 else (num, den)
    if ctx.has_rules:
        num, den = _rationalize(num, den)
    g = mono_gcd(num.monomial_content(), den.monomial_content())
    if g:
        num = num.divide_monomial(g)
        den = den.divide_monomial(g)
    c = den.content()
    if den.leading_term()[1] < 0:
        c = -c
    if c != 1:
        num = num.scale(1 / c)
        den = den.scale(1 / c)
    if den.is_constant():
        return num, Polynomial.constant(ctx, 1)
    if not den.is_monomial() and len(num.terms) >= len(den.terms):
        q = num.exact_divide(den)
        if q is not None:
            return q, Polynomial.constant(ctx, 1)
    return num, den


class RationalFunction:
    __slots__ = ("num", "den")

    def __init__(self, num, den=None, *, canonical: bool = False):
        if isinstance(num, RationalFunction):
            if den is not None:
                raise TypeError("pass a RationalFunction alone")
            self.num, self.den = num.num, num.den
            return
        if den is None:
            den = Polynomial.constant(num.ctx, 1)
        elif not isinstance(den, Polynomial):
            den = Polynomial.coerce(num.ctx, den)
        if num.ctx is not den.ctx:
            raise ValueError("numerator and denominator belong to different contexts")
        if canonical:
            self.num, self.den = num, den
        else:
            self.num, self.den = _canon(num, den)

    # -- constructors ----------------------------------------------------
    @classmethod
    def constant(cls, ctx: Context, value) -> "RationalFunction":
        return cls(Polynomial.constant(ctx, value), Polynomial.constant(ctx, 1), canonical=True)

    @classmethod
    def coerce(cls, ctx: Context, value) -> "RationalFunction":
        if isinstance(value, RationalFunction):
            if value.ctx is not ctx:
                raise ValueError("rational functions belong to different contexts")
            return value
        if isinstance(value, Polynomial):
            if value.ctx is not ctx:
                raise ValueError("polynomials belong to different contexts")
            return cls(value, Polynomial.constant(ctx, 1), canonical=True)
        if isinstance(value, (int, Rational)):
            return cls.constant(ctx, value)
        raise TypeError(f"cannot coerce {type(value).__name__} to RationalFunction")

    @property
    def ctx(self) -> Context:
        return self.num.ctx

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_constant()

    def is_constant(self) -> bool:
        return self.as_constant() is not None

    def as_constant(self):
        """The Fraction value if this function is a rational constant, else None."""
        if self.num.is_zero():
            return Fraction(0)
        if self.num.is_constant() and self.den.is_constant():
            return self.num.constant_value() / self.den.constant_value()
        if len(self.num.terms) != len(self.den.terms):
            return None
        (mn, cn) = self.num.leading_term()
        (md, cd) = self.den.leading_term()
        if mn != md:
            return None
        r = cn / cd
        return r if (self.num - self.den.scale(r)).is_zero() else None

    def as_polynomial(self) -> Polynomial:
        if not self.den.is_constant():
            raise ValueError(f"{self} is not a polynomial")
        return self.num.scale(1 / self.den.constant_value())

    def symbols(self) -> set:
        return self.num.symbols() | self.den.symbols()

    def depends_on(self, index: int) -> bool:
        return self.num.depends_on(index) or self.den.depends_on(index)

    # -- arithmetic ------------------------------------------------------
    def _wrap(self, other):
        if isinstance(other, RationalFunction):
            if other.ctx is not self.ctx:
                raise ValueError("rational functions belong to different contexts")
            return other
        if isinstance(other, Polynomial):
            if other.ctx is not self.ctx:
                raise ValueError("polynomials belong to different contexts")
            return RationalFunction(other, Polynomial.constant(self.ctx, 1), canonical=True)
        if isinstance(other, (int, Rational)):
            return RationalFunction.constant(self.ctx, other)
        return None

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        if o.num.is_zero():
            return self
        if self.num.is_zero():
            return o
        a, b = self, o
        if a.den == b.den:
            return RationalFunction(a.num + b.num, a.den)
        if a.den.is_monomial() and b.den.is_monomial():
            (ma, ca), = a.den.terms.items()
            (mb, cb), = b.den.terms.items()
            lcm = mono_lcm(ma, mb)
            fa = mono_div(lcm, ma)
            fb = mono_div(lcm, mb)
            den = Polynomial.monomial(self.ctx, lcm, ca * cb)
            return RationalFunction(a.num.mul_monomial(fa, cb) + b.num.mul_monomial(fb, ca), den)
        if b.den.is_constant():
            return RationalFunction(a.num + b.num * a.den.scale(1 / b.den.constant_value()), a.den)
        if a.den.is_constant():
            return RationalFunction(b.num + a.num * b.den.scale(1 / a.den.constant_value()), b.den)
        q = b.den.exact_divide(a.den)
        if q is not None:
            return RationalFunction(a.num * q + b.num, b.den)
        q = a.den.exact_divide(b.den)
        if q is not None:
            return RationalFunction(a.num + b.num * q, a.den)
        return RationalFunction(a.num * b.den + b.num * a.den, a.den * b.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den, canonical=True)

    def __sub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        if self.num.is_zero() or o.num.is_zero():
            return RationalFunction.constant(self.ctx, 0)
        n1, d1, n2, d2 = self.num, self.den, o.num, o.den
        # cross-cancel monomial factors before multiplying out
        if not d2.is_constant():
            g = mono_gcd(n1.monomial_content(), d2.monomial_content())
            if g:
                n1, d2 = n1.divide_monomial(g), d2.divide_monomial(g)
        if not d1.is_constant():
            g = mono_gcd(n2.monomial_content(), d1.monomial_content())
            if g:
                n2, d1 = n2.divide_monomial(g), d1.divide_monomial(g)
        if d1 == n2 and not d1.is_constant():
            return RationalFunction(n1, d2)
        if d2 == n1 and not d2.is_constant():
            return RationalFunction(n2, d1)
        return RationalFunction(n1 * n2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if self.num.is_zero():
            raise ZeroDivisionError("zero denominator")
        return RationalFunction(self.den, self.num)

    def __truediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if not isinstance(n, int):
            raise ValueError("only integer powers are supported")
        if n < 0:
            return self.inverse() ** (-n)
        if self.den.is_constant():
            return RationalFunction(self.num ** n, self.den ** n)
        return RationalFunction(self.num ** n, self.den ** n)

    # -- comparison ------------------------------------------------------
    def equals(self, other) -> bool:
        o = self._wrap(other)
        if o is None:
            raise TypeError(f"cannot compare with {type(other).__name__}")
        if self.den == o.den:
            return self.num == o.num
        return (self.num * o.den - o.num * self.den).is_zero()

    def __eq__(self, other):
        try:
            return self.equals(other)
        except TypeError:
            return NotImplemented

    __hash__ = None

    def __repr__(self) -> str:
        return f"RationalFunction({self})"

    def __str__(self) -> str:
        from .printing import format_rational

        return format_rational(self)

    # -- calculus / substitution ---------------------------------------
    def diff(self, symbol) -> "RationalFunction":
        from .calculus import differentiate

        return differentiate(self, symbol)

    def subs(self, mapping) -> "RationalFunction":
        from .calculus import substitute

        return substitute(self, mapping)


def as_rational(ctx: Context, value) -> RationalFunction:
    return RationalFunction.coerce(ctx, value)


def monomial_fraction(ctx: Context, num_mono, den_mono, coeff=1) -> RationalFunction:
    return RationalFunction(
        Polynomial.monomial(ctx, num_mono, coeff), Polynomial.monomial(ctx, den_mono)
    )


__all__ = ["RationalFunction", "as_rational", "monomial_fraction", "mono_mul"]
