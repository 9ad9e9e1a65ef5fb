"""Sparse multivariate polynomials over the rationals.

A monomial is a tuple of ``(symbol_index, exponent)`` pairs sorted by index.
Terms are kept normalized: no zero coefficients and every symbol that has a
reduction rule ``s**p -> r`` appears with exponent below ``p``.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational

from .context import Context

Monomial = tuple


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out = []
    i = j = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        ia, ea = a[i]
        ib, eb = b[j]
        if ia == ib:
            out.append((ia, ea + eb))
            i += 1
            j += 1
        elif ia < ib:
            out.append(a[i])
            i += 1
        else:
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out)


def mono_div(a: Monomial, b: Monomial):
    """``a / b`` or None when b does not divide a."""
    da = dict(a)
    for idx, e in b:
        have = da.get(idx, 0)
        if have < e:
            return None
        if have == e:
            del da[idx]
        else:
            da[idx] = have - e
    return tuple(sorted(da.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_gcd(a: Monomial, b: Monomial) -> Monomial:
    db = dict(b)
    return tuple((i, min(e, db[i])) for i, e in a if i in db)


def mono_lcm(a: Monomial, b: Monomial) -> Monomial:
    d = dict(a)
    for i, e in b:
        d[i] = max(d.get(i, 0), e)
    return tuple(sorted(d.items()))


def grlex_key(m: Monomial):
    """Sort key putting larger monomials first (graded, then lex by introduction order)."""
    return (-mono_degree(m), tuple((i, -e) for i, e in m))


def _reduce(ctx: Context, raw: dict) -> dict:
    if not ctx.has_rules:
        return {m: c for m, c in raw.items() if c}
    out: dict = {}
    stack = list(raw.items())
    while stack:
        m, c = stack.pop()
        if not c:
            continue
        hit = None
        for pos, (idx, e) in enumerate(m):
            rule = ctx.rule(idx)
            if rule is not None and e >= rule[0]:
                hit = (pos, idx, e, rule[0])
                break
        if hit is None:
            out[m] = out.get(m, 0) + c
            continue
        pos, idx, e, p = hit
        q, r = divmod(e, p)
        base = m[:pos] + (((idx, r),) if r else ()) + m[pos + 1:]
        for m2, c2 in ctx.radicand_power(idx, q).terms.items():
            stack.append((mono_mul(base, m2), c * c2))
    return {m: c for m, c in out.items() if c}


class Polynomial:
    __slots__ = ("ctx", "terms", "_hash")

    def __init__(self, ctx: Context, terms=None, *, normalized: bool = False):
        self.ctx = ctx
        if terms is None:
            terms = {}
        elif not normalized:
            terms = _reduce(ctx, {m: Fraction(c) for m, c in terms.items()})
        self.terms = terms
        self._hash = None

    # -- constructors ----------------------------------------------------
    @classmethod
    def constant(cls, ctx: Context, value) -> "Polynomial":
        value = Fraction(value)
        return cls(ctx, {(): value} if value else {}, normalized=True)

    @classmethod
    def monomial(cls, ctx: Context, mono: Monomial, coeff=1) -> "Polynomial":
        return cls(ctx, {tuple(mono): Fraction(coeff)})

    @classmethod
    def coerce(cls, ctx: Context, value) -> "Polynomial":
        if isinstance(value, Polynomial):
            if value.ctx is not ctx:
                raise ValueError("polynomials belong to different contexts")
            return value
        if isinstance(value, (int, Rational)):
            return cls.constant(ctx, value)
        raise TypeError(f"cannot coerce {type(value).__name__} to Polynomial")

    # -- predicates ------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and () in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((), Fraction(0))

    def constant_term(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def symbols(self) -> set:
        return {i for m in self.terms for i, _ in m}

    def depends_on(self, index: int) -> bool:
        return any(self.ctx.depends_on(i, index) for i in self.symbols())

    def degree(self, index: int | None = None) -> int:
        if not self.terms:
            return -1
        if index is None:
            return max(mono_degree(m) for m in self.terms)
        return max(dict(m).get(index, 0) for m in self.terms)

    def valuation(self, index: int) -> int:
        """Smallest exponent of symbol ``index`` over the terms."""
        if not self.terms:
            raise ValueError("valuation of zero polynomial")
        return min(dict(m).get(index, 0) for m in self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    def leading_term(self):
        return min(self.terms.items(), key=lambda kv: grlex_key(kv[0]))

    # -- structural ------------------------------------------------------
    def _check(self, other: "Polynomial") -> None:
        if other.ctx is not self.ctx:
            raise ValueError("polynomials belong to different contexts")

    def __eq__(self, other) -> bool:
        if isinstance(other, Polynomial):
            return self.ctx is other.ctx and self.terms == other.terms
        if isinstance(other, (int, Rational)):
            return self.is_constant() and self.constant_value() == other
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        from .printing import format_polynomial

        return f"Polynomial({format_polynomial(self)})"

    def __str__(self) -> str:
        from .printing import format_polynomial

        return format_polynomial(self)

    # -- arithmetic ------------------------------------------------------
    def _wrap(self, other):
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Rational)):
            return Polynomial.constant(self.ctx, other)
        return None

    def __add__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        terms = dict(self.terms)
        for m, c in o.terms.items():
            v = terms.get(m, 0) + c
            if v:
                terms[m] = v
            else:
                terms.pop(m, None)
        return Polynomial(self.ctx, terms, normalized=True)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.ctx, {m: -c for m, c in self.terms.items()}, normalized=True)

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

    def scale(self, c) -> "Polynomial":
        c = Fraction(c)
        if not c:
            return Polynomial(self.ctx)
        return Polynomial(self.ctx, {m: v * c for m, v in self.terms.items()}, normalized=True)

    def mul_monomial(self, mono: Monomial, coeff=1) -> "Polynomial":
        coeff = Fraction(coeff)
        raw = {mono_mul(m, mono): c * coeff for m, c in self.terms.items()}
        return Polynomial(self.ctx, raw)

    def raw_mul(self, other: "Polynomial") -> dict:
        """Product in the free polynomial ring (no rule reduction)."""
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return {m: c for m, c in out.items() if c}

    def __mul__(self, other):
        o = self._wrap(other)
        if o is None:
            return NotImplemented
        if o.is_constant():
            return self.scale(o.constant_value())
        if self.is_constant():
            return o.scale(self.constant_value())
        return Polynomial(self.ctx, self.raw_mul(o))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            raise ValueError("polynomial powers must be non-negative integers")
        result = Polynomial.constant(self.ctx, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def content(self) -> Fraction:
        """Positive rational c with self/c primitive over the integers."""
        if not self.terms:
            return Fraction(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = gcd(num, c.numerator)
            den = den * c.denominator // gcd(den, c.denominator)
        return Fraction(num, den)

    def monomial_content(self) -> Monomial:
        it = iter(self.terms)
        g = next(it)
        for m in it:
            g = mono_gcd(g, m)
            if not g:
                break
        return g

    def divide_monomial(self, mono: Monomial) -> "Polynomial":
        terms = {}
        for m, c in self.terms.items():
            q = mono_div(m, mono)
            if q is None:
                raise ValueError("monomial does not divide polynomial")
            terms[q] = c
        return Polynomial(self.ctx, terms, normalized=True)

    def exact_divide(self, other: "Polynomial", max_steps: int = 400):
        """Quotient q with self == q*other in the free ring, or None."""
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if self.is_zero():
            return Polynomial(self.ctx)
        lm, lc = other.leading_term()
        rem = dict(self.terms)
        quot: dict = {}
        steps = 0
        while rem:
            steps += 1
            if steps > max_steps:
                return None
            m, c = min(rem.items(), key=lambda kv: grlex_key(kv[0]))
            q = mono_div(m, lm)
            if q is None:
                return None
            qc = c / lc
            quot[q] = quot.get(q, 0) + qc
            for m2, c2 in other.terms.items():
                mm = mono_mul(q, m2)
                v = rem.get(mm, 0) - qc * c2
                if v:
                    rem[mm] = v
                else:
                    rem.pop(mm, None)
        return Polynomial(self.ctx, quot)

    def diff_plain(self, index: int) -> "Polynomial":
        """Partial derivative treating every other symbol (radicals included) as constant."""
        raw = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.get(index, 0)
            if not e:
                continue
            if e == 1:
                del d[index]
            else:
                d[index] = e - 1
            key = tuple(sorted(d.items()))
            raw[key] = raw.get(key, 0) + c * e
        return Polynomial(self.ctx, {k: v for k, v in raw.items() if v}, normalized=True)

    def coefficients_in(self, index: int) -> dict:
        """Map exponent k -> coefficient polynomial of ``s**k``."""
        out: dict = {}
        for m, c in self.terms.items():
            d = dict(m)
            e = d.pop(index, 0)
            out.setdefault(e, {})[tuple(sorted(d.items()))] = c
        return {e: Polynomial(self.ctx, t, normalized=True) for e, t in out.items()}
