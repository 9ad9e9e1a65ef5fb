"""Exact square roots with on-demand radical adjunction."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .polynomial import Polynomial, grlex_key, mono_div, mono_mul


def _square_free_int(n: int) -> tuple[int, int]:
    """Split positive ``n`` as ``s**2 * k`` with k square-free (trial division, best effort)."""
    s, k = 1, 1
    p = 2
    while p * p <= n and p < 100000:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            k *= p
        p += 1 if p == 2 else 2
    r = isqrt(n)
    if r * r == n:
        s *= r
    else:
        k *= n
    return s, k


def sqrt_fraction(ctx, c: Fraction) -> Polynomial:
    """sqrt(c) as a polynomial; non-square parts adjoin ``sqrt(k)`` radicals."""
    if c == 0:
        return Polynomial(ctx)
    out = Polynomial.constant(ctx, 1)
    if c < 0:
        out = Polynomial.monomial(ctx, ((ctx.radical_for(Polynomial.constant(ctx, -1)), 1),))
        c = -c
    # sqrt(p/q) = sqrt(p*q)/q
    s, k = _square_free_int(c.numerator * c.denominator)
    out = out.scale(Fraction(s, c.denominator))
    if k != 1:
        out = out * Polynomial.monomial(ctx, ((ctx.radical_for(Polynomial.constant(ctx, k)), 1),))
    return out


def sqrt_monomial(ctx, mono, c: Fraction) -> Polynomial:
    out = sqrt_fraction(ctx, c)
    half = []
    for idx, e in mono:
        if e // 2:
            half.append((idx, e // 2))
        if e % 2:
            sym = Polynomial.monomial(ctx, ((idx, 1),))
            r = ctx.radical_for(sym)
            out = out * Polynomial.monomial(ctx, ((r, 1),))
    if half:
        out = out.mul_monomial(tuple(half))
    return out


def polynomial_sqrt(p: Polynomial):
    """Exact square root q (with positive leading coefficient) of p, or None."""
    if p.is_zero():
        return p
    ctx = p.ctx
    lm, lc = p.leading_term()
    if lc < 0 or any(e % 2 for _, e in lm):
        return None
    num, den = isqrt(lc.numerator), isqrt(lc.denominator)
    if num * num != lc.numerator or den * den != lc.denominator:
        return None
    root_lm = tuple((i, e // 2) for i, e in lm)
    root_lc = Fraction(num, den)
    root = {root_lm: root_lc}
    rem = dict(Polynomial(ctx, p.terms, normalized=True).terms)
    # rem = p - root^2, kept in the free ring
    rem[mono_mul(root_lm, root_lm)] = rem.get(mono_mul(root_lm, root_lm), 0) - root_lc * root_lc
    rem = {m: c for m, c in rem.items() if c}
    two_lead = (root_lm, 2 * root_lc)
    for _ in range(4 * len(p.terms) + 8):
        if not rem:
            return Polynomial(ctx, root)
        m, c = min(rem.items(), key=lambda kv: grlex_key(kv[0]))
        q = mono_div(m, two_lead[0])
        if q is None or q in root or grlex_key(q) <= grlex_key(root_lm):
            return None
        qc = c / two_lead[1]
        # (root + t)^2 = root^2 + 2*root*t + t^2
        for rm, rc in list(root.items()) + [(q, qc / 2)]:
            mm = mono_mul(rm, q)
            v = rem.get(mm, 0) - 2 * rc * qc
            if v:
                rem[mm] = v
            else:
                rem.pop(mm, None)
        root[q] = root.get(q, 0) + qc
    return None


def sqrt_polynomial(p: Polynomial) -> Polynomial:
    """Exact sqrt of a polynomial, adjoining a radical for the non-square part."""
    ctx = p.ctx
    if p.is_zero():
        return p
    exact = polynomial_sqrt(p)
    if exact is not None:
        return exact
    if p.is_monomial():
        (mono, c), = p.terms.items()
        return sqrt_monomial(ctx, mono, c)
    neg = -p
    exact = polynomial_sqrt(neg)
    if exact is not None:
        return exact * sqrt_fraction(ctx, Fraction(-1))
    # pull monomial and rational content out, adjoin the primitive remainder
    mono = p.monomial_content()
    cont = p.content()
    rest = p.divide_monomial(mono).scale(1 / cont)
    if rest.leading_term()[1] < 0:
        rest, cont = -rest, -cont
    outer = sqrt_monomial(ctx, mono, cont)
    r = ctx.radical_for(rest)
    return outer * Polynomial.monomial(ctx, ((r, 1),))


def sqrt_exact(f):
    """Exact square root of a RationalFunction: sqrt(n/d) = sqrt(n*d)/d unless both are squares."""
    from .ratfunc import RationalFunction

    n, d = f.num, f.den
    rn = polynomial_sqrt(n)
    rd = polynomial_sqrt(d)
    if rn is not None and rd is not None:
        return RationalFunction(rn, rd)
    if rd is not None:
        return RationalFunction(sqrt_polynomial(n), rd)
    return RationalFunction(sqrt_polynomial(n * d), d)
