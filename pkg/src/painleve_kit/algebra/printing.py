"""Text rendering in the expression grammar (parseable by :mod:`.parser`)."""

from __future__ import annotations

from fractions import Fraction


def _frac(c: Fraction) -> str:
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_monomial(ctx, mono) -> str:
    parts = []
    for idx, e in mono:
        name = ctx.symbol_at(idx).name
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _term(ctx, mono, c: Fraction) -> str:
    if not mono:
        return _frac(c)
    m = format_monomial(ctx, mono)
    if c == 1:
        return m
    return f"{_frac(c)}*{m}"


def format_polynomial(p) -> str:
    if not p.terms:
        return "0"
    out = []
    for i, (mono, c) in enumerate(p.sorted_terms()):
        neg = c < 0
        body = _term(p.ctx, mono, -c if neg else c)
        if i == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _is_atom(p) -> bool:
    if len(p.terms) != 1:
        return False
    (mono, c), = p.terms.items()
    if not mono:
        return c.denominator == 1 and c >= 0
    return c == 1 and len(mono) == 1


def format_rational(f) -> str:
    num, den = f.num, f.den
    if den.is_constant() and den.constant_value() == 1:
        return format_polynomial(num)
    ns = format_polynomial(num)
    if len(num.terms) > 1:
        ns = f"({ns})"
    ds = format_polynomial(den)
    if not _is_atom(den):
        ds = f"({ds})"
    return f"{ns}/{ds}"
