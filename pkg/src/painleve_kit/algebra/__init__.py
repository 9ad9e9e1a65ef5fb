"""Exact arithmetic: rationals, polynomials with radical rules, rational functions."""

from .calculus import differentiate, substitute, substitution, symbol_index
from .context import Context, ContextError, Symbol, default_context
from .evaluate import EvaluationError, compile_functions, eval_numeric
from .parser import ParseError, parse, parse_polynomial
from .polynomial import Polynomial
from .printing import format_polynomial, format_rational
from .radicals import polynomial_sqrt, sqrt_exact
from .ratfunc import RationalFunction


def normalize(p: Polynomial) -> Polynomial:
    """Re-apply the context's reduction rules to ``p``."""
    return Polynomial(p.ctx, dict(p.terms))


def equal(f, g) -> bool:
    """Equality by cross-multiplication; contexts must match."""
    ctx = f.ctx
    if getattr(g, "ctx", ctx) is not ctx:
        raise ValueError("expressions belong to different contexts")
    return RationalFunction.coerce(ctx, f).equals(g)


__all__ = [
    "Context", "ContextError", "Symbol", "default_context", "Polynomial", "RationalFunction",
    "parse", "parse_polynomial", "ParseError", "differentiate", "substitute", "substitution",
    "symbol_index", "eval_numeric", "compile_functions", "EvaluationError", "format_polynomial",
    "format_rational", "sqrt_exact", "polynomial_sqrt", "normalize", "equal",
]
