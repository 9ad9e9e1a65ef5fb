"""Floating-point evaluation of exact expressions."""

from __future__ import annotations

import cmath
from fractions import Fraction

from .calculus import symbol_index
from .ratfunc import RationalFunction

DENOMINATOR_EPS = 1e-15


class EvaluationError(ArithmeticError):
    pass


def _principal_root(value: complex, p: int) -> complex:
    if p == 2:
        return cmath.sqrt(value)
    if value == 0:
        return 0j
    return cmath.exp(cmath.log(value) / p)


class _Env:
    def __init__(self, ctx, assignment):
        self.ctx = ctx
        self.values: dict = {}
        for k, v in assignment.items():
            self.values[symbol_index(ctx, k)] = complex(v)

    def value(self, idx: int) -> complex:
        if idx in self.values:
            return self.values[idx]
        rule = self.ctx.rule(idx)
        if rule is None:
            raise EvaluationError(f"unassigned symbol {self.ctx.symbol_at(idx).name!r}")
        p, radicand = rule
        v = _principal_root(self.poly(radicand)[0], p)
        self.values[idx] = v
        return v

    def poly(self, p):
        total = 0j
        scale = 0.0
        for mono, c in p.terms.items():
            term = complex(float(c))
            for idx, e in mono:
                term *= self.value(idx) ** e
            total += term
            scale += abs(term)
        return total, scale


def eval_numeric(f, assignment) -> complex:
    """Evaluate with principal roots for radicals unless ``assignment`` pins them."""
    if isinstance(f, (int, Fraction)):
        return complex(f)
    ctx = f.ctx
    env = _Env(ctx, assignment)
    f = RationalFunction.coerce(ctx, f)
    num, _ = env.poly(f.num)
    den, dscale = env.poly(f.den)
    if den == 0 or abs(den) < DENOMINATOR_EPS * dscale:
        raise EvaluationError("denominator vanishes at this point")
    return num / den


def _poly_source(p, name_of, magnitude: bool = False) -> str:
    parts = []
    for mono, c in p.terms.items():
        factors = [repr(float(c))]
        for idx, e in mono:
            n = name_of(idx)
            factors.append(n if e == 1 else f"{n}**{e}")
        term = "*".join(factors)
        parts.append(f"abs({term})" if magnitude else term)
    return "(" + " + ".join(parts) + ")" if parts else "0.0"


def compile_functions(funcs, arg_names, fixed=None):
    """Compile rational functions into one fast callable ``f(*args) -> list[complex]``.

    ``arg_names`` are the symbols supplied per call; ``fixed`` pins the rest.
    Radicals not pinned are evaluated as principal roots of their radicands.
    """
    funcs = list(funcs)
    ctx = funcs[0].ctx
    funcs = [RationalFunction.coerce(ctx, f) for f in funcs]
    args = [symbol_index(ctx, a) for a in arg_names]
    fixed_vals = {symbol_index(ctx, k): complex(v) for k, v in (fixed or {}).items()}
    names = {i: f"a{n}" for n, i in enumerate(args)}
    consts = {}
    lines = []
    order: list = []

    def name_of(idx):
        if idx in names:
            return names[idx]
        if idx in fixed_vals:
            nm = f"k{idx}"
            names[idx] = nm
            consts[nm] = fixed_vals[idx]
            return nm
        rule = ctx.rule(idx)
        if rule is None:
            raise EvaluationError(f"unassigned symbol {ctx.symbol_at(idx).name!r}")
        p, radicand = rule
        src = _poly_source(radicand, name_of)
        nm = f"r{idx}"
        names[idx] = nm
        order.append(f"    {nm} = _root({src}, {p})")
        return nm

    outs = []
    for f in funcs:
        n = _poly_source(f.num, name_of)
        if f.den.is_constant():
            outs.append(f"{n} / {float(f.den.constant_value())!r}")
        else:
            d = _poly_source(f.den, name_of)
            outs.append(f"_div({n}, {d}, {_poly_source(f.den, name_of, True)})")
    lines.extend(order)
    body = ", ".join(outs)
    src = "def _f({}):\n{}\n    return [{}]\n".format(
        ", ".join(f"a{n}" for n in range(len(args))), "\n".join(lines) or "    pass", body
    )
    ns = {"_root": _principal_root, "_div": _checked_div}
    ns.update(consts)
    exec(compile(src, "<compiled-rational>", "exec"), ns)
    return ns["_f"]


def _checked_div(n, d, scale):
    """n/d unless d has cancelled down to rounding noise relative to its terms."""
    if d == 0 or abs(d) < DENOMINATOR_EPS * scale:
        raise EvaluationError("denominator vanishes at this point")
    return n / d
