"""The alpha-test: frozen-time scaling limit at an accessible point and its explicit solution."""

from __future__ import annotations

from dataclasses import dataclass

from ..algebra import RationalFunction, differentiate, format_rational, substitute
from ..systems import PlaneSystem
from .singular import AccessiblePoint, GeometryError, _limit, integer_value, recenter

SCALE = "scale_"


def _default_names(vars_) -> tuple:
    a, b = vars_
    if (a, b) == ("X", "Y"):
        return ("X1", "Y1")
    if a[:-1] == "X" and b[:-1] == "Y" and a[-1:].isdigit() and a[-1] == b[-1]:
        k = int(a[-1]) + 1
        return (f"X{k}", f"Y{k}")
    return ("Z", "W")


@dataclass
class AlphaTestReport:
    point: str
    reduced: PlaneSystem
    divisor_var: str
    transverse_var: str
    a11: RationalFunction
    a12: RationalFunction
    a21: RationalFunction
    a22: RationalFunction
    exponent: RationalFunction | None = None
    solution: dict | None = None
    solution_text: dict | None = None
    single_valued: bool | None = None
    residual_zero: bool | None = None

    def to_json(self) -> dict:
        f = format_rational
        out = {
            "point": self.point,
            "reduced": {v: f(r) for v, r in zip(self.reduced.vars, self.reduced.rhs)},
            "a11": f(self.a11), "a21": f(self.a21), "a22": f(self.a22),
            "exponent": None if self.exponent is None else f(self.exponent),
            "single_valued": self.single_valued,
        }
        if self.solution_text is not None:
            out["solution"] = dict(self.solution_text)
            out["residual_zero"] = self.residual_zero
        return out


def alpha_reduce(sys: PlaneSystem, p: AccessiblePoint, *, names=None, time: str = "T",
                 t0: str = "t0") -> AlphaTestReport:
    """Freeze t = t0, scale both local coordinates by a small parameter and let it go to zero."""
    rsys = recenter(sys, p)
    ctx = sys.ctx
    names = tuple(names) if names else _default_names(rsys.vars)
    for n in names:
        ctx.declare(n, "coordinate")
    ctx.declare(time, "time")
    ctx.declare(SCALE, "parameter")
    eps = ctx.var(SCALE)
    frozen = {rsys.time: ctx.var(t0, "parameter")}
    scaled = {v: eps * ctx.var(n) for v, n in zip(rsys.vars, names)}
    reduced = []
    for r in rsys.rhs:
        f = substitute(substitute(r, frozen), scaled)
        lim = _limit(f, SCALE)
        if lim is None:
            raise GeometryError(f"the scaling limit diverges at {p.label}")
        reduced.append(lim)
    red = PlaneSystem(ctx, names, reduced, time=time, name=f"{sys.name}@{p.label}/alpha", check=False)
    k = rsys.vars.index(_divisor_in(rsys, p))
    d, s = names[k], names[1 - k]
    rhs = dict(zip(names, reduced))
    xd = ctx.var(d)
    gd = rhs[d] * xd
    gs = rhs[s] * xd
    zero = {d: 0, s: 0}
    a11 = substitute(differentiate(gd, d), zero)
    a12 = substitute(differentiate(gd, s), zero)
    a21 = substitute(differentiate(gs, d), zero)
    a22 = substitute(differentiate(gs, s), zero)
    # the reduced field must be exactly linear over x_d
    linear = (gd == xd * a11 + ctx.var(s) * a12) and (gs == xd * a21 + ctx.var(s) * a22)
    if not linear:
        raise GeometryError(f"the reduced system at {p.label} is not of the linear form")
    return AlphaTestReport(p.label, red, d, s, a11, a12, a21, a22)


def _divisor_in(rsys: PlaneSystem, p: AccessiblePoint) -> str:
    return rsys.vars[p.chart.vars.index(p.divisor_var)]


def solve_reduced(rep: AlphaTestReport, *, constants=("C1", "C2")) -> AlphaTestReport:
    """Explicit solution of dx_d/dT = a11, dx_s/dT = (a22 x_s + a21 x_d)/x_d."""
    ctx = rep.a11.ctx
    if rep.a11.is_zero():
        raise GeometryError("degenerate; use expansion_matrices")
    if not rep.a12.is_zero():
        raise GeometryError("the reduced system is not triangular")
    c1, c2 = (ctx.var(c, "parameter") for c in constants)
    T = ctx.var(rep.reduced.time)
    div = rep.a11 * T + c1
    r = rep.a22 / rep.a11
    rep.exponent = r
    n = integer_value(r)
    div_text = f"({format_rational(div)})"
    if n == 1:
        rep.single_valued = rep.a21.is_zero()
        if rep.single_valued:
            trans = div * c2
            text = format_rational(trans)
        else:
            trans = None
            k = rep.a21 / rep.a11
            factor = "" if k.as_constant() == 1 else f"({format_rational(k)})*"
            text = f"{constants[1]}*{div_text} + {factor}{div_text}*log{div_text}"
    else:
        rep.single_valued = n is not None
        particular = rep.a21 * div / (rep.a11 - rep.a22)
        if n is not None:
            trans = div ** n * c2 + particular
            power = f"^{n}" if n >= 0 else f"^({n})"
        else:
            trans = None
            power = f"^({format_rational(r)})"
        text = f"{constants[1]}*{div_text}{power}"
        if not particular.is_zero():
            text += f" + {format_rational(particular)}"
    rep.solution_text = {rep.divisor_var: format_rational(div), rep.transverse_var: text}
    if trans is None:
        rep.solution = None
        rep.residual_zero = None
        return rep
    rep.solution = {rep.divisor_var: div, rep.transverse_var: trans}
    rep.residual_zero = reduced_residual_zero(rep.reduced, rep.solution)
    return rep


def reduced_residual_zero(sys: PlaneSystem, solution: dict) -> bool:
    """Substitute an explicit solution into the system and test the residual for zero."""
    sub = {v: solution[v] for v in sys.vars}
    for v, r in zip(sys.vars, sys.rhs):
        lhs = differentiate(solution[v], sys.time)
        if not (lhs - substitute(r, sub)).is_zero():
            return False
    return True


def alpha_test(sys: PlaneSystem, p: AccessiblePoint, **kw) -> AlphaTestReport:
    return solve_reduced(alpha_reduce(sys, p, **kw))


__all__ = ["AlphaTestReport", "alpha_reduce", "alpha_test", "reduced_residual_zero", "solve_reduced"]
