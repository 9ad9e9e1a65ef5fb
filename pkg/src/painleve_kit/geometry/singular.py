"""Accessible singular points on boundary divisors and the local data around them."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..algebra import (
    Polynomial,
    RationalFunction,
    differentiate,
    format_rational,
    sqrt_exact,
    substitute,
)
from ..systems import BirationalMap, PlaneSystem, pushforward
from .atlas import Atlas, AtlasError, Chart, DivisorComponent, to_chart


class GeometryError(ValueError):
    pass


@dataclass
class AccessiblePoint:
    """A point (x_d, x_s) = (0, location) of a chart, x_d the divisor coordinate."""

    label: str
    chart: Chart
    divisor: str
    divisor_var: str
    transverse_var: str
    location: RationalFunction
    multiplicity: int | None = 1
    base_value: str = ""

    def coordinates(self) -> dict:
        ctx = self.location.ctx
        return {self.divisor_var: RationalFunction.constant(ctx, 0),
                self.transverse_var: self.location}

    def describe(self) -> str:
        coords = self.coordinates()
        a, b = self.chart.vars
        return (f"{self.label}: ({a},{b}) = ({format_rational(coords[a])}, "
                f"{format_rational(coords[b])}) on {self.divisor}")

    def to_json(self) -> dict:
        coords = self.coordinates()
        return {
            "label": self.label,
            "chart": self.chart.id,
            "divisor": self.divisor,
            "coordinates": {k: format_rational(coords[k]) for k in self.chart.vars},
            "multiplicity": self.multiplicity,
            "base_value": self.base_value,
        }


@dataclass
class UnresolvedLocus:
    chart: str
    divisor: str
    equation: RationalFunction
    reason: str


@dataclass
class SingularityReport:
    points: list = field(default_factory=list)
    unresolved: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def __getitem__(self, k):
        return self.points[k]


def _idx(ctx, name: str) -> int:
    return ctx.lookup(name).index


def _valuation(f: RationalFunction, idx: int) -> int | None:
    """Order of vanishing of f along symbol ``idx`` (None for f = 0)."""
    if f.is_zero():
        return None
    return f.num.valuation(idx) - f.den.valuation(idx)


def _roles(chart: Chart, comp: DivisorComponent):
    eq = comp.equation
    syms = eq.symbols()
    if not (eq.is_monomial() and len(syms) == 1):
        raise AtlasError("divisor local equations must be a single chart coordinate")
    (mono, _), = eq.terms.items()
    if mono[0][1] != 1:
        raise AtlasError("divisor local equations must be reduced")
    name = eq.ctx.symbol_at(mono[0][0]).name
    if name not in chart.vars:
        raise AtlasError(f"divisor coordinate {name!r} is not a variable of chart {chart.id!r}")
    other = chart.vars[1] if name == chart.vars[0] else chart.vars[0]
    return name, other


def _component_orders(sys: PlaneSystem, d: str, s: str):
    ctx = sys.ctx
    rhs = dict(zip(sys.vars, sys.rhs))
    i = _idx(ctx, d)
    return _valuation(rhs[d], i), _valuation(rhs[s], i)


def divisor_pole_order(sys: PlaneSystem, atlas: Atlas, divisor) -> int:
    """Pole order of the vector field along a divisor, in the logarithmic convention.

    A field d/dt + g1 d/dx1 + (g2/x1) d/dx2 with holomorphic g has order one;
    the divisor coordinate's own rate counts with one extra power.
    """
    d = atlas.divisor(divisor) if isinstance(divisor, str) else divisor
    if not d.components:
        raise GeometryError(f"divisor {d.name!r} is not met by any chart")
    best = 0
    for comp in d.components:
        chart = atlas.chart(comp.chart)
        dv, sv = _roles(chart, comp)
        csys = to_chart(sys.apply_constraints(), chart)
        od, os_ = _component_orders(csys, dv, sv)
        if od is not None:
            best = max(best, 1 - od)
        if os_ is not None:
            best = max(best, -os_)
    return best


def _clear(f: RationalFunction, idx: int, k: int) -> RationalFunction:
    ctx = f.ctx
    mono = ((idx, k),) if k > 0 else ()
    num = f.num.mul_monomial(mono) if mono else f.num
    den = f.den if k >= 0 else f.den.mul_monomial(((idx, -k),))
    return RationalFunction(num, den)


def _restrict(f: RationalFunction, name: str) -> RationalFunction:
    ctx = f.ctx
    if f.den.is_zero():
        raise GeometryError("zero denominator")
    den0 = substitute(RationalFunction.coerce(ctx, f.den), {name: 0})
    if den0.is_zero():
        raise GeometryError(f"function still has a pole along {name} = 0")
    return substitute(f, {name: 0})


def _rank(r: RationalFunction):
    return r.num.degree() + r.den.degree()


def _roots(f: RationalFunction, var: str):
    """Roots in ``var`` of a rational function; None marks an unresolved factor."""
    ctx = f.ctx
    i = _idx(ctx, var)
    num = f.num
    zero = RationalFunction.constant(ctx, 0)
    roots = []
    m = num.valuation(i)
    if m > 0:
        roots.append(zero)
        num = num.divide_monomial(((i, m),))
    deg = num.degree(i)
    coeffs = {k: RationalFunction.coerce(ctx, c) for k, c in num.coefficients_in(i).items()}
    extra = []
    if deg == 1:
        extra = [-coeffs.get(0, zero) / coeffs[1]]
    elif deg == 2:
        A, B, C = coeffs[2], coeffs.get(1, zero), coeffs.get(0, zero)
        if A.num.leading_term()[1] * A.den.leading_term()[1] < 0:
            A, B, C = -A, -B, -C
        root = sqrt_exact(B * B - A * C * 4)
        extra = [(-B + root) / (A * 2), (-B - root) / (A * 2)]
    elif deg >= 3:
        return roots, num
    out = roots + sorted(extra, key=_rank)
    # drop roots where the restricted function is not defined
    keep = []
    for r in out:
        if f.den.depends_on(i) and substitute(RationalFunction.coerce(ctx, f.den), {var: r}).is_zero():
            continue
        if not any(r == k for k in keep):
            keep.append(r)
    return keep, None


def _limit(f: RationalFunction, eps: str):
    """Value of f as ``eps`` -> 0: a RationalFunction, or None when it diverges."""
    ctx = f.ctx
    i = _idx(ctx, eps)
    v = _valuation(f, i)
    if v is None or v > 0:
        return RationalFunction.constant(ctx, 0)
    if v < 0:
        return None
    num = f.num.coefficients_in(i)[f.num.valuation(i)]
    den = f.den.coefficients_in(i)[f.den.valuation(i)]
    return RationalFunction(num, den)


def chart_transition(atlas: Atlas, src: Chart, dst: Chart) -> tuple:
    """Components of dst's coordinates in terms of src's coordinates."""
    ctx = atlas.ctx
    to_base = dict(zip(atlas.base_vars, src.to_base.components))
    return tuple(substitute(c, to_base) for c in dst.from_base.components)


def _image(atlas: Atlas, point: AccessiblePoint, dst: Chart):
    """Coordinates in ``dst`` of a boundary point, taken as a limit onto the divisor."""
    ctx = atlas.ctx
    comps = chart_transition(atlas, point.chart, dst)
    eps = point.divisor_var
    try:
        on_curve = [substitute(c, {point.transverse_var: point.location}) for c in comps]
    except ZeroDivisionError:
        return None
    out = []
    for c in on_curve:
        lim = _limit(c, eps)
        if lim is None:
            return None
        out.append(lim)
    return dict(zip(dst.vars, out))


def _same_point(atlas: Atlas, p: AccessiblePoint, q: AccessiblePoint) -> bool:
    if p.chart.id == q.chart.id:
        return p.divisor_var == q.divisor_var and p.location == q.location
    for a, b in ((p, q), (q, p)):
        img = _image(atlas, b, a.chart)
        if img is not None:
            mine = a.coordinates()
            return all(img[v] == mine[v] for v in a.chart.vars)
    return False


def _base_value(atlas: Atlas, p: AccessiblePoint) -> str:
    comp = p.chart.to_base.components[0]
    try:
        comp = substitute(comp, {p.transverse_var: p.location})
    except ZeroDivisionError:
        return "inf"
    lim = _limit(comp, p.divisor_var)
    return "inf" if lim is None else format_rational(lim)


def accessible_points(sys: PlaneSystem, atlas: Atlas, *, multiplicity_order: int = 8) -> SingularityReport:
    """Accessible singular points of ``sys`` on every divisor of ``atlas``.

    Along a divisor {x1 = 0} the transverse rate is written g/x1; the points are
    the zeros of g on x1 = 0. Points seen from several charts are reported once,
    in the chart where they were met first.
    """
    report = SingularityReport()
    ctx = sys.ctx
    sys = sys.apply_constraints()
    for d in atlas.divisors.values():
        for comp in d.components:
            chart = atlas.chart(comp.chart)
            dv, sv = _roles(chart, comp)
            csys = to_chart(sys, chart)
            rhs = dict(zip(csys.vars, csys.rhs))
            di = _idx(ctx, dv)
            os_ = _valuation(rhs[sv], di)
            if os_ is None or os_ >= 0:
                continue
            g = _restrict(_clear(rhs[sv], di, -os_), dv)
            if g.is_zero():
                report.unresolved.append(UnresolvedLocus(chart.id, d.name, g, "whole component"))
                continue
            roots, rest = _roots(g, sv)
            if rest is not None:
                report.unresolved.append(UnresolvedLocus(
                    chart.id, d.name, RationalFunction.coerce(ctx, rest),
                    "transverse equation of degree 3 or more"))
            for r in roots:
                if any(v == sv and r == val for v, val in comp.exclude):
                    continue
                cand = AccessiblePoint("", chart, d.name, dv, sv, r)
                if any(_same_point(atlas, p, cand) for p in report.points):
                    continue
                cand.label = f"P{len(report.points) + 1}"
                cand.base_value = _base_value(atlas, cand)
                report.points.append(cand)
    for p in report.points:
        p.multiplicity = multiplicity(sys, p, multiplicity_order)
    return report


def find_point(points, key: str) -> AccessiblePoint:
    """Select a point by label (P1), chart coordinate (z2=1) or base value (X=inf)."""
    pts = list(points)
    for p in pts:
        if p.label == key:
            return p
    name, _, value = key.partition("=")
    name, value = name.strip(), value.strip().replace(" ", "")
    if value in ("oo", "infinity", "∞"):
        value = "inf"
    for p in pts:
        coords = p.coordinates()
        if name in coords and format_rational(coords[name]).replace(" ", "") == value:
            return p
    for p in pts:
        if p.base_value.replace(" ", "") == value:
            return p
    raise GeometryError(f"no accessible point matches {key!r}")


# -- local coordinates around a point -------------------------------------

def recenter_map(p: AccessiblePoint, names=None) -> BirationalMap:
    chart = p.chart
    ctx = p.location.ctx
    if names is None:
        names = ("X", "Y") if "X" not in chart.vars else ("X1", "Y1")
    names = tuple(names)
    comps, inv = [], []
    for v, n in zip(chart.vars, names):
        shift = p.location if v == p.transverse_var else RationalFunction.constant(ctx, 0)
        ctx.declare(n, "coordinate")
        comps.append(ctx.var(v) - shift)
        inv.append(ctx.var(n) + shift)
    return BirationalMap(ctx, chart.vars, names, tuple(comps), inverse=tuple(inv),
                         name=f"recenter[{p.label}]")


def recenter(sys: PlaneSystem, p: AccessiblePoint, names=None) -> PlaneSystem:
    """The system in coordinates centred at p, listed in chart order.

    Parameter constraints of ``sys`` are applied first.
    """
    csys = to_chart(sys.apply_constraints(), p.chart)
    if p.location.is_zero() and names is None:
        return csys
    m = recenter_map(p, names)
    out = pushforward(csys, m, method="forward")
    out.name = f"{sys.name}@{p.label}"
    return out


def _roles_in(rsys: PlaneSystem, p: AccessiblePoint):
    k = p.chart.vars.index(p.divisor_var)
    return rsys.vars[k], rsys.vars[1 - k]


def _at_origin(f: RationalFunction, names) -> RationalFunction:
    out = f
    for n in names:
        out = substitute(out, {n: 0})
    return out


@dataclass
class LocalIndexReport:
    point: str
    a11: RationalFunction
    a12: RationalFunction
    a21: RationalFunction
    a22: RationalFunction
    resonance_ratio: RationalFunction | None
    integer_verdict: bool
    status: str = "ok"

    @property
    def matrix(self):
        """Linear part in the order (transverse, divisor)."""
        return [[self.a22, self.a21], [self.a12, self.a11]]

    def to_json(self) -> dict:
        f = format_rational
        return {
            "point": self.point,
            "a11": f(self.a11), "a12": f(self.a12), "a21": f(self.a21), "a22": f(self.a22),
            "resonance_ratio": None if self.resonance_ratio is None else f(self.resonance_ratio),
            "integer_verdict": self.integer_verdict,
            "status": self.status,
        }


def integer_value(r: RationalFunction):
    c = r.as_constant()
    if c is None or c.denominator != 1:
        return None
    return int(c)


def local_index(sys: PlaneSystem, p: AccessiblePoint) -> LocalIndexReport:
    """Linearisation of (x1 rhs_s, x1 rhs_d) at p, x1 the divisor coordinate.

    a11 is the divisor rate's own eigenvalue, a22 the transverse one and a21 the
    divisor column of the transverse row.
    """
    rsys = recenter(sys, p)
    ctx = sys.ctx
    d, s = _roles_in(rsys, p)
    rhs = dict(zip(rsys.vars, rsys.rhs))
    di = _idx(ctx, d)
    gd = _clear(rhs[d], di, 1)
    gs = _clear(rhs[s], di, 1)
    names = rsys.vars
    try:
        a11 = _at_origin(differentiate(gd, d), names)
        a12 = _at_origin(differentiate(gd, s), names)
        a21 = _at_origin(differentiate(gs, d), names)
        a22 = _at_origin(differentiate(gs, s), names)
    except ZeroDivisionError:
        raise GeometryError(f"the field has a higher-order pole at {p.label}") from None
    if a11.is_zero():
        return LocalIndexReport(p.label, a11, a12, a21, a22, None, False,
                                "degenerate; use expansion_matrices")
    ratio = a22 / a11
    return LocalIndexReport(p.label, a11, a12, a21, a22, ratio, integer_value(ratio) is not None)


# -- graded expansion -----------------------------------------------------

def _bivariate(p: Polynomial, i: int, j: int) -> dict:
    ctx = p.ctx
    out: dict = {}
    for ei, ci in p.coefficients_in(i).items():
        for ej, cj in ci.coefficients_in(j).items():
            out[(ei, ej)] = RationalFunction.coerce(ctx, cj)
    return out


def _mul_trunc(a: dict, b: dict, top: int) -> dict:
    out: dict = {}
    for (i1, j1), c1 in a.items():
        for (i2, j2), c2 in b.items():
            if i1 + i2 + j1 + j2 > top:
                continue
            k = (i1 + i2, j1 + j2)
            out[k] = out[k] + c1 * c2 if k in out else c1 * c2
    return {k: v for k, v in out.items() if not v.is_zero()}


def taylor(f: RationalFunction, x: str, y: str, top: int) -> dict:
    """Taylor coefficients {(i, j): c} of f in x**i y**j through total degree ``top``."""
    ctx = f.ctx
    i, j = _idx(ctx, x), _idx(ctx, y)
    for idx in f.symbols():
        if ctx.rule(idx) is not None and (ctx.depends_on(idx, i) or ctx.depends_on(idx, j)):
            raise GeometryError("radicals of the local coordinates are not supported")
    num = _bivariate(f.num, i, j)
    den = _bivariate(f.den, i, j)
    d0 = den.get((0, 0))
    if d0 is None or d0.is_zero():
        raise GeometryError("the function has a pole at the origin")
    inv0 = d0.inverse()
    # 1/D = (1/d0) * sum_k E^k with E = 1 - D/d0
    E = {k: -(v * inv0) for k, v in den.items() if k != (0, 0)}
    acc = {(0, 0): RationalFunction.constant(ctx, 1)}
    power = dict(acc)
    for _ in range(top):
        power = _mul_trunc(power, E, top)
        if not power:
            break
        for k, v in power.items():
            acc[k] = acc[k] + v if k in acc else v
    acc = {k: v * inv0 for k, v in acc.items()}
    return _mul_trunc(num, acc, top)


def expansion_matrices(sys: PlaneSystem, p: AccessiblePoint, max_order: int) -> list:
    """M_k for k = 1..max_order from x1 * rhs around p.

    With xi the transverse and eta the divisor coordinate, row one is eta*dxi/dt and
    row two eta*deta/dt; M_k holds the coefficients of xi**k and xi**(k-1)*eta.
    """
    rsys = recenter(sys, p)
    ctx = sys.ctx
    d, s = _roles_in(rsys, p)
    rhs = dict(zip(rsys.vars, rsys.rhs))
    di = _idx(ctx, d)
    rows = [taylor(_clear(rhs[s], di, 1), s, d, max_order),
            taylor(_clear(rhs[d], di, 1), s, d, max_order)]
    zero = RationalFunction.constant(ctx, 0)
    out = []
    for k in range(1, max_order + 1):
        out.append([[row.get((k, 0), zero), row.get((k - 1, 1), zero)] for row in rows])
    return out


def has_nonzero_eigenvalue(M) -> bool:
    tr = M[0][0] + M[1][1]
    det = M[0][0] * M[1][1] - M[0][1] * M[1][0]
    return not (tr.is_zero() and det.is_zero())


def multiplicity(sys: PlaneSystem, p: AccessiblePoint, max_order: int = 8):
    """Index of the first expansion matrix with a nonzero eigenvalue (None if none found)."""
    try:
        mats = expansion_matrices(sys, p, max_order)
    except GeometryError:
        return None
    for k, M in enumerate(mats, 1):
        if has_nonzero_eigenvalue(M):
            return k
    return None


def matrix_json(M) -> list:
    return [[format_rational(x) for x in row] for row in M]


__all__ = [
    "AccessiblePoint", "GeometryError", "LocalIndexReport", "SingularityReport", "UnresolvedLocus",
    "accessible_points", "chart_transition", "divisor_pole_order", "expansion_matrices",
    "find_point", "has_nonzero_eigenvalue", "integer_value", "local_index", "matrix_json",
    "multiplicity", "recenter", "recenter_map", "taylor",
]
