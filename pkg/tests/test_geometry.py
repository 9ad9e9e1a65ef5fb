import pytest
import sympy as sp

from painleve_kit.algebra import Context, equal, parse, substitute
from painleve_kit.geometry import (
    AtlasError,
    GeometryError,
    accessible_points,
    alpha_test,
    builtin_atlas,
    divisor_pole_order,
    expansion_matrices,
    find_point,
    local_index,
    parse_atlas,
    recenter,
    resolution_script,
    to_chart,
)
from painleve_kit.geometry.atlas import BUILTIN_ATLASES
from painleve_kit.systems import PlaneSystem, compose, is_identity


@pytest.mark.parametrize("name", sorted(BUILTIN_ATLASES))
def test_builtin_charts_invert(cat, name):
    atlas = builtin_atlas(name, cat.ctx)
    for chart in atlas.charts.values():
        assert is_identity(compose(chart.to_base, chart.from_base))
        assert is_identity(compose(chart.from_base, chart.to_base))


@pytest.mark.parametrize("name", sorted(BUILTIN_ATLASES))
def test_atlas_text_round_trip(cat, name):
    atlas = builtin_atlas(name, cat.ctx)
    again = parse_atlas(atlas.to_text(), cat.ctx)
    assert again.name == atlas.name
    assert set(again.charts) == set(atlas.charts)
    assert again.to_text() == atlas.to_text()


def test_atlas_errors(ctx):
    with pytest.raises(AtlasError, match="base record"):
        parse_atlas("chart 1 vars(a,b) to_base: a,b from_base: a,b", ctx)
    with pytest.raises(AtlasError, match="line 2"):
        parse_atlas("base vars(v,u)\nnonsense", ctx)
    with pytest.raises(AtlasError, match="unknown chart"):
        parse_atlas("base vars(v,u)\ndivisor D on 9: v", ctx)
    with pytest.raises(AtlasError):
        builtin_atlas("nope", ctx)


# -- the K system on Sigma4 --------------------------------------------------

def test_recentered_system_at_p1(cat, ctx):
    K = cat.system("K")
    p1 = find_point(accessible_points(K, builtin_atlas("Sigma4", ctx)), "P1")
    rsys = recenter(K, p1)
    want = {
        "X": "sqrt(2*t)/2 + Y/2 - X^2",
        "Y": "-sqrt(2*t)*Y/X - Y^2/(2*X) + 4*X*Y + 4*sqrt(2*t)*X - 1/sqrt(2*t)",
    }
    got = dict(zip(rsys.vars, rsys.rhs))
    # the divisor coordinate is z1 (renamed X), the transverse one w1 - sqrt(2t) (renamed Y)
    assert set(got) == {"X", "Y"}
    for v, text in want.items():
        assert equal(got[v], parse(text, ctx)), v


def test_p3_is_degenerate(cat, ctx):
    K = cat.system("K")
    p3 = find_point(accessible_points(K, builtin_atlas("Sigma4", ctx)), "z2=0")
    rep = local_index(K, p3)
    assert rep.resonance_ratio is None and not rep.integer_verdict
    assert rep.status.startswith("degenerate")


def _sympy_expansion(order):
    """Independent expansion of w2*(dz2/dt, dw2/dt) for K in the chart (v, 1/u)."""
    v, u, t, xi, eta, e = sp.symbols("v u t xi eta e")
    H = (-sp.Rational(1, 4) * v**6 * u**2 + sp.Rational(1, 4) * t * v**4 * u
         + sp.Rational(1, 4) * v**5 * u - t**2 * v**2 / 16 - t * v**3 / 8 - v**4 / 16 + u)
    dv, du = sp.diff(H, u), -sp.diff(H, v)
    sub = {v: xi, u: 1 / eta}
    dz = dv.subs(sub)
    dw = (-du / u**2).subs(sub)
    rows = []
    for f in (sp.expand(eta * dz), sp.expand(eta * dw)):
        g = sp.expand(sp.simplify(f).subs({xi: e * xi, eta: e * eta}))
        rows.append(sp.Poly(sp.series(g, e, 0, order + 1).removeO(), e, xi, eta))
    mats = []
    for k in range(1, order + 1):
        mats.append([[r.coeff_monomial(e**k * xi**k), r.coeff_monomial(e**k * xi**(k - 1) * eta)]
                     for r in rows])
    return mats, t


def test_p3_matrices_against_independent_expansion(cat, ctx):
    K = cat.system("K")
    p3 = find_point(accessible_points(K, builtin_atlas("Sigma4", ctx)), "z2=0")
    ours = expansion_matrices(K, p3, 6)
    want, t = _sympy_expansion(6)
    for k, (M, W) in enumerate(zip(ours, want), 1):
        for i in range(2):
            for j in range(2):
                assert equal(M[i][j], parse(str(sp.nsimplify(W[i][j])), ctx)), (k, i, j)
    # the two nonzero higher matrices
    assert equal(ours[4][0][1], parse("t/4", ctx))
    assert equal(ours[5][0][1], parse("1/4", ctx))


def test_local_index_is_chart_independent(cat, ctx):
    """Listing chart 3 first moves P1 onto the other chart of L; the ratio stays -2."""
    text = builtin_atlas("Sigma4", ctx).to_text().splitlines()
    charts = [ln for ln in text if ln.startswith("chart")]
    divisors = [ln for ln in text if ln.startswith("divisor")]
    head = text[:2]
    reordered = head + [charts[2], charts[1], charts[0]] + [divisors[1], divisors[0]] + divisors[2:]
    atlas = parse_atlas("\n".join(reordered), ctx, "Sigma4b")
    K = cat.system("K")
    rep = accessible_points(K, atlas)
    finite = [p for p in rep if p.divisor == "L"]
    assert len(finite) == 2
    for p in finite:
        assert equal(local_index(K, p).resonance_ratio, parse("-2", ctx))


def test_find_point_errors(cat, ctx):
    rep = accessible_points(cat.system("K"), builtin_atlas("Sigma4", ctx))
    with pytest.raises(GeometryError):
        find_point(rep, "P9")
    with pytest.raises(GeometryError):
        find_point(rep, "z2=5")


def test_pole_orders(cat, ctx):
    K = cat.system("K")
    atlas = builtin_atlas("Sigma4", ctx)
    assert divisor_pole_order(K, atlas, "L") == 1
    assert divisor_pole_order(K, atlas, "H") == 1


# -- the resolved chart (X, Y) = (v, u v^6) -----------------------------------

XY_SYSTEM = {
    "X": "1 - Y/2 + t*X^4/4 + X^5/4",
    "Y": "-3*(Y - 4)*Y/(2*X) + t^2*X^7/8 + 3*t*X^8/8 + X^9/4 + t*X^3*Y/2 + X^4*Y/4",
}
XY_RECENTERED = {
    "X1": "-1 - Y1/2 + t*X1^4/4 + X1^5/4",
    "Y1": "-6*Y1/X1 - 3*Y1^2/(2*X1) + 2*t*X1^3 + X1^4 + t^2*X1^7/8 + 3*t*X1^8/8 + X1^9/4"
          " + t*X1^3*Y1/2 + X1^4*Y1/4",
}


def test_xy_chart_system(cat, ctx):
    atlas = builtin_atlas("XY", ctx)
    csys = to_chart(cat.system("K"), atlas.chart("XY"))
    for v, r in zip(csys.vars, csys.rhs):
        assert equal(r, parse(XY_SYSTEM[v], ctx)), v


def test_xy_recentered_at_p3_tilde(cat, ctx):
    K = cat.system("K")
    pt = find_point(accessible_points(K, builtin_atlas("XY", ctx)), "Y=4")
    rsys = recenter(K, pt)
    for v, r in zip(rsys.vars, rsys.rhs):
        assert equal(r, parse(XY_RECENTERED[v], ctx)), v


def test_six_blowups_give_the_xy_chart(cat, ctx):
    maps, total = resolution_script(ctx)
    assert len(maps) == 8
    chart = builtin_atlas("XY", ctx).chart("XY")
    for a, b in zip(total.components, chart.from_base.components):
        assert equal(a, b)


def test_y_zero_is_excluded(cat, ctx):
    rep = accessible_points(cat.system("K"), builtin_atlas("XY", ctx))
    assert [str(p.location) for p in rep] == ["4"]


# -- toy systems for the two exceptional alpha-test verdicts -----------------

def _toy(fx, fy):
    ctx = Context("toy")
    for n in ("x", "y"):
        ctx.declare(n, "coordinate")
    ctx.declare("t", "time")
    atlas = parse_atlas("base vars(x,y)\nchart C vars(x,y) to_base: x,y from_base: x,y\n"
                        "divisor E on C: x", ctx)
    sys_ = PlaneSystem(ctx, ("x", "y"), (parse(fx, ctx), parse(fy, ctx)), name="toy", check=False)
    return ctx, find_point(accessible_points(sys_, atlas), "y=0"), sys_


def test_alpha_test_non_integer_exponent():
    ctx, pt, sys_ = _toy("2", "y/x")
    rep = alpha_test(sys_, pt)
    assert equal(rep.exponent, parse("1/2", ctx))
    assert rep.single_valued is False
    assert rep.solution_text["W"] == "C2*(2*T + C1)^(1/2)"


def test_alpha_test_logarithmic_case():
    # ratio 1 with a21 != 0 forces a logarithm
    ctx, pt, sys_ = _toy("1", "y/x + 1")
    rep = alpha_test(sys_, pt)
    assert equal(rep.exponent, parse("1", ctx))
    assert rep.single_valued is False
    assert rep.solution_text["W"] == "C2*(T + C1) + (T + C1)*log(T + C1)"


def test_alpha_test_integer_exponent_solves_reduced_system():
    ctx, pt, sys_ = _toy("1", "-2*y/x + 3")
    rep = alpha_test(sys_, pt)
    assert rep.single_valued is True and rep.residual_zero is True


# -- cross-checks between the local analyses ---------------------------------

def _regular_points(cat, ctx):
    out = []
    for name, atlas in (("K", "Sigma4"), ("PVI", "PVI")):
        sys_ = cat.system(name)
        for p in accessible_points(sys_, builtin_atlas(atlas, ctx)):
            if not local_index(sys_, p).a11.is_zero():
                out.append((sys_, p))
    return out


def test_first_matrix_carries_the_local_index(cat, ctx):
    for sys_, p in _regular_points(cat, ctx):
        rep = local_index(sys_, p)
        (M,) = expansion_matrices(sys_, p, 1)
        # triangular in (transverse, divisor) order, diagonal (a22, a11)
        assert M[1][0].is_zero()
        assert equal(M[0][0], rep.a22) and equal(M[1][1], rep.a11)


def test_single_valued_verdict_matches_integrality(cat, ctx):
    for sys_, p in _regular_points(cat, ctx):
        rep = local_index(sys_, p)
        if equal(rep.a11, rep.a22):
            continue
        assert alpha_test(sys_, p).single_valued is rep.integer_verdict


def test_pole_order_ignores_unit_rescaling(cat, ctx):
    text = builtin_atlas("Sigma4", ctx).to_text()
    scaled = text.replace("divisor L on 1: z1", "divisor L on 1: 3*z1")
    assert scaled != text
    atlas = parse_atlas(scaled, ctx, "Sigma4s")
    assert divisor_pole_order(cat.system("K"), atlas, "L") == 1


def test_pvi_closed_form_at_zero(cat, ctx):
    pvi = cat.system("PVI")
    pt = find_point(accessible_points(pvi, builtin_atlas("PVI", ctx)), "X=0")
    rep = alpha_test(pvi, pt)
    sol = rep.solution[rep.transverse_var]
    # the displayed form normalises C2 differently, by a factor (t0 - 1)^2
    ours = substitute(sol, {"C2": parse("C2*(t0 - 1)^2", ctx)})
    want = parse("C2*(T + (t0 - 1)*C1)^2 + alpha4*(T + (t0 - 1)*C1)/(t0 - 1)", ctx)
    assert equal(ours, want)
