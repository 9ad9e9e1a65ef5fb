from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from painleve_kit.algebra import Context, equal, parse, substitute
from painleve_kit.catalog import builtin_catalog
from painleve_kit.numerics import eval_series_numeric
from painleve_kit.series import (
    LaurentSeries,
    SeriesError,
    SeriesEvaluator,
    change_of_unknown,
    dominant_balances,
    from_terms,
    indicial_polynomial,
    map_series,
    painleve_test,
    residual,
    resonances,
    time_series,
)


@pytest.fixture()
def c():
    ctx = Context("series")
    ctx.declare("t0", "parameter")
    return ctx


def _series(ctx, val, coeffs, order=None):
    return from_terms(ctx, {val + i: Fraction(a) for i, a in enumerate(coeffs)}, order)


def test_exact_arithmetic(c):
    a = _series(c, -1, [1, 2])
    b = _series(c, 1, [3])
    assert (a * b).equals(_series(c, 0, [3, 6]))
    assert (a + b).equals(_series(c, -1, [1, 2, 3]))
    assert (a - a).is_zero()


def test_truncation_order_propagates(c):
    a = _series(c, -2, [1, 0, 5], order=3)
    b = _series(c, 0, [1, 1], order=4)
    prod = a * b
    # the unknown tail of b starts at tau^4 and is multiplied by tau^-2
    assert prod.order == 2
    assert (a + b).order == 3
    assert a.derivative().order == 2


def test_inverse_and_sqrt(c):
    a = _series(c, 0, [1, 1])  # 1 + tau
    inv = a.inverse(6)
    assert inv.equals(_series(c, 0, [1, -1, 1, -1, 1, -1], order=6))
    sq = _series(c, -2, [4, 4, 1], order=5)  # (2/tau + 1)^2 with a tail
    r = sq.sqrt()
    assert r.valuation == -1 and r.coefficient(-1).as_constant() == 2
    assert (r * r).equals(sq)
    neg = sq.sqrt(sign=-1)
    assert neg.coefficient(-1).as_constant() == -2


def test_sqrt_rejects_odd_valuation(c):
    with pytest.raises(SeriesError):
        _series(c, -1, [1], order=3).sqrt()
    with pytest.raises(SeriesError):
        LaurentSeries.zero(c, 4).inverse()


def test_time_series(c):
    t = time_series(c)
    assert equal(t.coefficient(0), c.var("t0"))
    assert t.coefficient(1).as_constant() == 1


nonzero = st.integers(-5, 5).filter(bool)


@settings(max_examples=60, deadline=None)
@given(st.integers(-3, 3), nonzero, st.lists(st.integers(-5, 5), max_size=6))
def test_series_times_inverse_is_one(val, lead, rest):
    ctx = Context("prop")
    s = _series(ctx, val, [lead] + rest, order=val + 1 + len(rest))
    one = s * s.inverse()
    assert one.valuation == 0 and one.coefficient(0).as_constant() == 1
    assert all(one.coefficient(k).is_zero() for k in range(1, one.order))


@settings(max_examples=40, deadline=None)
@given(st.integers(-2, 2), nonzero, st.lists(st.integers(-5, 5), max_size=5),
       st.lists(st.integers(-5, 5), min_size=1, max_size=5))
def test_leibniz_rule(val, lead, rest, other):
    ctx = Context("prop")
    a = _series(ctx, val, [lead] + rest)
    b = _series(ctx, 0, other)
    assert (a * b).derivative().equals(a.derivative() * b + a * b.derivative())


# -- Painleve test -------------------------------------------------------

def test_pi_branch(cat, ctx):
    (br,) = painleve_test(cat.ode("PI"), depth=9)
    assert br.leading_exponent == 2
    assert br.resonances == [-1, 6]
    assert br.compatible and br.free_symbols == ["h"]
    res = residual(cat.ode("PI"), br.series)
    assert res.is_zero()
    assert equal(br.series.coefficient(2), parse("-t0/10", ctx))


def test_pi_indicial_polynomial(cat, ctx):
    ode = cat.ode("PI")
    L = indicial_polynomial(ode, 2, 1)
    assert resonances(L) == [-1, 6]


def test_balances_of_pi(cat):
    bals = dominant_balances(cat.ode("PI"))
    assert [(b.n, len(b.solutions)) for b in bals] == [(2, 1)]


def test_q_branches_are_a_sign_pair(cat, ctx):
    qb = painleve_test(cat.ode("q"), depth=5)
    assert len(qb) == 2
    a, b = qb
    assert equal(a.leading_coefficient, -b.leading_coefficient)
    for br in qb:
        assert br.leading_exponent == 1
        assert br.resonances == [-2, -1]
        assert residual(cat.ode("q"), br.series).is_zero()


def test_q_branch_squares_to_a_regular_x(cat, ctx):
    # x = 1/q^2 recovers a series vanishing to second order
    for br in painleve_test(cat.ode("q"), depth=5):
        x = change_of_unknown(br.series, parse("1/q0^2", ctx))
        assert equal(x.coefficient(2), parse("t0/2", ctx))
        assert equal(x.coefficient(3), parse("1/6", ctx))
        assert x.valuation == 2


def test_Q_branches(cat, ctx):
    qb = painleve_test(cat.ode("Q"), depth=7)
    leads = sorted(b.leading_coefficient.as_constant() for b in qb)
    assert leads == [-1, 1]
    for br in qb:
        assert br.compatible and len(br.free_symbols) == 1
        assert residual(cat.ode("Q"), br.series).is_zero()


def test_deeper_expansion_extends_shallower(cat):
    (a,) = painleve_test(cat.ode("PI"), depth=9)
    (b,) = painleve_test(cat.ode("PI"), depth=12)
    assert b.series.order == 10
    assert b.series.equals(a.series)


# -- transport -----------------------------------------------------------

def test_transport_to_K_solves_K(cat, ctx):
    (br,) = painleve_test(cat.ode("PI"), depth=12)
    m = cat.map("phi").inverted()
    v, u = map_series(m, br.series, radical_signs={"sqrt(x)": -1})
    k = cat.system("K")
    ev = SeriesEvaluator(ctx, {"v": v, "u": u, "t": time_series(ctx)}, depth=12)
    for lhs, rhs in zip((v.derivative(), u.derivative()), k.rhs):
        assert (lhs - ev.rational(rhs)).is_zero()


def test_transport_round_trip(cat, ctx):
    (br,) = painleve_test(cat.ode("PI"), depth=12)
    m = cat.map("phi")
    vu = map_series(m.inverted(), br.series, radical_signs={"sqrt(x)": -1})
    x, y = map_series(m, vu)
    assert x.equals(br.series)
    assert y.equals(br.series.derivative())


def test_both_roots_are_preimages(cat, ctx):
    """The inverse is two-valued; each root gives a K solution over the same PI solution."""
    (br,) = painleve_test(cat.ode("PI"), depth=12)
    m = cat.map("phi")
    k = cat.system("K")
    vals = {}
    for sign in (1, -1):
        v, u = map_series(m.inverted(), br.series, radical_signs={"sqrt(x)": sign})
        x, _ = map_series(m, (v, u))
        assert x.equals(br.series)
        ev = SeriesEvaluator(ctx, {"v": v, "u": u, "t": time_series(ctx)}, depth=12)
        assert (u.derivative() - ev.rational(k.rhs[1])).is_zero()
        vals[sign] = (v.valuation, u.valuation)
    # the principal root lands on a regular point, the other one on a pole of u
    assert vals[1] == (1, 0)
    assert vals[-1] == (1, -6)


def test_change_of_unknown_detects_poles(cat, ctx):
    (br,) = painleve_test(cat.ode("Q"), depth=7)[:1]
    with pytest.raises(SeriesError):
        change_of_unknown(br.series - br.series, parse("1/Q0", ctx))


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=Fraction(1, 4), max_value=4, max_denominator=20),
       st.fractions(min_value=-3, max_value=3, max_denominator=20))
def test_residual_vanishes_after_specialising(t0, h):
    cat = builtin_catalog()
    (br,) = painleve_test(cat.ode("PI"), depth=10)
    values = {"t0": t0, "h": h}
    spec = br.series.map_coefficients(lambda c: substitute(c, values))
    # the time series t = t0 + tau still carries t0, so specialise the residual too
    res = residual(cat.ode("PI"), spec).map_coefficients(lambda c: substitute(c, values))
    assert res.is_zero()


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 2.0), st.floats(0.05, 0.3), st.floats(-1, 1))
def test_derivative_matches_finite_difference(t0, tau, h):
    cat = builtin_catalog()
    (br,) = painleve_test(cat.ode("PI"), depth=12)
    env = {"t0": t0, "h": h}
    t = t0 + tau
    step = 1e-6
    fd = (eval_series_numeric(br.series, t + step, env)
          - eval_series_numeric(br.series, t - step, env)) / (2 * step)
    exact = eval_series_numeric(br.series.derivative(), t, env)
    assert abs(fd - exact) <= 1e-4 * abs(exact)
