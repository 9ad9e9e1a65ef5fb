from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from painleve_kit.algebra import (
    Context,
    ContextError,
    EvaluationError,
    ParseError,
    compile_functions,
    differentiate,
    equal,
    eval_numeric,
    format_rational,
    parse,
    sqrt_exact,
    substitute,
)


@pytest.fixture()
def c():
    ctx = Context("test")
    for name in ("x", "y"):
        ctx.declare(name, "coordinate")
    ctx.declare("t", "time")
    return ctx


def test_constant_arithmetic(c):
    assert equal(parse("1/2 + 1/3", c), parse("5/6", c))
    assert parse("2^10", c).as_constant() == 1024
    assert parse("-(3)", c).as_constant() == -3


def test_equality_by_cross_multiplication(c):
    assert equal(parse("(x^2 - 1)/(x - 1)", c), parse("x + 1", c))
    assert not equal(parse("(x^2 - 1)/(x - 1)", c), parse("x - 1", c))
    assert parse("x/x", c).as_constant() == 1


def test_monomial_and_content_cancellation(c):
    f = parse("(4*x^3*y)/(6*x*y^2)", c)
    assert format_rational(f) == "2/3*x^2/y"


def test_division_by_zero(c):
    with pytest.raises(ParseError, match="zero denominator"):
        parse("x/0", c)
    with pytest.raises(ZeroDivisionError):
        parse("x", c) / parse("0", c)


def test_parse_errors_carry_position(c):
    with pytest.raises(ParseError) as info:
        parse("x + * y", c)
    assert info.value.column == 5
    with pytest.raises(ParseError):
        parse("x $ 2", c)
    with pytest.raises(ParseError):
        parse("(x + 1", c)


def test_strict_parse_rejects_unknown_symbols(c):
    with pytest.raises(ParseError, match="unknown symbol"):
        parse("x + zz", c, strict=True)
    with pytest.raises(ContextError):
        c.declare("w", "bogus")


def test_square_roots(c):
    assert format_rational(sqrt_exact(parse("4*x^2", c))) == "2*x"
    assert equal(parse("sqrt(8)", c), parse("2*sqrt(2)", c))
    assert equal(parse("sqrt(2)^2", c), parse("2", c))
    r = parse("sqrt(2*t)", c)
    assert equal(r * r, parse("2*t", c))
    assert equal(r, parse("sqrt(2)*sqrt(t)", c))


def test_radical_rule_reduction(c):
    c.add_rule("a", 5, parse("-1", c).as_polynomial())
    assert equal(parse("a^7", c), parse("-a^2", c))
    assert equal(parse("a^10", c), parse("1", c))


def test_differentiation_with_radicals(c):
    r = parse("sqrt(t)", c)
    assert equal(differentiate(r, "t") * 2 * r, parse("1", c))
    f = parse("x^3*y/(x + t)", c)
    assert equal(differentiate(f, "y"), parse("x^3/(x + t)", c))


def test_substitution_reroots_radicals(c):
    f = parse("sqrt(t) + x", c)
    g = substitute(f, {"t": parse("4*y^2", c)})
    assert equal(g, parse("2*y + x", c))


def test_eval_numeric(c):
    f = parse("(x^2 + 1)/(y - t)", c)
    assert eval_numeric(f, {"x": 2, "y": 3, "t": 1}) == pytest.approx(2.5)
    with pytest.raises(EvaluationError):
        eval_numeric(f, {"x": 1, "y": 1, "t": 1})
    with pytest.raises(EvaluationError):
        eval_numeric(f, {"x": 1})


def test_compile_functions_matches_eval(c):
    fs = [parse("x*y - t", c), parse("sqrt(t)*x/(y + 1)", c)]
    fn = compile_functions(fs, ("x", "y"), {"t": 4})
    got = fn(1.5, 0.5)
    want = [eval_numeric(f, {"x": 1.5, "y": 0.5, "t": 4}) for f in fs]
    assert got == pytest.approx(want)
    with pytest.raises(EvaluationError):
        fn(1.0, -1.0)


def test_large_numerator_does_not_trip_the_pole_check(c):
    fn = compile_functions([parse("x^3/(y + 1)", c)], ("x", "y"))
    assert abs(fn(1e6, 1.0)[0]) == pytest.approx(5e17)


# -- properties ----------------------------------------------------------

small = st.integers(-4, 4)
terms = st.lists(st.tuples(small, st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=4)


def _poly(c, ts):
    def mono(i, j):
        return "".join(f"*{v}^{e}" for v, e in (("x", i), ("y", j)) if e)
    return parse(" + ".join(f"({a}){mono(i, j)}" for a, i, j in ts), c)


def _ctx():
    ctx = Context("prop")
    ctx.declare("x", "coordinate")
    ctx.declare("y", "coordinate")
    return ctx


@settings(max_examples=60, deadline=None)
@given(terms, terms, terms)
def test_ring_laws(a, b, d):
    c = _ctx()
    p, q, r = _poly(c, a), _poly(c, b), _poly(c, d)
    assert equal(p * q, q * p)
    assert equal(p * (q + r), p * q + p * r)
    assert equal((p + q) - q, p)


@settings(max_examples=60, deadline=None)
@given(terms, terms)
def test_quotient_round_trip(a, b):
    c = _ctx()
    p, q = _poly(c, a), _poly(c, b)
    if q.is_zero():
        return
    assert equal((p * q) / q, p)
    assert equal((p / q) * q, p)


@settings(max_examples=40, deadline=None)
@given(terms, terms)
def test_product_rule(a, b):
    c = _ctx()
    p, q = _poly(c, a), _poly(c, b)
    lhs = differentiate(p * q, "x")
    assert equal(lhs, differentiate(p, "x") * q + p * differentiate(q, "x"))


@settings(max_examples=40, deadline=None)
@given(terms, terms)
def test_print_parse_round_trip(a, b):
    c = _ctx()
    p, q = _poly(c, a), _poly(c, b)
    f = p / q if not q.is_zero() else p
    assert equal(parse(format_rational(f), c), f)


@settings(max_examples=40, deadline=None)
@given(terms, terms, st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
       st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False))
def test_evaluation_is_a_homomorphism(a, b, x, y):
    c = _ctx()
    p, q = _poly(c, a), _poly(c, b)
    env = {"x": x, "y": y}
    got = eval_numeric(p * q, env)
    want = eval_numeric(p, env) * eval_numeric(q, env)
    assert abs(got - want) <= 1e-9 * (1 + abs(want))


@settings(max_examples=40, deadline=None)
@given(st.fractions(min_value=Fraction(1, 50), max_value=50, max_denominator=50))
def test_sqrt_of_square(q):
    c = _ctx()
    f = parse(f"({q.numerator}/{q.denominator})^2*x^2", c)
    assert equal(sqrt_exact(f), parse(f"({q.numerator}/{q.denominator})*x", c))
