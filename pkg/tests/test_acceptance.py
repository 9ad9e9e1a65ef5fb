"""One test per acceptance criterion; each records a PASS/FAIL line for the summary."""

import cmath
import random
import time

from conftest import ACCEPTANCE

from painleve_kit.algebra import differentiate, equal, eval_numeric, parse, substitute
from painleve_kit.geometry import (
    accessible_points,
    alpha_reduce,
    alpha_test,
    builtin_atlas,
    divisor_pole_order,
    expansion_matrices,
    find_point,
    has_nonzero_eigenvalue,
    local_index,
    reduced_residual_zero,
    solve_reduced,
)
from painleve_kit.numerics import segments, verify_branch_numeric, verify_map_numeric
from painleve_kit.series import map_series, painleve_test
from painleve_kit.systems import (
    check_holomorphy,
    check_symmetry,
    compose,
    is_identity,
    jacobian_determinant,
    pushforward,
)


def record(n: int, checks: dict, detail: str = ""):
    failed = [k for k, ok in checks.items() if not ok]
    ok = not failed
    ACCEPTANCE[n] = (ok, detail if ok else f"failed: {', '.join(failed)}")
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
    assert ok, failed


def coefficients_match(ctx, series, printed: dict, top: int) -> bool:
    """Exact equality of every coefficient from the valuation through ``top``."""
    lo = min(series.valuation, min(printed))
    for k in range(lo, top + 1):
        want = parse(printed.get(k, "0"), ctx)
        if not equal(series.coefficient(k), want):
            return False
    return True


def match_with_free(ctx, series, printed: dict, top: int, slot: int, name: str = "h") -> bool:
    """Match a display whose free constant is a relabelling c*h of ours, c a nonzero constant."""
    ours = series.coefficient(slot)
    theirs = parse(printed[slot], ctx)
    c = (ours / theirs).as_constant()
    if c is None or c == 0:
        return False
    h = ctx.var(name)
    relabelled = {k: str(substitute(parse(v, ctx), {name: h * c})) for k, v in printed.items()}
    return coefficients_match(ctx, series, relabelled, top)


# 1 ------------------------------------------------------------------------

def test_criterion_01_pi_painleve_test(cat, ctx):
    start = time.perf_counter()
    (br,) = painleve_test(cat.ode("PI"), depth=9)
    elapsed = time.perf_counter() - start
    printed = {-2: "1", -1: "0", 0: "0", 1: "0", 2: "-t0/10", 3: "-1/6", 4: "h", 5: "0",
               6: "t0^2/300"}
    record(1, {
        "coefficients": coefficients_match(ctx, br.series, printed, 6),
        "resonances": br.resonances == [-1, 6],
        "h free": br.free_symbols == ["h"],
        "compatible": br.compatible,
        "runtime": elapsed < 1.0,
    }, f"({elapsed:.3f} s)")


# 2 ------------------------------------------------------------------------

def test_criterion_02_q_and_Q_branches(cat, ctx):
    start = time.perf_counter()
    qb = painleve_test(cat.ode("q"), depth=5)
    Qb = painleve_test(cat.ode("Q"), depth=7)
    elapsed = time.perf_counter() - start
    plus = [b for b in qb if equal(b.leading_coefficient, parse("sqrt(2*t0)/t0", ctx))]
    printed_q = {
        -1: "sqrt(2*t0)/t0",
        0: "-1/(3*sqrt(2*t0)*t0)",
        1: "1/(12*sqrt(2*t0)*t0^2)",
        2: "-5/(216*sqrt(2*t0)*t0^3)",
        3: "(175*sqrt(2) - 2592*sqrt(2)*t0^5)/(51840*sqrt(t0)*t0^4)",
    }
    by_lead = {str(b.leading_coefficient): b for b in Qb}
    printed_a = {-1: "1", 3: "-t0/20", 4: "-1/12", 5: "a5"}
    printed_b = {-1: "-1", 3: "t0/20", 4: "1/12", 5: "b5"}
    record(2, {
        "two q branches": len(qb) == 2,
        "q printed coefficients": len(plus) == 1 and coefficients_match(ctx, plus[0].series,
                                                                        printed_q, 3),
        "Q branch a5": coefficients_match(ctx, by_lead["1"].series, printed_a, 5)
        and by_lead["1"].free_symbols == ["a5"],
        "Q branch b5": coefficients_match(ctx, by_lead["-1"].series, printed_b, 5)
        and by_lead["-1"].free_symbols == ["b5"],
        "runtime": elapsed < 2.0,
    }, f"({elapsed:.3f} s)")


# 3 ------------------------------------------------------------------------

def test_criterion_03_phi_jacobian_holomorphy(cat, ctx):
    start = time.perf_counter()
    K = cat.system("K")
    pushed = pushforward(cat.system("HI"), cat.map("phi"))
    det = jacobian_determinant(cat.map("phi"))
    rep = check_holomorphy(K, cat.map("r3"), parse("-1/v", ctx))
    printed = parse("-x3^6*y3^2/4 + x3^5*y3/4 - 1/4*t*x3^4*y3 + t*x3^3/8 - x3^4/16"
                    " - 1/16*t^2*x3^2 - y3", ctx)
    elapsed = time.perf_counter() - start
    record(3, {
        "pushforward equals K": pushed.equals(K),
        # dx^dy = det dv^du, so dy^dx = 2 dv^du means det = -2
        "dy^dx = 2 dv^du": equal(det, parse("-2", ctx)),
        "r3 polynomial": rep.polynomial and equal(rep.transformed, printed),
        "runtime": elapsed < 1.0,
    }, f"({elapsed:.3f} s)")


# 4 ------------------------------------------------------------------------

def test_criterion_04_sigma4_points_and_p3(cat, ctx):
    K = cat.system("K")
    rep = accessible_points(K, builtin_atlas("Sigma4", ctx))
    locs = {(p.chart.id, str(p.location)) for p in rep}
    want = {("1", str(parse("sqrt(2*t)", ctx))), ("1", str(parse("-sqrt(2*t)", ctx))), ("2", "0")}
    p3 = find_point(rep, "z2=0")
    mats = expansion_matrices(K, p3, 6)
    zero = parse("0", ctx)
    m6 = mats[5]
    record(4, {
        "three points": len(rep) == 3 and locs == want and not rep.unresolved,
        "M1 as printed": [[str(x) for x in r] for r in mats[0]] == [["0", "1"], ["0", "0"]],
        "M2..M4 zero": all(equal(x, zero) for M in mats[1:4] for r in M for x in r),
        "M1..M5 zero eigenvalues": not any(has_nonzero_eigenvalue(M) for M in mats[:5]),
        "M6 diagonal (-1/2, -3/2)": equal(m6[0][0], parse("-1/2", ctx))
        and equal(m6[1][1], parse("-3/2", ctx)) and equal(m6[1][0], zero),
        "multiplicity 6": p3.multiplicity == 6,
    })


# 5 ------------------------------------------------------------------------

def test_criterion_05_local_index_p1_p2(cat, ctx):
    K = cat.system("K")
    rep = accessible_points(K, builtin_atlas("Sigma4", ctx))
    checks = {}
    for key, sign in (("P1", 1), ("P2", -1)):
        r = local_index(K, find_point(rep, key))
        root = parse("sqrt(2*t)", ctx) * sign
        checks[f"{key} a11"] = equal(r.a11, root / 2)
        checks[f"{key} a22"] = equal(r.a22, -root)
        checks[f"{key} ratio -2"] = equal(r.resonance_ratio, parse("-2", ctx)) and r.integer_verdict
    record(5, checks)


# 6 ------------------------------------------------------------------------

def test_criterion_06_alpha_test_p1_and_p3_tilde(cat, ctx):
    K = cat.system("K")
    p1 = find_point(accessible_points(K, builtin_atlas("Sigma4", ctx)), "P1")
    rep = solve_reduced(alpha_reduce(K, p1))
    red = dict(zip(rep.reduced.vars, rep.reduced.rhs))
    printed_red = {"X1": parse("sqrt(2*t0)/2", ctx),
                   "Y1": parse("-sqrt(2*t0)*Y1/X1 - 1/sqrt(2*t0)", ctx)}
    printed_x1 = parse("sqrt(2*t0)/2*T + C1", ctx)
    printed_y1 = parse("(-sqrt(2)*t0*T^3 - 6*C1*sqrt(t0)*T^2 - 6*sqrt(2)*C1^2*T + 3*C2*sqrt(t0))"
                       "/(3*sqrt(t0)*(sqrt(2*t0)*T + 2*C1)^2)", ctx)
    printed_sol = {"X1": printed_x1, "Y1": printed_y1}
    # the two closed forms differ only in how C2 is normalised: the difference is c/X1^2
    gap = (rep.solution["Y1"] - printed_y1) * printed_x1 * printed_x1

    pt = find_point(accessible_points(K, builtin_atlas("XY", ctx)), "Y=4")
    rep3 = alpha_test(K, pt)
    red3 = dict(zip(rep3.reduced.vars, rep3.reduced.rhs))
    record(6, {
        "P1 reduced system": all(equal(red[v], printed_red[v]) for v in red),
        "P1 X1 solution": equal(rep.solution["X1"], printed_x1),
        "P1 printed solution solves it": reduced_residual_zero(rep.reduced, printed_sol),
        "P1 own solution residual zero": rep.residual_zero is True,
        "P1 forms agree up to constants": equal(differentiate(gap, "T"), parse("0", ctx)),
        "P3~ at (0,4)": str(pt.location) == "4",
        "P3~ reduced": equal(red3["X2"], parse("-1", ctx))
        and equal(red3["Y2"], parse("-6*Y2/X2", ctx)),
        "P3~ solution": equal(rep3.solution["X2"], parse("-(T - C1)", ctx))
        and equal(rep3.solution["Y2"], parse("C2*(T - C1)^6", ctx)),
        "single-valued": rep.single_valued and rep3.single_valued and rep3.residual_zero,
    })


# 7 ------------------------------------------------------------------------

def test_criterion_07_pvi_scheme(cat, ctx):
    pvi = cat.system("PVI")
    rep = accessible_points(pvi, builtin_atlas("PVI", ctx))
    printed = {  # (a22, a21, a11) of each linear-approximation matrix
        "0": ("2/(t-1)", "-alpha4/(t-1)", "1/(t-1)"),
        "1": ("-2/t", "alpha3/t", "-1/t"),
        "t": ("2", "-alpha0", "1"),
        "inf": ("2/(t*(t-1))", "-alpha1/(t*(t-1))", "1/(t*(t-1))"),
    }
    alpha0 = pvi.constraints["alpha0"]
    checks = {"points {0,1,t,inf}": sorted(p.base_value for p in rep) == sorted(printed)}
    for p in rep:
        want = printed.get(p.base_value)
        if want is None:
            continue
        r = local_index(pvi, p)
        vals = [substitute(parse(w, ctx), {"alpha0": alpha0}) for w in want]
        checks[f"matrix at {p.base_value}"] = (equal(r.a22, vals[0]) and equal(r.a21, vals[1])
                                               and equal(r.a11, vals[2]) and r.a12.is_zero())
        a = alpha_test(pvi, p)
        checks[f"single-valued at {p.base_value}"] = a.single_valued is True and a.residual_zero
    record(7, checks)


# 8 ------------------------------------------------------------------------

def test_criterion_08_pole_orders(cat, ctx):
    K = cat.system("K")
    s4 = builtin_atlas("Sigma4", ctx)
    record(8, {
        "P2 order 6": divisor_pole_order(K, builtin_atlas("P2", ctx), "Hinf") == 6,
        "L order 1": divisor_pole_order(K, s4, "L") == 1,
        "H order 1": divisor_pole_order(K, s4, "H") == 1,
    })


# 9 ------------------------------------------------------------------------

def test_criterion_09_series_transport(cat, ctx):
    (br,) = painleve_test(cat.ode("PI"), depth=12)
    v, u = map_series(cat.map("phi").inverted(), br.series, radical_signs={"sqrt(x)": -1})
    x1, y1 = map_series(cat.map("X1Y1"), (v, u))
    x2, y2 = map_series(cat.map("X2Y2"), (v, u))
    z1, w1 = map_series(cat.map("chart1"), (v, u))
    x, y = map_series(cat.map("phi"), (v, u))
    v_printed = {1: "-1", 5: "-t0/20", 6: "-1/12"}
    record(9, {
        "v": coefficients_match(ctx, v, v_printed, 6),
        "u": match_with_free(ctx, u, {-6: "4", -2: "-t0/5", -1: "-1", 0: "h"}, 0, 0),
        "X1": coefficients_match(ctx, x1, v_printed, 6),
        "Y1": match_with_free(ctx, y1, {4: "t0", 5: "1", 6: "h"}, 6, 6),
        "X2": coefficients_match(ctx, x2, v_printed, 6),
        "Y2": match_with_free(ctx, y2, {0: "h"}, 0, 0),
        "z1": match_with_free(ctx, z1, {-1: "-1", 3: "t0/20", 4: "1/12", 5: "h"}, 5, 5),
        "w1": match_with_free(ctx, w1, {-2: "4", 2: "t0/10", 3: "1/3", 4: "h"}, 4, 4),
        "x exact": coefficients_match(ctx, x, {-2: "1", 2: "-t0/10", 3: "-1/6", 4: "h"}, 4),
        "y exact": coefficients_match(ctx, y, {-3: "-2", 1: "-t0/5", 2: "-1/2", 3: "4*h"}, 3),
        "x coincides with the P_I branch": x.equals(br.series, through=9),
    })


# 10 -----------------------------------------------------------------------

def _roots_of_minus_one():
    return [cmath.exp(1j * cmath.pi * (2 * k + 1) / 5) for k in range(5)]


def _numeric_symmetry(sys_, m, a, rng) -> float:
    """|rhs(m(p)) - Dm(p) rhs(p) / (dt'/dt)| at a random point, with a pinned to one root."""
    pt = {"v": complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)),
          "u": complex(rng.uniform(-1, 1), rng.uniform(-1, 1)),
          "t": complex(rng.uniform(0.5, 1.5), rng.uniform(-0.5, 0.5)), "a": a}
    img = {v: eval_numeric(c, pt) for v, c in zip(m.target_vars, m.components)}
    img["t"] = eval_numeric(m.time_action, pt)
    rate = eval_numeric(differentiate(m.time_action, "t"), pt)
    flow = [eval_numeric(r, pt) for r in sys_.rhs]
    worst = 0.0
    for comp, target_rhs in zip(m.components, sys_.rhs):
        chain = sum(eval_numeric(differentiate(comp, v), pt) * f for v, f in zip(sys_.vars, flow))
        chain += eval_numeric(differentiate(comp, "t"), pt)
        worst = max(worst, abs(eval_numeric(target_rhs, img) - chain / rate))
    return worst


def test_criterion_10_symmetries(cat, ctx):
    K = cat.system("K")
    rng = random.Random(5)
    numeric = max(_numeric_symmetry(K, cat.map(n), a, rng)
                  for n in ("s0", "s1") for a in _roots_of_minus_one())
    s1m = cat.map("s1m")
    chart = pushforward(K, cat.map("chart1"))
    pi = cat.map("pi")
    pts = accessible_points(K, builtin_atlas("Sigma4", ctx))
    p1, p2 = find_point(pts, "P1"), find_point(pts, "P2")
    image = [substitute(c, {"z1": 0, "w1": p1.location}) for c in pi.components]
    record(10, {
        "s0 symbolic (a^5 = -1)": check_symmetry(K, cat.map("s0")),
        "s1 symbolic (a^5 = -1)": check_symmetry(K, cat.map("s1")),
        "s0, s1 at each of the five roots": numeric < 1e-9,
        "s1|a=-1 symmetry": check_symmetry(K, s1m),
        "(s1|a=-1)^2 = id": is_identity(compose(s1m, s1m)),
        "pi preserves the z1 chart system": check_symmetry(chart, pi),
        "pi exchanges P1 and P2": image[0].is_zero() and equal(image[1], p2.location),
    }, f"(numeric per-root residual {numeric:.1e})")


# 11 -----------------------------------------------------------------------

def test_criterion_11_numerical_certificates(cat, ctx):
    start = time.perf_counter()
    checks, notes = {}, []
    (pb,) = painleve_test(cat.ode("PI"), depth=14)
    c = verify_branch_numeric(cat.ode("PI"), pb, 1.0, {"h": 0}, 0.02, 0.1, oracle_step=1e-5)
    checks["P_I branch"] = c.deviation < 1e-6 and c.oracle_deviation < 1e-6
    notes.append(f"PI {c.deviation:.1e}/{c.oracle_deviation:.1e}")
    for b in painleve_test(cat.ode("Q"), depth=14):
        params = {s: 0 for s in b.free_symbols}
        c = verify_branch_numeric(cat.ode("Q"), b, 1.0, params, 0.02, 0.1, oracle_step=1e-5)
        key = f"Q branch {b.leading_coefficient}"
        checks[key] = c.deviation < 1e-6 and c.oracle_deviation < 1e-6
        notes.append(f"Q{b.leading_coefficient} {c.deviation:.1e}/{c.oracle_deviation:.1e}")
    m = verify_map_numeric(cat.system("K"), cat.system("HI"), cat.map("phi"), (0.7 + 0.1j, 0.3),
                           segments(1.0, 1.1), oracle_step=1e-5)
    checks["phi map"] = m.deviation < 1e-7 and m.oracle_deviation < 1e-7
    notes.append(f"phi {m.deviation:.1e}/{m.oracle_deviation:.1e}")
    elapsed = time.perf_counter() - start
    checks["runtime"] = elapsed < 30
    record(11, checks, f"({', '.join(notes)}; {elapsed:.1f} s)")
