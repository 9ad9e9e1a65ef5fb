"""Numerical certificates for formal series and coordinate changes."""

from __future__ import annotations

from dataclasses import dataclass

from ..algebra import RationalFunction, compile_functions, differentiate, eval_numeric
from ..series.laurent import LaurentSeries, SeriesError
from ..series.painleve import PainleveBranch, ScalarODE
from ..systems import BirationalMap, PlaneSystem
from .integrator import (
    IntegratorConfig,
    PathSegment,
    Trajectory,
    deviation,
    integrate,
    rk4,
)


class VerificationError(RuntimeError):
    pass


def series_coefficients(s: LaurentSeries, assignment) -> list:
    """(exponent, complex coefficient) pairs of the known terms."""
    return [(k, eval_numeric(c, assignment)) for k, c in s.terms()]


def eval_series_numeric(s: LaurentSeries, t: complex, assignment, t0: str = "t0") -> complex:
    """Value of the truncated series at time t, with tau = t - assignment[t0]."""
    if s.is_zero():
        return 0j
    tau = complex(t) - complex(assignment[t0])
    if tau == 0:
        if s.valuation < 0:
            raise SeriesError("pole")
        return eval_numeric(s.coefficient(0), assignment) if s.valuation == 0 else 0j
    coeffs = series_coefficients(s, assignment)
    lo = s.valuation
    hi = max(k for k, _ in coeffs)
    dense = [0j] * (hi - lo + 1)
    for k, c in coeffs:
        dense[k - lo] = c
    acc = 0j
    for c in reversed(dense):
        acc = acc * tau + c
    return acc * tau ** lo


def tail_estimate(s: LaurentSeries, t: complex, assignment, t0: str = "t0") -> float:
    """Size of the last known term, a heuristic for the truncation error."""
    terms = s.terms()
    if not terms:
        return 0.0
    k, c = terms[-1]
    tau = complex(t) - complex(assignment[t0])
    return abs(eval_numeric(c, assignment) * tau ** k)


def ode_as_system(ode: ScalarODE) -> PlaneSystem:
    """(q, q') as a plane system; the ODE must be linear in the second derivative."""
    ctx = ode.ctx
    i2 = ode.slot(2)
    parts = ode.poly.coefficients_in(i2)
    if set(parts) - {0, 1}:
        raise VerificationError(f"ODE {ode.name!r} is not linear in the second derivative")
    p0 = RationalFunction.coerce(ctx, parts.get(0, 0))
    p1 = RationalFunction.coerce(ctx, parts[1])
    q1 = RationalFunction.coerce(ctx, ctx.var(ode.slot_name(1)))
    return PlaneSystem(ctx, (ode.slot_name(0), ode.slot_name(1)), (q1, -p0 / p1),
                       time=ode.time, name=f"{ode.name}-system", check=False)


@dataclass
class BranchCertificate:
    deviation: float
    oracle_deviation: float | None
    trajectory: Trajectory
    seed: tuple
    expected: tuple
    tail: float


def verify_branch_numeric(ode: ScalarODE, branch: PainleveBranch, t0: float, assignment=None,
                          r_near: float = 0.02, r_far: float = 0.1,
                          cfg: IntegratorConfig | None = None, *, direction: complex = 1,
                          oracle_step: float | None = None) -> BranchCertificate:
    """Seed (q, q') from the series at |tau| = r_near, integrate to r_far, compare with the series.

    ``oracle_step`` additionally runs the fixed-step reference over the same path
    and reports its deviation from the adaptive result.
    """
    env = dict(assignment or {})
    env["t0"] = t0
    s = branch.series
    ds = s.derivative()
    direction = complex(direction) / abs(complex(direction))
    t_near = t0 + r_near * direction
    t_far = t0 + r_far * direction
    seed = (eval_series_numeric(s, t_near, env), eval_series_numeric(ds, t_near, env))
    expected = (eval_series_numeric(s, t_far, env), eval_series_numeric(ds, t_far, env))
    tail = tail_estimate(s, t_far, env)
    sysq = ode_as_system(ode)
    params = {k: v for k, v in env.items() if k != "t0"}
    params = _restrict_assignment(sysq, params)
    path = [PathSegment(t_near, t_far)]
    traj = integrate(sysq, params, seed, path, cfg)
    if not traj.ok:
        raise VerificationError(f"integration failed: {traj.diagnostic}")
    dev = deviation(traj.final, expected) if r_near != r_far else 0.0
    odev = None
    if oracle_step is not None:
        ref = rk4(sysq, params, seed, path, oracle_step)
        odev = deviation(traj.final, ref[-1][1]) if ref else 0.0
    return BranchCertificate(dev, odev, traj, seed, expected, tail)


def _restrict_assignment(sys: PlaneSystem, env: dict) -> dict:
    """Keep the parameters that occur in the system's right-hand side."""
    ctx = sys.ctx
    used = set()
    for r in sys.rhs:
        used |= r.symbols()
    names = {ctx.symbol_at(i).name for i in used}
    return {k: v for k, v in env.items() if k in names}


@dataclass
class MapCertificate:
    deviation: float
    oracle_deviation: float | None
    samples: int


def verify_map_numeric(sys_a: PlaneSystem, sys_b: PlaneSystem, m: BirationalMap, initial, path,
                       cfg: IntegratorConfig | None = None, *, assignment=None, samples: int = 10,
                       oracle_step: float | None = None) -> MapCertificate:
    """Integrate both sides and compare m(trajectory of A) with the trajectory of B."""
    env = dict(assignment or {})
    if sys_a.vars != m.source_vars or sys_b.vars != m.target_vars:
        raise VerificationError("systems do not match the map's variables")
    ctx = m.ctx
    fmap = compile_functions(m.components, (*m.source_vars, m.time), _restrict_env(ctx, m.components, env))
    tact = m.time_action if m.time_action is not None else RationalFunction.coerce(ctx, ctx.var(m.time))
    ftime = compile_functions([tact], (m.time,), _restrict_env(ctx, [tact], env))

    def image(state, t):
        try:
            return tuple(fmap(*state, t))
        except Exception as exc:
            raise VerificationError(f"map has a pole along the trajectory at t = {t}") from exc

    path = list(path)
    t_start = complex(path[0].start)
    b_path = [PathSegment(ftime(seg.start)[0], ftime(seg.end)[0]) for seg in path]
    b_init = image(initial, t_start)
    ta = integrate(sys_a, _restrict_assignment(sys_a, env), initial, path, cfg, samples=samples)
    tb = integrate(sys_b, _restrict_assignment(sys_b, env), b_init, b_path, cfg, samples=samples)
    if not (ta.ok and tb.ok):
        raise VerificationError(f"integration failed: {ta.diagnostic or tb.diagnostic}")
    a_samples = _sampled(ta, path, samples)
    b_samples = _sampled(tb, b_path, samples)
    dev = 0.0
    for (t, sa), (_, sb) in zip(a_samples, b_samples):
        dev = max(dev, deviation(image(sa, t), sb))
    odev = None
    if oracle_step is not None:
        ra = rk4(sys_a, _restrict_assignment(sys_a, env), initial, path, oracle_step, samples=samples)
        rb = rk4(sys_b, _restrict_assignment(sys_b, env), b_init, b_path, oracle_step, samples=samples)
        odev = 0.0
        for (t, sa), (_, sb), (_, xa), (_, xb) in zip(ra, rb, a_samples, b_samples):
            odev = max(odev, deviation(xa, sa), deviation(xb, sb))
    return MapCertificate(dev, odev, len(a_samples))


def _restrict_env(ctx, funcs, env):
    used = set()
    for f in funcs:
        used |= RationalFunction.coerce(ctx, f).symbols()
    names = {ctx.symbol_at(i).name for i in used}
    return {k: v for k, v in env.items() if k in names}


def _sampled(traj: Trajectory, path, samples: int):
    """The trajectory states at the sample points of each segment."""
    wanted = []
    for seg in path:
        if seg.length == 0:
            continue
        n = samples or 1
        wanted.extend(seg.at(seg.length * k / n) for k in range(1, n + 1))
    out = []
    for w in wanted:
        best = min(range(len(traj.times)), key=lambda i: abs(traj.times[i] - w))
        if abs(traj.times[best] - w) > 1e-9 * (1 + abs(w)):
            raise VerificationError("sample point missing from trajectory")
        out.append((traj.times[best], traj.states[best]))
    return out


def hamiltonian_drift(sys: PlaneSystem, assignment, traj: Trajectory) -> float:
    """|H(end) - H(start) - integral of dH/dt| along the accepted steps.

    The integral uses the corrected trapezoidal rule, exact for cubics, with the
    derivative of dH/dt taken along the flow.
    """
    if sys.hamiltonian is None:
        raise VerificationError("system has no Hamiltonian")
    ctx = sys.ctx
    g = differentiate(sys.hamiltonian, sys.time)
    dg = differentiate(g, sys.time)
    for v, r in zip(sys.vars, sys.rhs):
        dg = dg + differentiate(g, v) * r
    funcs = [sys.hamiltonian, g, dg]
    env = _restrict_env(ctx, funcs, dict(assignment or {}))
    env.pop(sys.time, None)
    fh = compile_functions(funcs, (*sys.vars, sys.time), env)
    vals = [fh(*s, t) for t, s in zip(traj.times, traj.states)]
    integral = 0j
    for i in range(1, len(vals)):
        dt = traj.times[i] - traj.times[i - 1]
        integral += dt * (vals[i][1] + vals[i - 1][1]) / 2
        integral += dt * dt * (vals[i - 1][2] - vals[i][2]) / 12
    return abs(vals[-1][0] - vals[0][0] - integral)


__all__ = [
    "BranchCertificate", "MapCertificate", "VerificationError", "eval_series_numeric",
    "hamiltonian_drift", "ode_as_system", "series_coefficients", "tail_estimate",
    "verify_branch_numeric", "verify_map_numeric",
]
