"""Adaptive Dormand-Prince 5(4) integration of plane systems along straight complex paths."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

from ..algebra import EvaluationError, compile_functions
from ..systems import PlaneSystem


class IntegrationError(RuntimeError):
    pass


@dataclass
class IntegratorConfig:
    rtol: float = 1e-10
    atol: float = 1e-12
    initial_step: float = 1e-3
    max_steps: int = 200_000
    min_step: float = 1e-14

    def __post_init__(self):
        if self.rtol <= 0 or self.atol <= 0:
            raise ValueError("tolerances must be positive")
        if not 0 < self.min_step < self.initial_step:
            raise ValueError("need 0 < min_step < initial_step")
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")


@dataclass
class PathSegment:
    start: complex
    end: complex

    @property
    def length(self) -> float:
        return abs(complex(self.end) - complex(self.start))

    def at(self, s: float) -> complex:
        """Point at arclength s from the start."""
        if self.length == 0:
            return complex(self.start)
        d = (complex(self.end) - complex(self.start)) / self.length
        return complex(self.start) + d * s


def segments(*points) -> list:
    """Consecutive straight segments through the given time values."""
    return [PathSegment(complex(a), complex(b)) for a, b in zip(points, points[1:])]


@dataclass
class Trajectory:
    times: list = field(default_factory=list)
    states: list = field(default_factory=list)
    errors: list = field(default_factory=list)
    status: str = "ok"
    diagnostic: str = ""
    pole_estimate: complex | None = None
    steps: int = 0
    rejected: int = 0

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    @property
    def final(self):
        return self.states[-1]

    def write_csv(self, fh) -> None:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_re", "t_im", "x1_re", "x1_im", "x2_re", "x2_im", "local_error"])
        for t, (a, b), e in zip(self.times, self.states, self.errors):
            w.writerow([repr(t.real), repr(t.imag), repr(a.real), repr(a.imag),
                        repr(b.real), repr(b.imag), repr(e)])


# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def compile_system(sys: PlaneSystem, assignment=None):
    """f(x1, x2, t) -> [dx1/dt, dx2/dt] with parameters fixed from ``assignment``."""
    fixed = dict(assignment or {})
    fixed.pop(sys.time, None)
    return compile_functions(sys.rhs, (*sys.vars, sys.time), fixed)


def _dopri_step(f, t, y, h, d):
    """One step of size h along direction d; returns (y5, error vector)."""
    k = []
    for i in range(7):
        yi = list(y)
        for j, a in enumerate(_A[i]):
            if a:
                for n in range(len(y)):
                    yi[n] += h * a * k[j][n]
        ti = t + d * (_C[i] * h)
        k.append([d * v for v in f(*yi, ti)])
    y5 = [y[n] + h * sum(_B[i] * k[i][n] for i in range(7)) for n in range(len(y))]
    err = [h * sum(_E[i] * k[i][n] for i in range(7)) for n in range(len(y))]
    return y5, err


def _err_norm(err, y, ynew, cfg) -> float:
    acc = 0.0
    for e, a, b in zip(err, y, ynew):
        sc = cfg.atol + cfg.rtol * max(abs(a), abs(b))
        acc += (abs(e) / sc) ** 2
    return math.sqrt(acc / len(err))


def _pole_estimate(f, t, y, dt_prev, t_prev, y_prev):
    """Where x/x' would vanish, extrapolated from the last two accepted states."""
    try:
        u1 = y[0] / f(*y, t)[0]
        u0 = y_prev[0] / f(*y_prev, t_prev)[0]
    except (ZeroDivisionError, EvaluationError, OverflowError):
        return None
    if t == t_prev or u1 == u0:
        return None
    slope = (u1 - u0) / (t - t_prev)
    return t - u1 / slope


def integrate(sys: PlaneSystem, assignment, initial, path, cfg: IntegratorConfig | None = None,
              *, samples: int = 0) -> Trajectory:
    """Integrate along consecutive segments.

    With ``samples`` > 0 each segment is also cut at that many equally spaced
    points, which are always hit exactly. A step size below ``cfg.min_step``
    ends the run with status "step underflow" and an estimate of the pole.
    """
    cfg = cfg or IntegratorConfig()
    f = compile_system(sys, assignment)
    y = [complex(v) for v in initial]
    segs = list(path)
    t = complex(segs[0].start) if segs else 0j
    traj = Trajectory([t], [tuple(y)], [0.0])
    h = cfg.initial_step
    prev = None
    for seg in segs:
        L = seg.length
        if L == 0:
            continue
        d = (complex(seg.end) - complex(seg.start)) / L
        marks = [L * k / samples for k in range(1, samples + 1)] if samples else [L]
        s = 0.0
        t = complex(seg.start)
        for target in marks:
            while s < target:
                if traj.steps >= cfg.max_steps:
                    traj.status = "max steps"
                    traj.diagnostic = f"step budget exhausted at t = {t}"
                    return traj
                step = min(h, target - s)
                last = step == target - s
                try:
                    ynew, err = _dopri_step(f, t, y, step, d)
                    en = _err_norm(err, y, ynew, cfg)
                    if not all(map(math.isfinite, (abs(v) for v in ynew))):
                        en = math.inf
                except (EvaluationError, ZeroDivisionError, OverflowError):
                    en = math.inf
                if en <= 1.0:
                    prev = (t, y)
                    s = target if last else s + step
                    t = complex(seg.start) + d * s
                    y = ynew
                    traj.steps += 1
                    traj.times.append(t)
                    traj.states.append(tuple(y))
                    traj.errors.append(en * cfg.rtol)
                    fac = 5.0 if en == 0 else min(5.0, max(0.2, 0.9 * en ** -0.2))
                    if not last or step >= h:
                        h = step * fac
                else:
                    traj.rejected += 1
                    fac = 0.2 if not math.isfinite(en) else max(0.2, 0.9 * en ** -0.25)
                    h = step * fac
                if h < cfg.min_step and s < target:
                    traj.status = "step underflow"
                    traj.diagnostic = f"step size fell below {cfg.min_step:g} at t = {t}"
                    if prev is not None:
                        traj.pole_estimate = _pole_estimate(f, t, y, h, prev[0], prev[1])
                    return traj
    return traj


def rk4(sys: PlaneSystem, assignment, initial, path, step: float = 1e-5, *, samples: int = 0):
    """Classical fixed-step fourth-order method; the reference for the adaptive integrator.

    Returns the states at the sample points (or only the end point), as a list of
    (t, state) pairs.
    """
    f = compile_system(sys, assignment)
    y = [complex(v) for v in initial]
    out = []
    for seg in path:
        L = seg.length
        if L == 0:
            continue
        d = (complex(seg.end) - complex(seg.start)) / L
        marks = [L * k / samples for k in range(1, samples + 1)] if samples else [L]
        s = 0.0
        for target in marks:
            n = max(1, math.ceil((target - s) / step - 1e-9))
            hh = (target - s) / n
            h = d * hh
            for _ in range(n):
                t = complex(seg.start) + d * s
                k1 = f(*y, t)
                k2 = f(*[a + h / 2 * b for a, b in zip(y, k1)], t + h / 2)
                k3 = f(*[a + h / 2 * b for a, b in zip(y, k2)], t + h / 2)
                k4 = f(*[a + h * b for a, b in zip(y, k3)], t + h)
                y = [a + h / 6 * (b1 + 2 * b2 + 2 * b3 + b4)
                     for a, b1, b2, b3, b4 in zip(y, k1, k2, k3, k4)]
                s += hh
            s = target
            out.append((complex(seg.start) + d * s, tuple(y)))
    return out


def deviation(a, b) -> float:
    """max over components of |a - b| / (1 + |b|)."""
    return max(abs(x - y) / (1 + abs(y)) for x, y in zip(a, b))
