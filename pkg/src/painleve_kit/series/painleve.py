"""Formal Painleve test for scalar second-order ODEs in polynomial form."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from ..algebra import Context, Polynomial, RationalFunction, format_rational
from ..algebra.radicals import sqrt_exact
from .laurent import LaurentSeries, time_series
from .transport import SeriesEvaluator


class UnsupportedBalance(ValueError):
    pass


@dataclass
class ScalarODE:
    """P(t, q0, q1, q2) = 0 where qk is the k-th derivative of the unknown ``var``."""

    ctx: Context
    name: str
    var: str
    poly: Polynomial
    time: str = "t"
    free_names: dict = field(default_factory=dict)

    def __post_init__(self):
        for k in range(3):
            self.ctx.declare(self.slot_name(k), "coordinate")
        if not self.poly.depends_on(self.slot(2)):
            raise ValueError(f"ODE {self.name!r} does not involve the second derivative")

    def slot_name(self, k: int) -> str:
        return f"{self.var}{k}"

    def slot(self, k: int) -> int:
        return self.ctx.lookup(self.slot_name(k)).index

    def evaluate(self, s: LaurentSeries, t0: str = "t0") -> LaurentSeries:
        ev = SeriesEvaluator(self.ctx, {
            self.slot_name(0): s,
            self.slot_name(1): s.derivative(),
            self.slot_name(2): s.derivative().derivative(),
            self.time: time_series(self.ctx, t0),
        })
        return ev.poly(self.poly)

    def __str__(self) -> str:
        return f"{self.poly} = 0"


@dataclass
class Balance:
    n: int
    valuation: int
    equation: dict  # power of the leading coefficient -> coefficient
    solutions: list
    status: str = "ok"

    def equation_text(self, name: str = "a") -> str:
        parts = []
        for p in sorted(self.equation, reverse=True):
            c = format_rational(self.equation[p])
            mono = "" if p == 0 else (name if p == 1 else f"{name}^{p}")
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(parts) + " = 0"


@dataclass
class PainleveBranch:
    ode: str
    leading_exponent: int
    leading_coefficient: RationalFunction
    resonances: list
    free_symbols: list
    series: LaurentSeries
    compatibility: list
    indicial: tuple  # (A2, A1, A0) of L(k) = A2 k^2 + A1 k + A0

    @property
    def compatible(self) -> bool:
        return all(ok for _, ok in self.compatibility)

    def to_json(self) -> dict:
        return {
            "ode": self.ode,
            "leading_exponent": -self.leading_exponent,
            "leading_coefficient": format_rational(self.leading_coefficient),
            "resonances": list(self.resonances),
            "free_symbols": list(self.free_symbols),
            "compatibility": [{"order": o, "satisfied": ok} for o, ok in self.compatibility],
            "series": self.series.to_json(),
        }


def _ff(x, k: int):
    out = Fraction(1)
    for i in range(k):
        out *= x - i
    return out


def _monomial_split(ode: ScalarODE):
    slots = [ode.slot(k) for k in range(3)]
    out = []
    for mono, c in ode.poly.terms.items():
        exps = [0, 0, 0]
        rest = []
        for idx, e in mono:
            if idx in slots:
                exps[slots.index(idx)] = e
            else:
                rest.append((idx, e))
        out.append((exps, tuple(rest), c))
    return out


def _leading_valuation(ode: ScalarODE, n: int):
    split = _monomial_split(ode)
    vals = [-n * e0 - (n + 1) * e1 - (n + 2) * e2 for (e0, e1, e2), _, _ in split]
    return min(vals), split, vals


def dominant_balances(ode: ScalarODE, n_max: int = 6, t0: str = "t0"):
    """Leading balances q ~ a * tau**(-n) for n = 1..n_max."""
    ctx = ode.ctx
    tsym = ctx.lookup(ode.time).index
    t0v = ctx.var(t0, "parameter")
    out = []
    for n in range(1, n_max + 1):
        nu, split, vals = _leading_valuation(ode, n)
        eq: dict = {}
        for ((e0, e1, e2), rest, c), v in zip(split, vals):
            if v != nu:
                continue
            coeff = Polynomial.monomial(ctx, rest, c * (-n) ** e1 * (n * (n + 1)) ** e2)
            coeff = RationalFunction.coerce(ctx, coeff).subs({tsym: t0v})
            p = e0 + e1 + e2
            eq[p] = eq.get(p, RationalFunction.constant(ctx, 0)) + coeff
        eq = {p: c for p, c in eq.items() if not c.is_zero()}
        if len(eq) < 2:
            continue
        low = min(eq)
        eq = {p - low: c for p, c in eq.items()}
        try:
            sols = _solve_leading(ctx, eq)
            status = "ok"
        except UnsupportedBalance:
            sols, status = [], "unsupported leading balance"
        sols = [s for s in sols if not s.is_zero()]
        sols.sort(key=format_rational)
        out.append(Balance(n, nu, eq, sols, status))
    return out


def _solve_leading(ctx: Context, eq: dict):
    deg = max(eq)
    zero = RationalFunction.constant(ctx, 0)
    if deg == 1:
        return [-eq.get(0, zero) / eq[1]]
    if deg == 2:
        A, B, C = eq[2], eq.get(1, zero), eq.get(0, zero)
        root = sqrt_exact(B * B - A * C * 4)
        return [(-B + root) / (A * 2), (-B - root) / (A * 2)]
    if set(eq) == {0, deg}:
        c = -eq[0] / eq[deg]
        value = c.as_constant()
        if value is None:
            raise UnsupportedBalance("pure power with non-constant right-hand side")
        name = f"root{deg}({value})"
        sym = ctx.add_rule(name, deg, value)
        return [RationalFunction.coerce(ctx, ctx.var(sym.name))]
    raise UnsupportedBalance("unsupported leading balance")


def indicial_polynomial(ode: ScalarODE, n: int, a, t0: str = "t0"):
    """Coefficients (A2, A1, A0) of the linear coefficient L(k) at order nu + k."""
    ctx = ode.ctx
    a = RationalFunction.coerce(ctx, a)
    nu, _, _ = _leading_valuation(ode, n)
    lead = LaurentSeries.monomial(ctx, -n, a)
    ev = SeriesEvaluator(ctx, {
        ode.slot_name(0): lead,
        ode.slot_name(1): lead.derivative(),
        ode.slot_name(2): lead.derivative().derivative(),
        ode.time: time_series(ctx, t0),
    })
    s = []
    for i in range(3):
        dp = ode.poly.diff_plain(ode.slot(i))
        s.append(ev.poly(dp).coefficient(nu + n + i) if not dp.is_zero()
                 else RationalFunction.constant(ctx, 0))
    # L(k) = s0 + (k - n) s1 + (k - n)(k - n - 1) s2
    A2 = s[2]
    A1 = s[1] - s[2] * (2 * n + 1)
    A0 = s[0] - s[1] * n + s[2] * (n * (n + 1))
    return A2, A1, A0


def _eval_indicial(L, k: int) -> RationalFunction:
    A2, A1, A0 = L
    return A2 * (k * k) + A1 * k + A0


def resonances(L, search: int = 40) -> list:
    """Integer roots of L in [-search, search]."""
    return [k for k in range(-search, search + 1) if _eval_indicial(L, k).is_zero()]


def expand_branch(ode: ScalarODE, n: int, a, depth: int = 12, *, t0: str = "t0",
                  free_names=None) -> PainleveBranch:
    """Recursive coefficients of q = sum_{j<depth} c_j tau**(j - n)."""
    ctx = ode.ctx
    a = RationalFunction.coerce(ctx, a)
    nu, _, _ = _leading_valuation(ode, n)
    L = indicial_polynomial(ode, n, a, t0)
    res = resonances(L, max(40, depth + 5))
    names = list(free_names or [])
    if not names:
        hint = ode.free_names.get(format_rational(a))
        if hint:
            names = [hint] if isinstance(hint, str) else list(hint)
    coeffs = [a]
    free, compat = [], []
    zero = RationalFunction.constant(ctx, 0)
    for j in range(1, depth):
        trial = LaurentSeries(ctx, -n, coeffs + [zero], order=j - n + 1)
        r = ode.evaluate(trial, t0).coefficient(nu + j)
        lj = _eval_indicial(L, j)
        if not lj.is_zero():
            coeffs.append(-r / lj)
            continue
        if r.is_zero():
            name = names[len(free)] if len(free) < len(names) else f"{ode.var}_free{j}"
            ctx.declare(name, "parameter")
            free.append(name)
            compat.append((j - n, True))
            coeffs.append(RationalFunction.coerce(ctx, ctx.var(name)))
        else:
            compat.append((j - n, False))
            coeffs.append(zero)
    series = LaurentSeries(ctx, -n, coeffs, order=depth - n)
    return PainleveBranch(ode.name, n, a, res, free, series, compat, L)


def residual(ode: ScalarODE, s: LaurentSeries, t0: str = "t0") -> LaurentSeries:
    """P evaluated on (s, s', s''); the known coefficients vanish for a genuine branch."""
    return ode.evaluate(s, t0)


def painleve_test(ode: ScalarODE, depth: int = 12, n_max: int = 6, t0: str = "t0"):
    """All branches for every supported balance, in deterministic order."""
    out = []
    for bal in dominant_balances(ode, n_max, t0):
        for a in bal.solutions:
            out.append(expand_branch(ode, bal.n, a, depth, t0=t0))
    return out
