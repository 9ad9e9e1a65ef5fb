"""Plane ODE systems, coordinate changes and the checks built on them."""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import (
    Context,
    RationalFunction,
    differentiate,
    format_rational,
    substitute,
    substitution,
)


class SystemError_(ValueError):
    pass


class InverseRequired(SystemError_):
    def __init__(self, name: str = ""):
        super().__init__(f"inverse required for map {name!r}" if name else "inverse required")


def _rf(ctx: Context, value) -> RationalFunction:
    if isinstance(value, str):
        from .algebra import parse

        return parse(value, ctx)
    return RationalFunction.coerce(ctx, value)


def _idx(ctx: Context, name: str) -> int:
    return ctx.lookup(name).index


class PlaneSystem:
    """dx1/dt = rhs[0], dx2/dt = rhs[1], optionally with a Hamiltonian."""

    def __init__(self, ctx: Context, vars, rhs, *, time: str = "t", hamiltonian=None,
                 name: str = "", constraints=None, check: bool = True):
        self.ctx = ctx
        self.vars = tuple(vars)
        self.time = time
        for v in self.vars:
            ctx.declare(v, "coordinate")
        ctx.declare(time, "time")
        self.rhs = tuple(_rf(ctx, r) for r in rhs)
        self.hamiltonian = None if hamiltonian is None else _rf(ctx, hamiltonian)
        self.name = name
        # parameter relations such as a0 = 1 - a1 - 2*a2 - a3 - a4
        self.constraints = dict(constraints or {})
        if check and self.hamiltonian is not None:
            expected = hamiltonian_rhs(self.hamiltonian, self.vars)
            if not (expected[0] == self.rhs[0] and expected[1] == self.rhs[1]):
                raise SystemError_(f"right-hand side of {name!r} does not match its Hamiltonian")

    @property
    def var_indices(self):
        return tuple(_idx(self.ctx, v) for v in self.vars)

    def equals(self, other: "PlaneSystem") -> bool:
        if other.vars != self.vars:
            other = other.rename(self.vars)
        return all(a == b for a, b in zip(self.rhs, other.rhs))

    def rename(self, new_vars, name: str | None = None) -> "PlaneSystem":
        new_vars = tuple(new_vars)
        if new_vars == self.vars:
            return self
        for v in new_vars:
            self.ctx.declare(v, "coordinate")
        mapping = {a: self.ctx.var(b) for a, b in zip(self.vars, new_vars)}
        sub = substitution(self.ctx, mapping)
        ham = None if self.hamiltonian is None else substitute(self.hamiltonian, sub)
        return PlaneSystem(self.ctx, new_vars, [substitute(r, sub) for r in self.rhs],
                           time=self.time, hamiltonian=ham, name=name or self.name,
                           constraints=self.constraints, check=False)

    def substitute_parameters(self, mapping) -> "PlaneSystem":
        sub = substitution(self.ctx, {k: _rf(self.ctx, v) for k, v in mapping.items()})
        ham = None if self.hamiltonian is None else substitute(self.hamiltonian, sub)
        return PlaneSystem(self.ctx, self.vars, [substitute(r, sub) for r in self.rhs],
                           time=self.time, hamiltonian=ham, name=self.name, check=False)

    def apply_constraints(self) -> "PlaneSystem":
        if not self.constraints:
            return self
        return self.substitute_parameters(self.constraints)

    def __str__(self) -> str:
        a, b = self.vars
        return (f"d{a}/d{self.time} = {format_rational(self.rhs[0])}\n"
                f"d{b}/d{self.time} = {format_rational(self.rhs[1])}")

    def __repr__(self) -> str:
        return f"PlaneSystem({self.name!r}, vars={self.vars})"


def hamiltonian_rhs(H: RationalFunction, vars):
    a, b = vars
    return differentiate(H, b), -differentiate(H, a)


def from_hamiltonian(H, vars, time: str = "t", name: str = "", ctx: Context | None = None,
                     constraints=None) -> PlaneSystem:
    """The system (dH/d var2, -dH/d var1)."""
    ctx = ctx or H.ctx
    for v in vars:
        ctx.declare(v, "coordinate")
    H = _rf(ctx, H)
    return PlaneSystem(ctx, vars, hamiltonian_rhs(H, vars), time=time, hamiltonian=H,
                       name=name, constraints=constraints, check=False)


@dataclass
class BirationalMap:
    """target = components(source, t); ``inverse`` gives source in terms of (target, t).

    ``time_action`` is the new time as a function of the old one (affine).
    ``parameter_action`` substitutes parameters in transformed systems.
    """

    ctx: Context
    source_vars: tuple
    target_vars: tuple
    components: tuple
    inverse: tuple | None = None
    time_action: RationalFunction | None = None
    parameter_action: dict = field(default_factory=dict)
    name: str = ""
    time: str = "t"

    def __post_init__(self):
        ctx = self.ctx
        self.source_vars = tuple(self.source_vars)
        self.target_vars = tuple(self.target_vars)
        for v in self.source_vars + self.target_vars:
            ctx.declare(v, "coordinate")
        ctx.declare(self.time, "time")
        self.components = tuple(_rf(ctx, c) for c in self.components)
        if self.inverse is not None:
            self.inverse = tuple(_rf(ctx, c) for c in self.inverse)
        if self.time_action is not None:
            self.time_action = _rf(ctx, self.time_action)
        self.parameter_action = {k: _rf(ctx, v) for k, v in self.parameter_action.items()}

    # -- time ------------------------------------------------------------
    def time_rate(self) -> RationalFunction:
        """d(new time)/d(old time); must be a constant."""
        if self.time_action is None:
            return RationalFunction.constant(self.ctx, 1)
        rate = differentiate(self.time_action, self.time)
        if rate.depends_on(_idx(self.ctx, self.time)):
            raise SystemError_("time action must be affine in t")
        return rate

    def time_inverse(self) -> RationalFunction | None:
        if self.time_action is None:
            return None
        t = self.ctx.var(self.time)
        rate = self.time_rate()
        shift = substitute(self.time_action, {self.time: 0})
        return (RationalFunction.coerce(self.ctx, t) - shift) / rate

    # -- inverse ---------------------------------------------------------
    def resolved_inverse(self):
        if self.inverse is None:
            self.inverse = auto_inverse(self)
        return self.inverse

    def inverted(self) -> "BirationalMap":
        inv = self.resolved_inverse()
        if inv is None:
            raise InverseRequired(self.name)
        return BirationalMap(self.ctx, self.target_vars, self.source_vars, inv,
                             inverse=self.components, time_action=self.time_inverse(),
                             name=f"{self.name}^-1" if self.name else "", time=self.time)

    def __repr__(self) -> str:
        return f"BirationalMap({self.name!r}, {self.source_vars} -> {self.target_vars})"

    def describe(self) -> str:
        comps = ", ".join(format_rational(c) for c in self.components)
        out = f"({', '.join(self.source_vars)}) -> ({', '.join(self.target_vars)}) : {comps}"
        if self.time_action is not None:
            out += f"  [time: {format_rational(self.time_action)}]"
        return out


def identity_map(ctx: Context, vars, name: str = "identity") -> BirationalMap:
    comps = tuple(ctx.var(v, "coordinate") for v in vars)
    return BirationalMap(ctx, vars, vars, comps, inverse=comps, name=name)


def _mobius_solve(expr: RationalFunction, j: int, y):
    """Solve y = (A x_j + B)/(C x_j + D) for x_j, or None if not of that shape."""
    ctx = expr.ctx
    if any(ctx.rule(r) is not None and ctx.depends_on(r, j) for r in expr.symbols()):
        return None
    num = expr.num.coefficients_in(j)
    den = expr.den.coefficients_in(j)
    if max(num) > 1 or max(den) > 1:
        return None
    zero = RationalFunction.constant(ctx, 0)
    A = RationalFunction.coerce(ctx, num[1]) if 1 in num else zero
    B = RationalFunction.coerce(ctx, num[0]) if 0 in num else zero
    C = RationalFunction.coerce(ctx, den[1]) if 1 in den else zero
    D = RationalFunction.coerce(ctx, den[0]) if 0 in den else zero
    if (A * D - B * C).is_zero():
        return None
    return (B - D * y) / (C * y - A)


def auto_inverse(m: BirationalMap):
    """Invert triangular maps whose components are Moebius in one unsolved variable."""
    ctx = m.ctx
    src = [_idx(ctx, v) for v in m.source_vars]
    # fresh placeholders keep source and target apart when their names coincide
    holders = [ctx.var(f"_inv{k}", "coordinate") for k in range(len(src))]
    holder_rf = [RationalFunction.coerce(ctx, h) for h in holders]
    solved: dict = {}
    pending = list(range(len(m.components)))
    progress = True
    while pending and progress:
        progress = False
        for i in list(pending):
            comp = substitute(m.components[i], solved) if solved else m.components[i]
            free = [j for j in src if j not in solved and comp.depends_on(j)]
            if len(free) != 1:
                continue
            sol = _mobius_solve(comp, free[0], holder_rf[i])
            if sol is None:
                continue
            solved[free[0]] = sol
            pending.remove(i)
            progress = True
    if pending or len(solved) != len(src):
        return None
    back = {f"_inv{k}": ctx.var(v) for k, v in enumerate(m.target_vars)}
    return tuple(substitute(solved[j], back) for j in src)


def _jacobian(comps, var_idx):
    return [[differentiate(c, v) for v in var_idx] for c in comps]


def jacobian_determinant(m: BirationalMap) -> RationalFunction:
    J = _jacobian(m.components, [_idx(m.ctx, v) for v in m.source_vars])
    return J[0][0] * J[1][1] - J[0][1] * J[1][0]


def pushforward(sys: PlaneSystem, m: BirationalMap, method: str = "auto") -> PlaneSystem:
    """Rewrite ``sys`` through ``m``.

    A system in the map's source variables is pushed forward (needs the inverse,
    found automatically for triangular maps). A system in the target variables
    is pulled back through the Jacobian, which needs no inverse.
    """
    if method not in ("auto", "forward", "pullback"):
        raise ValueError(f"unknown method {method!r}")
    in_source = sys.vars == m.source_vars
    in_target = sys.vars == m.target_vars
    if not (in_source or in_target):
        raise SystemError_(f"system variables {sys.vars} match neither side of {m!r}")
    if method == "pullback" or (method == "auto" and in_target and not in_source):
        if not in_target:
            raise SystemError_("pullback needs the system in the map's target variables")
        out = _pullback(sys, m)
    else:
        if not in_source:
            raise SystemError_("forward pushforward needs the system in the source variables")
        out = _forward(sys, m)
    if m.parameter_action:
        out = out.substitute_parameters(m.parameter_action)
    return out


def _forward(sys: PlaneSystem, m: BirationalMap) -> PlaneSystem:
    ctx = sys.ctx
    inv = m.resolved_inverse()
    if inv is None:
        raise InverseRequired(m.name)
    src = [_idx(ctx, v) for v in m.source_vars]
    rate = m.time_rate()
    new = []
    for comp in m.components:
        d = differentiate(comp, sys.time)
        for j, f in zip(src, sys.rhs):
            d = d + differentiate(comp, j) * f
        new.append(d / rate)
    sub = substitution(ctx, dict(zip(m.source_vars, inv)))
    new = [substitute(d, sub) for d in new]
    tinv = m.time_inverse()
    if tinv is not None:
        tsub = substitution(ctx, {sys.time: tinv})
        new = [substitute(d, tsub) for d in new]
    return PlaneSystem(ctx, m.target_vars, new, time=sys.time,
                       name=f"{sys.name}@{m.name}", check=False)


def _pullback(sys: PlaneSystem, m: BirationalMap) -> PlaneSystem:
    ctx = sys.ctx
    mapping = dict(zip(m.target_vars, m.components))
    if m.time_action is not None:
        mapping[sys.time] = m.time_action
    sub = substitution(ctx, mapping)
    rate = m.time_rate()
    rhs = [substitute(f, sub) * rate - differentiate(c, sys.time)
           for f, c in zip(sys.rhs, m.components)]
    J = _jacobian(m.components, [_idx(ctx, v) for v in m.source_vars])
    det = J[0][0] * J[1][1] - J[0][1] * J[1][0]
    if det.is_zero():
        raise SystemError_(f"map {m.name!r} has vanishing Jacobian")
    new = [(J[1][1] * rhs[0] - J[0][1] * rhs[1]) / det,
           (J[0][0] * rhs[1] - J[1][0] * rhs[0]) / det]
    return PlaneSystem(ctx, m.source_vars, new, time=sys.time,
                       name=f"{sys.name}@{m.name}", check=False)


def compose(first: BirationalMap, second: BirationalMap, name: str = "") -> BirationalMap:
    """The map ``second`` after ``first``."""
    if first.target_vars != second.source_vars:
        raise SystemError_("maps do not compose: variable mismatch")
    ctx = first.ctx
    mapping = dict(zip(second.source_vars, first.components))
    if first.time_action is not None:
        mapping[first.time] = first.time_action
    sub = substitution(ctx, mapping)
    comps = tuple(substitute(c, sub) for c in second.components)
    if first.time_action is None:
        time = second.time_action
    elif second.time_action is None:
        time = first.time_action
    else:
        time = substitute(second.time_action, {first.time: first.time_action})
    return BirationalMap(ctx, first.source_vars, second.target_vars, comps,
                         time_action=time, name=name or f"{second.name}*{first.name}")


def is_identity(m: BirationalMap) -> bool:
    if m.source_vars != m.target_vars:
        return False
    ctx = m.ctx
    if m.time_action is not None and not (m.time_action == ctx.var(m.time)):
        return False
    return all(c == ctx.var(v) for c, v in zip(m.components, m.source_vars))


def check_symmetry(sys: PlaneSystem, m: BirationalMap) -> bool:
    """True when ``sys`` pushed through ``m`` is ``sys`` again."""
    pushed = pushforward(sys, m, method="forward" if sys.vars == m.source_vars else "auto")
    return pushed.equals(sys.rename(pushed.vars) if pushed.vars != sys.vars else sys)


@dataclass
class HolomorphyReport:
    polynomial: bool
    transformed: RationalFunction
    offending_denominators: list

    def __bool__(self) -> bool:
        return self.polynomial


def check_holomorphy(sys: PlaneSystem, m: BirationalMap, shift=0) -> HolomorphyReport:
    """Transform H + shift into the map's other coordinates and test for polynomiality.

    ``shift`` is written in the map's source variables.
    """
    if sys.hamiltonian is None:
        raise SystemError_(f"system {sys.name!r} has no Hamiltonian")
    ctx = sys.ctx
    shift = _rf(ctx, shift)
    if sys.vars == m.target_vars and sys.vars != m.source_vars:
        sub = substitution(ctx, dict(zip(m.target_vars, m.components)))
        out = substitute(sys.hamiltonian, sub) + shift
        new_vars = m.source_vars
    elif sys.vars == m.source_vars:
        inv = m.resolved_inverse()
        if inv is None:
            raise InverseRequired(m.name)
        sub = substitution(ctx, dict(zip(m.source_vars, inv)))
        out = substitute(sys.hamiltonian + shift, sub)
        new_vars = m.target_vars
    else:
        raise SystemError_(f"system variables {sys.vars} match neither side of {m!r}")
    idx = [_idx(ctx, v) for v in new_vars]
    if not any(out.den.depends_on(i) for i in idx):
        return HolomorphyReport(True, out, [])
    q = out.num.exact_divide(out.den)
    if q is not None:
        return HolomorphyReport(True, RationalFunction.coerce(ctx, q), [])
    return HolomorphyReport(False, out, [format_rational(RationalFunction.coerce(ctx, out.den))])
