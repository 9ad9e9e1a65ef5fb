"""Named systems, maps and scalar ODEs, with a line-oriented text format.

Records (one per line, ``#`` starts a comment)::

    rule a^5 = -1
    system <name> vars(<a>,<b>) time(t) H = <expr> [where <sym> = <expr>]
    system <name> vars(<a>,<b>) time(t) rhs = <expr>, <expr>
    map <name> (<a>,<b>) -> (<c>,<d>) : <expr>, <expr> [inverse: <expr>, <expr>] [time: <expr>]
    ode <name> var(<q>) time(t) : <poly in q0, q1, q2, t> [free <lead>: <sym>]
"""

from __future__ import annotations

import re
import threading
from dataclasses import dataclass, field

from .algebra import Context, format_rational, parse
from .algebra.printing import format_polynomial
from .series.painleve import ScalarODE
from .systems import BirationalMap, PlaneSystem, from_hamiltonian


class CatalogError(ValueError):
    pass


class NotFound(KeyError):
    def __str__(self) -> str:
        return f"not found: {self.args[0]!r}"


@dataclass
class Catalog:
    ctx: Context
    systems: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    odes: dict = field(default_factory=dict)
    rules: list = field(default_factory=list)

    def system(self, name: str) -> PlaneSystem:
        try:
            return self.systems[name]
        except KeyError:
            raise NotFound(name) from None

    def map(self, name: str) -> BirationalMap:
        try:
            return self.maps[name]
        except KeyError:
            raise NotFound(name) from None

    def ode(self, name: str) -> ScalarODE:
        try:
            return self.odes[name]
        except KeyError:
            raise NotFound(name) from None

    def get(self, name: str):
        for table in (self.systems, self.maps, self.odes):
            if name in table:
                return table[name]
        raise NotFound(name)

    def names(self) -> dict:
        return {"systems": sorted(self.systems), "maps": sorted(self.maps), "odes": sorted(self.odes)}

    # -- text form -------------------------------------------------------
    def to_text(self) -> str:
        lines = [f"rule {name}^{p} = {format_polynomial(r)}" for name, p, r in self.rules]
        for name, s in self.systems.items():
            head = f"system {name} vars({s.vars[0]},{s.vars[1]}) time({s.time})"
            if s.hamiltonian is not None:
                line = f"{head} H = {format_rational(s.hamiltonian)}"
                for k, v in s.constraints.items():
                    line += f" where {k} = {format_rational(v)}"
            else:
                line = f"{head} rhs = {format_rational(s.rhs[0])}, {format_rational(s.rhs[1])}"
            lines.append(line)
        for name, m in self.maps.items():
            line = (f"map {name} ({','.join(m.source_vars)}) -> ({','.join(m.target_vars)}) : "
                    + ", ".join(format_rational(c) for c in m.components))
            if m.inverse is not None:
                line += " [inverse: " + ", ".join(format_rational(c) for c in m.inverse) + "]"
            if m.time_action is not None:
                line += f" [time: {format_rational(m.time_action)}]"
            lines.append(line)
        for name, o in self.odes.items():
            line = f"ode {name} var({o.var}) time({o.time}) : {format_polynomial(o.poly)}"
            for lead, sym in o.free_names.items():
                line += f" [free {lead}: {sym}]"
            lines.append(line)
        return "\n".join(lines) + "\n"


_SYSTEM = re.compile(
    r"system\s+(?P<name>\S+)\s+vars\((?P<a>\w+)\s*,\s*(?P<b>\w+)\)\s+time\((?P<t>\w+)\)\s+"
    r"(?P<kind>H|rhs)\s*=\s*(?P<body>.+)$"
)
_MAP = re.compile(
    r"map\s+(?P<name>\S+)\s+\((?P<a>\w+)\s*,\s*(?P<b>\w+)\)\s*->\s*\((?P<c>\w+)\s*,\s*(?P<d>\w+)\)"
    r"\s*:\s*(?P<body>.+)$"
)
_ODE = re.compile(r"ode\s+(?P<name>\S+)\s+var\((?P<v>\w+)\)(\s+time\((?P<t>\w+)\))?\s*:\s*(?P<body>.+)$")
_RULE = re.compile(r"rule\s+(?P<s>\w+)\s*\^\s*(?P<p>\d+)\s*=\s*(?P<body>.+)$")
_OPTION = re.compile(r"\[(?P<key>\w+)(?P<arg>[^:\]]*):(?P<val>[^\]]*)\]")


def _split_options(body: str):
    opts = []
    for m in _OPTION.finditer(body):
        opts.append((m.group("key"), m.group("arg").strip(), m.group("val").strip()))
    main = _OPTION.sub("", body).strip()
    return main, opts


def _pair(ctx, text: str, lineno: int):
    parts = [p for p in text.split(",")]
    if len(parts) != 2:
        raise CatalogError(f"line {lineno}: expected two comma-separated expressions")
    return tuple(parse(p, ctx) for p in parts)


def parse_catalog(text: str, ctx: Context | None = None, into: Catalog | None = None) -> Catalog:
    ctx = ctx or (into.ctx if into else Context("catalog"))
    cat = into or Catalog(ctx)
    ctx.declare("t", "time")
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            _parse_record(cat, ctx, line, lineno)
        except CatalogError:
            raise
        except ValueError as exc:
            raise CatalogError(f"line {lineno}: {exc}") from exc
    return cat


def _parse_record(cat: Catalog, ctx: Context, line: str, lineno: int) -> None:
    if m := _RULE.match(line):
        value = parse(m.group("body"), ctx)
        if not value.is_polynomial():
            raise CatalogError(f"line {lineno}: rule right-hand side must be a polynomial")
        rad = value.as_polynomial()
        ctx.add_rule(m.group("s"), int(m.group("p")), rad)
        cat.rules.append((m.group("s"), int(m.group("p")), rad))
        return
    if m := _SYSTEM.match(line):
        vars_ = (m.group("a"), m.group("b"))
        for v in vars_:
            ctx.declare(v, "coordinate")
        ctx.declare(m.group("t"), "time")
        body = m.group("body")
        if m.group("kind") == "H":
            parts = re.split(r"\s+where\s+", body)
            H = parse(parts[0], ctx)
            cons = {}
            for c in parts[1:]:
                k, _, v = c.partition("=")
                cons[k.strip()] = parse(v, ctx)
            cat.systems[m.group("name")] = from_hamiltonian(
                H, vars_, m.group("t"), name=m.group("name"), ctx=ctx, constraints=cons)
        else:
            rhs = _pair(ctx, body, lineno)
            cat.systems[m.group("name")] = PlaneSystem(ctx, vars_, rhs, time=m.group("t"),
                                                       name=m.group("name"))
        return
    if m := _MAP.match(line):
        for v in (m.group("a"), m.group("b"), m.group("c"), m.group("d")):
            ctx.declare(v, "coordinate")
        main, opts = _split_options(m.group("body"))
        comps = _pair(ctx, main, lineno)
        inverse = time = None
        for key, _, val in opts:
            if key == "inverse":
                inverse = _pair(ctx, val, lineno)
            elif key == "time":
                time = parse(val, ctx)
            else:
                raise CatalogError(f"line {lineno}: unknown map option {key!r}")
        cat.maps[m.group("name")] = BirationalMap(
            ctx, (m.group("a"), m.group("b")), (m.group("c"), m.group("d")), comps,
            inverse=inverse, time_action=time, name=m.group("name"))
        return
    if m := _ODE.match(line):
        v = m.group("v")
        for k in range(3):
            ctx.declare(f"{v}{k}", "coordinate")
        main, opts = _split_options(m.group("body"))
        poly = parse(main, ctx)
        if not poly.is_polynomial():
            raise CatalogError(f"line {lineno}: ODE form must be polynomial")
        free = {}
        for key, arg, val in opts:
            if key != "free":
                raise CatalogError(f"line {lineno}: unknown ode option {key!r}")
            free[arg] = val
        cat.odes[m.group("name")] = ScalarODE(ctx, m.group("name"), v, poly.as_polynomial(),
                                              time=m.group("t") or "t", free_names=free)
        return
    raise CatalogError(f"line {lineno}: unrecognized record")


BUILTIN = """
# symbols whose order fixes the printing order
rule a^5 = -1

system HI vars(x,y) time(t) H = 1/2*y^2 - 2*x^3 - t*x
system K vars(v,u) time(t) H = -1/4*v^6*u^2 + 1/4*v^5*u + 1/4*t*v^4*u - 1/8*t*v^3 - 1/16*v^4 - 1/16*t^2*v^2 + u
system qp vars(q,p) time(t) rhs = p, 3*p^2/q - 1/2*t*q^3 - 3/q
system PVI vars(x,y) time(t) H = (y^2*(x - t)*(x - 1)*x - ((alpha0 - 1)*(x - 1)*x + alpha3*(x - t)*x + alpha4*(x - t)*(x - 1))*y + alpha2*(alpha1 + alpha2)*x)/(t*(t - 1)) where alpha0 = 1 - alpha1 - 2*alpha2 - alpha3 - alpha4

map phi (v,u) -> (x,y) : 1/v^2, -2/v^3 - 1/2*t*v - 1/2*v^2 + u*v^3 [inverse: 1/sqrt(x), (y + 2*sqrt(x)^3 + t/(2*sqrt(x)) + 1/(2*x))*sqrt(x)^3]
map qp (v,u) -> (q,p) : v, 1 + 1/4*t*v^4 + 1/4*v^5 - 1/2*v^6*u [inverse: q, (t*q^4 + q^5 - 4*p + 4)/(2*q^6)]
map Q (q,p) -> (Q,P) : 1/q, -p/q^2
map r3 (v,u) -> (x3,y3) : v, u - t/v^2 - 4/v^6
map r (v,u) -> (X,Y) : v, u - t/v^2 - 4/v^6
map R (X,Y) -> (x,y) : 1/X^2, (4 + t*X^4 - X^5 + 2*X^6*Y)/(2*X^3)
map s0 (v,u) -> (v,u) : -a*v, a^4*u [time: -a*t]
map s1 (v,u) -> (v,u) : a*v, -a^4*(u - t/v^2 - 4/v^6) [time: -a*t]
map s1m (v,u) -> (v,u) : -v, -(u - t/v^2 - 4/v^6) [time: t]
map pi (z1,w1) -> (z1,w1) : -z1, 4*z1^2 - w1
map chart1 (v,u) -> (z1,w1) : 1/v, u*v^4 - 1/2*v^3 - 1/2*t*v^2
map XY (v,u) -> (X,Y) : v, u*v^6
map X1Y1 (v,u) -> (X1,Y1) : v, u*v^6 - 4
map X2Y2 (v,u) -> (X2,Y2) : v, u - t/v^2 - 4/v^6

ode PI var(w) time(t) : w2 - 6*w0^2 - t [free 1: h]
ode q var(q) time(t) : q0*q2 - 3*q1^2 + 1/2*t*q0^4 + 3
ode Q var(Q) time(t) : Q0*Q2 + Q1^2 - 3*Q0^4 - 1/2*t [free 1: a5] [free -1: b5]
"""

_lock = threading.Lock()
_cache: dict = {}


def builtin_catalog(fresh: bool = False) -> Catalog:
    """The catalog of every system, map and ODE used by the analyses."""
    with _lock:
        if fresh or "cat" not in _cache:
            ctx = Context("builtin")
            for name in ("t", "t0"):
                ctx.declare(name, "time" if name == "t" else "parameter")
            cat = parse_catalog(BUILTIN, ctx)
            if fresh:
                return cat
            _cache["cat"] = cat
        return _cache["cat"]


def load_catalog(path: str, base: Catalog | None = None) -> Catalog:
    """Read a catalog file; records extend a fresh copy of the built-in catalog by default."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    base = base or builtin_catalog(fresh=True)
    return parse_catalog(text, into=base)
