"""Chart atlases of compactified phase spaces and their boundary divisors.

Text format, one record per line::

    base vars(<a>,<b>)
    chart <id> vars(<a>,<b>) to_base: <expr>,<expr> from_base: <expr>,<expr>
    divisor <name> on <chart>: <poly> [selfint <n>] [exclude <var>=<expr>]
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..algebra import Context, Polynomial, RationalFunction, format_rational, parse
from ..systems import BirationalMap, PlaneSystem, pushforward


class AtlasError(ValueError):
    pass


@dataclass
class Chart:
    id: str
    vars: tuple
    to_base: BirationalMap
    from_base: BirationalMap


@dataclass
class DivisorComponent:
    chart: str
    equation: Polynomial
    exclude: list = field(default_factory=list)  # (var name, RationalFunction) values to skip


@dataclass
class Divisor:
    name: str
    components: list = field(default_factory=list)
    self_intersection: int | None = None


@dataclass
class Atlas:
    name: str
    ctx: Context
    base_vars: tuple
    charts: dict = field(default_factory=dict)
    divisors: dict = field(default_factory=dict)

    def chart(self, cid: str) -> Chart:
        try:
            return self.charts[cid]
        except KeyError:
            raise AtlasError(f"unknown chart {cid!r}") from None

    def divisor(self, name: str) -> Divisor:
        try:
            return self.divisors[name]
        except KeyError:
            raise AtlasError(f"unknown divisor {name!r}") from None

    def add_chart(self, cid: str, vars, to_base, from_base) -> Chart:
        ctx = self.ctx
        for v in vars:
            ctx.declare(v, "coordinate")
        to_base = tuple(_expr(ctx, e) for e in to_base)
        from_base = tuple(_expr(ctx, e) for e in from_base)
        tb = BirationalMap(ctx, vars, self.base_vars, to_base, inverse=from_base, name=f"{cid}->base")
        fb = BirationalMap(ctx, self.base_vars, vars, from_base, inverse=to_base, name=f"base->{cid}")
        chart = Chart(cid, tuple(vars), tb, fb)
        self.charts[cid] = chart
        return chart

    def add_divisor(self, name: str, chart: str, equation, self_intersection=None, exclude=()):
        if chart not in self.charts:
            raise AtlasError(f"divisor {name!r} refers to unknown chart {chart!r}")
        eq = _expr(self.ctx, equation)
        if not eq.is_polynomial():
            raise AtlasError(f"divisor {name!r}: local equation must be a polynomial")
        d = self.divisors.setdefault(name, Divisor(name))
        excl = [(v, _expr(self.ctx, e)) for v, e in exclude]
        d.components.append(DivisorComponent(chart, eq.as_polynomial(), excl))
        if self_intersection is not None:
            d.self_intersection = int(self_intersection)
        return d

    def to_text(self) -> str:
        lines = [f"atlas {self.name}", f"base vars({self.base_vars[0]},{self.base_vars[1]})"]
        for c in self.charts.values():
            tb = ",".join(format_rational(e) for e in c.to_base.components)
            fb = ",".join(format_rational(e) for e in c.from_base.components)
            lines.append(f"chart {c.id} vars({c.vars[0]},{c.vars[1]}) to_base: {tb} from_base: {fb}")
        for d in self.divisors.values():
            for k, comp in enumerate(d.components):
                line = f"divisor {d.name} on {comp.chart}: {comp.equation}"
                if k == 0 and d.self_intersection is not None:
                    line += f" [selfint {d.self_intersection}]"
                for v, e in comp.exclude:
                    line += f" [exclude {v}={format_rational(e)}]"
                lines.append(line)
        return "\n".join(lines) + "\n"


def _expr(ctx: Context, e) -> RationalFunction:
    if isinstance(e, str):
        return parse(e, ctx)
    return RationalFunction.coerce(ctx, e)


def to_chart(sys: PlaneSystem, chart: Chart) -> PlaneSystem:
    """Rewrite a base-coordinate system in the chart's coordinates."""
    if sys.vars == chart.vars:
        return sys
    if sys.vars != chart.from_base.source_vars:
        raise AtlasError(f"system variables {sys.vars} are not the atlas base variables")
    out = pushforward(sys, chart.from_base, method="forward")
    out.name = f"{sys.name}[{chart.id}]"
    return out


_ATLAS = re.compile(r"atlas\s+(?P<name>\S+)$")
_BASE = re.compile(r"base\s+vars\((?P<a>\w+)\s*,\s*(?P<b>\w+)\)$")
_CHART = re.compile(
    r"chart\s+(?P<id>\S+)\s+vars\((?P<a>\w+)\s*,\s*(?P<b>\w+)\)\s+to_base:\s*(?P<tb>.+?)\s+"
    r"from_base:\s*(?P<fb>.+)$"
)
_DIVISOR = re.compile(r"divisor\s+(?P<name>\S+)\s+on\s+(?P<chart>\S+)\s*:\s*(?P<body>.+)$")
_OPT = re.compile(r"\[(?P<key>selfint|exclude)\s+(?P<val>[^\]]+)\]")


def parse_atlas(text: str, ctx: Context, name: str = "atlas") -> Atlas:
    atlas = None
    pending_name = name
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            if m := _ATLAS.match(line):
                pending_name = m.group("name")
                continue
            if m := _BASE.match(line):
                base = (m.group("a"), m.group("b"))
                for v in base:
                    ctx.declare(v, "coordinate")
                atlas = Atlas(pending_name, ctx, base)
                continue
            if atlas is None:
                raise AtlasError("the base record must come first")
            if m := _CHART.match(line):
                tb = [parse(e, ctx) for e in m.group("tb").split(",")]
                fb = [parse(e, ctx) for e in m.group("fb").split(",")]
                for v in (m.group("a"), m.group("b")):
                    ctx.declare(v, "coordinate")
                if len(tb) != 2 or len(fb) != 2:
                    raise AtlasError("charts need two expressions on each side")
                atlas.add_chart(m.group("id"), (m.group("a"), m.group("b")), tb, fb)
                continue
            if m := _DIVISOR.match(line):
                body = m.group("body")
                selfint, exclude = None, []
                for o in _OPT.finditer(body):
                    if o.group("key") == "selfint":
                        selfint = int(o.group("val"))
                    else:
                        var, _, val = o.group("val").partition("=")
                        exclude.append((var.strip(), val.strip()))
                eq = _OPT.sub("", body).strip()
                atlas.add_divisor(m.group("name"), m.group("chart"), eq, selfint, exclude)
                continue
            raise AtlasError("unrecognized record")
        except AtlasError as exc:
            raise AtlasError(f"line {lineno}: {exc}") from None
        except ValueError as exc:
            raise AtlasError(f"line {lineno}: {exc}") from exc
    if atlas is None:
        raise AtlasError("empty atlas")
    return atlas


SIGMA4 = """
atlas Sigma4
base vars(v,u)
chart 1 vars(z1,w1) to_base: 1/z1, (w1 + 1/(2*z1^3) + t/(2*z1^2))*z1^4 from_base: 1/v, u*v^4 - 1/2*v^3 - 1/2*t*v^2
chart 2 vars(z2,w2) to_base: z2, 1/w2 from_base: v, 1/u
chart 3 vars(z3,w3) to_base: 1/z3, (1/w3 + 1/(2*z3^3) + t/(2*z3^2))*z3^4 from_base: 1/v, 1/(u*v^4 - 1/2*v^3 - 1/2*t*v^2)
divisor L on 1: z1 [selfint 0]
divisor L on 3: z3
divisor H on 2: w2 [selfint 4]
divisor H on 3: w3
"""

PVI_SURFACE = """
atlas PVI
base vars(x,y)
chart 1 vars(z1,w1) to_base: 1/z1, -(w1*z1 + alpha2)*z1 from_base: 1/x, -(x*y + alpha2)*x
chart 2 vars(z2,w2) to_base: z2, 1/w2 from_base: x, 1/y
chart 3 vars(z3,w3) to_base: 1/z3, -(z3/w3 + alpha2)*z3 from_base: 1/x, -1/((x*y + alpha2)*x)
divisor D0 on 2: w2 [selfint 2]
divisor D0 on 3: w3
"""

P2 = """
atlas P2
base vars(v,u)
chart A vars(zA,wA) to_base: 1/zA, wA/zA from_base: 1/v, u/v
chart B vars(zB,wB) to_base: zB/wB, 1/wB from_base: v/u, 1/u
divisor Hinf on A: zA [selfint 1]
divisor Hinf on B: wB
"""

BLOWUP = """
atlas XY
base vars(v,u)
chart XY vars(X,Y) to_base: X, Y/X^6 from_base: v, u*v^6
divisor E on XY: X [exclude Y=0]
"""

BUILTIN_ATLASES = {"Sigma4": SIGMA4, "PVI": PVI_SURFACE, "P2": P2, "XY": BLOWUP}


def builtin_atlas(name: str, ctx: Context) -> Atlas:
    try:
        text = BUILTIN_ATLASES[name]
    except KeyError:
        raise AtlasError(f"unknown atlas {name!r}") from None
    cache = ctx.__dict__.setdefault("_atlas_cache", {})
    if name not in cache:
        cache[name] = parse_atlas(text, ctx, name)
    return cache[name]
