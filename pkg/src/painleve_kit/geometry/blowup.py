"""Point blow-ups of a plane chart and the scripted resolution of the point at u = infinity."""

from __future__ import annotations

from ..algebra import Context, RationalFunction
from ..systems import BirationalMap, compose


def _var(ctx: Context, name: str) -> RationalFunction:
    return RationalFunction.coerce(ctx, ctx.var(name))


def blow_up(ctx: Context, vars, center, names_x=None, names_y=None):
    """The two charts of the blow-up of (x, y) = center.

    Chart one is (x - a, (y - c)/(x - a)), chart two is ((x - a)/(y - c), y - c).
    """
    x, y = vars
    a, c = (RationalFunction.coerce(ctx, v) for v in center)
    names_x = tuple(names_x or (f"{x}_b", f"{y}_b"))
    names_y = tuple(names_y or (f"{x}_c", f"{y}_c"))
    for n in names_x + names_y:
        ctx.declare(n, "coordinate")
    X, Y = _var(ctx, x) - a, _var(ctx, y) - c
    p, q = _var(ctx, names_x[0]), _var(ctx, names_x[1])
    first = BirationalMap(ctx, (x, y), names_x, (X, Y / X),
                          inverse=(p + a, p * q + c), name=f"blowup[{x}]")
    p, q = _var(ctx, names_y[0]), _var(ctx, names_y[1])
    second = BirationalMap(ctx, (x, y), names_y, (X / Y, Y),
                           inverse=(p * q + a, q + c), name=f"blowup[{y}]")
    return first, second


def resolution_script(ctx: Context, base=("v", "u"), steps: int = 6):
    """Maps from (v, u) to (v, u v^6): the chart (v, 1/u), six blow-ups at the origin
    in the x-direction chart, then the reciprocal of the last coordinate.

    Returns the list of maps and their composite.
    """
    v, u = base
    ctx.declare("s0x", "coordinate")
    ctx.declare("s0y", "coordinate")
    start = BirationalMap(ctx, base, ("s0x", "s0y"), (_var(ctx, v), 1 / _var(ctx, u)),
                          inverse=(_var(ctx, "s0x"), 1 / _var(ctx, "s0y")), name="chart2")
    maps = [start]
    cur = ("s0x", "s0y")
    for k in range(1, steps + 1):
        nxt = (f"s{k}x", f"s{k}y")
        first, _ = blow_up(ctx, cur, (0, 0), names_x=nxt, names_y=(f"s{k}p", f"s{k}q"))
        maps.append(first)
        cur = nxt
    for n in ("X", "Y"):
        ctx.declare(n, "coordinate")
    last = BirationalMap(ctx, cur, ("X", "Y"), (_var(ctx, cur[0]), 1 / _var(ctx, cur[1])),
                         inverse=(_var(ctx, "X"), 1 / _var(ctx, "Y")), name="invert")
    maps.append(last)
    total = maps[0]
    for m in maps[1:]:
        total = compose(total, m)
    total.name = "resolution"
    return maps, total


__all__ = ["blow_up", "resolution_script"]
