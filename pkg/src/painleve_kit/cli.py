"""Command-line front end: ``painleve-kit <command> [options]``.

Every command prints a text report by default and a canonical JSON report with
``--json``. Exit codes: 0 success, 1 analysis failure (or a failed verdict under
``--strict``), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor

from .algebra import format_rational, parse
from .catalog import CatalogError, NotFound, builtin_catalog, load_catalog
from .geometry import (
    AtlasError,
    GeometryError,
    accessible_points,
    alpha_test,
    builtin_atlas,
    divisor_pole_order,
    expansion_matrices,
    find_point,
    local_index,
    matrix_json,
    parse_atlas,
)
from .geometry.atlas import BUILTIN_ATLASES
from .numerics import (
    IntegratorConfig,
    VerificationError,
    integrate,
    ode_as_system,
    segments,
    verify_branch_numeric,
)
from .series import map_series, painleve_test
from .systems import check_holomorphy, check_symmetry, jacobian_determinant, pushforward

COMMANDS = ("catalog", "painleve-test", "singularities", "local-index", "alpha-test", "transform",
            "verify-symmetry", "holomorphy", "pole-order", "integrate", "verify-branch")

# atlas used when --atlas is not given
DEFAULT_ATLAS = {"K": "Sigma4", "PVI": "PVI"}


class AnalysisError(RuntimeError):
    pass


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _complex_json(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _parse_complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def _parse_assignment(items) -> dict:
    out = {}
    for item in items or ():
        name, sep, value = item.partition("=")
        if not sep:
            raise argparse.ArgumentTypeError(f"expected name=value, got {item!r}")
        out[name.strip()] = _parse_complex(value)
    return out


# -- shared loading ---------------------------------------------------------

def _catalog(args):
    return load_catalog(args.catalog) if args.catalog else builtin_catalog()


def _atlas(args, cat, system_name: str):
    name = args.atlas or DEFAULT_ATLAS.get(system_name)
    if name is None:
        raise AnalysisError(f"no default atlas for {system_name!r}; pass --atlas")
    for key in BUILTIN_ATLASES:
        if key.lower() == name.lower():
            return builtin_atlas(key, cat.ctx)
    with open(name, encoding="utf-8") as fh:
        return parse_atlas(fh.read(), cat.ctx, name)


def _points(args, cat):
    sys_ = cat.system(args.system)
    return sys_, accessible_points(sys_, _atlas(args, cat, args.system))


def _selected(points, key):
    return list(points) if key is None else [find_point(points, key)]


def _map_jobs(args, fn, items):
    if args.jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


# -- commands ---------------------------------------------------------------
# each returns (results, text lines, verdict list)

def cmd_catalog(args, cat):
    if args.name:
        obj = cat.get(args.name)
        text = str(obj) if not hasattr(obj, "describe") else obj.describe()
        return {"name": args.name, "record": text}, [text], []
    names = cat.names()
    lines = [f"{kind}: {', '.join(v)}" for kind, v in names.items()]
    return names, lines, []


def _transport_chain(args, cat):
    maps = []
    for spec in args.map or ():
        name, inverse = (spec[:-3], True) if spec.endswith("^-1") else (spec, False)
        m = cat.map(name)
        maps.append((spec, m.inverted() if inverse else m))
    signs = {k: int(v.real) for k, v in _parse_assignment(args.sign).items()}
    return maps, signs


def cmd_painleve_test(args, cat):
    ode = cat.ode(args.ode)
    branches = painleve_test(ode, depth=args.depth)
    if not branches:
        raise AnalysisError(f"no supported dominant balance for {args.ode!r}")
    maps, signs = _transport_chain(args, cat)
    lines, results = [], {"branches": []}
    for k, b in enumerate(branches):
        lines.append(f"branch {k}: {args.ode} = {b.series.format()}")
        lines.append(f"  resonances {b.resonances}, free {b.free_symbols or '-'}, "
                     f"compatible {b.compatible}")
        entry = b.to_json()
        cur = b.series
        if maps:
            entry["transported"] = []
        for spec, m in maps:
            cur = map_series(m, cur, radical_signs=signs)
            entry["transported"].append({
                "map": spec, "series": {v: s.to_json() for v, s in zip(m.target_vars, cur)}})
            for v, s_ in zip(m.target_vars, cur):
                lines.append(f"  [{spec}] {v} = {s_.format()}")
        results["branches"].append(entry)
    return results, lines, [b.compatible for b in branches]


def cmd_singularities(args, cat):
    _, rep = _points(args, cat)
    lines = [f"{p.describe()}, multiplicity {p.multiplicity}" for p in rep]
    for u in rep.unresolved:
        lines.append(f"unresolved on {u.divisor} (chart {u.chart}): {format_rational(u.equation)}"
                     f" ({u.reason})")
    results = {
        "points": [p.to_json() for p in rep],
        "unresolved": [{"chart": u.chart, "divisor": u.divisor,
                        "equation": format_rational(u.equation), "reason": u.reason}
                       for u in rep.unresolved],
    }
    if args.expansion:
        for entry, p in zip(results["points"], rep):
            entry["expansion_matrices"] = [matrix_json(M) for M in
                                           expansion_matrices(cat.system(args.system), p,
                                                              args.expansion)]
    return results, lines, []


def cmd_local_index(args, cat):
    sys_, rep = _points(args, cat)
    reports = _map_jobs(args, lambda p: local_index(sys_, p), _selected(rep, args.point))
    lines = []
    for r in reports:
        lines.append(f"{r.point}: matrix {matrix_json(r.matrix)}, ratio "
                     f"{'-' if r.resonance_ratio is None else format_rational(r.resonance_ratio)}"
                     f", integer {r.integer_verdict} ({r.status})")
    results = {"indices": []}
    for r in reports:
        entry = r.to_json()
        entry["matrix"] = matrix_json(r.matrix)
        results["indices"].append(entry)
    return results, lines, [r.integer_verdict for r in reports if r.status == "ok"]


def cmd_alpha_test(args, cat):
    sys_, rep = _points(args, cat)
    results, lines, verdicts = {"tests": []}, [], []
    for p in _selected(rep, args.point):
        try:
            r = alpha_test(sys_, p)
        except GeometryError as exc:
            if args.point:
                raise
            results["tests"].append({"point": p.label, "status": str(exc)})
            lines.append(f"{p.label}: skipped ({exc})")
            continue
        entry = r.to_json()
        entry["status"] = "ok"
        results["tests"].append(entry)
        lines.append(f"{r.point}: exponent {format_rational(r.exponent)}, "
                     f"single-valued {r.single_valued}")
        for v, rhs in zip(r.reduced.vars, r.reduced.rhs):
            lines.append(f"  d{v}/d{r.reduced.time} = {format_rational(rhs)}")
        for v, sol in r.solution_text.items():
            lines.append(f"  {v} = {sol}")
        verdicts.append(bool(r.single_valued) and r.residual_zero is not False)
    return results, lines, verdicts


def cmd_transform(args, cat):
    sys_ = cat.system(args.system)
    m = cat.map(args.map)
    if args.inverse:
        m = m.inverted()
    out = pushforward(sys_, m, method=args.method)
    rhs = {v: format_rational(r) for v, r in zip(out.vars, out.rhs)}
    results = {"vars": list(out.vars), "rhs": rhs,
               "jacobian_determinant": format_rational(jacobian_determinant(m))}
    lines = [str(out), f"jacobian determinant {results['jacobian_determinant']}"]
    verdicts = []
    if args.expect:
        target = cat.system(args.expect)
        same = out.equals(target) if out.vars == target.vars else False
        results["equals_expected"] = same
        lines.append(f"equals {args.expect}: {same}")
        verdicts.append(same)
    return results, lines, verdicts


def cmd_verify_symmetry(args, cat):
    sys_ = cat.system(args.system)
    if args.chart:
        sys_ = pushforward(sys_, cat.map(args.chart))
    ok = check_symmetry(sys_, cat.map(args.map))
    return {"symmetry": ok}, [f"{args.map} is a symmetry of {sys_.name}: {ok}"], [ok]


def cmd_holomorphy(args, cat):
    sys_ = cat.system(args.system)
    shift = parse(args.shift, cat.ctx) if args.shift else 0
    rep = check_holomorphy(sys_, cat.map(args.map), shift)
    results = {"polynomial": rep.polynomial, "transformed": format_rational(rep.transformed),
               "offending_denominators": rep.offending_denominators}
    lines = [f"polynomial: {rep.polynomial}", f"transformed: {results['transformed']}"]
    return results, lines, [rep.polynomial]


def cmd_pole_order(args, cat):
    sys_ = cat.system(args.system)
    atlas = _atlas(args, cat, args.system)
    orders = {name: divisor_pole_order(sys_, atlas, name) for name in atlas.divisors}
    return {"orders": orders}, [f"{k}: {v}" for k, v in orders.items()], []


def _config(args) -> IntegratorConfig:
    return IntegratorConfig(rtol=args.rtol, atol=args.atol, min_step=args.min_step)


def cmd_integrate(args, cat):
    if args.ode:
        sys_ = ode_as_system(cat.ode(args.ode))
    elif args.system:
        sys_ = cat.system(args.system).apply_constraints()
    else:
        raise AnalysisError("pass --system or --ode")
    initial = [_parse_complex(x) for x in args.initial.split(",")]
    path = [_parse_complex(x) for x in args.path.split(",")]
    if len(initial) != 2 or len(path) < 2:
        raise AnalysisError("--initial needs two values and --path at least two")
    traj = integrate(sys_, _parse_assignment(args.param), initial, segments(*path), _config(args),
                     samples=args.samples)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as fh:
            traj.write_csv(fh)
    results = {"status": traj.status, "diagnostic": traj.diagnostic, "steps": traj.steps,
               "rejected": traj.rejected, "final_time": _complex_json(traj.times[-1]),
               "final_state": [_complex_json(z) for z in traj.final],
               "pole_estimate": None if traj.pole_estimate is None
               else _complex_json(traj.pole_estimate)}
    lines = [f"status {traj.status} after {traj.steps} steps ({traj.rejected} rejected)",
             f"t = {traj.times[-1]}, state = {traj.final}"]
    if traj.diagnostic:
        lines.append(traj.diagnostic)
    if traj.pole_estimate is not None:
        lines.append(f"pole estimate {traj.pole_estimate}")
    return results, lines, [traj.ok]


def cmd_verify_branch(args, cat):
    ode = cat.ode(args.ode)
    branches = painleve_test(ode, depth=args.depth)
    picked = range(len(branches)) if args.branch is None else [args.branch]
    params = _parse_assignment(args.param)
    for b in branches:
        for sym in b.free_symbols:
            params.setdefault(sym, 0)
    cfg = _config(args)

    def run(k):
        return k, verify_branch_numeric(ode, branches[k], args.t0, params, args.r_near,
                                        args.r_far, cfg, direction=args.direction,
                                        oracle_step=args.oracle_step)
    certs = _map_jobs(args, run, list(picked))
    results, lines, verdicts = {"certificates": []}, [], []
    for k, c in certs:
        ok = c.deviation < args.threshold
        results["certificates"].append({
            "branch": k, "deviation": c.deviation, "oracle_deviation": c.oracle_deviation,
            "tail": c.tail, "passed": ok})
        lines.append(f"branch {k}: deviation {c.deviation:.3e}"
                     + ("" if c.oracle_deviation is None else f", oracle {c.oracle_deviation:.3e}")
                     + f" -> {'pass' if ok else 'fail'}")
        verdicts.append(ok)
    return results, lines, verdicts


HANDLERS = {
    "catalog": cmd_catalog, "painleve-test": cmd_painleve_test,
    "singularities": cmd_singularities, "local-index": cmd_local_index,
    "alpha-test": cmd_alpha_test, "transform": cmd_transform,
    "verify-symmetry": cmd_verify_symmetry, "holomorphy": cmd_holomorphy,
    "pole-order": cmd_pole_order, "integrate": cmd_integrate, "verify-branch": cmd_verify_branch,
}


# -- argument parsing -------------------------------------------------------

def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", help="canonical JSON report")
    p.add_argument("--strict", action="store_true", help="exit 1 when any verdict fails")
    p.add_argument("--catalog", help="catalog file extending the built-in records")
    p.add_argument("--atlas", help="built-in atlas name or atlas file")
    p.add_argument("--jobs", type=int, default=1, help="parallel jobs for independent items")
    p.add_argument("--timing", action="store_true", help="include wall time in the report")
    return p


def _numeric(p) -> None:
    p.add_argument("--param", action="append", metavar="NAME=VALUE")
    p.add_argument("--rtol", type=float, default=1e-10)
    p.add_argument("--atol", type=float, default=1e-12)
    p.add_argument("--min-step", type=float, default=1e-14)


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="painleve-kit", parents=[common],
                                     description="Singularity analysis of plane Hamiltonian systems.")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True

    def add(name, help_):
        return sub.add_parser(name, parents=[common], help=help_)

    p = add("catalog", "list catalog records")
    p.add_argument("name", nargs="?")
    p = add("painleve-test", "formal Laurent series test of a scalar ODE")
    p.add_argument("--ode", required=True)
    p.add_argument("--depth", type=int, default=12)
    p.add_argument("--map", action="append", metavar="NAME[^-1]",
                   help="transport the branches through this map (repeatable, applied in order)")
    p.add_argument("--sign", action="append", metavar="RADICAL=+1|-1",
                   help="branch of a square root met during transport")
    p = add("singularities", "accessible singular points on an atlas")
    p.add_argument("--system", required=True)
    p.add_argument("--expansion", type=int, default=0, metavar="ORDER",
                   help="also report expansion matrices through ORDER")
    for name, help_ in (("local-index", "linear part at accessible points"),
                        ("alpha-test", "scaling limit and explicit solution at a point")):
        p = add(name, help_)
        p.add_argument("--system", required=True)
        p.add_argument("--point", help="label (P1), chart coordinate (z2=1) or base value (X=0)")
    p = add("transform", "push a system through a map")
    p.add_argument("--system", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--inverse", action="store_true")
    p.add_argument("--method", choices=("auto", "forward", "pullback"), default="auto")
    p.add_argument("--expect", help="catalog system the result should equal")
    p = add("verify-symmetry", "check that a map preserves a system")
    p.add_argument("--system", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--chart", help="map taking the system to the symmetry's coordinates first")
    p = add("holomorphy", "polynomiality of a Hamiltonian in new coordinates")
    p.add_argument("--system", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--shift", help="expression added to the Hamiltonian")
    p = add("pole-order", "pole order of the vector field along each divisor")
    p.add_argument("--system", required=True)
    p = add("integrate", "adaptive integration along a complex path")
    p.add_argument("--system")
    p.add_argument("--ode")
    p.add_argument("--initial", required=True, metavar="A,B")
    p.add_argument("--path", required=True, metavar="T0,T1,...")
    p.add_argument("--samples", type=int, default=0)
    p.add_argument("--csv")
    _numeric(p)
    p = add("verify-branch", "numerical certificate for formal series branches")
    p.add_argument("--ode", required=True)
    p.add_argument("--branch", type=int)
    p.add_argument("--depth", type=int, default=14)
    p.add_argument("--t0", type=float, default=1.0)
    p.add_argument("--r-near", type=float, default=0.02)
    p.add_argument("--r-far", type=float, default=0.1)
    p.add_argument("--direction", type=_parse_complex, default=1)
    p.add_argument("--oracle-step", type=float)
    p.add_argument("--threshold", type=float, default=1e-6)
    _numeric(p)
    return parser


def _inputs(args) -> dict:
    skip = {"json", "strict", "timing", "jobs", "command"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip or v is None:
            continue
        out[k] = _complex_json(v) if isinstance(v, complex) else v
    return out


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    report = {"command": args.command, "inputs": _inputs(args)}
    try:
        cat = _catalog(args)
        results, lines, verdicts = HANDLERS[args.command](args, cat)
    except (AnalysisError, AtlasError, CatalogError, GeometryError, NotFound, VerificationError,
            ValueError, ArithmeticError, OSError) as exc:
        msg = str(exc) or type(exc).__name__
        if args.json:
            report.update({"status": "error", "error": msg})
            print(canonical_json(report), file=out)
        print(f"painleve-kit {args.command}: {msg}", file=sys.stderr)
        return 1
    ok = all(verdicts)
    report.update({"status": "ok", "results": results, "verdicts_passed": ok})
    if args.timing:
        report["seconds"] = round(time.perf_counter() - start, 6)
    if args.json:
        print(canonical_json(report), file=out)
    else:
        for line in lines:
            print(line, file=out)
        if args.timing:
            print(f"({report['seconds']} s)", file=out)
    return 1 if args.strict and not ok else 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
