"""Command-line entry point.

One executable, one subcommand per operation, machine-readable output.
Every JSON payload embeds the resolved config and the hash of the map
spec it was computed from, so a result file is self-describing.  Output
is byte-stable: fixed key order, no timestamps, one seeded generator.

Exit codes: 0 success, 1 usage, 2 invalid input, 3 computation refused
(degree caps).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from .config import ConfigError, RunConfig, resolve_config
from .core import Point2
from .family import (
    SweepReport,
    classify_dissipative,
    sweep_common_periodic,
    unit_locus_grid,
)
from .green import CurveParam, curve_green_mass, escape_data, green, green_grid
from .heights import HeightCache, canonical_height
from .measure import MeasureSample, measure_discrepancy, measure_from_periodic
from .periodic import common_periodic, periodic_numeric, rational_periodic_points
from .resultant import fixed_points_exact_resultant
from .poly import DegreeCapExceeded, UniPoly
from .rationals import format_rational, parse_rational
from .specfile import SpecFileError, load_family, load_map

__all__ = ["main"]


class _UsageError(Exception):
    def __init__(self, parser, message):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract is 1
        raise _UsageError(self, message)


def _parse_point(text: str, field: str = "--point") -> Point2:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"{field} must be 'x,y', got {text!r}")
    try:
        return Point2(parse_rational(parts[0]), parse_rational(parts[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{field}: {exc}") from None


def _parse_params(text: str) -> list[Fraction]:
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"--params range must be 'a:b:step', got {text!r}")
        a, b, step = (parse_rational(p) for p in parts)
        if step <= 0:
            raise ValueError("--params step must be positive")
        out = []
        cur = a
        while cur <= b:
            out.append(cur)
            cur += step
        return out
    return [parse_rational(p) for p in text.split(",") if p.strip()]


def _parse_coeffs(text: str, field: str) -> UniPoly:
    try:
        return UniPoly(tuple(parse_rational(c) for c in text.split(",")))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"{field}: {exc}") from None


def _file_hash(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _q2(q: Point2) -> list[str]:
    return [format_rational(q.x), format_rational(q.y)]


def _c2(q: Point2) -> list[list[float]]:
    x, y = complex(q.x), complex(q.y)
    return [[x.real, x.imag], [y.real, y.imag]]


def _emit(payload: dict, out_path: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _write_csv(rows, header, out_path: str | None) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow(row)
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_eval(args, cfg: RunConfig) -> int:
    f = load_map(args.map)
    q = _parse_point(args.point)
    image = f.evaluate(q, args.iterates)
    _emit(
        {
            "config": cfg.as_dict(),
            "map_hash": f.canonical_hash(),
            "point": _q2(q),
            "iterates": args.iterates,
            "image": _q2(image),
        },
        args.out,
    )
    return 0


def _green_payload(f, q, direction, cfg) -> dict:
    gv = green(f, q, direction, tol=cfg.tol, n_max=cfg.n_max)
    esc = escape_data(f, direction)
    return {
        "value": gv.value,
        "error": gv.error,
        "escaped": gv.escaped,
        "escape_iterate": gv.escape_iterate,
        "n_used": gv.n_used,
        "radius": esc.radius,
        "tail_constant": esc.tail_constant,
    }


def _cmd_green(args, cfg: RunConfig) -> int:
    f = load_map(args.map)
    if args.grid is not None:
        try:
            xspec, yspec = args.grid.split(",")
            x0, x1, nx = xspec.split(":")
            y0, y1, ny = yspec.split(":")
            xr = (float(x0), float(x1), int(nx))
            yr = (float(y0), float(y1), int(ny))
        except ValueError:
            raise ValueError(
                f"--grid must be 'x0:x1:nx,y0:y1:ny', got {args.grid!r}"
            ) from None
        rows = green_grid(f, xr, yr, tol=cfg.tol, n_max=cfg.n_max)
        _write_csv(rows, ("re", "im", "G_plus", "G_minus", "err"), args.out)
        return 0
    if args.point is None:
        raise ValueError("green needs --point or --grid")
    q = _parse_point(args.point)
    dirs = ("plus", "minus") if args.direction == "both" else (args.direction,)
    payload = {
        "config": cfg.as_dict(),
        "map_hash": f.canonical_hash(),
        "point": _q2(q),
    }
    for d in dirs:
        payload[d] = _green_payload(f, q, d, cfg)
    _emit(payload, args.out)
    return 0


def _cmd_height(args, cfg: RunConfig) -> int:
    f = load_map(args.map)
    q = _parse_point(args.point)
    cache = HeightCache(cfg.cache_path) if cfg.cache_path else None
    hv = canonical_height(f, q, tol=cfg.tol, n_max=cfg.n_max, cache=cache)
    _emit(
        {
            "config": cfg.as_dict(),
            "map_hash": f.canonical_hash(),
            "point": _q2(q),
            "h_plus": hv.h_plus,
            "h_minus": hv.h_minus,
            "total": hv.total,
            "per_place": {str(p): v for p, v in hv.per_place.items()},
            "error": hv.error,
            "exact": hv.exact,
        },
        args.out,
    )
    return 0


def _exact_cycle_json(c) -> dict:
    return {
        "period": c.period,
        "points": [_q2(q) for q in c.points],
        "multipliers": list(c.multipliers) if c.multipliers else None,
        "classification": c.classification,
    }


def _numeric_cycle_json(c) -> dict:
    return {
        "period": c.period,
        "points": [_c2(q) for q in c.points],
        "multipliers": list(c.multipliers) if c.multipliers else None,
        "classification": c.classification,
    }


def _cmd_periodic(args, cfg: RunConfig) -> int:
    f = load_map(args.map)
    payload = {
        "config": cfg.as_dict(),
        "map_hash": f.canonical_hash(),
        "max_period": args.max_period,
    }
    if args.resultant:
        res = fixed_points_exact_resultant(
            f, n=args.max_period, degree_cap=args.degree_cap
        )
        payload.update(
            {
                "mode": "resultant",
                "count": res.count,
                "rational_points": [_q2(q) for q in res.rational_points],
            }
        )
        _emit(payload, args.out)
        return 0
    if args.numeric:
        res = periodic_numeric(
            f,
            args.max_period,
            tol=cfg.tol,
            n_starts=args.starts,
            seed=cfg.seed,
        )
        payload.update(
            {
                "mode": "numeric",
                "cycles": [_numeric_cycle_json(c) for c in res.cycles],
                "coverage": res.coverage,
                "expected": res.expected,
                "found": res.found,
                "seed": res.seed,
            }
        )
    else:
        primes = tuple(args.prime) if args.prime else cfg.primes
        rep = rational_periodic_points(
            f,
            max_period=args.max_period,
            primes=primes,
            height_bound=args.height_bound,
        )
        payload.update(
            {
                "mode": "exact",
                "cycles": [_exact_cycle_json(c) for c in rep.cycles],
                "primes": list(rep.primes),
                "height_bound": rep.height_bound,
                "skipped": list(rep.skipped),
            }
        )
    _emit(payload, args.out)
    return 0


def _cmd_common(args, cfg: RunConfig) -> int:
    f = load_map(args.map_f)
    g = load_map(args.map_g)
    res = common_periodic(
        f,
        g,
        max_period=args.max_period,
        tol=cfg.tol,
        primes=cfg.primes,
        height_bound=args.height_bound,
        numeric=args.numeric,
        n_starts=args.starts,
        seed=cfg.seed,
    )
    _emit(
        {
            "config": cfg.as_dict(),
            "map_f_hash": f.canonical_hash(),
            "map_g_hash": g.canonical_hash(),
            "max_period": args.max_period,
            "shared_iterate": list(res.shared_iterate) if res.shared_iterate else None,
            "points": [_q2(q) for q in res.exact_points],
            "numeric_matches": [_c2(q) for q in res.numeric_matches],
            "method": res.method,
        },
        args.out,
    )
    return 0


def _sweep_row_json(r) -> dict:
    return {
        "b": format_rational(r.param),
        "count": r.count,
        "points": [_q2(q) for q in r.points],
        "max_pair_height": r.max_pair_height,
        "shared_iterate": list(r.shared_iterate) if r.shared_iterate else None,
        "excluded": r.excluded,
        "error": r.error,
    }


def _sweep_flag(r) -> str:
    if r.shared_iterate is not None:
        return "shared-iterate"
    if r.excluded is not None:
        return "excluded"
    if r.error is not None:
        return "error"
    return ""


def _run_sweep(ff, gg, params, args, cfg):
    kwargs = dict(
        max_period=args.max_period,
        eps=cfg.eps,
        seed=cfg.seed,
        primes=cfg.primes[:2] if len(cfg.primes) >= 2 else cfg.primes,
        height_bound=args.height_bound,
    )
    if cfg.jobs == 1 or len(params) < 2:
        return sweep_common_periodic(ff, gg, params, **kwargs)
    # fan out one parameter per task; reassembly below is by sorted
    # parameter order, so the report is independent of completion order
    ordered = sorted(params)
    with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
        reports = list(
            pool.map(lambda b: sweep_common_periodic(ff, gg, [b], **kwargs), ordered)
        )
    rows = tuple(rep.rows[0] for rep in reports)
    exceptional = tuple(
        r.param
        for r in rows
        if r.shared_iterate is not None or r.excluded is not None or r.error is not None
    )
    d_obs = 0
    for r in rows:
        if r.shared_iterate is None and r.excluded is None and r.error is None:
            d_obs = max(d_obs, r.count)
    return SweepReport(
        rows=rows,
        d_observed=d_obs,
        max_period=args.max_period,
        eps=cfg.eps,
        seed=cfg.seed,
        exceptional=exceptional,
    )


def _cmd_sweep(args, cfg: RunConfig) -> int:
    ff = load_family(args.family_f)
    gg = load_family(args.family_g)
    params = _parse_params(args.params)
    if not params:
        raise ValueError("--params produced an empty list")
    report = _run_sweep(ff, gg, params, args, cfg)
    payload = {
        "config": cfg.as_dict(),
        "family_f_hash": _file_hash(args.family_f),
        "family_g_hash": _file_hash(args.family_g),
        "max_period": report.max_period,
        "eps": report.eps,
        "seed": report.seed,
        "d_observed": report.d_observed,
        "d_observed_note": "empirical lower bound from sampled parameters",
        "exceptional": [format_rational(b) for b in report.exceptional],
        "rows": [_sweep_row_json(r) for r in report.rows],
    }
    _emit(payload, args.out)
    if args.out:
        stem = args.out[:-5] if args.out.endswith(".json") else args.out
        _write_csv(
            (
                (
                    format_rational(r.param),
                    r.count,
                    _sweep_flag(r),
                    "" if r.max_pair_height is None else r.max_pair_height,
                )
                for r in report.rows
            ),
            ("b", "count", "flag", "max_pair_height"),
            stem + ".csv",
        )
    return 0


def _cmd_jacobian(args, cfg: RunConfig) -> int:
    if (args.map is None) == (args.family is None):
        raise ValueError("jacobian needs exactly one of --map or --family")
    if args.map is not None:
        f = load_map(args.map)
        jac = f.jacobian
        _emit(
            {
                "config": cfg.as_dict(),
                "map_hash": f.canonical_hash(),
                "jacobian": format_rational(jac),
                "modulus": abs(float(jac)),
                "dissipative": abs(jac) < 1,
            },
            args.out,
        )
        return 0
    fam = load_family(args.family)
    jac_poly = fam.jacobian_map()
    samples = _parse_params(args.samples) if args.samples else []
    rep = classify_dissipative(fam, samples)
    _emit(
        {
            "config": cfg.as_dict(),
            "family_hash": _file_hash(args.family),
            "jacobian_coeffs": [format_rational(c) for c in jac_poly.coeffs],
            "excluded_params": [format_rational(b) for b in fam.excluded_params],
            "samples": [
                {
                    "b": format_rational(b),
                    "modulus": m,
                    "verdict": v,
                }
                for b, m, v in zip(rep.samples, rep.moduli, rep.verdicts)
            ],
            "family_verdict": rep.family_verdict,
        },
        args.out,
    )
    return 0


def _cmd_measure(args, cfg: RunConfig) -> int:
    f = load_map(args.map)
    sample = measure_from_periodic(
        f, args.period, tol=cfg.tol, n_starts=args.starts, seed=cfg.seed
    )
    rows = []
    for q in sample.points:
        x, y = complex(q.x), complex(q.y)
        rows.append((x.real, x.imag, y.real, y.imag))
    _write_csv(rows, ("re_x", "im_x", "re_y", "im_y"), args.out)
    if args.out:
        _emit(
            {
                "config": cfg.as_dict(),
                "map_hash": f.canonical_hash(),
                "period": sample.period,
                "seed": sample.seed,
                "size": len(sample.points),
                "low_quality": sample.low_quality,
                "cloud": args.out,
            },
            None,
        )
    return 0


def _read_cloud(path: str) -> MeasureSample:
    pts = []
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if header != ["re_x", "im_x", "re_y", "im_y"]:
                raise ValueError(f"{path}: not a measure cloud CSV")
            for row in reader:
                rx, ix, ry, iy = (float(v) for v in row)
                pts.append(Point2(complex(rx, ix), complex(ry, iy)))
    except OSError as exc:
        raise ValueError(f"{path}: {exc}") from None
    return MeasureSample(tuple(pts), 0, 0, low_quality=len(pts) < 4)


def _cmd_measure_compare(args, cfg: RunConfig) -> int:
    a = _read_cloud(args.a)
    b = _read_cloud(args.b)
    _emit(
        {
            "config": cfg.as_dict(),
            "a": args.a,
            "b": args.b,
            "size_a": len(a.points),
            "size_b": len(b.points),
            "discrepancy": measure_discrepancy(a, b),
        },
        args.out,
    )
    return 0


def _cmd_curve_mass(args, cfg: RunConfig) -> int:
    f = load_map(args.map)
    curve = CurveParam(
        _parse_coeffs(args.curve_x, "--curve-x"),
        _parse_coeffs(args.curve_y, "--curve-y"),
    )
    cm = curve_green_mass(
        f,
        curve,
        r_lo=args.r_lo,
        r_hi=args.r_hi,
        n_radii=args.n_radii,
        n_theta=args.n_theta,
        tol=cfg.tol,
        n_max=cfg.n_max,
    )
    _emit(
        {
            "config": cfg.as_dict(),
            "map_hash": f.canonical_hash(),
            "mass": cm.mass,
            "pair_slopes": list(cm.pair_slopes),
            "spread": cm.spread,
            "flagged_nonconvergent": cm.flagged_nonconvergent,
            "mean_green_error": cm.mean_green_error,
            "radii": list(cm.radii),
            "averages": list(cm.averages),
        },
        args.out,
    )
    return 0


def _cmd_unit_locus(args, cfg: RunConfig) -> int:
    ff = load_family(args.family_f)
    gg = load_family(args.family_g)
    try:
        x0, x1, y0, y1 = (float(v) for v in args.box.split(":"))
    except ValueError:
        raise ValueError(f"--box must be 'x0:x1:y0:y1', got {args.box!r}") from None
    res = unit_locus_grid(ff, gg, box=(x0, x1, y0, y1), resolution=args.resolution)
    _emit(
        {
            "config": cfg.as_dict(),
            "family_f_hash": _file_hash(args.family_f),
            "family_g_hash": _file_hash(args.family_g),
            "box": list(res.box),
            "resolutions": list(res.resolutions),
            "counts": list(res.counts),
            "verdict": res.verdict,
        },
        args.out,
    )
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def _build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML or JSON config file")
    common.add_argument("--tol", type=float)
    common.add_argument("--eps", type=float)
    common.add_argument("--n-max", type=int, dest="n_max")
    common.add_argument("--seed", type=int)
    common.add_argument("--cache", dest="cache_path")
    common.add_argument("--format", choices=("json", "csv"), dest="out_format")
    common.add_argument("--jobs", type=int)
    common.add_argument("--out", help="write output to this path instead of stdout")

    p = _Parser(prog="henonlab", description=__doc__)
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    def cmd(name, handler, **kw):
        sp = sub.add_parser(name, parents=[common], **kw)
        sp.set_defaults(handler=handler)
        return sp

    sp = cmd("eval", _cmd_eval, help="apply a map to a rational point")
    sp.add_argument("--map", required=True)
    sp.add_argument("--point", required=True)
    sp.add_argument("-n", "--iterates", type=int, default=1)

    sp = cmd("green", _cmd_green, help="escape rate at a point or over a grid")
    sp.add_argument("--map", required=True)
    sp.add_argument("--point")
    sp.add_argument("--grid", help="x0:x1:nx,y0:y1:ny -> CSV")
    sp.add_argument("--direction", choices=("plus", "minus", "both"), default="both")

    sp = cmd("height", _cmd_height, help="canonical height of a rational point")
    sp.add_argument("--map", required=True)
    sp.add_argument("--point", required=True)

    sp = cmd("periodic", _cmd_periodic, help="periodic points, exact or numeric")
    sp.add_argument("--map", required=True)
    sp.add_argument("--max-period", type=int, required=True, dest="max_period")
    sp.add_argument("--prime", type=int, action="append")
    sp.add_argument("--numeric", action="store_true")
    sp.add_argument("--resultant", action="store_true",
                    help="exact count with multiplicity via elimination")
    sp.add_argument("--starts", type=int, default=64)
    sp.add_argument("--height-bound", type=int, default=10**6, dest="height_bound")
    sp.add_argument("--degree-cap", type=int, default=64, dest="degree_cap")

    sp = cmd("common", _cmd_common, help="common periodic points of two maps")
    sp.add_argument("--map-f", required=True, dest="map_f")
    sp.add_argument("--map-g", required=True, dest="map_g")
    sp.add_argument("--max-period", type=int, default=1, dest="max_period")
    sp.add_argument("--numeric", action="store_true")
    sp.add_argument("--starts", type=int, default=64)
    sp.add_argument("--height-bound", type=int, default=10**6, dest="height_bound")

    sp = cmd("sweep", _cmd_sweep, help="common-periodic sweep over a family pair")
    sp.add_argument("--family-f", required=True, dest="family_f")
    sp.add_argument("--family-g", required=True, dest="family_g")
    sp.add_argument("--params", required=True, help="'a:b:step' or comma list")
    sp.add_argument("--max-period", type=int, default=2, dest="max_period")
    sp.add_argument("--height-bound", type=int, default=10**6, dest="height_bound")

    sp = cmd("jacobian", _cmd_jacobian, help="Jacobian and dissipativity")
    sp.add_argument("--map")
    sp.add_argument("--family")
    sp.add_argument("--samples", help="'a:b:step' or comma list of parameters")

    sp = cmd("measure", _cmd_measure, help="saddle-cycle sample of the measure")
    sp.add_argument("--map", required=True)
    sp.add_argument("--period", type=int, required=True)
    sp.add_argument("--starts", type=int, default=256)

    sp = cmd("measure-compare", _cmd_measure_compare, help="energy distance of two clouds")
    sp.add_argument("--a", required=True)
    sp.add_argument("--b", required=True)

    sp = cmd("curve-mass", _cmd_curve_mass, help="Green growth along a curve")
    sp.add_argument("--map", required=True)
    sp.add_argument("--curve-x", required=True, dest="curve_x",
                    help="ascending rational coefficients, comma separated")
    sp.add_argument("--curve-y", required=True, dest="curve_y")
    sp.add_argument("--r-lo", type=float, default=1e3, dest="r_lo")
    sp.add_argument("--r-hi", type=float, default=1e6, dest="r_hi")
    sp.add_argument("--n-radii", type=int, default=8, dest="n_radii")
    sp.add_argument("--n-theta", type=int, default=512, dest="n_theta")

    sp = cmd("unit-locus", _cmd_unit_locus, help="grid scan for |Jac|=1 overlap")
    sp.add_argument("--family-f", required=True, dest="family_f")
    sp.add_argument("--family-g", required=True, dest="family_g")
    sp.add_argument("--box", default="-2:2:-2:2")
    sp.add_argument("--resolution", type=int, default=16)

    return p


_OVERRIDE_FIELDS = (
    "tol",
    "eps",
    "n_max",
    "seed",
    "cache_path",
    "out_format",
    "jobs",
)


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        exc.parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if getattr(args, "handler", None) is None:
        parser.print_usage(sys.stderr)
        print("error: a subcommand is required", file=sys.stderr)
        return 1
    try:
        overrides = {k: getattr(args, k, None) for k in _OVERRIDE_FIELDS}
        cfg = resolve_config(args.config, overrides)
        return args.handler(args, cfg)
    except (ConfigError, SpecFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except DegreeCapExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError, ZeroDivisionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
