"""Command-line front end.

Subcommands: ``project`` (one projection, JSON/CSV/plain output),
``family`` (enumerate the set-valued degenerate family as CSV), ``check``
(invariant battery over seeded random inputs), ``solve`` (feasibility
solver runs with CSV traces), and ``bench`` (latency and oracle-gap
statistics).

Exit codes are stable contracts:

* 0 -- success (all checks passed / solver converged)
* 1 -- an invariant failed in ``check``
* 2 -- parse error: bad flags or a malformed input file
* 3 -- numeric-domain error raised while computing (non-finite inline
  coordinates, mismatched inline dimensions, ...)
* 4 -- ``family`` invoked on an input that is not degenerate
* 5 -- solver exhausted max_iter without converging

All numbers in JSON and CSV output render with 17 significant digits, so
parsing them back reproduces the exact binary values.  ``CROSSPROJ_SEED``
provides the default seed wherever ``--seed`` is accepted.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__
from .errors import CaseError, DimensionMismatch, DomainError, NotUnitNorm, SingularSystem
from .linalg import Pair
from .oracle import check, lagrangian_oracle
from .projection import (
    SingletonProjection,
    Tolerances,
    classify,
    family_samples,
    objective,
    project,
)
from .solvers import (
    alternating_projections,
    default_start,
    douglas_rachford,
    generate_instance,
    instance_from_dict,
    instance_to_dict,
)


class PointFileError(Exception):
    """Malformed input document; reported with file/field context (exit 2)."""


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def _json_dumps(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits (lossless round-trip)."""
    pad = "  " * indent
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        rows = [
            f'{pad}  {json.dumps(str(k))}: {_json_dumps(v, indent + 1)}'
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(rows) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        seq = list(obj)
        if not seq:
            return "[]"
        if all(isinstance(v, (int, float, str, bool, type(None))) for v in seq):
            return "[" + ", ".join(_json_dumps(v) for v in seq) + "]"
        rows = [f"{pad}  {_json_dumps(v, indent + 1)}" for v in seq]
        return "[\n" + ",\n".join(rows) + "\n" + pad + "]"
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj)
    return json.dumps(str(obj))


def _parse_coords(text: str) -> np.ndarray:
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse coordinates {text!r}: {exc}")
    if not vals:
        raise argparse.ArgumentTypeError("empty coordinate list")
    return np.array(vals)


def _default_seed() -> int:
    return int(os.environ.get("CROSSPROJ_SEED", "0"))


def _parse_dims(text: str) -> list[int]:
    try:
        dims = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"cannot parse dims {text!r}: {exc}")
    if not dims or any(d < 1 for d in dims):
        raise argparse.ArgumentTypeError("dims must be positive integers")
    return dims


def load_point_file(path: str) -> tuple[np.ndarray, np.ndarray]:
    """Parse a point document {dim, x0, y0} with field-precise errors."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise PointFileError(f"cannot read {path}: {exc}")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PointFileError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}")
    if not isinstance(doc, dict):
        raise PointFileError(f"{path}: top-level value must be an object")
    for name in ("dim", "x0", "y0"):
        if name not in doc:
            raise PointFileError(f"{path}: missing field {name!r}")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool) or dim < 1:
        raise PointFileError(f"{path}: field 'dim' must be a positive integer")
    arrays = {}
    for name in ("x0", "y0"):
        raw = doc[name]
        if not isinstance(raw, list):
            raise PointFileError(f"{path}: field {name!r} must be an array")
        if len(raw) != dim:
            raise PointFileError(
                f"{path}: field {name!r} has length {len(raw)}, expected dim = {dim}"
            )
        for i, v in enumerate(raw):
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise PointFileError(f"{path}: field '{name}[{i}]' is not a number")
            if not math.isfinite(v):
                raise PointFileError(f"{path}: field '{name}[{i}]' is not finite")
        arrays[name] = np.array(raw, dtype=float)
    return arrays["x0"], arrays["y0"]


def _resolve_point(args) -> tuple[np.ndarray, np.ndarray]:
    inline = args.x0 is not None or args.y0 is not None
    if args.input is not None and inline:
        raise PointFileError("specify either --input or --x0/--y0, not both")
    if args.input is not None:
        return load_point_file(args.input)
    if args.x0 is None or args.y0 is None:
        raise PointFileError("provide --input FILE or both --x0 and --y0")
    return args.x0, args.y0


def _tols(args) -> Tolerances:
    return Tolerances(orth=args.tol_orth, deg=args.tol_deg)


def _emit(text: str, output: str | None) -> None:
    if output is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")


def result_document(res, x0, y0, tols: Tolerances) -> dict:
    singleton = isinstance(res, SingletonProjection)
    if singleton:
        points = [{"selection": "unique", "x": list(res.point.x), "y": list(res.point.y)}]
    else:
        points = [
            {"selection": "base", "x": list(res.canonical[0].x), "y": list(res.canonical[0].y)},
            {"selection": "alternate", "x": list(res.canonical[1].x), "y": list(res.canonical[1].y)},
        ]
    return {
        "schema": "crossproj/result/v1",
        "version": __version__,
        "case": res.tag.value,
        "set_valued": not singleton,
        "lambda": res.lam if singleton else None,
        "half_dist_sq": res.half_dist_sq,
        "dist_sq": 2.0 * res.half_dist_sq,
        "dist": math.sqrt(max(2.0 * res.half_dist_sq, 0.0)),
        "tolerances": {"orth": tols.orth, "deg": tols.deg, "membership": tols.membership},
        "input": {"dim": int(len(x0)), "x0": list(x0), "y0": list(y0)},
        "points": points,
    }


def _result_csv(doc: dict) -> str:
    n = doc["input"]["dim"]
    head = ["case", "selection", "lambda", "half_dist_sq", "dist"]
    head += [f"x_{i}" for i in range(n)] + [f"y_{i}" for i in range(n)]
    lines = [",".join(head)]
    lam = "" if doc["lambda"] is None else _fmt(doc["lambda"])
    for p in doc["points"]:
        row = [doc["case"], p["selection"], lam, _fmt(doc["half_dist_sq"]), _fmt(doc["dist"])]
        row += [_fmt(v) for v in p["x"]] + [_fmt(v) for v in p["y"]]
        lines.append(",".join(row))
    return "\n".join(lines)


def _result_plain(doc: dict) -> str:
    lines = [
        f"case: {doc['case']}",
        f"lambda: {'-' if doc['lambda'] is None else _fmt(doc['lambda'])}",
        f"half_dist_sq: {_fmt(doc['half_dist_sq'])}",
        f"dist: {_fmt(doc['dist'])}",
    ]
    for p in doc["points"]:
        lines.append(
            f"point[{p['selection']}]: x = ({', '.join(_fmt(v) for v in p['x'])}); "
            f"y = ({', '.join(_fmt(v) for v in p['y'])})"
        )
    return "\n".join(lines)


def cmd_project(args) -> int:
    x0, y0 = _resolve_point(args)
    tols = _tols(args)
    res = project(x0, y0, tols)
    doc = result_document(res, x0, y0, tols)
    if args.format == "json":
        _emit(_json_dumps(doc), args.output)
    elif args.format == "csv":
        _emit(_result_csv(doc), args.output)
    else:
        _emit(_result_plain(doc), args.output)
    return 0


def cmd_family(args) -> int:
    x0, y0 = _resolve_point(args)
    tols = _tols(args)
    try:
        samples = family_samples(x0, y0, args.count, args.mode, tols)
    except CaseError:
        tag = classify(x0, y0, tols)
        sys.stderr.write(
            f"error: family requires a degenerate input; this one classifies as "
            f"{tag.value}\n"
        )
        return 4
    n = len(x0)
    head = [f"u_{i}" for i in range(n)] + [f"x_{i}" for i in range(n)]
    head += [f"y_{i}" for i in range(n)] + ["objective"]
    lines = [",".join(head)]
    for u, point in samples:
        row = [_fmt(v) for v in u] + [_fmt(v) for v in point.x] + [_fmt(v) for v in point.y]
        row.append(_fmt(objective(point, x0, y0)))
        lines.append(",".join(row))
    _emit("\n".join(lines), args.output)
    return 0


_CRAFTED_EPS = (1e-6, 1e-8, 1e-10)


def _crafted_inputs(rng: np.random.Generator, dim: int):
    """Edge-case battery: origin, orthogonal, both degenerate rays, near-degenerate."""
    zero = np.zeros(dim)
    yield zero, zero
    e1 = np.zeros(dim)
    e1[0] = 1.0
    if dim >= 2:
        e2 = np.zeros(dim)
        e2[1] = 1.0
        yield e1, e2
    else:
        yield e1, zero
    v = rng.uniform(0.5, 1.5, dim)
    yield v, v.copy()
    yield v, -v
    for eps in _CRAFTED_EPS:
        y = rng.uniform(-1.0, 1.0, dim)
        w = rng.standard_normal(dim)
        w /= np.linalg.norm(w)
        yield y + eps * w, y


def cmd_check(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    stats: dict[str, list] = {}
    failures = []
    total_inputs = 0
    for dim in args.dims:
        rng = np.random.default_rng([seed, dim])
        inputs = list(_crafted_inputs(rng, dim))
        inputs += [
            (rng.uniform(-1.0, 1.0, dim), rng.uniform(-1.0, 1.0, dim))
            for _ in range(args.trials)
        ]
        for trial, (x0, y0) in enumerate(inputs):
            total_inputs += 1
            rep = check(
                x0,
                y0,
                seed=int(rng.integers(0, 2**63)),
                resolution=args.resolution,
            )
            for name, item in rep.items.items():
                entry = stats.setdefault(name, [0, 0, 0.0, item.tol])
                entry[1] += 1
                entry[2] = max(entry[2], item.residual)
                entry[3] = max(entry[3], item.tol)
                if item.passed:
                    entry[0] += 1
                else:
                    failures.append((dim, trial, name, x0, y0, item))
    width = max(len(name) for name in stats)
    print(f"checked {total_inputs} inputs over dims {args.dims} (seed {seed})")
    for name in sorted(stats):
        passed, total, worst, tol = stats[name]
        status = "ok " if passed == total else "FAIL"
        print(
            f"  [{status}] {name:<{width}}  {passed}/{total} pass"
            f"  max residual {worst:.3e}  (tol {tol:.1e})"
        )
    if failures:
        print(f"{len(failures)} failing input(s):")
        for dim, trial, name, x0, y0, item in failures[:20]:
            print(
                f"  dim={dim} trial={trial} check={name} "
                f"residual={item.residual:.6e} tol={item.tol:.1e}"
            )
            print(f"    x0 = [{', '.join(_fmt(v) for v in x0)}]")
            print(f"    y0 = [{', '.join(_fmt(v) for v in y0)}]")
        return 1
    return 0


def _parse_generate(text: str):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected KIND,DIM,SEED, e.g. orthant,2,0")
    kind = parts[0].strip()
    try:
        dim = int(parts[1])
        seed = int(parts[2])
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad --generate value {text!r}: {exc}")
    return kind, dim, seed


def _parse_start(text: str) -> Pair:
    halves = text.split(";")
    if len(halves) != 2:
        raise argparse.ArgumentTypeError("expected --start 'x1,..,xn;y1,..,yn'")
    return Pair(_parse_coords(halves[0]), _parse_coords(halves[1]))


def cmd_solve(args) -> int:
    if (args.generate is None) == (args.instance is None):
        raise PointFileError("provide exactly one of --generate or --instance")
    if args.generate is not None:
        kind, dim, seed = args.generate
        problem, witness = generate_instance(kind, dim, seed)
        instance_doc = instance_to_dict(problem, witness, seed=seed)
    else:
        try:
            with open(args.instance, "r", encoding="utf-8") as fh:
                instance_doc = json.load(fh)
        except OSError as exc:
            raise PointFileError(f"cannot read {args.instance}: {exc}")
        except json.JSONDecodeError as exc:
            raise PointFileError(
                f"{args.instance}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
            )
        problem, witness = instance_from_dict(instance_doc)
        seed = instance_doc.get("seed", args.seed if args.seed is not None else _default_seed())

    start = args.start if args.start is not None else default_start(problem.kind, problem.dim, seed)
    if len(start.x) != problem.dim or len(start.y) != problem.dim:
        raise PointFileError(f"--start must have dimension {problem.dim}")

    runner = alternating_projections if args.method == "ap" else douglas_rachford
    trace = runner(
        problem, start, max_iter=args.max_iter, tol=args.tol, selection=args.selection
    )

    if args.trace is not None:
        with open(args.trace, "w", encoding="utf-8") as fh:
            trace.write_csv(fh)

    summary = trace.summary()
    summary["schema"] = "crossproj/solve-summary/v1"
    summary["version"] = __version__
    summary["instance"] = {
        "kind": problem.kind,
        "dim": problem.dim,
        "seed": seed,
    }
    text = _json_dumps(summary)
    if args.summary is not None:
        with open(args.summary, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    print(text)
    return 0 if trace.converged else 5


def cmd_bench(args) -> int:
    seed = args.seed if args.seed is not None else _default_seed()
    lines = [
        "dim,trials,project_median_us,project_p99_us,gap_min,gap_max,gap_mean"
    ]
    for dim in args.dims:
        rng = np.random.default_rng([seed, dim])
        inputs = [
            (rng.uniform(-1.0, 1.0, dim), rng.uniform(-1.0, 1.0, dim))
            for _ in range(args.trials)
        ]
        times = []
        gaps = []
        for x0, y0 in inputs:
            t0 = time.perf_counter()
            project(x0, y0)
            times.append((time.perf_counter() - t0) * 1e6)
            gaps.append(lagrangian_oracle(x0, y0).gap_vs_formula)
        lines.append(
            ",".join(
                [
                    str(dim),
                    str(args.trials),
                    _fmt(float(np.median(times))),
                    _fmt(float(np.percentile(times, 99))),
                    _fmt(float(np.min(gaps))),
                    _fmt(float(np.max(gaps))),
                    _fmt(float(np.mean(gaps))),
                ]
            )
        )
    _emit("\n".join(lines), args.output)
    return 0


def _add_point_arguments(sub) -> None:
    sub.add_argument("--input", metavar="FILE", help="point document {dim, x0, y0}")
    sub.add_argument("--x0", type=_parse_coords, metavar="A,B,...", help="inline x0")
    sub.add_argument("--y0", type=_parse_coords, metavar="C,D,...", help="inline y0")
    sub.add_argument("--tol-orth", type=float, default=1e-12, dest="tol_orth")
    sub.add_argument("--tol-deg", type=float, default=1e-12, dest="tol_deg")
    sub.add_argument("--output", metavar="FILE", help="write result here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossproj",
        description="Exact projection onto the cross {(x, y) : <x, y> = 0}.",
    )
    parser.add_argument("--version", action="version", version=f"crossproj {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("project", help="project one point onto the cross")
    _add_point_arguments(p)
    p.add_argument("--format", choices=("json", "csv", "plain"), default="json")
    p.set_defaults(func=cmd_project)

    p = subs.add_parser("family", help="enumerate the degenerate projection family")
    _add_point_arguments(p)
    p.add_argument("--count", type=int, default=8)
    p.add_argument("--mode", choices=("grid", "injective"), default="grid")
    p.set_defaults(func=cmd_family)

    p = subs.add_parser("check", help="run the invariant battery on seeded inputs")
    p.add_argument("--dims", type=_parse_dims, default=[1, 2, 3, 4])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--resolution", type=int, default=64)
    p.set_defaults(func=cmd_check)

    p = subs.add_parser("solve", help="run a feasibility solver on an instance")
    p.add_argument("--generate", type=_parse_generate, metavar="KIND,DIM,SEED")
    p.add_argument("--instance", metavar="FILE")
    p.add_argument("--method", choices=("ap", "dr"), default="ap")
    p.add_argument("--max-iter", type=int, default=5000, dest="max_iter")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--selection", choices=("first", "second", "alternate"), default="first")
    p.add_argument("--start", type=_parse_start, metavar="X;Y")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--trace", metavar="FILE", help="write the iterate trace CSV here")
    p.add_argument("--summary", metavar="FILE", help="also write the JSON summary here")
    p.set_defaults(func=cmd_solve)

    p = subs.add_parser("bench", help="latency and oracle-gap statistics")
    p.add_argument("--dims", type=_parse_dims, default=[1, 2, 3, 4, 5, 6, 7, 8])
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--output", metavar="FILE")
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except PointFileError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (DomainError, DimensionMismatch, NotUnitNorm, SingularSystem) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3


def app() -> None:
    sys.exit(main())


if __name__ == "__main__":
    app()
