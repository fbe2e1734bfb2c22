"""``rupert-kit`` command-line front-end.

Every command emits a report with the fields ``command``, ``inputs``,
``outputs``, ``checks`` and ``elapsed`` in that order. Floats are written with
17 significant digits, so a parsed report compares equal to what was emitted.
``elapsed`` is null unless ``--timing`` is given, which keeps the output bytes
reproducible.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import svg
from .errors import AmbiguousClassification, DoesNotFit, FaceParallelDirection, RupertError
from .geom import Tolerances, contains_rect
from .nieuwland import OptConfig, nieuwland_constant
from .passage import build_passage
from .shadow import BoxDims, normalize_direction, orientation_from_direction, project_box
from .verify import SUITES, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_AMBIGUOUS = 3
EXIT_NO_FIT = 4


@dataclass
class RunReport:
    command: str
    inputs: dict[str, Any]
    outputs: dict[str, Any] = field(default_factory=dict)
    checks: list[dict[str, Any]] = field(default_factory=list)
    elapsed: float | None = None

    def add_check(self, name: str, passed: bool, measured: float, tolerance: float) -> None:
        self.checks.append({"name": name, "passed": bool(passed), "measured": measured, "tolerance": tolerance})

    def as_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "checks": self.checks,
            "elapsed": self.elapsed,
        }


def _format_float(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    s = format(x, ".17g")
    if not any(ch in s for ch in ".en"):
        s += ".0"
    return s


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with 17-significant-digit floats; key order is preserved."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None or isinstance(obj, (bool, np.bool_)):
        return json.dumps(None if obj is None else bool(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _format_float(float(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(dumps(v) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


class InputError(ValueError):
    pass


def _triple(text: str, what: str) -> np.ndarray:
    try:
        vals = np.array([float(t) for t in text.split(",")])
    except ValueError as exc:
        raise InputError(f"{what}: expected three comma-separated numbers, got {text!r}") from exc
    if vals.shape != (3,) or not np.all(np.isfinite(vals)):
        raise InputError(f"{what}: expected three finite numbers, got {text!r}")
    return vals


def parse_dims(text: str) -> BoxDims:
    vals = _triple(text, "--dims")
    if np.any(vals <= 0):
        raise InputError(f"--dims: sides must be positive, got {text!r}")
    return BoxDims.sorted(vals)


def parse_direction(text: str) -> np.ndarray:
    vals = _triple(text, "--dir")
    try:
        return normalize_direction(vals)
    except RupertError as exc:
        raise InputError(f"--dir: {exc}") from exc


def _rect_payload(rect) -> dict[str, Any]:
    return {
        "center": rect.center.tolist(),
        "angle": rect.angle,
        "width": rect.width,
        "height": rect.height,
        "corners": rect.corners().tolist(),
    }


def cmd_shadow(args) -> tuple[RunReport, int]:
    dims = parse_dims(args.dims)
    u = parse_direction(args.dir)
    report = RunReport("shadow", {"dims": list(dims.as_tuple()), "direction": u.tolist(), "tol": args.tol})
    try:
        shadow = project_box(dims, orientation_from_direction(u), tol=Tolerances(geom=args.tol))
    except AmbiguousClassification as exc:
        report.outputs = {"error": str(exc)}
        return report, EXIT_AMBIGUOUS
    pqr = shadow.pqr
    report.outputs = {
        "kind": shadow.kind.value,
        "polygon": shadow.polygon.vertices.tolist(),
        "pqr": pqr.tolist(),
        "vertical_extent": shadow.vertical_extent,
        "area": shadow.area,
        "vertex_origin": [shadow.body_vertex(j).tolist() for j in range(len(shadow.polygon))],
    }
    err = abs(float(np.sum(pqr**2)) - 1.0)
    report.add_check("pqr_unit_sum", err < 1e-12, err, 1e-12)
    if args.svg:
        _write(args.svg, svg.render(shadow.polygon, title=f"shadow of {dims.as_tuple()}"))
    return report, EXIT_OK


def cmd_passage(args) -> tuple[RunReport, int]:
    dims = parse_dims(args.dims)
    u = parse_direction(args.dir)
    lam = args.lam
    if not (math.isfinite(lam) and lam > 0):
        raise InputError(f"--lambda must be positive, got {lam}")
    report = RunReport("passage", {"dims": list(dims.as_tuple()), "direction": u.tolist(), "lambda": lam})
    try:
        spec = build_passage(dims, u, lam)
    except (DoesNotFit, FaceParallelDirection) as exc:
        report.outputs = {"error": f"{type(exc).__name__}: {exc}"}
        return report, EXIT_NO_FIT
    shadow = project_box(dims, orientation_from_direction(u))
    report.outputs = {
        "direction": spec.direction.tolist(),
        "scale": spec.scale,
        "cross_section": _rect_payload(spec.cross_section),
        "cross_section_body": spec.cross_section_body().tolist(),
        "clearance": spec.clearance,
        "measured_clearance": spec.measured_clearance,
        "shadow": shadow.polygon.vertices.tolist(),
    }
    report.add_check("open_containment", spec.verify(), spec.measured_clearance, spec.clearance)
    if args.svg:
        _write(args.svg, svg.render(shadow.polygon, spec.cross_section, spec.clearance, title="passage"))
    return report, EXIT_OK


def cmd_nieuwland(args) -> tuple[RunReport, int]:
    dims = parse_dims(args.dims)
    try:
        cfg = OptConfig(
            sphere_samples=args.sphere_samples,
            angle_samples=args.angle_samples,
            refine_iters=args.refine_iters,
            seed=args.seed,
            local_rounds=args.local_rounds,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = RunReport(
        "nieuwland",
        {
            "dims": list(dims.as_tuple()),
            "sphere_samples": cfg.sphere_samples,
            "angle_samples": cfg.angle_samples,
            "refine_iters": cfg.refine_iters,
            "refine_shrink": cfg.refine_shrink,
            "local_rounds": cfg.local_rounds,
            "local_samples": cfg.local_samples,
            "seed": cfg.seed,
        },
    )
    res = nieuwland_constant(dims, cfg, workers=None)
    report.outputs = {
        "lambda_star": res.lambda_star,
        "direction": res.direction.tolist(),
        "angle": res.angle,
        "placement": _rect_payload(res.placement),
        "evaluations": res.evaluations,
        "skipped": res.skipped,
        "history": [{"direction": d.tolist(), "lambda": lam} for d, lam in res.history],
    }
    report.add_check("placement_verified", res.verify(), res.lambda_star, 0.0)
    if args.svg:
        shadow = project_box(dims, orientation_from_direction(res.direction))
        _write(args.svg, svg.render(shadow.polygon, res.placement, title="largest passable scale"))
    return report, EXIT_OK


def cmd_verify(args) -> tuple[RunReport, int]:
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    report = RunReport("verify", {"suite": args.suite, "trials": args.trials, "seed": args.seed})
    results = run_suite(args.suite, args.trials, args.seed)
    for res in results:
        report.outputs[res.suite] = {"passed": res.passed, "counters": dict(res.counters)}
        for c in res.checks:
            report.checks.append(
                {
                    "name": f"{res.suite}.{c.name}",
                    "passed": c.passed,
                    "measured": c.measured,
                    "tolerance": c.tolerance,
                }
            )
            mark = "ok  " if c.passed else "FAIL"
            print(f"{mark} {res.suite}.{c.name}: worst={c.measured:.3g} tol={c.tolerance:.3g} {c.detail}".rstrip(), file=sys.stderr)
    passed = all(r.passed for r in results)
    if not passed:
        print(
            f"reproduce with: rupert-kit verify --suite {args.suite} --trials {args.trials} --seed {args.seed}",
            file=sys.stderr,
        )
    return report, EXIT_OK if passed else EXIT_CHECK_FAILED


def _write(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
    common.add_argument("--svg", metavar="PATH", help="write a figure here")
    common.add_argument("--tol", type=float, default=Tolerances().geom, help="geometric tolerance")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--timing", action="store_true", help="record wall-clock time in the report")

    parser = argparse.ArgumentParser(prog="rupert-kit", description="Straight passages through rectangular boxes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("shadow", parents=[common], help="shadow of a box along a direction")
    p.add_argument("--dims", required=True, metavar="A,B,C")
    p.add_argument("--dir", required=True, metavar="X,Y,Z")
    p.set_defaults(func=cmd_shadow)

    p = sub.add_parser("passage", parents=[common], help="tunnel admitting a scaled copy of the box")
    p.add_argument("--dims", required=True, metavar="A,B,C")
    p.add_argument("--dir", required=True, metavar="X,Y,Z")
    p.add_argument("--lambda", dest="lam", type=float, default=1.0, metavar="F")
    p.set_defaults(func=cmd_passage)

    d = OptConfig()
    p = sub.add_parser("nieuwland", parents=[common], help="search for the largest passable scale")
    p.add_argument("--dims", required=True, metavar="A,B,C")
    p.add_argument("--sphere-samples", type=int, default=d.sphere_samples)
    p.add_argument("--angle-samples", type=int, default=d.angle_samples)
    p.add_argument("--refine-iters", type=int, default=d.refine_iters)
    p.add_argument("--local-rounds", type=int, default=d.local_rounds)
    p.set_defaults(func=cmd_nieuwland)

    p = sub.add_parser("verify", parents=[common], help="randomised property suites")
    p.add_argument("--suite", default="all", choices=SUITES + ("all",))
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    start = time.perf_counter()
    try:
        report, code = args.func(args)
    except InputError as exc:
        print(f"rupert-kit: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if args.timing:
        report.elapsed = time.perf_counter() - start
    text = dumps(report.as_dict()) + "\n"
    if args.json:
        _write(args.json, text)
    else:
        sys.stdout.write(text)
    if code == EXIT_AMBIGUOUS or code == EXIT_NO_FIT:
        print(f"rupert-kit: {report.outputs.get('error', '')}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
