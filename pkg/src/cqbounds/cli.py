"""Command-line surface: load channels, graphs and representations from JSON
files, run any computation, and emit deterministic machine-readable result
documents (plus CSV export for exponent curves).

Exit codes: 0 success, 2 validation error, 3 solver non-convergence
(document still emitted, converged = false), 4 size cap exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import exponents, zeroerror
from .channels import (
    CQChannel,
    ClassicalChannel,
    make_graph,
    validate_classical,
    validate_cq,
)
from .errors import ConvergenceError, SizeCapError, ValidationError
from .optim import SolverConfig

LN2 = math.log(2.0)

COMMANDS = (
    "capacity",
    "e0",
    "esp-curve",
    "rrho",
    "radius",
    "rinf",
    "cfb",
    "theta",
    "value",
    "value-sp",
    "zero-error-bound",
    "certify",
)


@dataclass(frozen=True)
class JobSpec:
    command: str
    input_path: str
    params: dict


def _complex_entry(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, (int, float)):
        return complex(v)
    raise ValidationError(f"matrix entries must be numbers or [re, im] pairs, got {v!r}")


def _complex_matrix(rows):
    return np.array([[_complex_entry(v) for v in row] for row in rows])


def load_channel(path: str):
    """Load a channel from a JSON document, dispatching on its "kind" field."""
    doc = _load_json(path)
    kind = doc.get("kind")
    if kind == "classical":
        return validate_classical(doc["W"], labels=doc.get("labels"))
    if kind == "cq":
        return validate_cq([_complex_matrix(m) for m in doc["states"]],
                           labels=doc.get("labels"))
    raise ValidationError(f'expected kind "classical" or "cq", got {kind!r}')


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ValidationError(f"{path} must hold a JSON object")
    return doc


def load_input(path: str):
    """Load any supported input document (channel, graph, or representation)."""
    doc = _load_json(path)
    kind = doc.get("kind")
    if kind in ("classical", "cq"):
        return load_channel(path)
    if kind == "graph":
        return make_graph(int(doc["n"]), doc.get("edges", []))
    if kind == "vector-rep":
        graph = make_graph(int(doc["graph"]["n"]), doc["graph"].get("edges", []))
        vectors = [np.array([_complex_entry(v) for v in vec]) for vec in doc["vectors"]]
        handle = None
        if doc.get("handle") is not None:
            handle = np.array([_complex_entry(v) for v in doc["handle"]])
        return zeroerror.validate_vector_representation(graph, vectors, handle)
    if kind == "projector-rep":
        graph = make_graph(int(doc["graph"]["n"]), doc["graph"].get("edges", []))
        projs = [_complex_matrix(m) for m in doc["projectors"]]
        handle = _complex_matrix(doc["handle"]) if doc.get("handle") is not None else None
        return zeroerror.validate_projector_representation(graph, projs, handle)
    raise ValidationError(f"unsupported input kind {kind!r}")


# ---------------------------------------------------------------------------
# Result documents
# ---------------------------------------------------------------------------


def _scaled(value: float, units: str) -> float | None:
    if value is None or math.isinf(value) or math.isnan(value):
        return None
    return value / LN2 if units == "bits" else value


def _num(value: float, units: str) -> dict:
    """Encode one nats-valued scalar, with null + flag for infinities."""
    if value is not None and math.isinf(value):
        return {"value": None, "is_infinite": True}
    return {"value": _scaled(value, units), "is_infinite": False}


def _report_doc(report) -> dict:
    if report is None:
        return {}
    return {
        "gap": report.gap,
        "iterations": report.iterations,
        "converged": report.converged,
    }


def _dist_list(dist) -> list:
    return [float(v) for v in np.asarray(dist.p if hasattr(dist, "p") else dist)]


def _matrix_list(M) -> list:
    return [[[float(v.real), float(v.imag)] for v in row] for row in np.asarray(M, dtype=complex)]


def _require_param(params: dict, key: str, command: str):
    if params.get(key) is None:
        raise ValidationError(f'command "{command}" requires --{key.replace("_", "-")}')
    return params[key]


REQUIRED_PARAMS = {
    "e0": ("rho",),
    "rrho": ("rho",),
    "radius": ("alpha",),
    "zero-error-bound": ("blocklength",),
    "certify": ("blocklength",),
}


def run(job: JobSpec) -> dict:
    """Execute one job and return the result document."""
    if job.command not in COMMANDS:
        raise ValidationError(f"unknown command {job.command!r}")
    params = job.params
    for key in REQUIRED_PARAMS.get(job.command, ()):
        _require_param(params, key, job.command)
    if job.command == "esp-curve":
        _rate_grid(params, job.command)
    units = params.get("units", "nats")
    cfg = SolverConfig(
        tolerance=params.get("tol") or 1e-6,
        seed=params.get("seed") or 0,
    )
    obj = load_input(job.input_path)
    doc = {
        "command": job.command,
        "input_path": job.input_path,
        "input": _load_json(job.input_path),
        "params": {k: v for k, v in sorted(params.items()) if v is not None},
        "units": units,
        "results": {},
        "reports": {},
    }
    results = doc["results"]
    reports = doc["reports"]
    cmd = job.command

    if cmd == "capacity":
        _expect(obj, ClassicalChannel, cmd)
        value = exponents.capacity_classical(obj)
        minmax = exponents.capacity_minmax(obj, cfg)
        results["capacity"] = _num(value, units)
        results["capacity_minmax"] = _num(minmax.value, units)
        results["center"] = _dist_list(minmax.center)
        reports["minmax"] = _report_doc(minmax.report)
    elif cmd == "e0":
        rho = _require_param(params, "rho", cmd)
        point = exponents.e0_max(obj, rho, cfg)
        results["rho"] = rho
        results["e0"] = _num(point.e0, units)
        results["optimal_input"] = _dist_list(point.optimal_input)
        reports["e0"] = _report_doc(point.report)
    elif cmd == "rrho":
        rho = _require_param(params, "rho", cmd)
        results["rho"] = rho
        results["r_rho"] = _num(exponents.r_rho_primal(obj, rho, cfg), units)
    elif cmd == "radius":
        alpha = _require_param(params, "alpha", cmd)
        res = exponents.radius_solve(obj, alpha, cfg)
        results["alpha"] = alpha
        results["radius"] = _num(res.value, units)
        results["gap"] = res.gap
        results["center"] = (
            _dist_list(res.center)
            if isinstance(obj, ClassicalChannel)
            else _matrix_list(res.center)
        )
        reports["radius"] = _report_doc(res.report)
    elif cmd == "rinf":
        if isinstance(obj, ClassicalChannel):
            primal, dual = exponents.r_inf_classical(obj)
            results["r_inf_primal"] = _num(primal, units)
            results["r_inf_dual"] = _num(dual.value, units)
            results["gap"] = dual.gap
            results["center"] = _dist_list(dual.center)
        elif isinstance(obj, CQChannel):
            res = exponents.r_inf_quantum(obj, cfg)
            results["r_inf"] = _num(res.value, units)
            results["gap"] = res.gap
            results["center"] = _matrix_list(res.center)
            reports["rinf"] = _report_doc(res.report)
        else:
            raise ValidationError(f'command "{cmd}" needs a channel input')
    elif cmd == "cfb":
        _expect(obj, ClassicalChannel, cmd)
        results["c_fb"] = _num(exponents.c_fb(obj), units)
    elif cmd == "esp-curve":
        rates = _rate_grid(params, cmd)
        curve = exponents.esp_curve(obj, rates)
        results["r_inf_estimate"] = _num(curve.r_inf_estimate, units)
        results["curve"] = [
            {
                "R": _scaled(r, units),
                "Esp": _scaled(v, units) if not math.isinf(v) else None,
                "is_infinite": math.isinf(v),
            }
            for r, v in curve.points
        ]
        if params.get("out"):
            export_curve(curve, params["out"])
            results["csv_path"] = params["out"]
    elif cmd == "theta":
        _expect(obj, zeroerror.ConfusabilityGraph, cmd)
        cert = zeroerror.theta(obj)
        results["theta_log"] = _num(cert.theta_log, units)
        results["theta"] = math.exp(cert.theta_log)
        results["gap"] = cert.duality_gap
    elif cmd == "value":
        _expect(obj, zeroerror.VectorRepresentation, cmd)
        res = zeroerror.lovasz_value(obj, cfg)
        results["value"] = _num(res.value, units)
        results["relaxed_value"] = _num(res.relaxed_value, units)
        results["gap"] = res.relaxed_gap
        results["handle"] = [[float(v.real), float(v.imag)] for v in res.handle]
        reports["value"] = _report_doc(res.report)
    elif cmd == "value-sp":
        _expect(obj, zeroerror.ProjectorRepresentation, cmd)
        res = zeroerror.value_sp(obj, cfg)
        results["value_sp"] = _num(res.value, units)
        results["gap"] = res.gap
        results["handle"] = _matrix_list(res.handle)
        reports["value_sp"] = _report_doc(res.report)
    elif cmd == "zero-error-bound":
        _expect(obj, zeroerror.ConfusabilityGraph, cmd)
        n = int(_require_param(params, "blocklength", cmd))
        power = zeroerror.graph_power(obj, n)
        size, witness = zeroerror.max_independent_set(power)
        results["blocklength"] = n
        results["independence_number"] = size
        results["rate"] = _num(math.log(size) / n, units)
        results["witness"] = list(witness)
    elif cmd == "certify":
        n = int(_require_param(params, "blocklength", cmd))
        if isinstance(obj, zeroerror.ConfusabilityGraph):
            graph, reps = obj, []
        elif isinstance(obj, zeroerror.ProjectorRepresentation):
            graph, reps = obj.graph, [obj]
        elif isinstance(obj, zeroerror.VectorRepresentation):
            graph, reps = obj.graph, [zeroerror.projectors_from_vectors(obj)]
        else:
            raise ValidationError('command "certify" needs a graph or representation input')
        report = zeroerror.certify_theorem3(graph, reps, n, cfg)
        results["lower"] = _num(report.lower, units)
        results["lower_blocklength"] = report.lower_blocklength
        results["theta_log"] = _num(report.theta_log, units)
        results["theta_sp_log"] = _num(report.theta_sp_log, units)
    else:
        raise ValidationError(f"unknown command {cmd!r}")

    doc["converged"] = all(r.get("converged", True) for r in reports.values())
    return doc


def _expect(obj, cls, cmd):
    if not isinstance(obj, cls):
        raise ValidationError(
            f'command "{cmd}" expects a {cls.__name__} input, got {type(obj).__name__}'
        )


def _rate_grid(params: dict, cmd: str) -> list:
    spec = params.get("rate_grid")
    if spec is None:
        if params.get("rate") is not None:
            return [float(params["rate"])]
        raise ValidationError(f'command "{cmd}" requires --rate-grid A:B:STEP (or --rate)')
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationError(f"rate grid must be A:B:STEP, got {spec!r}")
    a, b, step = (float(p) for p in parts)
    if step <= 0 or b < a:
        raise ValidationError(f"bad rate grid {spec!r}")
    count = int(math.floor((b - a) / step + 1e-12)) + 1
    return [a + k * step for k in range(count)]


def export_curve(curve, path: str) -> None:
    """Write a curve as CSV with an "inf" literal for diverging points."""
    lines = ["R_nats,Esp_nats"]
    for r, v in curve.points:
        rv = f"{r:.12f}"
        ev = "inf" if math.isinf(v) else f"{v:.12f}"
        lines.append(f"{rv},{ev}")
    try:
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise ValidationError(f"cannot write {path}: {exc}") from exc


def parse_curve_csv(path: str):
    """Parse back an exported curve CSV into (rate, value) pairs."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines or lines[0] != "R_nats,Esp_nats":
        raise ValidationError(f"{path} does not look like an exported curve")
    points = []
    for ln in lines[1:]:
        r, v = ln.split(",")
        points.append((float(r), float("inf") if v == "inf" else float(v)))
    return points


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="cqbounds",
        description="Channel reliability exponents, information radii and "
        "zero-error capacity bounds.",
    )
    p.add_argument("--input", required=True, help="path to a JSON input document")
    p.add_argument("--command", required=True, choices=COMMANDS)
    p.add_argument("--rho", type=float, default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--rate", type=float, default=None)
    p.add_argument("--rate-grid", dest="rate_grid", default=None, metavar="A:B:STEP")
    p.add_argument("--blocklength", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--units", choices=("nats", "bits"), default="nats")
    p.add_argument("--out", default=None, help="CSV path for esp-curve, else JSON copy")
    return p


def _validate_params(args) -> None:
    if args.rho is not None and args.rho < 0:
        raise ValidationError("--rho must be >= 0")
    if args.alpha is not None and not 0 < args.alpha < 1:
        raise ValidationError("--alpha must lie strictly in (0, 1)")
    if args.rate is not None and args.rate < 0:
        raise ValidationError("--rate must be >= 0")
    if args.blocklength is not None and args.blocklength < 1:
        raise ValidationError("--blocklength must be >= 1")
    if args.tol is not None and args.tol <= 0:
        raise ValidationError("--tol must be > 0")


def _emit(doc: dict, out_path: str | None, command: str) -> None:
    text = json.dumps(doc, indent=2)
    print(text)
    if out_path and command != "esp-curve":
        with open(out_path, "w") as fh:
            fh.write(text + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    params = {
        "rho": args.rho,
        "alpha": args.alpha,
        "rate": args.rate,
        "rate_grid": args.rate_grid,
        "blocklength": args.blocklength,
        "tol": args.tol,
        "seed": args.seed,
        "units": args.units,
        "out": args.out,
    }
    job = JobSpec(command=args.command, input_path=args.input, params=params)
    try:
        _validate_params(args)
        doc = run(job)
    except SizeCapError as exc:
        print(json.dumps({"error": {"type": "size-cap", "message": str(exc)}}), file=sys.stderr)
        return 4
    except (ValidationError, ValueError) as exc:
        print(json.dumps({"error": {"type": "validation", "message": str(exc)}}), file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        doc = {
            "command": args.command,
            "input_path": args.input,
            "error": {"type": "non-convergence", "message": str(exc)},
            "converged": False,
        }
        if exc.report is not None:
            doc["reports"] = {"failed": _report_doc(exc.report)}
        best_value = getattr(exc.best, "value", None) or getattr(exc.best, "e0", None)
        if best_value is not None:
            doc["best_value"] = _num(best_value, args.units)
        _emit(doc, args.out, args.command)
        return 3
    _emit(doc, args.out, args.command)
    return 0


if __name__ == "__main__":
    sys.exit(main())
