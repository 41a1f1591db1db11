"""Command-line front end: geometry ingestion, energies, sweeps, competitors.

Geometry comes in as a JSON document with a schema_version and a named map of
set descriptions (polygon / disk / ellipse / union); unknown fields are
rejected so misconfigurations fail loudly.  All tabular output is RFC-4180
style CSV (header row, '.' decimal separator, UTF-8) and is byte-for-byte
deterministic given identical flags and seed; --format table renders the same
rows for humans.

Exit codes: 0 ok, 1 verification failure, 2 input error, 3 solver error,
4 infeasible construction.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Sequence

import numpy as np

from . import capacity, energy, geometry, verify

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_INPUT = 2
EXIT_SOLVER = 3
EXIT_INFEASIBLE = 4

DEFAULT_LADDER_RELS = (0.08, 0.04, 0.02)


class DocumentError(ValueError):
    """Invalid geometry document; message carries set/field context."""


def _fmt(x) -> str:
    if isinstance(x, str):
        return x
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    v = float(x)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return format(v, ".12g")


def _emit(rows: list[dict], columns: list[str], fmt: str, output: str | None) -> None:
    buf = io.StringIO()
    if fmt == "csv":
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_fmt(row.get(c)) for c in columns])
    else:
        table = [columns] + [[_fmt(row.get(c)) for c in columns] for row in rows]
        widths = [max(len(r[i]) for r in table) for i in range(len(columns))]
        for r in table:
            buf.write("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() + "\n")
    text = buf.getvalue()
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ------------------------------------------------------------ geometry input


def _require_keys(obj: dict, allowed: set[str], context: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise DocumentError(f"{context}: unknown fields {sorted(unknown)}")


def _parse_shape(entry: dict, context: str) -> list[np.ndarray]:
    """One shape description -> list of component vertex arrays."""
    if not isinstance(entry, dict) or len(entry) != 1:
        raise DocumentError(
            f"{context}: expected exactly one of polygon/disk/ellipse/union"
        )
    (kind, body), = entry.items()
    if kind == "polygon":
        if not isinstance(body, list) or len(body) < 3:
            raise DocumentError(f"{context}.polygon: need a list of >= 3 [x, y] pairs")
        try:
            verts = np.asarray(body, dtype=float)
        except (TypeError, ValueError) as exc:
            raise DocumentError(f"{context}.polygon: {exc}") from exc
        if verts.ndim != 2 or verts.shape[1] != 2:
            raise DocumentError(f"{context}.polygon: vertices must be [x, y] pairs")
        return [verts]
    if kind == "disk":
        _require_keys(body, {"center", "radius", "n"}, f"{context}.disk")
        if "radius" not in body:
            raise DocumentError(f"{context}.disk: missing radius")
        center = body.get("center", [0.0, 0.0])
        n = int(body.get("n", 256))
        s = geometry.make_disk(float(body["radius"]), n, center=center)
        return list(s.components)
    if kind == "ellipse":
        _require_keys(body, {"center", "a", "e", "n"}, f"{context}.ellipse")
        for key in ("a", "e"):
            if key not in body:
                raise DocumentError(f"{context}.ellipse: missing {key}")
        center = body.get("center", [0.0, 0.0])
        n = int(body.get("n", 256))
        s = geometry.make_ellipse(
            geometry.EllipseSpec(float(body["a"]), float(body["e"])), n, center=center
        )
        return list(s.components)
    if kind == "union":
        if not isinstance(body, list) or not body:
            raise DocumentError(f"{context}.union: need a nonempty list of shapes")
        parts: list[np.ndarray] = []
        for i, sub in enumerate(body):
            if isinstance(sub, dict) and "union" in sub:
                raise DocumentError(f"{context}.union[{i}]: nested unions not allowed")
            parts.extend(_parse_shape(sub, f"{context}.union[{i}]"))
        return parts
    raise DocumentError(f"{context}: unknown shape kind {kind!r}")


def parse_geometry_document(doc) -> dict[str, geometry.PlanarSet]:
    """Validate a parsed JSON document and build the named PlanarSets."""
    if not isinstance(doc, dict):
        raise DocumentError("document root must be a JSON object")
    _require_keys(doc, {"schema_version", "sets"}, "document")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DocumentError(
            f"schema_version must be {SCHEMA_VERSION}, got {doc.get('schema_version')!r}"
        )
    sets = doc.get("sets")
    if not isinstance(sets, dict) or not sets:
        raise DocumentError("document needs a nonempty 'sets' map")
    out: dict[str, geometry.PlanarSet] = {}
    for name, entry in sets.items():
        components = _parse_shape(entry, f"sets.{name}")
        try:
            out[name] = geometry.PlanarSet(components)
        except geometry.GeometryError as exc:
            raise DocumentError(f"sets.{name}: {exc}") from exc
    return out


def load_geometry_document(path: str) -> dict[str, geometry.PlanarSet]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise DocumentError(
            f"{path}: JSON parse error at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return parse_geometry_document(doc)


def _resolutions_for(s: geometry.PlanarSet, args) -> list[float]:
    if args.resolutions:
        try:
            hs = [float(tok) for tok in args.resolutions.split(",") if tok]
        except ValueError as exc:
            raise DocumentError(f"--resolutions: {exc}") from exc
        if not hs or any(h <= 0.0 for h in hs):
            raise DocumentError("--resolutions needs positive comma-separated sizes")
        return hs
    d = geometry.diameter(s)
    return [d * r for r in DEFAULT_LADDER_RELS]


def _grading(args) -> str:
    return "boundary-graded" if args.grading == "boundary" else args.grading


# ------------------------------------------------------------------ commands


def cmd_capacity(args) -> int:
    sets = load_geometry_document(args.input)
    rows = []
    for name, s in sets.items():
        hs = _resolutions_for(s, args)
        if args.extrapolate and len(hs) < 3:
            raise DocumentError("--extrapolate needs at least 3 resolutions")
        result = capacity.riesz_energy(
            s, hs, extrapolate=args.extrapolate, grading=_grading(args)
        )
        for h, e in zip(result.resolutions_used, result.energies):
            rows.append(
                {
                    "set": name,
                    "h": h,
                    "energy": e,
                    "extrapolated": result.extrapolated,
                    "fitted_order": result.fitted_order,
                    "residual": result.residual,
                }
            )
    _emit(rows, ["set", "h", "energy", "extrapolated", "fitted_order", "residual"],
          args.format, args.output)
    return EXIT_OK


def cmd_energy(args) -> int:
    if args.lam is None or args.lam <= 0.0:
        raise DocumentError("--lambda must be a positive number")
    sets = load_geometry_document(args.input)
    rows = []
    for name, s in sets.items():
        hs = _resolutions_for(s, args)
        report = energy.energy_report(
            s, args.lam, resolutions=hs, extrapolate=args.extrapolate, grading=_grading(args)
        )
        m = geometry.area(s)
        th = energy.critical_thresholds(m)
        rows.append(
            {
                "set": name,
                "perimeter": report.perimeter,
                "area": m,
                "I1": report.riesz,
                "lambda": args.lam,
                "energy": report.energy_Q if args.mode == "Q" else report.energy_U,
                "lambda0_Q": th.lambda0_Q,
                "lambda_c1_Q": th.lambda_c1_Q,
                "lambda_c2_Q": th.lambda_c2_Q,
                "lambda0_U": th.lambda0_U,
            }
        )
    _emit(
        rows,
        ["set", "perimeter", "area", "I1", "lambda", "energy",
         "lambda0_Q", "lambda_c1_Q", "lambda_c2_Q", "lambda0_U"],
        args.format,
        args.output,
    )
    return EXIT_OK


def _parse_lambda_range(spec: str) -> np.ndarray:
    parts = spec.split(":")
    if len(parts) != 3:
        raise DocumentError("--lambda-range must be LO:HI:STEPS")
    try:
        lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise DocumentError(f"--lambda-range: {exc}") from exc
    if steps < 1:
        raise DocumentError("--lambda-range needs at least one step")
    if steps == 1:
        return np.array([lo])
    if hi <= lo:
        raise DocumentError("--lambda-range must be ascending (LO < HI)")
    return np.linspace(lo, hi, steps)


def _regime_label(lam: float, th: energy.CriticalThresholds, mode: str) -> str:
    if mode == "U":
        return "stable-ball" if lam <= th.lambda0_U else "past-lambda0"
    if lam <= th.lambda0_Q:
        return "stable-ball"
    if lam <= th.lambda_c1_Q:
        return "past-lambda0"
    if lam <= th.lambda_c2_Q:
        return "past-lambda-c1"
    return "past-lambda-c2"


def cmd_sweep(args) -> int:
    lams = _parse_lambda_range(args.lambda_range)
    if np.any(lams <= 0.0):
        raise DocumentError("sweep requires positive lambda values")
    sets = load_geometry_document(args.input)
    rows = []
    for name, s in sets.items():
        hs = _resolutions_for(s, args)
        result = capacity.riesz_energy(
            s, hs, extrapolate=args.extrapolate, grading=_grading(args)
        )
        perim = geometry.perimeter(s)
        th = energy.critical_thresholds(geometry.area(s))
        for lam in lams:
            lam = float(lam)
            value = (
                perim + lam * result.extrapolated
                if args.mode == "Q"
                else perim - lam / result.extrapolated
            )
            rows.append(
                {
                    "set": name,
                    "lambda": lam,
                    "energy": value,
                    "regime": _regime_label(lam, th, args.mode),
                }
            )
    _emit(rows, ["set", "lambda", "energy", "regime"], args.format, args.output)
    return EXIT_OK


def _ball_rows(cfg: energy.BallConfiguration) -> list[dict]:
    rows = []
    for i, (center, radius, frac) in enumerate(
        zip(cfg.centers, cfg.radii, cfg.charge_fractions)
    ):
        rows.append(
            {
                "row": "ball",
                "index": i,
                "x": center[0],
                "y": center[1],
                "radius": radius,
                "charge_fraction": frac,
            }
        )
    return rows


_CONFIG_COLUMNS = [
    "row", "index", "x", "y", "radius", "charge_fraction",
    "theta", "energy_bound", "reference", "gap_rel",
]


def cmd_mist(args) -> int:
    if args.lam is None or args.lam <= 0.0:
        raise DocumentError("--lambda must be a positive number")
    cfg = energy.mist_configuration(args.lam, args.n, args.separation)
    bound = energy.multiball_energy_upper(cfg, args.lam)
    reference = 2.0 * math.pi * math.sqrt(args.lam)
    rows = _ball_rows(cfg)
    rows.append(
        {
            "row": "summary",
            "energy_bound": bound,
            "reference": reference,
            "gap_rel": bound / reference - 1.0,
        }
    )
    _emit(rows, _CONFIG_COLUMNS, args.format, args.output)
    return EXIT_OK


def cmd_witness(args) -> int:
    if args.lam is None or args.lam <= 0.0:
        raise DocumentError("--lambda must be a positive number")
    if args.m <= 0.0:
        raise DocumentError("--m must be a positive area")
    cfg, theta = energy.nonexistence_witness(args.m, args.lam, args.n, args.separation)
    bound = energy.multiball_energy_upper(cfg, args.lam)
    reference = 2.0 * math.pi * math.sqrt(args.lam)
    rows = _ball_rows(cfg)
    rows.append(
        {
            "row": "summary",
            "theta": theta,
            "energy_bound": bound,
            "reference": reference,
            "gap_rel": bound / reference - 1.0,
        }
    )
    _emit(rows, _CONFIG_COLUMNS, args.format, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = verify.run_all(profile=args.profile, seed=args.seed)
    rows = [
        {
            "name": r.name,
            "status": r.status,
            "measured": r.measured,
            "target": r.target,
            "tolerance": r.tolerance,
        }
        for r in results
    ]
    columns = ["name", "status", "measured", "target", "tolerance"]
    if args.format == "table":
        for row, r in zip(rows, results):
            row["runtime_s"] = f"{r.runtime:.2f}"
        columns = columns + ["runtime_s"]
    _emit(rows, columns, args.format, args.output)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAIL


# ---------------------------------------------------------------- entrypoint


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatdrop",
        description="Capacitary energies and equilibrium shapes of charged flat drops.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, geometry_input: bool):
        if geometry_input:
            p.add_argument("--input", required=True, help="geometry JSON document")
            p.add_argument("--resolutions", default=None,
                           help="comma-separated cell sizes h1,h2,h3")
            p.add_argument("--grading", choices=["uniform", "boundary"],
                           default="boundary")
            p.add_argument("--extrapolate", action="store_true",
                           help="fit and remove the leading h^p bias (needs >= 3 resolutions)")
        p.add_argument("--format", choices=["csv", "table"], default="csv")
        p.add_argument("--output", default=None, help="write output to a file")

    p = sub.add_parser("capacity", help="Riesz capacitary energy of each set")
    add_common(p, True)
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("energy", help="drop energy of each set at one lambda")
    add_common(p, True)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--mode", choices=["Q", "U"], default="Q")
    p.set_defaults(func=cmd_energy)

    p = sub.add_parser("sweep", help="energy across a lambda range with regime labels")
    add_common(p, True)
    p.add_argument("--lambda-range", required=True, metavar="LO:HI:STEPS")
    p.add_argument("--mode", choices=["Q", "U"], default="Q")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mist", help="many-ball configuration approaching the energy infimum")
    add_common(p, False)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, default=100, help="number of balls")
    p.add_argument("--separation", type=float, default=1e6)
    p.set_defaults(func=cmd_mist)

    p = sub.add_parser("witness", help="fixed-area competitor beating any candidate minimizer")
    add_common(p, False)
    p.add_argument("--m", type=float, required=True, help="total area")
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--n", type=int, default=100, help="number of small balls")
    p.add_argument("--separation", type=float, default=1e6)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("verify", help="run the named check catalogue")
    add_common(p, False)
    p.add_argument("--profile", choices=["fast", "full"], default="fast")
    p.add_argument("--seed", type=int, default=1234)
    p.set_defaults(func=cmd_verify)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DocumentError, geometry.GeometryError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except energy.InfeasibleConfigurationError as exc:
        print(f"infeasible construction: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except capacity.SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
