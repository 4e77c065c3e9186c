"""Deterministic file output: CSV with full-precision floats and versioned
JSON documents. The writers perform no arithmetic; every number written is
exactly a value computed by the library (17 significant digits round-trip
a double losslessly)."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import ConfigError
from .inference import ConcurrenceEstimate, MeasurementRecord, ScalingResult

SCHEMA_VERSION = 1


def format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_csv(path, header, rows) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(format_value(v) for v in row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_json(path, payload) -> None:
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n",
        encoding="utf-8",
    )


def write_table(path, header, rows, fmt: str) -> None:
    """Write a tabular result as CSV or as a versioned JSON document."""
    if fmt == "csv":
        write_csv(path, header, rows)
    elif fmt == "json":
        write_json(
            path,
            {
                "schema_version": SCHEMA_VERSION,
                "columns": list(header),
                "rows": [list(row) for row in rows],
            },
        )
    else:
        raise ConfigError(f"unknown output format {fmt!r}")


TRAJECTORY_HEADER = (
    "t",
    "q_re",
    "q_im",
    "a_re",
    "a_im",
    "b_re",
    "b_im",
    "alpha_re",
    "alpha_im",
    "beta_re",
    "beta_im",
    "norm2",
)


def trajectory_rows(trajectory):
    norms = trajectory.norm2
    for i in range(len(trajectory)):
        q, a, b, alpha, beta = trajectory.ys[i]
        yield (
            float(trajectory.ts[i]),
            float(q.real),
            float(q.imag),
            float(a.real),
            float(a.imag),
            float(b.real),
            float(b.imag),
            float(alpha.real),
            float(alpha.imag),
            float(beta.real),
            float(beta.imag),
            float(norms[i]),
        )


def write_trajectory(path, trajectory) -> None:
    """One row per recorded sample: time, Re/Im of all five amplitudes, norm."""
    write_csv(path, TRAJECTORY_HEADER, trajectory_rows(trajectory))


SCAN_HEADER = (
    "g_q_over_kappa",
    "g_a_over_kappa",
    "g_b_over_kappa",
    "D",
    "C",
    "P_a",
    "P_b",
    "P_CD",
)

CURVE_HEADER = (
    "r",
    "D",
    "C",
    "d_hat",
    "sigma_d",
    "c_hat",
    "c_low",
    "c_high",
)


def measurement_record_payload(record: MeasurementRecord) -> dict:
    return {
        "n_a": record.n_a,
        "n_b": record.n_b,
        "n_dark": record.n_dark,
        "n_runs": record.n_runs,
        "seed": record.seed,
    }


def write_measurement_record(path, record: MeasurementRecord) -> None:
    write_json(path, {"schema_version": SCHEMA_VERSION, "record": measurement_record_payload(record)})


def read_measurement_record(path) -> MeasurementRecord:
    """Read a record from JSON: either a bare record object or any document
    with a top-level "record" member (e.g. an estimate output)."""
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read measurement record from {path}: {exc}") from exc
    body = payload.get("record", payload) if isinstance(payload, dict) else None
    if not isinstance(body, dict):
        raise ConfigError(f"{path}: expected a JSON object with count fields")
    unknown = set(body) - {"n_a", "n_b", "n_dark", "n_runs", "seed"}
    if unknown:
        raise ConfigError(f"{path}: unknown record fields: {', '.join(sorted(unknown))}")
    missing = {"n_a", "n_b"} - set(body)
    if missing:
        raise ConfigError(f"{path}: missing record fields: {', '.join(sorted(missing))}")
    n_a = body["n_a"]
    n_b = body["n_b"]
    n_dark = body.get("n_dark", 0)
    n_runs = body.get("n_runs", n_a + n_b + n_dark)
    return MeasurementRecord(
        n_a=n_a, n_b=n_b, n_dark=n_dark, n_runs=n_runs, seed=body.get("seed")
    )


def estimate_payload(estimate: ConcurrenceEstimate, record: MeasurementRecord | None = None) -> dict:
    payload = {
        "schema_version": SCHEMA_VERSION,
        "d_hat": estimate.d_hat,
        "sigma_d": estimate.sigma_d,
        "c_hat": estimate.c_hat,
        "c_low": estimate.c_interval[0],
        "c_high": estimate.c_interval[1],
        "n_emitting": estimate.n_emitting,
        "diagnostics": {
            "clipped_low": estimate.diagnostics.clipped_low,
            "clipped_high": estimate.diagnostics.clipped_high,
            "covers_fold": estimate.diagnostics.covers_fold,
            "sigma_c_delta": estimate.diagnostics.sigma_c_delta,
        },
    }
    if record is not None:
        payload["record"] = measurement_record_payload(record)
    return payload


def scaling_payload(result: ScalingResult) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "exponent": result.exponent,
        "coefficient": result.coefficient,
        "residual": result.residual,
        "points": [
            {
                "n_runs": p.n_runs,
                "sigma_c": _json_float(p.sigma_c),
                "repetitions": p.repetitions,
                "n_failures": p.n_failures,
            }
            for p in result.points
        ],
    }


def _json_float(value: float):
    return value if math.isfinite(value) else None


def write_scaling(csv_path, json_path, result: ScalingResult) -> None:
    """CSV of (n_runs, sigma_c) plus a JSON summary of the power-law fit."""
    write_csv(
        csv_path,
        ("n_runs", "sigma_c"),
        ((p.n_runs, p.sigma_c) for p in result.points),
    )
    write_json(json_path, scaling_payload(result))
