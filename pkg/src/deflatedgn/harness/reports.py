"""Serialization of runs: JSON reports and CSV traces/tables.

All files are UTF-8; CSV uses '.' decimals and full round-trip float
precision (repr).  Complex vectors appear in JSON as {"re": [...], "im":
[...]} and in CSV as Python complex literals parseable by ``complex()``.
"""

import csv
import json
from pathlib import Path

import numpy as np

REPORT_SCHEMA = "deflatedgn.report.v1"

TRACE_FIELDS = ("k", "branch", "alpha", "beta", "step_norm", "grad_norm", "residual_norm")


def encode_vector(x) -> object:
    x = np.asarray(x)
    if np.iscomplexobj(x):
        return {"re": [float(v) for v in x.real], "im": [float(v) for v in x.imag]}
    return [float(v) for v in x]


def decode_vector(data) -> np.ndarray:
    if isinstance(data, dict):
        return np.asarray(data["re"]) + 1j * np.asarray(data["im"])
    return np.asarray(data, dtype=float)


def _scalar_repr(value) -> str:
    if value is None:
        return ""
    if isinstance(value, complex) or np.iscomplexobj(np.asarray(value)):
        return repr(complex(value))
    return repr(float(value))


def write_trace_csv(path, trace) -> None:
    """One row per IterationRecord, followed by the iterate components."""
    path = Path(path)
    n = trace[0].x.shape[0] if trace else 0
    header = list(TRACE_FIELDS) + [f"x{i}" for i in range(n)]
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for rec in trace:
            row = [
                rec.k,
                rec.branch,
                "" if rec.alpha is None else repr(float(rec.alpha)),
                repr(float(rec.beta)),
                repr(float(rec.step_norm)),
                repr(float(rec.grad_norm)),
                repr(float(rec.residual_norm)),
            ]
            row.extend(_scalar_repr(v) for v in rec.x)
            writer.writerow(row)


def write_csv(path, header, rows) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def solution_entry(index: int, sol) -> dict:
    return {
        "index": index,
        "x": encode_vector(sol.x),
        "residual_norm": sol.residual_norm,
        "grad_norm": sol.grad_norm,
        "objective": sol.objective,
        "round": sol.round_index,
        "iterations": sol.iterations,
        "cum_residual_evals": sol.cum_residual_evals,
        "cum_jacobian_evals": sol.cum_jacobian_evals,
    }


def round_entry(index: int, result, solution_index) -> dict:
    return {
        "round": index,
        "status": result.status,
        "iterations": result.iterations,
        "residual_norm": result.residual_norm,
        "grad_norm": result.grad_norm,
        "residual_evals": result.n_residual_evals,
        "jacobian_evals": result.n_jacobian_evals,
        "solution_index": solution_index,
        "final_x": encode_vector(result.x),
    }


def write_report(path, report: dict) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")


def read_report(path) -> dict:
    with Path(path).open(encoding="utf-8") as fh:
        return json.load(fh)
