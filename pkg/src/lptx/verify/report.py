"""Estimate reports: case rows, fitted constants, verdicts, CSV/JSON output."""
from __future__ import annotations

import csv
import io
import json
import math
import operator
import os
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np

__all__ = ["Verdict", "EstimateReport", "linear_fit", "format_value"]

_OPS = {"<=": operator.le, ">=": operator.ge, "<": operator.lt, ">": operator.gt, "==": operator.eq}


@dataclass(frozen=True)
class Verdict:
    """``value <op> threshold``; the threshold is part of the report."""

    name: str
    value: float
    op: str
    threshold: float

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"unknown comparison {self.op!r}")

    @property
    def passed(self) -> bool:
        v = float(self.value)
        return not math.isnan(v) and bool(_OPS[self.op](v, self.threshold))

    def line(self) -> str:
        mark = "PASS" if self.passed else "FAIL"
        return f"{mark} {self.name}: {self.value:.6g} {self.op} {self.threshold:g}"

    def to_dict(self) -> dict:
        return {"value": _json_float(self.value), "op": self.op, "threshold": self.threshold,
                "passed": self.passed}


def format_value(x: Any) -> str:
    """Deterministic text for CSV cells: ``repr`` of floats, ``str`` otherwise."""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, (tuple, list)):
        return " ".join(format_value(v) for v in x)
    return str(x)


def _json_float(x):
    x = float(x)
    return x if math.isfinite(x) else str(x)


@dataclass
class EstimateReport:
    """Rows of ``(params..., lhs, rhs, ratio)`` plus fits and verdicts."""

    experiment: str
    param_names: Sequence[str]
    rows: list = field(default_factory=list)
    fits: dict = field(default_factory=dict)
    verdicts: list = field(default_factory=list)
    provenance: dict = field(default_factory=dict)

    def add_row(self, params: Sequence[Any], lhs: float, rhs: float) -> float:
        if len(params) != len(self.param_names):
            raise ValueError("row parameters do not match the declared columns")
        if not rhs > 0:
            raise ValueError(f"rhs must be positive, got {rhs!r}")
        ratio = float(lhs) / float(rhs)
        self.rows.append((tuple(params), float(lhs), float(rhs), ratio))
        return ratio

    def add_verdict(self, name: str, value: float, op: str, threshold: float) -> Verdict:
        v = Verdict(name, float(value), op, float(threshold))
        self.verdicts.append(v)
        return v

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def column(self, name: str) -> np.ndarray:
        if name in ("lhs", "rhs", "ratio"):
            j = ("lhs", "rhs", "ratio").index(name) + 1
            return np.array([r[j] for r in self.rows])
        i = list(self.param_names).index(name)
        return np.array([r[0][i] for r in self.rows])

    def csv_text(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["experiment", *self.param_names, "lhs", "rhs", "ratio"])
        for params, lhs, rhs, ratio in self.rows:
            w.writerow([self.experiment, *(format_value(p) for p in params),
                        format_value(lhs), format_value(rhs), format_value(ratio)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {
            "experiment": self.experiment,
            "passed": self.passed,
            "n_rows": len(self.rows),
            "fits": {k: _json_value(v) for k, v in self.fits.items()},
            "verdicts": {v.name: v.to_dict() for v in self.verdicts},
            "provenance": {k: _json_value(v) for k, v in self.provenance.items()},
        }

    def write(self, directory: str | os.PathLike, stem: str | None = None,
              timestamp: str | None = None) -> tuple[str, str]:
        """Write ``<stem>.csv`` and ``<stem>.json``; the timestamp only enters the JSON."""
        os.makedirs(directory, exist_ok=True)
        stem = stem or self.experiment
        csv_path = os.path.join(directory, f"{stem}.csv")
        json_path = os.path.join(directory, f"{stem}.json")
        with open(csv_path, "w", newline="") as fh:
            fh.write(self.csv_text())
        summary = self.summary()
        if timestamp is not None:
            summary["provenance"]["timestamp"] = timestamp
        with open(json_path, "w") as fh:
            json.dump(summary, fh, indent=2, sort_keys=True)
        return csv_path, json_path

    def verdict_lines(self) -> list[str]:
        return [f"[{self.experiment}] {v.line()}" for v in self.verdicts]


def _json_value(v):
    if isinstance(v, (np.floating, float)):
        return _json_float(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_json_value(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    return v


def linear_fit(x: Sequence[float], y: Sequence[float]) -> tuple[float, float, float]:
    """Least-squares ``y = slope x + intercept``; returns ``(slope, intercept, R^2)``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit")
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - pred) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), float(r2)
