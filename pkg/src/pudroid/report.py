"""Deterministic JSON report emission.

Reports are serialized with sorted keys and floats reduced to 9 significant
digits, so identical reports are byte-identical. NaN-valued metrics (an AUC
with a single-class truth) serialize as the string "undefined".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .metrics import Metrics

REPORT_SCHEMA = "pudroid-report/1"
DATASET_SCHEMA = "pudroid-dataset/1"
CLEAN_SCHEMA = "pudroid-clean/1"


@dataclass(frozen=True)
class ReportRow:
    condition: str
    pu: Metrics
    npu: Metrics


@dataclass(frozen=True)
class ExperimentReport:
    protocol: str
    rows: tuple[ReportRow, ...]
    config: dict
    seed: int

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "protocol": self.protocol,
            "seed": self.seed,
            "config": self.config,
            "rows": [
                {"condition": r.condition, "pu": r.pu.to_dict(), "npu": r.npu.to_dict()}
                for r in self.rows
            ],
        }


def _canonical(value: Any) -> Any:
    """Round floats to 9 significant digits; map NaN to "undefined"."""
    if isinstance(value, float):
        if math.isnan(value):
            return "undefined"
        return float(f"{value:.9g}")
    if isinstance(value, dict):
        return {k: _canonical(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_canonical(v) for v in value]
    return value


def dumps(payload: dict) -> str:
    return json.dumps(_canonical(payload), sort_keys=True, indent=2) + "\n"


def write_report(report: ExperimentReport, path: str | Path) -> None:
    write_json(report.to_dict(), path)


def write_json(payload: dict, path: str | Path) -> None:
    Path(path).write_text(dumps(payload), encoding="utf-8")
