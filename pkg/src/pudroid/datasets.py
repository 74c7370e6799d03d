"""JSON round-tripping of PUDataset so CLI stages can be chained."""

from __future__ import annotations

import json
from pathlib import Path

from .features import AppSample, FeatureKind, FeatureSpace, PUDataset, SparseBinaryVector
from .report import DATASET_SCHEMA, dumps


def dataset_to_dict(ds: PUDataset) -> dict:
    def sample_dict(s: AppSample) -> dict:
        out = {"id": s.id, "on": list(s.features.indices)}
        if s.hidden is not None:
            out["hidden"] = s.hidden
        return out

    return {
        "schema": DATASET_SCHEMA,
        "features": [[name, kind.value] for name, kind in ds.space.features],
        "positives": [sample_dict(s) for s in ds.positives],
        "unlabeled": [sample_dict(s) for s in ds.unlabeled],
    }


def dataset_from_dict(data: dict) -> PUDataset:
    if data.get("schema") != DATASET_SCHEMA:
        raise ValueError(f"unsupported dataset schema: {data.get('schema')!r}")
    space = FeatureSpace(
        tuple((name, FeatureKind(kind)) for name, kind in data["features"])
    )

    def sample(entry: dict, discovery: int) -> AppSample:
        return AppSample(
            entry["id"],
            SparseBinaryVector(tuple(int(i) for i in entry["on"])),
            discovery,
            entry.get("hidden"),
        )

    return PUDataset(
        space,
        tuple(sample(e, 1) for e in data["positives"]),
        tuple(sample(e, 0) for e in data["unlabeled"]),
    )


def save_dataset(ds: PUDataset, path: str | Path) -> None:
    Path(path).write_text(dumps(dataset_to_dict(ds)), encoding="utf-8")


def load_dataset(path: str | Path) -> PUDataset:
    return dataset_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
