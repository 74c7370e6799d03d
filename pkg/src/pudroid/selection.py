"""Unbalanced occurrence-threshold feature selection.

A feature survives if it occurs at least tm times among the positive group
or at least tb times among the unlabeled group, where tm defaults to the
threshold coefficient eta (rounded) and tb scales with the group-size ratio:
tb = ceil(tm * |U| / |P|). The OR combination keeps features that are
frequent in either class, which is what makes them discriminative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .features import AppSample, DimensionError, FeatureSpace, PUDataset, SparseBinaryVector


class ConfigError(ValueError):
    pass


# Echoed in every report so downstream readers can tell which convention
# produced the thresholds; a rival convention scales tm by |U|/|P| instead of
# tb. This implementation gives the larger threshold to the larger group and
# combines the two thresholds with OR.
THRESHOLD_RULE = {
    "implemented": "tm=round(eta); tb=ceil(tm*|U|/|P|)",
    "combination": "or",
    "printed_alternative": "tm/tb = eta*|U|/|P|",
}


@dataclass(frozen=True)
class SelectionThresholds:
    eta: float
    tm: int
    tb: int

    def __post_init__(self) -> None:
        if self.tm < 1 or self.tb < 1:
            raise ConfigError("thresholds must be >= 1")


@dataclass(frozen=True)
class OccurrenceCounts:
    count_p: tuple[int, ...]
    count_u: tuple[int, ...]


def count_occurrences(ds: PUDataset) -> OccurrenceCounts:
    """Per-feature occurrence counts over P and over U."""
    d = ds.space.dimension
    cp = np.zeros(d, dtype=np.int64)
    cu = np.zeros(d, dtype=np.int64)
    for s in ds.positives:
        for i in s.features.indices:
            cp[i] += 1
    for s in ds.unlabeled:
        for i in s.features.indices:
            cu[i] += 1
    return OccurrenceCounts(tuple(int(c) for c in cp), tuple(int(c) for c in cu))


def compute_thresholds(ds: PUDataset, eta: float = 2.0) -> SelectionThresholds:
    """tm = round(eta); tb = ceil(tm * |U| / |P|)."""
    n_p, n_u = len(ds.positives), len(ds.unlabeled)
    if n_p == 0 or n_u == 0:
        raise ConfigError("threshold computation needs non-empty P and U")
    if eta < 1:
        raise ConfigError("eta must be >= 1")
    tm = max(1, round(eta))
    tb = max(1, math.ceil(tm * n_u / n_p))
    return SelectionThresholds(eta=eta, tm=tm, tb=tb)


def select_features(counts: OccurrenceCounts, th: SelectionThresholds) -> list[int]:
    """Indices retained under the OR rule, sorted ascending."""
    return [
        i
        for i, (cp, cu) in enumerate(zip(counts.count_p, counts.count_u))
        if cp >= th.tm or cu >= th.tb
    ]


def project_dataset(ds: PUDataset, retained: Sequence[int]) -> PUDataset:
    """Restrict the dataset to the retained features, re-indexing vectors."""
    d = ds.space.dimension
    for i in retained:
        if not 0 <= i < d:
            raise DimensionError(f"retained index {i} out of range for dimension {d}")
    retained_sorted = sorted(retained)
    new_space = FeatureSpace(tuple(ds.space.features[i] for i in retained_sorted))
    remap = {old: new for new, old in enumerate(retained_sorted)}

    def remap_sample(s: AppSample) -> AppSample:
        vec = SparseBinaryVector.from_indices(
            remap[i] for i in s.features.indices if i in remap
        )
        return AppSample(s.id, vec, s.discovery, s.hidden)

    return PUDataset(
        new_space,
        tuple(remap_sample(s) for s in ds.positives),
        tuple(remap_sample(s) for s in ds.unlabeled),
    )
