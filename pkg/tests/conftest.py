"""Shared builders for small hand-constructed datasets."""

from __future__ import annotations

import numpy as np

from pudroid.features import (
    AppSample,
    FeatureKind,
    FeatureSpace,
    PUDataset,
    SparseBinaryVector,
)


def space_of(n: int, kind: FeatureKind = FeatureKind.API) -> FeatureSpace:
    return FeatureSpace(tuple((f"f{i:03d}", kind) for i in range(n)))


def sample(sid: str, indices, discovery: int, hidden=None) -> AppSample:
    return AppSample(sid, SparseBinaryVector(tuple(indices)), discovery, hidden)


def dataset_from_rows(rows_p, rows_u, d: int) -> PUDataset:
    """Build a PUDataset from lists of on-index tuples for P and U."""
    pos = tuple(sample(f"p{i}", r, 1) for i, r in enumerate(rows_p))
    unl = tuple(sample(f"u{i}", r, 0) for i, r in enumerate(rows_u))
    return PUDataset(space_of(d), pos, unl)


def random_dataset(
    rng: np.random.Generator, n_p: int, n_u: int, d: int, density: float = 0.3
) -> PUDataset:
    rows_p = [tuple(int(j) for j in np.flatnonzero(rng.random(d) < density)) for _ in range(n_p)]
    rows_u = [tuple(int(j) for j in np.flatnonzero(rng.random(d) < density)) for _ in range(n_u)]
    return dataset_from_rows(rows_p, rows_u, d)
