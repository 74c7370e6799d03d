"""Core domain types: feature space, sparse binary vectors, samples, datasets.

Everything here is immutable after construction and safe to share between
threads. No I/O.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional, Sequence

import numpy as np


class DimensionError(ValueError):
    """A vector index does not fit the feature space it is used with."""


class DatasetError(ValueError):
    """A sample or dataset violates a structural invariant."""


class FeatureKind(Enum):
    PERMISSION = "permission"
    API = "api"
    IP_ADDRESS = "ip"


@dataclass(frozen=True)
class FeatureSpace:
    """Ordered universe of (name, kind) features; order defines vector indices.

    Order is lexicographic by (kind, name) so identical inputs always produce
    identical index assignments.
    """

    features: tuple[tuple[str, FeatureKind], ...]

    @classmethod
    def build(cls, pairs: Iterable[tuple[str, FeatureKind]]) -> "FeatureSpace":
        uniq = set(pairs)
        ordered = tuple(sorted(uniq, key=lambda p: (p[1].value, p[0])))
        names = [n for n, _ in ordered]
        if len(set(names)) != len(names):
            raise DatasetError("feature names must be unique within a space")
        return cls(ordered)

    def __post_init__(self) -> None:
        names = [n for n, _ in self.features]
        if len(set(names)) != len(names):
            raise DatasetError("feature names must be unique within a space")

    @property
    def dimension(self) -> int:
        return len(self.features)

    def index_of(self) -> dict[tuple[str, FeatureKind], int]:
        return {pair: i for i, pair in enumerate(self.features)}


def kind_partition(space: FeatureSpace, kind: FeatureKind) -> list[int]:
    """Indices of all features of the given kind, in space order."""
    return [i for i, (_, k) in enumerate(space.features) if k is kind]


@dataclass(frozen=True)
class SparseBinaryVector:
    """Set-of-ones representation of a 0/1 vector; indices strictly increasing."""

    indices: tuple[int, ...]

    @classmethod
    def from_indices(cls, indices: Iterable[int]) -> "SparseBinaryVector":
        return cls(tuple(sorted(set(int(i) for i in indices))))

    def __post_init__(self) -> None:
        idx = self.indices
        if any(i < 0 for i in idx):
            raise DimensionError("negative feature index")
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise DimensionError("indices must be strictly increasing")


def densify(v: SparseBinaryVector, d: int) -> np.ndarray:
    """Dense 0/1 array of length d; errors if any index is out of range."""
    out = np.zeros(d, dtype=np.int8)
    if v.indices:
        idx = np.asarray(v.indices)
        if idx[-1] >= d:
            raise DimensionError(f"index {idx[-1]} out of range for dimension {d}")
        out[idx] = 1
    return out


def sparsify(dense: Sequence[int]) -> SparseBinaryVector:
    """Inverse of densify for valid 0/1 arrays."""
    arr = np.asarray(dense)
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("dense vector must contain only 0 and 1")
    return SparseBinaryVector(tuple(int(i) for i in np.flatnonzero(arr)))


@dataclass(frozen=True)
class AppSample:
    """One app: id, binary feature vector, discovery state z, optional hidden y.

    hidden is ground truth and exists only on harness-generated data; the
    learning pipeline never reads it.
    """

    id: str
    features: SparseBinaryVector
    discovery: int
    hidden: Optional[int] = None

    def __post_init__(self) -> None:
        if self.discovery not in (0, 1):
            raise DatasetError(f"discovery must be 0 or 1, got {self.discovery}")
        if self.hidden not in (None, 0, 1):
            raise DatasetError(f"hidden must be 0, 1 or absent, got {self.hidden}")
        if self.discovery == 1 and self.hidden == 0:
            raise DatasetError(
                f"sample {self.id!r}: a known-benign sample cannot be labeled positive"
            )


@dataclass(frozen=True)
class PUDataset:
    """Samples partitioned into positive group P (z=1) and unlabeled group U (z=0)."""

    space: FeatureSpace
    positives: tuple[AppSample, ...]
    unlabeled: tuple[AppSample, ...]

    def __post_init__(self) -> None:
        for s in self.positives:
            if s.discovery != 1:
                raise DatasetError(f"sample {s.id!r} in P must have discovery=1")
        for s in self.unlabeled:
            if s.discovery != 0:
                raise DatasetError(f"sample {s.id!r} in U must have discovery=0")
        ids = [s.id for s in self.positives] + [s.id for s in self.unlabeled]
        if len(set(ids)) != len(ids):
            raise DatasetError("sample ids must be unique across P and U")
        d = self.space.dimension
        for s in self.positives + self.unlabeled:
            if s.features.indices and s.features.indices[-1] >= d:
                raise DimensionError(
                    f"sample {s.id!r} has feature index outside space of dimension {d}"
                )

    @property
    def samples(self) -> tuple[AppSample, ...]:
        return self.positives + self.unlabeled

    def dense_matrix(self, samples: Optional[Sequence[AppSample]] = None) -> np.ndarray:
        """Stack samples (default: P then U) into an (n, d) 0/1 matrix."""
        if samples is None:
            samples = self.samples
        d = self.space.dimension
        out = np.zeros((len(samples), d), dtype=np.int8)
        for row, s in enumerate(samples):
            if s.features.indices:
                out[row, list(s.features.indices)] = 1
        return out
