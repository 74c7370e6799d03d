"""Seeded synthetic dataset generator with known ground truth.

True positives belong to one of n_families subgroups; each family owns a
disjoint block of signal features. By default every positive carries every
signal feature at the signal rate (0.8), so families are statistically
identical and the block assignment is bookkeeping. With
family_exclusive=True a positive carries only its own family's block at the
signal rate, which gives each family a distinguishable signature for
unknown-contaminant experiments. Negatives carry only the background rate
(0.05) everywhere.
Bit-flip noise is folded into the per-feature Bernoulli rates, and each true
positive is labeled (z = 1) with probability label_frequency_c independently
of its features, so the labeling is selected-completely-at-random by
construction. Because the generative model is fully known, the exact
posterior p(y=1 | x) is available for oracle checks.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .features import AppSample, FeatureKind, FeatureSpace, PUDataset, SparseBinaryVector

SIGNAL_RATE = 0.8
BACKGROUND_RATE = 0.05


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class SyntheticSpec:
    n_positive: int = 2000
    n_negative: int = 6000
    dimension: int = 200
    signal_features: int = 8  # per-family block size
    flip_noise: float = 0.05
    label_frequency_c: float = 1.0
    n_families: int = 4
    family_exclusive: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_positive < 1 or self.n_negative < 1:
            raise SpecError("both classes need at least one sample")
        if self.n_families < 1 or self.n_families > self.n_positive:
            raise SpecError("families must be between 1 and n_positive")
        if self.signal_features * self.n_families > self.dimension:
            raise SpecError("family signal blocks do not fit in the dimension")
        if not 0.0 <= self.flip_noise < 0.5:
            raise SpecError("flip_noise must be in [0, 0.5)")
        if not 0.0 < self.label_frequency_c <= 1.0:
            raise SpecError("label_frequency_c must be in (0, 1]")


@dataclass(frozen=True)
class SyntheticData:
    dataset: PUDataset
    family_of: dict  # positive sample id -> family index
    spec: SyntheticSpec


def _effective_rate(p: float, flip: float) -> float:
    return p * (1.0 - flip) + (1.0 - p) * flip


def _class_rates(spec: SyntheticSpec) -> tuple[np.ndarray, np.ndarray]:
    """(K, d) per-family positive rates and (d,) negative rates, noise folded in."""
    d, m, k = spec.dimension, spec.signal_features, spec.n_families
    pos = np.full((k, d), _effective_rate(BACKGROUND_RATE, spec.flip_noise))
    signal = _effective_rate(SIGNAL_RATE, spec.flip_noise)
    for fam in range(k):
        if spec.family_exclusive:
            pos[fam, fam * m : (fam + 1) * m] = signal
        else:
            pos[fam, : m * k] = signal
    neg = np.full(d, _effective_rate(BACKGROUND_RATE, spec.flip_noise))
    return pos, neg


def _feature_space(dimension: int) -> FeatureSpace:
    names = tuple((f"f{i:04d}", FeatureKind.API) for i in range(dimension))
    return FeatureSpace(names)


def generate_synthetic(spec: SyntheticSpec) -> SyntheticData:
    """Draw a PUDataset with hidden labels from the generative model."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([spec.seed])))
    pos_rates, neg_rates = _class_rates(spec)
    families = np.arange(spec.n_positive) % spec.n_families

    pos_X = rng.random((spec.n_positive, spec.dimension)) < pos_rates[families]
    neg_X = rng.random((spec.n_negative, spec.dimension)) < neg_rates
    z = (rng.random(spec.n_positive) < spec.label_frequency_c).astype(int)

    space = _feature_space(spec.dimension)
    positives: list[AppSample] = []
    unlabeled: list[AppSample] = []
    family_of: dict = {}
    for i in range(spec.n_positive):
        sid = f"pos-{i:05d}"
        family_of[sid] = int(families[i])
        vec = SparseBinaryVector(tuple(int(j) for j in np.flatnonzero(pos_X[i])))
        sample = AppSample(sid, vec, int(z[i]), hidden=1)
        (positives if z[i] else unlabeled).append(sample)
    for i in range(spec.n_negative):
        vec = SparseBinaryVector(tuple(int(j) for j in np.flatnonzero(neg_X[i])))
        unlabeled.append(AppSample(f"neg-{i:05d}", vec, 0, hidden=0))

    return SyntheticData(
        PUDataset(space, tuple(positives), tuple(unlabeled)), family_of, spec
    )


def analytic_posterior(spec: SyntheticSpec, X: np.ndarray) -> np.ndarray:
    """Exact p(y=1 | x) under the generative model, for oracle checks."""
    X = np.asarray(X, dtype=np.float64)
    pos_rates, neg_rates = _class_rates(spec)

    def loglik(rates: np.ndarray) -> np.ndarray:
        return X @ np.log(rates) + (1.0 - X) @ np.log(1.0 - rates)

    ll_pos_fam = np.stack([loglik(r) for r in pos_rates], axis=1)  # (n, K)
    top = ll_pos_fam.max(axis=1)
    ll_pos = top + np.log(np.mean(np.exp(ll_pos_fam - top[:, None]), axis=1))
    ll_neg = loglik(neg_rates)
    prior_pos = spec.n_positive / (spec.n_positive + spec.n_negative)
    log_odds = np.log(prior_pos) + ll_pos - (np.log(1.0 - prior_pos) + ll_neg)
    return 1.0 / (1.0 + np.exp(-log_odds))


def planted_contaminant_ids(data: SyntheticData) -> list[str]:
    """Ids of true positives sitting in the unlabeled group."""
    return sorted(s.id for s in data.dataset.unlabeled if s.hidden == 1)
