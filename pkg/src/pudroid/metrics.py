"""Evaluation metrics: accuracy, F-measure, detection rate, rank-based AUC.

AUC is the Mann-Whitney statistic computed from average ranks. The rank sum
is accumulated in integer arithmetic (doubled ranks) so the result is the
exactly rounded value of the underlying rational number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class Metrics:
    accuracy: float
    auc: float  # NaN when undefined (single-class truth)
    f_measure: float
    detection_rate: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def auc_defined(self) -> bool:
        return not math.isnan(self.auc)

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "auc": "undefined" if not self.auc_defined else self.auc,
            "f_measure": self.f_measure,
            "detection_rate": self.detection_rate,
            "confusion": {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn},
        }


def rank_auc(truth: Sequence[int], scores: Sequence[float]) -> float:
    """AUC from the Mann-Whitney rank statistic with average ranks for ties.

    Returns NaN when either class is absent.
    """
    truth = np.asarray(truth, dtype=np.int64)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(truth.sum())
    n_neg = len(truth) - n_pos
    if n_pos == 0 or n_neg == 0:
        return float("nan")
    order = np.argsort(scores, kind="stable")
    sorted_scores = scores[order]
    sorted_truth = truth[order]
    # doubled rank sum over positives: tie group at 1-based positions i..j
    # contributes (i + j) per member
    double_rank_sum = 0
    i = 0
    n = len(scores)
    while i < n:
        j = i
        while j + 1 < n and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        pos_in_group = int(sorted_truth[i : j + 1].sum())
        double_rank_sum += pos_in_group * ((i + 1) + (j + 1))
        i = j + 1
    numerator = double_rank_sum - n_pos * (n_pos + 1)
    return numerator / (2 * n_pos * n_neg)


def compute_metrics(
    truth: Sequence[int], predicted: Sequence[int], scores: Sequence[float]
) -> Metrics:
    truth = np.asarray(truth, dtype=np.int64)
    predicted = np.asarray(predicted, dtype=np.int64)
    if not (len(truth) == len(predicted) == len(scores)) or len(truth) == 0:
        raise ValueError("truth, predicted and scores must have equal non-zero length")
    tp = int(np.sum((truth == 1) & (predicted == 1)))
    fp = int(np.sum((truth == 0) & (predicted == 1)))
    tn = int(np.sum((truth == 0) & (predicted == 0)))
    fn = int(np.sum((truth == 1) & (predicted == 0)))
    total = tp + fp + tn + fn
    accuracy = (tp + tn) / total
    precision = tp / (tp + fp) if tp + fp > 0 else 0.0
    recall = tp / (tp + fn) if tp + fn > 0 else 0.0
    f_measure = (
        2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    )
    return Metrics(
        accuracy=accuracy,
        auc=rank_auc(truth, scores),
        f_measure=f_measure,
        detection_rate=recall,
        tp=tp,
        fp=fp,
        tn=tn,
        fn=fn,
    )
