"""Agreement between a clustering and reference labels."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidArgumentError


@dataclass(frozen=True)
class Contingency:
    counts: np.ndarray
    m: int
    pred_ids: np.ndarray
    true_ids: np.ndarray


def contingency(pred, truth) -> Contingency:
    pred = np.asarray(pred).ravel()
    truth = np.asarray(truth).ravel()
    if pred.shape != truth.shape:
        raise InvalidArgumentError(f"label vectors differ in length ({pred.size} vs {truth.size})")
    p_ids, p_inv = np.unique(pred, return_inverse=True)
    t_ids, t_inv = np.unique(truth, return_inverse=True)
    counts = np.zeros((p_ids.size, t_ids.size), dtype=np.int64)
    np.add.at(counts, (p_inv, t_inv), 1)
    return Contingency(counts, pred.size, p_ids, t_ids)


def _entropy(counts: np.ndarray, m: int) -> float:
    p = counts[counts > 0] / m
    return float(-np.sum(p * np.log(p)))


def nmi(pred, truth) -> float:
    """Mutual information over the geometric mean of the two entropies (natural log).

    Defined as 0 when either labeling has a single cluster.
    """
    C = contingency(pred, truth)
    m = C.m
    if m == 0:
        return 0.0
    h_p = _entropy(C.counts.sum(axis=1), m)
    h_t = _entropy(C.counts.sum(axis=0), m)
    if h_p <= 0 or h_t <= 0:
        return 0.0
    rows = C.counts.sum(axis=1, keepdims=True)
    cols = C.counts.sum(axis=0, keepdims=True)
    nz = C.counts > 0
    joint = C.counts[nz] / m
    mi = float(np.sum(joint * np.log(C.counts[nz] * m / (rows @ cols)[nz])))
    return min(1.0, max(0.0, mi / np.sqrt(h_p * h_t)))


def hungarian_match(cost) -> tuple[np.ndarray, float]:
    """Minimum-cost perfect assignment of rows to columns.

    Returns ``(perm, total)`` where row ``i`` is assigned column ``perm[i]``.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2 or cost.shape[0] != cost.shape[1]:
        raise InvalidArgumentError(f"cost matrix must be square, got shape {cost.shape}")
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(cost.shape[0], dtype=np.int64)
    perm[rows] = cols
    return perm, float(cost[rows, cols].sum())


def matched_labels(pred, truth) -> np.ndarray:
    """Relabel ``pred`` so its clusters line up with ``truth`` as well as possible.

    Predicted clusters without a true partner (when there are more of them)
    get fresh ids above the largest true id.
    """
    C = contingency(pred, truth)
    kp, kt = C.counts.shape
    size = max(kp, kt)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[:kp, :kt] = C.counts
    perm, _ = hungarian_match(-padded)
    next_id = int(C.true_ids.max()) + 1 if kt else 0
    mapping = {}
    for i in range(kp):
        j = perm[i]
        if j < kt:
            mapping[C.pred_ids[i]] = C.true_ids[j]
        else:
            mapping[C.pred_ids[i]] = next_id
            next_id += 1
    pred = np.asarray(pred).ravel()
    return np.array([mapping[v] for v in pred], dtype=np.asarray(truth).dtype if kt else np.int64)


def matched_accuracy(pred, truth) -> float:
    """Fraction of points on which matched predictions agree with ``truth``."""
    return float(np.mean(matched_labels(pred, truth) == np.asarray(truth).ravel()))
