"""Lloyd's algorithm with k-means++ seeding."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import InvalidArgumentError
from .graph import SimilarityMatrix


@dataclass(frozen=True)
class ClusterAssignment:
    """A hard partition of the rows of D into k clusters.

    ``centers`` has one row per cluster; ``X`` gives the column-per-cluster
    view used in the factorization ``D ~ Y X^T``.
    """

    labels: np.ndarray
    centers: np.ndarray
    k: int
    objective: float
    restarts_used: int = 1
    history: list = field(default_factory=list)
    histories: list = field(default_factory=list)

    @property
    def m(self) -> int:
        return self.labels.shape[0]

    @property
    def Y(self) -> np.ndarray:
        Y = np.zeros((self.m, self.k), dtype=np.int8)
        Y[np.arange(self.m), self.labels] = 1
        return Y

    @property
    def X(self) -> np.ndarray:
        return self.centers.T

    @property
    def sizes(self) -> np.ndarray:
        return np.bincount(self.labels, minlength=self.k)

    def indicator(self, c: int) -> np.ndarray:
        return (self.labels == c).astype(np.float64)


def _labels_of(Y) -> tuple[np.ndarray, int]:
    if isinstance(Y, ClusterAssignment):
        return Y.labels, Y.k
    Y = np.asarray(Y)
    if Y.ndim == 2:
        if np.any(Y.sum(axis=1) != 1):
            raise InvalidArgumentError("indicator matrix rows must each contain exactly one 1")
        return np.argmax(Y, axis=1).astype(np.int64), Y.shape[1]
    labels = Y.astype(np.int64)
    return labels, int(labels.max()) + 1 if labels.size else 0


def cluster_means(D: np.ndarray, labels: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-cluster sums divided by counts; returns ``(centers, counts)``."""
    m = D.shape[0]
    onehot = sp.csr_matrix((np.ones(m), (labels, np.arange(m))), shape=(k, m))
    sums = np.asarray(onehot @ D)
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    return sums / np.maximum(counts, 1.0)[:, None], counts


def factorization_error(D: np.ndarray, labels: np.ndarray, centers: np.ndarray) -> float:
    """``||D - Y X^T||^2`` for the given labels and centers."""
    R = D - centers[labels]
    return float(np.einsum("ij,ij->", R, R))


def _plusplus(D: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    m = D.shape[0]
    chosen = [int(rng.integers(m))]
    _, d2 = kernels.assign_nearest(D, D[chosen])
    for _ in range(1, k):
        total = d2.sum()
        if total > 0:
            j = int(rng.choice(m, p=d2 / total))
        else:
            j = int(rng.integers(m))
        chosen.append(j)
        d2 = np.minimum(d2, ((D - D[j]) ** 2).sum(axis=1))
    return D[chosen].copy()


def _repair_empty(labels: np.ndarray, d2: np.ndarray, k: int) -> None:
    counts = np.bincount(labels, minlength=k)
    for c in np.flatnonzero(counts == 0):
        donors = counts[labels] > 1
        cand = np.where(donors, d2, -np.inf)
        j = int(np.argmax(cand))
        counts[labels[j]] -= 1
        labels[j] = c
        counts[c] = 1
        d2[j] = 0.0


def _lloyd(D, k, max_iter, tol, rng):
    centers = _plusplus(D, k, rng)
    labels = None
    history = []
    for _ in range(max_iter):
        new_labels, d2 = kernels.assign_nearest(D, centers)
        _repair_empty(new_labels, d2, k)
        centers, _ = cluster_means(D, new_labels, k)
        obj = factorization_error(D, new_labels, centers)
        converged = labels is not None and (
            np.array_equal(new_labels, labels) or history[-1] - obj < tol
        )
        labels = new_labels
        history.append(obj)
        if converged:
            break
    return labels, centers, history


def kmeans_fit(D, k: int, restarts: int = 10, max_iter: int = 300, tol: float = 1e-9,
               seed: int = 0) -> ClusterAssignment:
    """Best of ``restarts`` Lloyd runs by objective.

    Each run starts from k-means++ seeds and alternates assignment and mean
    updates until the objective improves by less than ``tol`` or the labels
    stop changing.  A cluster left empty by an assignment step takes the
    point farthest from its current center.  Ties between runs go to the
    earlier restart.
    """
    D = np.ascontiguousarray(D, dtype=np.float64)
    if D.ndim != 2:
        raise InvalidArgumentError("D must be an m x n matrix")
    m = D.shape[0]
    if not 1 <= k <= m:
        raise InvalidArgumentError(f"k must satisfy 1 <= k <= m (k={k}, m={m})")
    if restarts < 1 or max_iter < 1:
        raise InvalidArgumentError("restarts and max_iter must be positive")
    best = None
    histories = []
    for child in np.random.SeedSequence(seed).spawn(restarts):
        labels, centers, history = _lloyd(D, k, max_iter, tol, np.random.default_rng(child))
        histories.append(history)
        if best is None or history[-1] < best[2][-1]:
            best = (labels, centers, history)
    labels, centers, history = best
    return ClusterAssignment(labels, centers, k, history[-1], restarts, history, histories)


def _as_matrix(W):
    if isinstance(W, SimilarityMatrix):
        return W.weights
    if sp.issparse(W):
        return W.tocsr()
    return np.asarray(W, dtype=np.float64)


def similarity_objective(W, Y) -> float:
    """``Sim(W, Y) = sum_c y_c^T W y_c / |y_c|``."""
    M = _as_matrix(W)
    labels, k = _labels_of(Y)
    total = 0.0
    for c in range(k):
        y = (labels == c).astype(np.float64)
        size = y.sum()
        if size == 0:
            raise InvalidArgumentError(f"cluster {c} is empty")
        total += float(y @ (M @ y)) / size
    return total


def gram_similarity(D, Y) -> float:
    """``Sim(D D^T, Y)`` computed from per-cluster column sums of D."""
    D = np.asarray(D, dtype=np.float64)
    labels, k = _labels_of(Y)
    counts = np.bincount(labels, minlength=k)
    if np.any(counts == 0):
        raise InvalidArgumentError("empty cluster")
    sums, _ = cluster_means(D, labels, k)
    sums = sums * counts[:, None]
    return float(np.sum(np.einsum("ij,ij->i", sums, sums) / counts))
