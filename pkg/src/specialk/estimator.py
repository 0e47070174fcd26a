"""Choose k by increasing it until a merge test can no longer reject."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional

import numpy as np

from .bound import MergeTestReport, merge_test
from .embed import DENSE_LIMIT, Embedding, spectral_embedding
from .errors import InvalidArgumentError
from .kmeans import ClusterAssignment, kmeans_fit

BOUND_EXCEEDED = "bound_exceeded_alpha"
K_CAP = "k_cap_reached"
PAIR_SCORES = ("cut", "cut_over_j", "ratio")


@dataclass
class EstimateResult:
    k_selected: int
    assignments_per_k: dict
    reports_per_k: dict
    alpha: float
    n_used: int
    stopped_reason: str
    embedding: Optional[Embedding] = None
    nmi_per_k: dict = field(default_factory=dict)

    @property
    def assignment(self) -> ClusterAssignment:
        return self.assignments_per_k[self.k_selected]

    @property
    def labels(self) -> np.ndarray:
        return self.assignment.labels

    def max_p(self, k: int) -> Optional[float]:
        """Largest bound among the reports evaluated at ``k``, None if none were."""
        reports = self.reports_per_k.get(k, [])
        return max((r.p for r in reports), default=None)


def rank_pairs(D, Y, budget: int = 10, score: str = "cut") -> list[tuple[int, int]]:
    """Cluster pairs ordered by decreasing between-cluster similarity.

    The default score is ``y_a^T D D^T y_b``, computed from per-cluster
    column sums.  ``"cut_over_j"`` divides it by ``|y_a| + |y_b|`` and
    ``"ratio"`` by ``|y_a|`` and ``|y_b|`` in turn, summing both ratio cuts.
    Ties keep lexicographic pair order.
    """
    if score not in PAIR_SCORES:
        raise InvalidArgumentError(f"unknown pair score {score!r}")
    labels = getattr(Y, "labels", None)
    if labels is None:
        labels = np.asarray(Y, dtype=np.int64)
    k = int(getattr(Y, "k", labels.max() + 1))
    if k < 2:
        raise InvalidArgumentError("ranking pairs needs k >= 2")
    D = np.asarray(D, dtype=np.float64)
    S = np.zeros((k, D.shape[1]))
    np.add.at(S, labels, D)
    sizes = np.bincount(labels, minlength=k).astype(np.float64)
    G = S @ S.T
    pairs = list(combinations(range(k), 2))
    scores = []
    for a, b in pairs:
        s = G[a, b]
        if score == "cut_over_j":
            s = s / (sizes[a] + sizes[b])
        elif score == "ratio":
            s = s / sizes[a] + s / sizes[b]
        scores.append(s)
    order = sorted(range(len(pairs)), key=lambda i: (-scores[i], pairs[i]))
    return [pairs[i] for i in order[:budget]]


def eigengap_baseline(eigenvalues) -> int:
    """1-based position before the largest drop in a descending spectrum."""
    lam = np.asarray(eigenvalues, dtype=np.float64).ravel()
    if lam.size < 2:
        raise InvalidArgumentError("eigengap needs at least two eigenvalues")
    return int(np.argmax(lam[:-1] - lam[1:])) + 1


def _kmeans_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


def estimate_from_embedding(E: Embedding, alpha: float = 0.01, k_max: int = 5, pairs_budget: int = 10,
                            seed: int = 0, restarts: int = 10, pair_score: str = "cut",
                            exhaustive: bool = False, truth=None) -> EstimateResult:
    """Run the k loop on a precomputed embedding.

    With ``exhaustive`` every k up to ``k_max`` is clustered and all budgeted
    pairs are tested, which fills in a full per-k table; the selected k is
    the same as with early stopping.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError("alpha must lie in (0, 1)")
    if k_max < 1:
        raise InvalidArgumentError("k_max must be >= 1")
    if pairs_budget < 1:
        raise InvalidArgumentError("pairs_budget must be >= 1")
    D = E.D
    k_max = min(k_max, D.shape[0])
    if truth is not None:
        from .metrics import nmi

        truth = np.asarray(truth)
    assignments: dict = {}
    reports: dict = {}
    nmis: dict = {}
    selected = None
    for k in range(1, k_max + 1):
        Y = kmeans_fit(D, k, restarts=restarts, seed=_kmeans_seed(seed, k))
        assignments[k] = Y
        reports[k] = []
        if truth is not None:
            nmis[k] = nmi(Y.labels, truth)
        if k == 1:
            continue
        for a, b in rank_pairs(D, Y, pairs_budget, pair_score):
            rep = merge_test(D, Y, a, b, alpha)
            reports[k].append(rep)
            if rep.p > alpha and not exhaustive:
                break
        if selected is None and any(r.p > alpha for r in reports[k]):
            selected = k - 1
            if not exhaustive:
                break
    if selected is None:
        return EstimateResult(k_max, assignments, reports, alpha, E.n, K_CAP, E, nmis)
    return EstimateResult(selected, assignments, reports, alpha, E.n, BOUND_EXCEEDED, E, nmis)


def estimate_k(W, n: int, alpha: float = 0.01, k_max: int = 5, pairs_budget: int = 10,
               decorrelate: bool = False, seed: int = 0, restarts: int = 10,
               pair_score: str = "cut", exhaustive: bool = False, truth=None,
               rho_max: float = 0.95, dense_limit: int = DENSE_LIMIT) -> EstimateResult:
    """Embed ``W`` once and pick the number of clusters.

    For k = 1, 2, ... the embedding is clustered with k-means and the most
    similar cluster pairs are merge-tested in rank order.  The first bound
    above ``alpha`` stops the search and the model for k - 1 is returned.

    Parameters
    ----------
    W : SimilarityMatrix, sparse matrix or ndarray
        Symmetric similarity matrix.
    n : int
        Embedding dimensionality, independent of k.
    alpha : float
        Significance level in (0, 1).
    k_max : int
        Largest k to try; reaching it without a rejection stops with
        ``stopped_reason == "k_cap_reached"``.
    pairs_budget : int
        Number of highest-ranked pairs tested per k.
    decorrelate : bool
        Drop embedding columns with |Spearman rho| > ``rho_max`` to an
        earlier column.
    seed : int
        Seeds every k-means call.
    truth : array-like, optional
        Ground-truth labels; NMI per k is recorded when given.
    """
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError("alpha must lie in (0, 1)")
    E = spectral_embedding(W, n, decorrelate=decorrelate, rho_max=rho_max, dense_limit=dense_limit)
    return estimate_from_embedding(E, alpha, k_max, pairs_budget, seed, restarts, pair_score,
                                   exhaustive, truth)
