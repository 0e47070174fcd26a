"""Rayleigh coefficients, cuts, and the matrix-Bernstein merge test.

A merge test asks whether two k-means clusters could be halves of one
cluster.  The rows of both are pooled, each embedding column is centered
and divided by its (uncentered) norm, and the Rayleigh coefficient of
either half against the resulting ``Z Z^T`` is compared with what the
tail bound

    P(||Z Z^T - n sigma^2 I||_op >= t) <= m exp(-t^2 / (2 (n sigma^2 + t/3)))

allows for a single cluster.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import InvalidArgumentError, NumericError
from .graph import SimilarityMatrix

SIGMA2_FLOOR = 1e-300
REJECT = "reject_merge"
ACCEPT = "accept_merge"


def _matrix(W):
    if isinstance(W, SimilarityMatrix):
        return W.weights
    if sp.issparse(W):
        return W.tocsr()
    return np.asarray(W, dtype=np.float64)


def _indicator(y, m=None) -> np.ndarray:
    y = np.asarray(y)
    if y.dtype == bool:
        y = y.astype(np.float64)
    else:
        y = y.astype(np.float64)
        if np.any((y != 0) & (y != 1)):
            raise InvalidArgumentError("indicator must be binary")
    if m is not None and y.shape[0] != m:
        raise InvalidArgumentError(f"indicator length {y.shape[0]} does not match {m}")
    return y


def rayleigh(W, y) -> float:
    """``y^T W y / |y|`` for a binary indicator ``y``."""
    M = _matrix(W)
    y = _indicator(y, M.shape[0])
    size = y.sum()
    if size == 0:
        raise InvalidArgumentError("empty indicator")
    return float(y @ (M @ y)) / size


def cut_value(W, y) -> float:
    """Ratio cut ``y^T W (1 - y) / |y|``."""
    M = _matrix(W)
    y = _indicator(y, M.shape[0])
    size = y.sum()
    if size == 0:
        raise InvalidArgumentError("empty indicator")
    return float(y @ (M @ (1.0 - y))) / size


def gram_rayleigh(D, y) -> float:
    """``R(D D^T, y) = ||D^T y||^2 / |y|`` without forming ``D D^T``."""
    D = np.asarray(D, dtype=np.float64)
    y = _indicator(y, D.shape[0])
    size = y.sum()
    if size == 0:
        raise InvalidArgumentError("empty indicator")
    v = D.T @ y
    return float(v @ v) / size


def gram_cut(D, y) -> float:
    """``C(D D^T, y)`` via the column sums on both sides of the split."""
    D = np.asarray(D, dtype=np.float64)
    y = _indicator(y, D.shape[0])
    size = y.sum()
    if size == 0:
        raise InvalidArgumentError("empty indicator")
    return float((D.T @ y) @ (D.T @ (1.0 - y))) / size


@dataclass(frozen=True)
class CenteredCluster:
    """Pooled rows ``J`` of D, each column centered and scaled to norm <= 1."""

    Z: np.ndarray
    J: np.ndarray
    sigma2: float
    dropped_columns: list = field(default_factory=list)

    @property
    def n_eff(self) -> int:
        return self.Z.shape[1]


def center_scale(D, J) -> CenteredCluster:
    """Center each column of ``D[J]`` on its mean and divide by its uncentered norm.

    Columns that vanish on ``J`` cannot be scaled and are dropped.  The
    pooled sample variance is the mean squared entry of the result.
    """
    D = np.asarray(D, dtype=np.float64)
    J = np.asarray(J, dtype=np.int64)
    if J.size < 2:
        raise InvalidArgumentError("a merge candidate needs at least two rows")
    DJ = D[J]
    norms = np.linalg.norm(DJ, axis=0)
    keep = norms > 0
    if not np.any(keep):
        raise NumericError("every column is zero on the pooled rows")
    dropped = [int(i) for i in np.flatnonzero(~keep)]
    DJ = DJ[:, keep]
    Z = (DJ - DJ.sum(axis=0) / J.size) / norms[keep]
    sigma2 = float(np.einsum("ij,ij->", Z, Z)) / (Z.shape[1] * J.size)
    return CenteredCluster(Z, J, sigma2, dropped)


def zz_top_probability(t: float, n_eff: int, sigma2: float, m_rows: int) -> float:
    """Tail bound ``m exp(-t^2 / (2 (n sigma^2 + t/3)))`` clipped to [0, 1].

    Non-positive ``t`` gives 1: such a statistic is no evidence against a
    single cluster.
    """
    if not sigma2 > 0:
        raise InvalidArgumentError(f"sigma2 must be positive, got {sigma2}")
    if n_eff < 1 or m_rows < 1:
        raise InvalidArgumentError("n_eff and m_rows must be positive")
    if t <= 0:
        return 1.0
    log_p = math.log(m_rows) - 0.5 * t * t / (n_eff * sigma2 + t / 3.0)
    return 1.0 if log_p >= 0 else math.exp(log_p)


def log10_zz_top_probability(t: float, n_eff: int, sigma2: float, m_rows: int) -> float:
    """Base-10 log of :func:`zz_top_probability`, finite where ``p`` underflows."""
    if not sigma2 > 0:
        raise InvalidArgumentError(f"sigma2 must be positive, got {sigma2}")
    if t <= 0:
        return 0.0
    log_p = math.log(m_rows) - 0.5 * t * t / (n_eff * sigma2 + t / 3.0)
    return min(0.0, log_p / math.log(10.0))


def test_statistic(Z: CenteredCluster, y_restricted) -> float:
    """``R(Z Z^T, y) - n sigma^2`` with ``y`` indexed over the pooled rows."""
    y = _indicator(y_restricted, Z.Z.shape[0])
    size = y.sum()
    if size == 0:
        raise InvalidArgumentError("empty indicator")
    v = Z.Z.T @ y
    return float(v @ v) / size - Z.n_eff * Z.sigma2


test_statistic.__test__ = False  # not a pytest test despite the name


@dataclass(frozen=True)
class MergeTestReport:
    pair: tuple
    t: float
    p: float
    sigma2: float
    J_size: int
    decision: str
    n_eff: int = 0
    log10_p: float = 0.0

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pair"] = list(self.pair)
        return d


def merge_test(D, Y, c1: int, c2: int, alpha: float) -> MergeTestReport:
    """Bound the probability that clusters ``c1`` and ``c2`` form one cluster.

    The merge is rejected (the clusters are kept apart) when the bound is at
    most ``alpha``.  The report does not depend on the order of ``c1`` and
    ``c2``.
    """
    labels = getattr(Y, "labels", None)
    if labels is None:
        labels = np.asarray(Y, dtype=np.int64)
    if c1 == c2:
        raise InvalidArgumentError("merge test needs two different clusters")
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError("alpha must lie in (0, 1)")
    a, b = sorted((int(c1), int(c2)))
    J = np.flatnonzero((labels == a) | (labels == b))
    sub = labels[J]
    if not np.any(sub == a) or not np.any(sub == b):
        raise InvalidArgumentError(f"cluster {a if not np.any(sub == a) else b} is empty")
    Zc = center_scale(D, J)
    t = max(test_statistic(Zc, sub == a), test_statistic(Zc, sub == b))
    if Zc.sigma2 < SIGMA2_FLOOR:
        p, log10_p = 1.0, 0.0
    else:
        p = zz_top_probability(t, Zc.n_eff, Zc.sigma2, J.size)
        log10_p = log10_zz_top_probability(t, Zc.n_eff, Zc.sigma2, J.size)
    return MergeTestReport((a, b), t, p, Zc.sigma2, int(J.size), REJECT if p <= alpha else ACCEPT,
                           Zc.n_eff, log10_p)


def remark1_rayleigh(D, y) -> float:
    """Rayleigh coefficient of ``y`` on the centered Gram matrix, in closed form.

    Uses only Rayleigh coefficients and cuts of the uncentered ``W = D D^T``,
    with ``yb = 1 - y`` and ``a = |y|/m``, ``b = |yb|/m``:

        b * (b R(W, y) - a C(W, y) - b C(W, yb) + a R(W, yb))

    The two cut terms together equal ``-(2/m) y^T W yb``.  Centering is the
    plain column mean over all m rows, with no norm scaling.
    """
    D = np.asarray(D, dtype=np.float64)
    y = _indicator(y, D.shape[0])
    m = D.shape[0]
    size = y.sum()
    if not 1 <= size <= m - 1:
        raise InvalidArgumentError("both sides of the split must be nonempty")
    yb = 1.0 - y
    a, b = size / m, (m - size) / m
    return b * (b * gram_rayleigh(D, y) - a * gram_cut(D, y) - b * gram_cut(D, yb)
                + a * gram_rayleigh(D, yb))


def threshold_rayleigh(m_rows: int, n_eff: int, sigma2: float, alpha: float) -> float:
    """Smallest Rayleigh coefficient whose tail bound is at most ``alpha``."""
    if not 0.0 < alpha < 1.0:
        raise InvalidArgumentError("alpha must lie in (0, 1)")
    if not sigma2 > 0:
        raise InvalidArgumentError("sigma2 must be positive")
    if n_eff < 1 or m_rows < 1:
        raise InvalidArgumentError("n_eff and m_rows must be positive")
    L = math.log(m_rows / alpha)
    ns2 = n_eff * sigma2
    return math.sqrt(2.0 * ns2 * L + L * L / 9.0) + ns2 + L / 3.0
