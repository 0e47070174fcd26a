"""Similarity graphs over point clouds and difference-Laplacian helpers."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import kernels
from .errors import InvalidArgumentError, ParseError

KINDS = ("eps_adjacency", "knn_normalized", "custom")


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetric, nonnegative, zero-diagonal weights stored as CSR."""

    weights: sp.csr_matrix
    kind: str = "custom"
    diag_policy: str = "zero_diagonal"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidArgumentError(f"unknown similarity kind {self.kind!r}")
        W = sp.csr_matrix(self.weights, dtype=np.float64)
        if W.shape[0] != W.shape[1]:
            raise InvalidArgumentError(f"similarity matrix must be square, got {W.shape}")
        W.sort_indices()
        object.__setattr__(self, "weights", W)

    @classmethod
    def from_dense(cls, A, kind: str = "custom", check: bool = True) -> "SimilarityMatrix":
        A = np.asarray(A, dtype=np.float64)
        if check:
            if A.ndim != 2 or A.shape[0] != A.shape[1]:
                raise InvalidArgumentError("similarity matrix must be square")
            if not np.array_equal(A, A.T):
                raise InvalidArgumentError("similarity matrix must be symmetric")
            if np.any(A < 0):
                raise InvalidArgumentError("similarity weights must be nonnegative")
            if np.any(np.diag(A) != 0):
                raise InvalidArgumentError("similarity matrix must have a zero diagonal")
        return cls(sp.csr_matrix(A), kind)

    @property
    def m(self) -> int:
        return self.weights.shape[0]

    def toarray(self) -> np.ndarray:
        return self.weights.toarray()

    def matvec(self, x: np.ndarray) -> np.ndarray:
        return self.weights @ x


@dataclass(frozen=True)
class LaplacianView:
    degree: np.ndarray
    form: str = "difference"


def _points(data) -> np.ndarray:
    pts = getattr(data, "points", data)
    pts = np.asarray(pts, dtype=np.float64)
    if pts.ndim != 2:
        raise InvalidArgumentError("points must be an m x d matrix")
    return pts


def nearest_rank_quantile(values: np.ndarray, q: float) -> float:
    """The smallest value v with at least a fraction ``q`` of values <= v."""
    v = np.sort(np.asarray(values, dtype=np.float64))
    rank = max(1, math.ceil(q * v.size - 1e-12))
    return float(v[rank - 1])


def eps_for_coverage(data, coverage: float = 0.99, min_neighbors: int = 10) -> float:
    """Radius at which a ``coverage`` fraction of points have ``min_neighbors`` neighbors."""
    pts = _points(data)
    if not 0.0 < coverage <= 1.0:
        raise InvalidArgumentError("coverage must lie in (0, 1]")
    if min_neighbors < 1 or pts.shape[0] < min_neighbors + 1:
        raise InvalidArgumentError(
            f"need m >= min_neighbors + 1 (m={pts.shape[0]}, min_neighbors={min_neighbors})"
        )
    _, dist = kernels.knn_search(pts, min_neighbors)
    return nearest_rank_quantile(dist[:, -1], coverage)


def build_eps_graph(data, coverage: float = 0.99, min_neighbors: int = 10) -> SimilarityMatrix:
    """Binary epsilon-neighborhood adjacency (the W_R preset).

    Epsilon is the nearest-rank ``coverage`` quantile of each point's
    distance to its ``min_neighbors``-th nearest neighbor.  Distinct points
    at distance <= epsilon are connected, coincident ones included.
    """
    pts = _points(data)
    eps = eps_for_coverage(pts, coverage, min_neighbors)
    rows, cols = kernels.radius_pairs(pts, eps)
    m = pts.shape[0]
    ones = np.ones(2 * rows.size)
    W = sp.csr_matrix((ones, (np.r_[rows, cols], np.r_[cols, rows])), shape=(m, m))
    return SimilarityMatrix(W, "eps_adjacency")


def build_knn_graph(data, k_neighbors: int = 10) -> SimilarityMatrix:
    """Symmetrically normalized kNN adjacency (the W_C preset).

    The directed kNN relation is symmetrized with an elementwise max and
    normalized as ``Deg^-1/2 A Deg^-1/2``.
    """
    pts = _points(data)
    m = pts.shape[0]
    if k_neighbors < 1 or m < k_neighbors + 1:
        raise InvalidArgumentError(f"need m >= k_neighbors + 1 (m={m}, k_neighbors={k_neighbors})")
    idx, _ = kernels.knn_search(pts, k_neighbors)
    rows = np.repeat(np.arange(m), k_neighbors)
    A = sp.csr_matrix((np.ones(rows.size), (rows, idx.ravel())), shape=(m, m))
    A = A.maximum(A.T).tocsr()
    A.data[:] = 1.0
    deg = np.asarray(A.sum(axis=1)).ravel()
    scale = np.zeros(m)
    nz = deg > 0
    scale[nz] = 1.0 / np.sqrt(deg[nz])
    C = A.tocoo()
    # A is binary, so each weight is a single product; commutativity keeps it exactly symmetric.
    W = sp.csr_matrix((scale[C.row] * scale[C.col], (C.row, C.col)), shape=(m, m))
    return SimilarityMatrix(W, "knn_normalized")


def _weights(W):
    if isinstance(W, SimilarityMatrix):
        return W.weights
    if sp.issparse(W):
        return W.tocsr()
    return np.asarray(W, dtype=np.float64)


def degrees(W) -> LaplacianView:
    """Row sums of the weights."""
    M = _weights(W)
    return LaplacianView(np.asarray(M.sum(axis=1), dtype=np.float64).ravel())


def neg_laplacian_apply(W, x) -> np.ndarray:
    """``(W - diag(W 1)) x`` without forming the Laplacian."""
    M = _weights(W)
    x = np.asarray(x, dtype=np.float64)
    if x.shape[0] != M.shape[0]:
        raise InvalidArgumentError(f"vector length {x.shape[0]} does not match matrix size {M.shape[0]}")
    deg = degrees(M).degree
    if x.ndim == 2:
        return M @ x - deg[:, None] * x
    return M @ x - deg * x


def neg_laplacian(W) -> sp.csr_matrix:
    """Sparse ``-L = W - diag(W 1)``, for callers that want to decompose it."""
    M = sp.csr_matrix(_weights(W))
    return (M - sp.diags(degrees(M).degree)).tocsr()


def write_coo(W, path: str | os.PathLike) -> None:
    """Write nonzero weights as ``row,col,weight`` lines with 0-based indices."""
    M = sp.coo_matrix(_weights(W))
    order = np.lexsort((M.col, M.row))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# shape,{M.shape[0]},{M.shape[1]}\n")
        for r, c, v in zip(M.row[order], M.col[order], M.data[order]):
            fh.write(f"{r},{c},{float(v)!r}\n")


def read_coo(path: str | os.PathLike, m: int | None = None, kind: str = "custom") -> SimilarityMatrix:
    """Inverse of :func:`write_coo`.

    The optional ``# shape`` comment fixes the size; otherwise ``m`` or the
    largest index + 1 is used.
    """
    rows, cols, vals = [], [], []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                parts = line[1:].strip().split(",")
                if parts[0] == "shape" and m is None:
                    m = int(parts[1])
                continue
            parts = line.split(",")
            if len(parts) != 3:
                raise ParseError("expected row,col,weight", path=path, row=lineno)
            try:
                rows.append(int(parts[0]))
                cols.append(int(parts[1]))
                vals.append(float(parts[2]))
            except ValueError:
                raise ParseError(f"malformed triplet {line!r}", path=path, row=lineno) from None
    if m is None:
        m = max(max(rows, default=-1), max(cols, default=-1)) + 1
    W = sp.csr_matrix((vals, (rows, cols)), shape=(m, m))
    return SimilarityMatrix(W, kind)
