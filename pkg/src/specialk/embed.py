"""Truncated eigendecomposition and the projected-eigenvector embedding.

The embedding keeps the ``n`` algebraically largest eigenpairs of the
similarity matrix and maps them to the nonnegative factor
``D[j, i] = |V[j, i]| * sqrt(|lambda_i|)``, so that ``W ~ D D^T``.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.stats import rankdata

from .errors import InvalidArgumentError, NumericError
from .graph import SimilarityMatrix

# Above this size the iterative (Lanczos) solver is used.
DENSE_LIMIT = 4096
RESIDUAL_TOL = 1e-6


@dataclass(frozen=True)
class Embedding:
    D: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    kept_columns: list = field(default_factory=list)

    @property
    def n(self) -> int:
        return self.D.shape[1]

    @property
    def m(self) -> int:
        return self.D.shape[0]


def _as_operator(W):
    if isinstance(W, SimilarityMatrix):
        return W.weights
    if sp.issparse(W):
        return W.tocsr()
    A = np.asarray(W, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"expected a square matrix, got shape {A.shape}")
    return A


def _fix_signs(V: np.ndarray) -> np.ndarray:
    # First entry of largest magnitude made positive, per column.
    pivot = np.argmax(np.abs(V), axis=0)
    signs = np.sign(V[pivot, np.arange(V.shape[1])])
    signs[signs == 0] = 1.0
    return V * signs


def _dense_top(M, n):
    A = M.toarray() if sp.issparse(M) else M
    m = A.shape[0]
    vals, vecs = sla.eigh(A, subset_by_index=[m - n, m - 1])
    return vals[::-1].copy(), vecs[:, ::-1].copy()


def _lanczos_top(M, n, maxiter=None):
    m = M.shape[0]
    ncv = min(m, max(2 * n + 1, n + 32))
    maxiter = maxiter or 20 * m
    v0 = np.full(m, 1.0 / np.sqrt(m))
    try:
        vals, vecs = spla.eigsh(M, k=n, which="LA", ncv=ncv, maxiter=maxiter, tol=1e-12, v0=v0)
    except spla.ArpackNoConvergence as exc:
        raise NumericError(
            f"Lanczos did not converge after {maxiter} iterations "
            f"({len(exc.eigenvalues)} of {n} eigenpairs found)"
        ) from None
    # Rayleigh-Ritz on the returned basis restores exact orthonormality
    # inside clusters of nearly equal eigenvalues.
    Q, _ = np.linalg.qr(vecs)
    H = Q.T @ (M @ Q)
    h_vals, h_vecs = np.linalg.eigh((H + H.T) * 0.5)
    order = np.argsort(h_vals)[::-1]
    return h_vals[order], Q @ h_vecs[:, order]


def truncated_eigen(W, n: int, dense_limit: int = DENSE_LIMIT) -> tuple[np.ndarray, np.ndarray]:
    """The ``n`` algebraically largest eigenpairs of a symmetric matrix.

    Parameters
    ----------
    W : SimilarityMatrix, sparse matrix or ndarray
        Symmetric matrix to decompose.
    n : int
        Number of eigenpairs, ``1 <= n <= m``.
    dense_limit : int
        Matrices up to this size use a dense LAPACK solver; larger ones use
        implicitly restarted Lanczos.

    Returns
    -------
    eigenvalues : ndarray of shape (n,)
        Sorted in descending order.
    eigenvectors : ndarray of shape (m, n)
        Orthonormal columns; each column's first entry of largest magnitude
        is positive.
    """
    M = _as_operator(W)
    m = M.shape[0]
    if not 1 <= n <= m:
        raise InvalidArgumentError(f"n must satisfy 1 <= n <= m (n={n}, m={m})")
    if m <= dense_limit or n >= m - 1:
        vals, vecs = _dense_top(M, n)
    else:
        vals, vecs = _lanczos_top(M, n)
    vecs = _fix_signs(vecs)
    resid = np.linalg.norm(M @ vecs - vecs * vals, axis=0)
    bad = resid > RESIDUAL_TOL * np.maximum(1.0, np.abs(vals))
    if np.any(bad):
        i = int(np.argmax(bad))
        raise NumericError(f"eigenpair {i} has residual {resid[i]:.3g}")
    return vals, vecs


def project_embedding(eigenvalues, eigenvectors) -> Embedding:
    """Scale absolute eigenvector entries by the root of the absolute eigenvalue."""
    vals = np.asarray(eigenvalues, dtype=np.float64).ravel()
    V = np.asarray(eigenvectors, dtype=np.float64)
    if V.ndim == 1:
        V = V[:, None]
    if V.shape[1] != vals.size:
        raise InvalidArgumentError(f"{vals.size} eigenvalues but {V.shape[1]} eigenvectors")
    D = np.abs(V) * np.sqrt(np.abs(vals))
    return Embedding(D, vals, V, list(range(vals.size)))


def spearman_matrix(D: np.ndarray) -> np.ndarray:
    """Pairwise Spearman rank correlations of the columns (average ranks for ties).

    Constant columns have undefined correlation and are reported as 0.
    """
    R = rankdata(D, axis=0)
    R = R - R.mean(axis=0)
    norms = np.linalg.norm(R, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    R = R / safe
    C = R.T @ R
    C[:, norms == 0] = 0.0
    C[norms == 0, :] = 0.0
    np.fill_diagonal(C, 1.0)
    return C


def decorrelate_columns(E: Embedding, rho_max: float = 0.95) -> Embedding:
    """Drop columns whose |Spearman rho| with an earlier kept column exceeds ``rho_max``.

    Columns are scanned in descending eigenvalue order, so of two strongly
    correlated columns the one with the larger eigenvalue survives.
    """
    if not 0.0 < rho_max <= 1.0:
        raise InvalidArgumentError("rho_max must lie in (0, 1]")
    C = np.abs(spearman_matrix(E.D))
    order = np.argsort(-E.eigenvalues, kind="stable")
    kept: list[int] = []
    for i in order:
        if all(C[i, j] <= rho_max for j in kept):
            kept.append(int(i))
    if not kept:
        raise NumericError("decorrelation dropped every column")
    kept.sort()
    return Embedding(
        E.D[:, kept],
        E.eigenvalues[kept],
        E.eigenvectors[:, kept],
        [E.kept_columns[i] for i in kept],
    )


def spectral_embedding(W, n: int, decorrelate: bool = False, rho_max: float = 0.95,
                       dense_limit: int = DENSE_LIMIT) -> Embedding:
    """Decompose, project, and optionally decorrelate in one call."""
    vals, vecs = truncated_eigen(W, n, dense_limit=dense_limit)
    E = project_embedding(vals, vecs)
    return decorrelate_columns(E, rho_max) if decorrelate else E


def write_embedding(E: Embedding, csv_path: str | os.PathLike, json_path: str | os.PathLike | None = None) -> None:
    """Write D as CSV and ``{eigenvalues, kept_columns}`` as a JSON sidecar."""
    np.savetxt(csv_path, E.D, delimiter=",", fmt="%.17g")
    if json_path is None:
        json_path = os.fspath(csv_path) + ".json"
    with open(json_path, "w", encoding="utf-8") as fh:
        json.dump({"eigenvalues": [float(v) for v in E.eigenvalues],
                   "kept_columns": [int(i) for i in E.kept_columns]}, fh, indent=2)
        fh.write("\n")
