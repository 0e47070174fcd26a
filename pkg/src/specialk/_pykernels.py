"""Numpy implementations of the compiled kernels in ``_kernels.pyx``."""

import numpy as np

_CHUNK_ELEMS = 4_000_000


def _sqdist_rows(X, rows):
    """Squared distances from ``X[rows]`` to every row of ``X``.

    Accumulates one coordinate at a time, like the compiled loop, so both
    backends round identically.
    """
    out = np.zeros((len(rows), X.shape[0]))
    for t in range(X.shape[1]):
        diff = X[rows, t][:, None] - X[None, :, t]
        out += diff * diff
    return out


def _chunks(m, d):
    step = max(1, _CHUNK_ELEMS // max(1, m * d))
    for start in range(0, m, step):
        yield np.arange(start, min(m, start + step))


def knn_search(X, k):
    X = np.ascontiguousarray(X, dtype=np.float64)
    m = X.shape[0]
    idx = np.empty((m, k), dtype=np.int64)
    dist = np.empty((m, k))
    for rows in _chunks(m, X.shape[1]):
        d2 = _sqdist_rows(X, rows)
        d2[np.arange(len(rows)), rows] = np.inf
        order = np.argsort(d2, axis=1, kind="stable")[:, :k]
        idx[rows] = order
        dist[rows] = np.sqrt(np.take_along_axis(d2, order, axis=1))
    return idx, dist


def radius_pairs(X, eps):
    X = np.ascontiguousarray(X, dtype=np.float64)
    m = X.shape[0]
    rows_out, cols_out = [], []
    for rows in _chunks(m, X.shape[1]):
        hit = np.sqrt(_sqdist_rows(X, rows)) <= eps
        hit &= np.arange(m)[None, :] > rows[:, None]
        r, c = np.nonzero(hit)
        rows_out.append(rows[r])
        cols_out.append(c.astype(np.int64))
    if not rows_out:
        return np.empty(0, np.int64), np.empty(0, np.int64)
    return np.concatenate(rows_out), np.concatenate(cols_out)


def assign_nearest(D, C):
    D = np.ascontiguousarray(D, dtype=np.float64)
    C = np.ascontiguousarray(C, dtype=np.float64)
    d2 = np.zeros((D.shape[0], C.shape[0]))
    for t in range(D.shape[1]):
        diff = D[:, t][:, None] - C[None, :, t]
        d2 += diff * diff
    labels = np.argmin(d2, axis=1).astype(np.int64)
    return labels, d2[np.arange(D.shape[0]), labels]
