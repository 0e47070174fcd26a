import numpy as np
import pytest

from specialk import kernels


def _brute_knn(X, k):
    m = len(X)
    idx = np.empty((m, k), dtype=np.int64)
    for j in range(m):
        cand = sorted((float(np.sqrt(((X[j] - X[l]) ** 2).sum())), l) for l in range(m) if l != j)
        idx[j] = [l for _, l in cand[:k]]
    return idx


def test_knn_matches_brute_force(backend, rng):
    X = rng.normal(size=(60, 3))
    idx, dist = backend.knn_search(np.ascontiguousarray(X), 5)
    assert np.array_equal(idx, _brute_knn(X, 5))
    assert np.all(np.diff(dist, axis=1) >= 0)


def test_knn_ties_prefer_lower_index(backend):
    X = np.array([[0.0], [1.0], [2.0], [10.0]])
    idx, dist = backend.knn_search(X, 1)
    assert idx[:, 0].tolist() == [1, 0, 1, 2]
    np.testing.assert_array_equal(dist[:, 0], [1, 1, 1, 8])


def test_knn_includes_duplicates(backend):
    X = np.array([[0.0, 0.0], [0.0, 0.0], [3.0, 4.0]])
    idx, dist = backend.knn_search(X, 1)
    assert idx[:2, 0].tolist() == [1, 0] and dist[0, 0] == 0.0


def test_radius_pairs_match_brute_force(backend, rng):
    X = rng.uniform(size=(80, 2))
    rows, cols = backend.radius_pairs(X, 0.15)
    got = set(zip(rows.tolist(), cols.tolist()))
    want = {(j, l) for j in range(80) for l in range(j + 1, 80)
            if np.sqrt(((X[j] - X[l]) ** 2).sum()) <= 0.15}
    assert got == want


def test_radius_pairs_grows_buffer(backend):
    X = np.zeros((50, 2))
    rows, _ = backend.radius_pairs(X, 0.0)
    assert rows.size == 50 * 49 // 2


def test_assign_nearest(backend, rng):
    D = rng.normal(size=(40, 4))
    C = rng.normal(size=(3, 4))
    labels, d2 = backend.assign_nearest(D, C)
    full = ((D[:, None, :] - C[None]) ** 2).sum(-1)
    assert np.array_equal(labels, full.argmin(axis=1))
    np.testing.assert_allclose(d2, full.min(axis=1), rtol=1e-12)


def test_assign_nearest_tie_goes_to_first_center(backend):
    labels, _ = backend.assign_nearest(np.array([[0.0]]), np.array([[1.0], [-1.0]]))
    assert labels[0] == 0


@pytest.mark.skipif("cython" not in kernels.available_backends(), reason="extension not built")
def test_backends_agree_exactly(rng):
    py = kernels.available_backends()["python"]
    cy = kernels.available_backends()["cython"]
    X = np.round(rng.normal(size=(200, 2)), 1)  # coarse grid, many ties
    i1, d1 = py.knn_search(X, 10)
    i2, d2 = cy.knn_search(X, 10)
    assert np.array_equal(i1, i2) and np.array_equal(d1, d2)
    r1 = py.radius_pairs(X, 0.3)
    r2 = cy.radius_pairs(X, 0.3)
    assert all(np.array_equal(a, b) for a, b in zip(r1, r2))
    C = X[:4]
    assert np.array_equal(py.assign_nearest(X, C)[0], cy.assign_nearest(X, C)[0])


def test_backend_name():
    assert kernels.BACKEND in ("cython", "python")
