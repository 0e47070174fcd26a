"""Backend selection for the hot loops.

The compiled extension is used when it was built and imports cleanly;
otherwise the numpy versions are used.  Set ``SPECIALK_PURE_PYTHON=1`` to
force the fallback.
"""

import os

import numpy as np

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("SPECIALK_PURE_PYTHON") != "1":
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass


def available_backends():
    """Map backend name to kernel module for every importable backend."""
    found = {"python": _pykernels}
    try:
        from . import _kernels

        found["cython"] = _kernels
    except ImportError:
        pass
    return found


def _c(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def knn_search(X, k):
    """Exact k nearest neighbors of every row, self excluded.

    Returns ``(indices, distances)``, both of shape (m, k), ordered by
    increasing distance with ties broken by lower index.
    """
    return _impl.knn_search(_c(X), int(k))


def radius_pairs(X, eps):
    """All pairs ``j < l`` whose Euclidean distance is at most ``eps``."""
    return _impl.radius_pairs(_c(X), float(eps))


def assign_nearest(D, C):
    """Index of the nearest center for each row of D, plus the squared distance."""
    return _impl.assign_nearest(_c(D), _c(C))
