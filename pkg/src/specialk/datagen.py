"""Synthetic benchmark datasets and CSV input/output.

All generators draw from ``numpy.random.Generator(PCG64(seed))``, so a
given ``(m, noise, seed)`` reproduces the same points bit for bit on any
platform numpy supports.  Layouts follow the scikit-learn conventions for
``make_moons``, ``make_circles`` and ``make_blobs``: points are produced
group by group, and labels are contiguous blocks.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import InvalidArgumentError, ParseError

SHAPES = ("moons", "circles", "blobs", "random")

# Half-width of the box blob centers are drawn from.
BLOB_CENTER_BOX = 10.0
BLOB_STD = 1.0
# Minimum distance between blob centers, in blob standard deviations.
BLOB_MIN_SEPARATION = 6.0


@dataclass(frozen=True)
class Dataset:
    """A point cloud with optional ground-truth labels."""

    points: np.ndarray
    labels: Optional[np.ndarray] = None
    seed: int = 0
    shape_tag: str = "external"

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise InvalidArgumentError(f"points must be a non-empty m x d matrix, got shape {pts.shape}")
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            lab = np.asarray(self.labels, dtype=np.int64)
            if lab.shape != (pts.shape[0],):
                raise InvalidArgumentError("labels must have one entry per point")
            object.__setattr__(self, "labels", lab)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]

    @property
    def n_classes(self) -> Optional[int]:
        return None if self.labels is None else int(np.unique(self.labels).size)


def _rng(seed: int) -> np.random.Generator:
    if seed < 0:
        raise InvalidArgumentError("seed must be a non-negative integer")
    return np.random.Generator(np.random.PCG64(seed))


def _check_noise(noise: float) -> float:
    noise = float(noise)
    if not noise >= 0:
        raise InvalidArgumentError(f"noise must be >= 0, got {noise}")
    return noise


def _split(m: int, parts: int) -> list[int]:
    return [m // parts + (1 if i < m % parts else 0) for i in range(parts)]


def make_moons(m: int, noise: float = 0.0, seed: int = 0) -> Dataset:
    """Two interleaving half circles.

    The upper arc has radius 1 around the origin; the lower arc is the
    reflected copy centered at (1, 0.5).  The first arc receives the extra
    point when ``m`` is odd.  ``noise`` is the standard deviation of the
    Gaussian perturbation added to each coordinate.
    """
    if m < 2:
        raise InvalidArgumentError("make_moons needs m >= 2")
    noise = _check_noise(noise)
    rng = _rng(seed)
    n_up, n_down = _split(m, 2)
    t_up = np.linspace(0.0, np.pi, n_up)
    t_down = np.linspace(0.0, np.pi, n_down)
    up = np.column_stack([np.cos(t_up), np.sin(t_up)])
    down = np.column_stack([1.0 - np.cos(t_down), 0.5 - np.sin(t_down)])
    points = np.vstack([up, down]) + rng.normal(0.0, noise, size=(m, 2))
    labels = np.repeat([0, 1], [n_up, n_down])
    return Dataset(points, labels, seed, "moons")


def make_circles(m: int, noise: float = 0.0, factor: float = 0.5, seed: int = 0) -> Dataset:
    """Two concentric circles with radii 1 and ``factor``."""
    if m < 2:
        raise InvalidArgumentError("make_circles needs m >= 2")
    if not 0.0 < factor < 1.0:
        raise InvalidArgumentError(f"factor must lie in (0, 1), got {factor}")
    noise = _check_noise(noise)
    rng = _rng(seed)
    n_out, n_in = _split(m, 2)
    t_out = np.linspace(0.0, 2.0 * np.pi, n_out, endpoint=False)
    t_in = np.linspace(0.0, 2.0 * np.pi, n_in, endpoint=False)
    outer = np.column_stack([np.cos(t_out), np.sin(t_out)])
    inner = factor * np.column_stack([np.cos(t_in), np.sin(t_in)])
    points = np.vstack([outer, inner]) + rng.normal(0.0, noise, size=(m, 2))
    labels = np.repeat([0, 1], [n_out, n_in])
    return Dataset(points, labels, seed, "circles")


def make_blobs(m: int, noise: float = 0.0, seed: int = 0) -> Dataset:
    """Three isotropic Gaussian blobs in the plane.

    Centers are uniform in [-10, 10]^2, redrawn until every pair is at
    least ``BLOB_MIN_SEPARATION`` apart so the blobs do not merge.  Each
    blob has unit standard deviation, and an independent Gaussian
    perturbation with standard deviation ``noise`` is added on top.
    """
    if m < 3:
        raise InvalidArgumentError("make_blobs needs m >= 3")
    noise = _check_noise(noise)
    rng = _rng(seed)
    while True:
        centers = rng.uniform(-BLOB_CENTER_BOX, BLOB_CENTER_BOX, size=(3, 2))
        gaps = [np.hypot(*(centers[i] - centers[j])) for i, j in ((0, 1), (0, 2), (1, 2))]
        if min(gaps) >= BLOB_MIN_SEPARATION:
            break
    sizes = _split(m, 3)
    labels = np.repeat(np.arange(3), sizes)
    base = rng.normal(0.0, BLOB_STD, size=(m, 2))
    points = centers[labels] + base + rng.normal(0.0, noise, size=(m, 2))
    return Dataset(points, labels, seed, "blobs")


def make_random(m: int, seed: int = 0, noise: float = 0.0) -> Dataset:
    """Uniform points on the unit square, all in one cluster.

    ``noise`` adds a Gaussian perturbation like the other generators; the
    default of 0 gives plain uniform samples.
    """
    if m < 1:
        raise InvalidArgumentError("make_random needs m >= 1")
    noise = _check_noise(noise)
    rng = _rng(seed)
    points = rng.uniform(0.0, 1.0, size=(m, 2))
    if noise > 0:
        points = points + rng.normal(0.0, noise, size=(m, 2))
    return Dataset(points, np.zeros(m, dtype=np.int64), seed, "random")


def generate(shape: str, m: int, noise: float, seed: int) -> Dataset:
    """Dispatch to the generator named by ``shape``."""
    if shape == "moons":
        return make_moons(m, noise, seed)
    if shape == "circles":
        return make_circles(m, noise, seed=seed)
    if shape == "blobs":
        return make_blobs(m, noise, seed)
    if shape == "random":
        return make_random(m, seed, noise)
    raise InvalidArgumentError(f"unknown shape {shape!r}; expected one of {', '.join(SHAPES)}")


def load_csv(path: str | os.PathLike, has_labels: bool = False) -> Dataset:
    """Read a numeric CSV file.

    With ``has_labels`` the last column holds integer class labels; they are
    remapped to ``0..k-1`` in order of first appearance of each sorted id.

    Raises
    ------
    ParseError
        On an empty file, ragged rows, or a non-numeric cell.  Header rows
        are not supported and fail as non-numeric.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh)]
    # Tolerate a trailing blank line, nothing else.
    while rows and rows[-1] == []:
        rows.pop()
    if not rows:
        raise ParseError("file is empty", path=path)
    width = len(rows[0])
    values = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ParseError(f"expected {width} columns, found {len(row)}", path=path, row=i)
        for j, cell in enumerate(row, start=1):
            try:
                values[i - 1, j - 1] = float(cell)
            except ValueError:
                raise ParseError(f"non-numeric value {cell!r}", path=path, row=i, column=j) from None
    if not np.all(np.isfinite(values)):
        i, j = np.argwhere(~np.isfinite(values))[0]
        raise ParseError("non-finite value", path=path, row=int(i) + 1, column=int(j) + 1)
    labels = None
    if has_labels:
        if width < 2:
            raise ParseError("a label column needs at least one coordinate column", path=path)
        raw = values[:, -1]
        bad = np.flatnonzero(raw != np.round(raw))
        if bad.size:
            raise ParseError("label is not an integer", path=path, row=int(bad[0]) + 1, column=width)
        _, labels = np.unique(raw.astype(np.int64), return_inverse=True)
        values = values[:, :-1]
    return Dataset(values, labels, 0, "external")


def save_csv(data: Dataset, path: str | os.PathLike, with_labels: bool = True) -> None:
    """Write points (and labels as a last integer column) as CSV."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for j in range(data.m):
            row = [repr(float(v)) for v in data.points[j]]
            if with_labels and data.labels is not None:
                row.append(str(int(data.labels[j])))
            writer.writerow(row)
