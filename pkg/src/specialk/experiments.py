"""Presets, noise and n sweeps, and JSON/CSV serialization of results."""

from __future__ import annotations

import csv
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .datagen import SHAPES, Dataset, generate
from .errors import SpecialKError
from .estimator import EstimateResult, eigengap_baseline, estimate_k
from .graph import build_eps_graph, build_knn_graph, neg_laplacian

SCHEMA = "specialk/1"
PRESETS = ("wr", "wc")
# Noise levels 0, 0.025, ..., 0.225.
NOISE_GRID = tuple(round(0.025 * i, 3) for i in range(10))
N_GRID = tuple(range(50, 451, 50))
SYNTHETIC_N = 200
EXTERNAL_N = 1000
# Datasets with at least this many rows get the larger default embedding.
LARGE_M = 5000


@dataclass
class ExperimentConfig:
    shape_tag: str = "blobs"
    m: int = 1500
    noise_grid: Sequence[float] = NOISE_GRID
    replicates: int = 5
    graph_presets: Sequence[str] = PRESETS
    n: int = SYNTHETIC_N
    alpha: float = 0.01
    k_max: int = 5
    pairs_budget: int = 10
    seed_base: int = 0
    decorrelate: Optional[bool] = None
    output_dir: str = "."
    restarts: int = 10

    def __post_init__(self):
        if any(v < 0 for v in self.noise_grid):
            raise ValueError("noise levels must be >= 0")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        for p in self.graph_presets:
            if p not in PRESETS:
                raise ValueError(f"unknown preset {p!r}")

    def decorrelate_for(self, shape: str) -> bool:
        # The moons preset enables decorrelation unless the caller decided.
        return shape == "moons" if self.decorrelate is None else bool(self.decorrelate)


def build_graph(data, preset: str):
    """W_R (``"wr"``): epsilon graph with 99% of points having 10 neighbors.
    W_C (``"wc"``): symmetrically normalized 10-NN adjacency."""
    if preset == "wr":
        return build_eps_graph(data, coverage=0.99, min_neighbors=10)
    if preset == "wc":
        return build_knn_graph(data, k_neighbors=10)
    raise ValueError(f"unknown preset {preset!r}")


def default_n(m: int) -> int:
    return min(m, EXTERNAL_N if m >= LARGE_M else SYNTHETIC_N)


def cell_seed(seed_base: int, noise: float, replicate: int) -> int:
    """Dataset seed for one sweep cell, stable under changes to the grid."""
    ss = np.random.SeedSequence([int(seed_base), int(round(noise * 1_000_000)), int(replicate)])
    return int(ss.generate_state(1)[0])


def run_estimate(data: Dataset, preset: str, n: int, alpha: float = 0.01, k_max: int = 5,
                 pairs_budget: int = 10, decorrelate: bool = False, seed: int = 0,
                 laplacian: bool = False, exhaustive: bool = False, restarts: int = 10,
                 pair_score: str = "cut") -> EstimateResult:
    """Graph construction, embedding and the k search for one dataset."""
    W = build_graph(data, preset)
    if laplacian:
        W = neg_laplacian(W)
    return estimate_k(W, n, alpha=alpha, k_max=k_max, pairs_budget=pairs_budget,
                      decorrelate=decorrelate, seed=seed, restarts=restarts,
                      pair_score=pair_score, exhaustive=exhaustive, truth=data.labels)


# -- serialization ---------------------------------------------------------

def fmt_float(x) -> float | None:
    """Round to 12 significant digits so printed output is stable."""
    if x is None:
        return None
    x = float(x)
    if not math.isfinite(x):
        return x
    return float(f"{x:.12g}")


def fmt_str(x) -> str:
    return "" if x is None else f"{float(x):.12g}"


def report_to_dict(rep) -> dict:
    return {
        "pair": [int(rep.pair[0]), int(rep.pair[1])],
        "t": fmt_float(rep.t),
        "p": fmt_float(rep.p),
        "log10_p": fmt_float(rep.log10_p),
        "sigma2": fmt_float(rep.sigma2),
        "J_size": int(rep.J_size),
        "n_eff": int(rep.n_eff),
        "decision": rep.decision,
    }


def result_to_dict(result: EstimateResult, **meta) -> dict:
    per_k = []
    for k in sorted(result.assignments_per_k):
        Y = result.assignments_per_k[k]
        reps = result.reports_per_k.get(k, [])
        p_max = result.max_p(k)
        per_k.append({
            "k": k,
            "objective": fmt_float(Y.objective),
            "sizes": [int(s) for s in Y.sizes],
            "p_max": fmt_float(p_max),
            "log10_p_max": fmt_float(max((r.log10_p for r in reps), default=None)) if reps else None,
            "nmi": fmt_float(result.nmi_per_k.get(k)),
            "reports": [report_to_dict(r) for r in reps],
        })
    eig = result.embedding.eigenvalues if result.embedding is not None else None
    out = {"schema": SCHEMA}
    out.update(meta)
    out.update({
        "alpha": fmt_float(result.alpha),
        "n_used": int(result.n_used),
        "k_selected": int(result.k_selected),
        "stopped_reason": result.stopped_reason,
        "eigengap_k": eigengap_baseline(eig) if eig is not None and eig.size >= 2 else None,
        "per_k": per_k,
    })
    return out


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def write_labels(labels, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")


# -- sweeps ----------------------------------------------------------------

@dataclass(frozen=True)
class SweepCell:
    shape: str
    preset: str
    noise: float
    replicate: int
    n: int

    def key(self):
        return (SHAPES.index(self.shape) if self.shape in SHAPES else 99, self.shape,
                PRESETS.index(self.preset), self.noise, self.n, self.replicate)


@dataclass
class SweepRow:
    cell: SweepCell
    seed: int
    k_selected: Optional[int]
    status: str = "ok"
    extra: dict = field(default_factory=dict)


def _worker_count() -> int:
    raw = os.environ.get("SPECIALK_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def run_cell(cell: SweepCell, config: ExperimentConfig) -> SweepRow:
    seed = cell_seed(config.seed_base, cell.noise, cell.replicate)
    try:
        data = generate(cell.shape, config.m, cell.noise, seed)
        res = run_estimate(data, cell.preset, cell.n, config.alpha, config.k_max,
                           config.pairs_budget, config.decorrelate_for(cell.shape),
                           seed=seed, restarts=config.restarts)
        return SweepRow(cell, seed, res.k_selected)
    except (SpecialKError, ValueError, ArithmeticError) as exc:
        return SweepRow(cell, seed, None, f"error: {type(exc).__name__}: {exc}")


def run_cells(cells: Sequence[SweepCell], config: ExperimentConfig) -> list[SweepRow]:
    cells = sorted(cells, key=SweepCell.key)
    workers = _worker_count()
    if workers == 1:
        return [run_cell(c, config) for c in cells]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda c: run_cell(c, config), cells))


def noise_cells(config: ExperimentConfig, shapes: Sequence[str]) -> list[SweepCell]:
    return [SweepCell(s, p, float(v), r, config.n)
            for s in shapes for p in config.graph_presets
            for v in config.noise_grid for r in range(config.replicates)]


def n_cells(config: ExperimentConfig, shapes: Sequence[str], n_grid: Sequence[int],
            noise: float = 0.1) -> list[SweepCell]:
    return [SweepCell(s, p, float(noise), r, int(n))
            for s in shapes for p in config.graph_presets
            for n in n_grid for r in range(config.replicates)]


def sweep_noise(config: ExperimentConfig, shapes: Sequence[str] | None = None) -> list[SweepRow]:
    return run_cells(noise_cells(config, shapes or [config.shape_tag]), config)


def sweep_n(config: ExperimentConfig, n_grid: Sequence[int] = N_GRID, shapes: Sequence[str] | None = None,
            noise: float = 0.1) -> list[SweepRow]:
    return run_cells(n_cells(config, shapes or [config.shape_tag], n_grid, noise), config)


NOISE_COLUMNS = ("shape", "preset", "noise", "replicate", "k_selected", "status")
N_COLUMNS = ("shape", "preset", "n", "noise", "replicate", "k_selected", "status")


def write_sweep_csv(rows: Sequence[SweepRow], path, columns=NOISE_COLUMNS) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            c = row.cell
            values = {"shape": c.shape, "preset": c.preset, "noise": fmt_str(c.noise), "n": c.n,
                      "replicate": c.replicate,
                      "k_selected": "" if row.k_selected is None else row.k_selected,
                      "status": row.status}
            w.writerow([values[col] for col in columns])


def read_sweep_csv(path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))
