"""Command-line interface.

Subcommands: ``generate``, ``estimate``, ``sweep-noise``, ``sweep-n`` and
``report``.  Exit status is 0 on success, 1 on a numerical failure and 2
on usage or I/O errors.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .datagen import SHAPES, generate, load_csv, save_csv
from .embed import write_embedding
from .errors import InvalidArgumentError, NumericError, ParseError
from .experiments import (N_COLUMNS, N_GRID, NOISE_COLUMNS, NOISE_GRID, PRESETS, ExperimentConfig,
                          cell_seed, default_n, result_to_dict, run_estimate, sweep_n, sweep_noise,
                          write_json, write_labels, write_sweep_csv)
from .plotting import sweep_svg
from .report import build_report

log = logging.getLogger("specialk")

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


def _floats(text):
    return [float(v) for v in text.split(",") if v.strip()]


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _add_common(p, presets_multi=False):
    if presets_multi:
        p.add_argument("--preset", choices=PRESETS, action="append", default=None,
                       help="similarity preset; repeat for several (default: both)")
    else:
        p.add_argument("--preset", choices=PRESETS, default="wr")
    p.add_argument("--n", type=int, default=None, help="embedding dimensionality")
    p.add_argument("--alpha", type=float, default=0.01)
    p.add_argument("--k-max", type=int, default=5)
    p.add_argument("--pairs-budget", type=int, default=10)
    p.add_argument("--decorrelate", action="store_true",
                   help="drop eigenvectors with |Spearman rho| > 0.95 to a kept one")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".", help="output directory")


def _sweep_args(p):
    p.add_argument("--shape", choices=SHAPES, action="append", default=None,
                   help="dataset shape; repeat for several (default: all)")
    p.add_argument("--m", type=int, default=1500)
    p.add_argument("--replicates", type=int, default=5)
    p.add_argument("--restarts", type=int, default=10, help="k-means restarts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="specialk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write synthetic datasets as CSV")
    g.add_argument("--shape", choices=SHAPES, required=True)
    g.add_argument("--m", type=int, default=1500)
    g.add_argument("--noise", type=_floats, default=list(NOISE_GRID), help="comma-separated noise levels")
    g.add_argument("--replicates", type=int, default=5)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", default=".")

    e = sub.add_parser("estimate", help="estimate k for one CSV dataset")
    e.add_argument("dataset", help="CSV file of points")
    e.add_argument("--labels", action="store_true", help="last CSV column holds class labels")
    e.add_argument("--laplacian", action="store_true", help="decompose -L instead of W")
    e.add_argument("--exhaustive", action="store_true",
                   help="test every k up to --k-max (full per-k table)")
    e.add_argument("--save-embedding", action="store_true")
    e.add_argument("--restarts", type=int, default=10)
    _add_common(e)

    sn = sub.add_parser("sweep-noise", help="k over a grid of noise levels")
    sn.add_argument("--noise", type=_floats, default=list(NOISE_GRID), help="comma-separated noise levels")
    _sweep_args(sn)
    _add_common(sn, presets_multi=True)

    sw = sub.add_parser("sweep-n", help="k over a grid of embedding dimensionalities")
    sw.add_argument("--n-grid", type=_ints, default=list(N_GRID), help="comma-separated values of n")
    sw.add_argument("--noise", type=float, default=0.1)
    _sweep_args(sw)
    _add_common(sw, presets_multi=True)

    r = sub.add_parser("report", help="Markdown per-k tables from estimate results")
    r.add_argument("results_dir")
    r.add_argument("--csv", default=None, help="also write the table rows as CSV")
    r.add_argument("--out", default=None, help="write Markdown here instead of stdout")
    return parser


def _mkdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    out = _mkdir(args.out)
    count = 0
    for noise in args.noise:
        for rep in range(args.replicates):
            data = generate(args.shape, args.m, noise, cell_seed(args.seed, noise, rep))
            save_csv(data, out / f"{args.shape}_{noise:.3f}_{rep}.csv")
            count += 1
    print(f"wrote {count} datasets to {out}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    path = Path(args.dataset)
    if not path.is_file():
        raise FileNotFoundError(f"dataset not found: {path}")
    data = load_csv(path, has_labels=args.labels)
    n = args.n if args.n is not None else default_n(data.m)
    res = run_estimate(data, args.preset, n, args.alpha, args.k_max, args.pairs_budget,
                       args.decorrelate, args.seed, laplacian=args.laplacian,
                       exhaustive=args.exhaustive, restarts=args.restarts)
    out = _mkdir(args.out)
    stem = f"{path.stem}.{args.preset}"
    meta = {"dataset": path.stem, "source": str(path), "preset": args.preset, "m": data.m,
            "n": n, "k_max": args.k_max, "pairs_budget": args.pairs_budget,
            "decorrelate": bool(args.decorrelate), "laplacian": bool(args.laplacian),
            "seed": args.seed}
    write_json(result_to_dict(res, **meta), out / f"{stem}.json")
    for k, Y in res.assignments_per_k.items():
        write_labels(Y.labels, out / f"{stem}.k{k}.labels.csv")
    write_labels(res.labels, out / f"{stem}.labels.csv")
    if args.save_embedding:
        write_embedding(res.embedding, out / f"{stem}.embedding.csv", out / f"{stem}.embedding.json")
    print(f"{path.name} [{args.preset}] k={res.k_selected} ({res.stopped_reason})")
    return EXIT_OK


def _config(args, noise_grid) -> ExperimentConfig:
    return ExperimentConfig(
        m=args.m, noise_grid=noise_grid, replicates=args.replicates,
        graph_presets=args.preset or list(PRESETS), n=args.n if args.n is not None else 200,
        alpha=args.alpha, k_max=args.k_max, pairs_budget=args.pairs_budget, seed_base=args.seed,
        decorrelate=True if args.decorrelate else None, output_dir=args.out, restarts=args.restarts,
    )


def _rows_as_dicts(rows):
    return [{"shape": r.cell.shape, "preset": r.cell.preset, "noise": r.cell.noise, "n": r.cell.n,
             "k_selected": "" if r.k_selected is None else r.k_selected} for r in rows]


def cmd_sweep_noise(args) -> int:
    cfg = _config(args, args.noise)
    rows = sweep_noise(cfg, shapes=args.shape or list(SHAPES))
    out = _mkdir(args.out)
    write_sweep_csv(rows, out / "sweep_noise.csv", NOISE_COLUMNS)
    (out / "sweep_noise.svg").write_text(sweep_svg(_rows_as_dicts(rows), "noise", cfg.k_max), encoding="utf-8")
    failed = sum(r.status != "ok" for r in rows)
    print(f"{len(rows)} cells, {failed} failed; results in {out}")
    return EXIT_OK


def cmd_sweep_n(args) -> int:
    cfg = _config(args, [args.noise])
    rows = sweep_n(cfg, n_grid=args.n_grid, shapes=args.shape or list(SHAPES), noise=args.noise)
    out = _mkdir(args.out)
    write_sweep_csv(rows, out / "sweep_n.csv", N_COLUMNS)
    (out / "sweep_n.svg").write_text(sweep_svg(_rows_as_dicts(rows), "n", cfg.k_max), encoding="utf-8")
    failed = sum(r.status != "ok" for r in rows)
    print(f"{len(rows)} cells, {failed} failed; results in {out}")
    return EXIT_OK


def cmd_report(args) -> int:
    results = Path(args.results_dir)
    if not results.is_dir():
        raise FileNotFoundError(f"results directory not found: {results}")
    text = build_report(results, args.csv)
    if not text.strip():
        raise FileNotFoundError(f"no estimate results in {results}")
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "estimate": cmd_estimate,
    "sweep-noise": cmd_sweep_noise,
    "sweep-n": cmd_sweep_n,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except NumericError as exc:
        print(f"specialk: numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InvalidArgumentError, ParseError, OSError, ValueError) as exc:
        print(f"specialk: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
