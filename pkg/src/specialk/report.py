"""Per-k tables of NMI and merge-test bounds from saved estimate results."""

from __future__ import annotations

import csv
import json
import math
import os
from collections import OrderedDict
from pathlib import Path

from .experiments import SCHEMA, fmt_str

COLUMNS = ("dataset", "preset", "k", "nmi", "p", "log10_p", "selected")


def load_results(results_dir) -> list[dict]:
    """All estimate JSON files in ``results_dir`` carrying the current schema."""
    results = []
    for path in sorted(Path(results_dir).glob("*.json")):
        try:
            with open(path, encoding="utf-8") as fh:
                obj = json.load(fh)
        except (OSError, json.JSONDecodeError):
            continue
        if isinstance(obj, dict) and obj.get("schema") == SCHEMA and "per_k" in obj:
            results.append(obj)
    return results


def table_rows(results: list[dict]) -> list[dict]:
    """Flatten results to one row per (dataset, preset, k) with k >= 2."""
    rows = []
    for res in results:
        by_k = {e["k"]: e for e in res["per_k"]}
        k_max = res.get("k_max", max(by_k))
        for k in range(2, k_max + 1):
            e = by_k.get(k, {})
            rows.append({
                "dataset": res.get("dataset", "?"),
                "preset": res.get("preset", "?"),
                "k": k,
                "nmi": e.get("nmi"),
                "p": e.get("p_max"),
                "log10_p": e.get("log10_p_max"),
                "selected": k == res["k_selected"],
            })
    return rows


def write_rows_csv(rows, path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            w.writerow([r["dataset"], r["preset"], r["k"], fmt_str(r["nmi"]), fmt_str(r["p"]),
                        fmt_str(r["log10_p"]), int(bool(r["selected"]))])


def read_rows_csv(path) -> list[dict]:
    def num(s):
        return None if s == "" else float(s)

    with open(path, newline="", encoding="utf-8") as fh:
        return [{"dataset": r["dataset"], "preset": r["preset"], "k": int(r["k"]),
                 "nmi": num(r["nmi"]), "p": num(r["p"]), "log10_p": num(r["log10_p"]),
                 "selected": r["selected"] == "1"} for r in csv.DictReader(fh)]


def _fmt_p(p, log10_p):
    if p is None:
        return "-"
    if p < 1e-3:
        exponent = round(log10_p) if log10_p is not None else round(math.log10(max(p, 1e-300)))
        return f"1e{exponent}"
    return f"{p:.3f}"


def _fmt_nmi(v):
    return "-" if v is None else f"{v:.3f}"


def render_markdown(rows) -> str:
    """One Markdown table per dataset, NMI and p columns per preset; selected k in bold."""
    datasets = OrderedDict()
    for r in rows:
        datasets.setdefault(r["dataset"], OrderedDict()).setdefault(r["preset"], {})[r["k"]] = r
    out = []
    for name, presets in datasets.items():
        order = sorted(presets, key=lambda p: ("wc", "wr").index(p) if p in ("wc", "wr") else 9)
        ks = sorted({k for table in presets.values() for k in table})
        out.append(f"### {name}\n")
        header = ["k"] + [f"{p.upper()} {col}" for p in order for col in ("NMI", "p")]
        out.append("| " + " | ".join(header) + " |")
        out.append("|" + "|".join(["---:"] * len(header)) + "|")
        for k in ks:
            cells = [str(k)]
            for p in order:
                r = presets[p].get(k)
                if r is None:
                    cells += ["-", "-"]
                    continue
                nmi_s, p_s = _fmt_nmi(r["nmi"]), _fmt_p(r["p"], r["log10_p"])
                if r["selected"]:
                    nmi_s, p_s = f"**{nmi_s}**", f"**{p_s}**"
                cells += [nmi_s, p_s]
            out.append("| " + " | ".join(cells) + " |")
        out.append("")
    return "\n".join(out)


def build_report(results_dir, csv_path: str | os.PathLike | None = None) -> str:
    rows = table_rows(load_results(results_dir))
    if csv_path is not None:
        write_rows_csv(rows, csv_path)
    return render_markdown(rows)
