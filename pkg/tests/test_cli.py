import json

import numpy as np
import pytest

from specialk.cli import main
from specialk.datagen import load_csv, make_blobs, save_csv
from specialk.experiments import NOISE_GRID, ExperimentConfig, read_sweep_csv, sweep_noise
from specialk.report import read_rows_csv, render_markdown, table_rows, load_results, write_rows_csv


def test_generate_file_count(tmp_path):
    assert main(["generate", "--shape", "moons", "--m", "40", "--noise", "0.0,0.1",
                 "--replicates", "2", "--out", str(tmp_path)]) == 0
    files = sorted(p.name for p in tmp_path.glob("*.csv"))
    assert files == ["moons_0.000_0.csv", "moons_0.000_1.csv", "moons_0.100_0.csv", "moons_0.100_1.csv"]


def test_generate_reproducible(tmp_path):
    args = ["generate", "--shape", "blobs", "--m", "30", "--noise", "0.05", "--replicates", "1"]
    main(args + ["--out", str(tmp_path / "a")])
    main(args + ["--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "blobs_0.050_0.csv").read_bytes() == (tmp_path / "b" / "blobs_0.050_0.csv").read_bytes()


def test_generate_full_grid(tmp_path):
    assert len(NOISE_GRID) == 10 and NOISE_GRID[-1] == 0.225
    main(["generate", "--shape", "blobs", "--m", "9", "--out", str(tmp_path)])
    assert len(list(tmp_path.glob("*.csv"))) == 50


@pytest.fixture
def blobs_csv(tmp_path):
    path = tmp_path / "blobs.csv"
    save_csv(make_blobs(300, 0.05, seed=2), path)
    return path


def test_estimate_writes_json_and_labels(tmp_path, blobs_csv, capsys):
    out = tmp_path / "res"
    code = main(["estimate", str(blobs_csv), "--labels", "--preset", "wr", "--n", "100",
                 "--out", str(out), "--exhaustive", "--save-embedding"])
    assert code == 0
    obj = json.loads((out / "blobs.wr.json").read_text())
    assert obj["schema"] == "specialk/1" and obj["k_selected"] == 3
    assert [e["k"] for e in obj["per_k"]] == [1, 2, 3, 4, 5]
    assert obj["per_k"][2]["nmi"] > 0.9
    rep = obj["per_k"][1]["reports"][0]
    assert list(rep) == ["pair", "t", "p", "log10_p", "sigma2", "J_size", "n_eff", "decision"]
    labels = np.loadtxt(out / "blobs.wr.labels.csv", dtype=int)
    assert labels.shape == (300,) and len(set(labels)) == 3
    assert (out / "blobs.wr.k4.labels.csv").exists()
    assert (out / "blobs.wr.embedding.csv").exists()
    assert "k=3" in capsys.readouterr().out


def test_estimate_is_byte_identical(tmp_path, blobs_csv):
    for d in ("a", "b"):
        main(["estimate", str(blobs_csv), "--labels", "--n", "60", "--out", str(tmp_path / d)])
    assert (tmp_path / "a" / "blobs.wr.json").read_bytes() == (tmp_path / "b" / "blobs.wr.json").read_bytes()


def test_estimate_laplacian_switch(tmp_path, blobs_csv):
    assert main(["estimate", str(blobs_csv), "--n", "40", "--laplacian", "--out", str(tmp_path)]) == 0
    assert json.loads((tmp_path / "blobs.wr.json").read_text())["laplacian"] is True


def test_estimate_missing_file(tmp_path, capsys):
    missing = tmp_path / "nope.csv"
    assert main(["estimate", str(missing)]) == 2
    assert str(missing) in capsys.readouterr().err


def test_estimate_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert main(["estimate", str(bad)]) == 2
    assert "row 2" in capsys.readouterr().err


def test_estimate_n_too_large(tmp_path, blobs_csv):
    assert main(["estimate", str(blobs_csv), "--n", "5000", "--out", str(tmp_path)]) == 2


def test_report_table(tmp_path, blobs_csv, capsys):
    res = tmp_path / "res"
    for preset in ("wr", "wc"):
        main(["estimate", str(blobs_csv), "--labels", "--preset", preset, "--n", "100",
              "--exhaustive", "--out", str(res)])
    capsys.readouterr()
    csv_path = tmp_path / "table.csv"
    assert main(["report", str(res), "--csv", str(csv_path)]) == 0
    text = capsys.readouterr().out
    lines = [l for l in text.splitlines() if l.startswith("| ") and l[2].isdigit()]
    assert [l.split("|")[1].strip() for l in lines] == ["2", "3", "4", "5"]
    assert "WC NMI" in text and "WR p" in text
    bold_rows = [l for l in lines if "**" in l]
    assert len(bold_rows) >= 1 and bold_rows[0].split("|")[1].strip() == "3"
    # CSV round trip reproduces the Markdown.
    assert render_markdown(read_rows_csv(csv_path)) == text


def test_report_missing_dir(tmp_path):
    assert main(["report", str(tmp_path / "none")]) == 2


def test_report_empty_dir(tmp_path):
    assert main(["report", str(tmp_path)]) == 2


def test_report_selections(tmp_path):
    results = [{"schema": "specialk/1", "dataset": "d", "preset": "wr", "k_max": 4, "k_selected": 2,
                "per_k": [{"k": 1, "nmi": 0.0, "p_max": None, "log10_p_max": None},
                          {"k": 2, "nmi": 0.5, "p_max": 1e-20, "log10_p_max": -20.0},
                          {"k": 3, "nmi": 0.6, "p_max": 1.0, "log10_p_max": 0.0}]}]
    rows = table_rows(results)
    assert [r["k"] for r in rows] == [2, 3, 4]
    assert [r["selected"] for r in rows] == [True, False, False]
    md = render_markdown(rows)
    assert "| 2 | **0.500** | **1e-20** |" in md and "| 4 | - | - |" in md
    write_rows_csv(rows, tmp_path / "r.csv")
    assert render_markdown(read_rows_csv(tmp_path / "r.csv")) == md


def test_sweep_noise_cli(tmp_path):
    assert main(["sweep-noise", "--shape", "random", "--m", "120", "--noise", "0.0,0.1",
                 "--replicates", "2", "--n", "30", "--restarts", "2", "--out", str(tmp_path)]) == 0
    rows = read_sweep_csv(tmp_path / "sweep_noise.csv")
    assert len(rows) == 2 * 2 * 2
    assert list(rows[0]) == ["shape", "preset", "noise", "replicate", "k_selected", "status"]
    assert all(r["status"] == "ok" for r in rows)
    svg = (tmp_path / "sweep_noise.svg").read_text()
    assert svg.startswith("<svg") and "<circle" in svg


def test_sweep_noise_deterministic_and_threaded(tmp_path, monkeypatch):
    args = ["sweep-noise", "--shape", "blobs", "--m", "90", "--noise", "0.0,0.05",
            "--replicates", "2", "--n", "30", "--restarts", "2"]
    main(args + ["--out", str(tmp_path / "a")])
    monkeypatch.setenv("SPECIALK_THREADS", "3")
    main(args + ["--out", str(tmp_path / "b")])
    for name in ("sweep_noise.csv", "sweep_noise.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_sweep_n_cli(tmp_path):
    assert main(["sweep-n", "--shape", "blobs", "--m", "90", "--n-grid", "20,30", "--replicates", "1",
                 "--preset", "wr", "--restarts", "2", "--out", str(tmp_path)]) == 0
    rows = read_sweep_csv(tmp_path / "sweep_n.csv")
    assert [r["n"] for r in rows] == ["20", "30"] and rows[0]["noise"] == "0.1"


def test_sweep_records_failures():
    # m too small for the 10-neighbor graph: the cell fails, the sweep continues.
    cfg = ExperimentConfig(shape_tag="random", m=8, noise_grid=[0.0], replicates=1, n=4)
    rows = sweep_noise(cfg)
    assert len(rows) == 2 and all(r.status.startswith("error") for r in rows)
    assert all(r.k_selected is None for r in rows)


def test_generated_csv_loads_with_labels(tmp_path):
    main(["generate", "--shape", "circles", "--m", "20", "--noise", "0.1", "--replicates", "1",
          "--out", str(tmp_path)])
    d = load_csv(tmp_path / "circles_0.100_0.csv", has_labels=True)
    assert d.m == 20 and d.n_classes == 2
