import csv
import json

import pytest

from dtn_krein.cli import CSV_HEADER, fd_ratio, main
from dtn_krein.boundary_model import q_at, q_derivative
from dtn_krein.elliptic_assembly import GridSpec, build

SMALL = """\
grid.nx = 5
grid.ny = 5
sweep.re_count = 5
sweep.im_count = 3
sweep.real_count = 3
"""


@pytest.fixture
def small_cfg(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL)
    return str(p)


def run(*argv):
    return main(["--quiet" if a == "-Q" else a for a in argv])


def test_verify_writes_report(tmp_path, small_cfg):
    out = tmp_path / "out"
    assert run("verify", "--config", small_cfg, "--out", str(out), "-Q") == 0
    rep = json.loads((out / "report.json").read_text())
    assert rep["command"] == "verify"
    assert rep["summary"]["passed"] and rep["summary"]["failed"] == 0
    m = rep["models"][0]
    assert {"model_hash", "checks", "skipped", "krein_reports"} <= set(m)
    kr = m["krein_reports"][0]
    assert {"lambda", "krein_residual", "trace", "singular_values", "rank", "schatten"} <= set(kr)
    assert kr["rank"] <= m["n_boundary"]


def test_verify_toy_skips_singular_points(tmp_path):
    cfg = tmp_path / "toy.cfg"
    cfg.write_text("model.preset = toy\nlambda.points = 0, 1, 2, i\n")
    out = tmp_path / "out"
    assert run("verify", "--config", str(cfg), "--out", str(out), "-Q") == 0
    rep = json.loads((out / "report.json").read_text())
    reasons = {(s["lambda"]["re"], s["suite"]) for s in rep["skipped"]}
    # lambda = 2 is the Dirichlet eigenvalue, lambda = 1 the Neumann one
    assert any(re == 2.0 for re, _ in reasons)
    assert any(re == 1.0 for re, _ in reasons)


def test_verify_failing_tolerance_exits_one(tmp_path, small_cfg):
    cfg = tmp_path / "strict.cfg"
    cfg.write_text(SMALL + "tol.krein = 1e-300\n")
    assert run("verify", "--config", str(cfg), "--out", str(tmp_path / "o"), "-Q") == 1
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["summary"]["failed"] > 0


def test_config_errors_exit_two(tmp_path):
    bad = tmp_path / "bad.cfg"
    bad.write_text("tol.krein = 0\n")
    out = tmp_path / "o"
    assert run("verify", "--config", str(bad), "--out", str(out), "-Q") == 2
    assert not out.exists()
    assert run("verify", "--preset", "random", "--out", str(out), "-Q") == 2
    assert run("verify", "--seed", "-1", "-Q") == 2
    assert run("frobnicate") == 2


def test_sweep_csv_layout_and_determinism(tmp_path, small_cfg):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("dtn-sweep", "--config", small_cfg, "--out", str(out), "-Q") == 0
    ta = (a / "dtn_sweep.csv").read_bytes()
    assert ta == (b / "dtn_sweep.csv").read_bytes()
    rows = list(csv.reader(ta.decode().splitlines()))
    assert rows[0] == list(CSV_HEADER)
    # 4 explicit points + 5x3 rectangle + 3 real points
    assert len(rows) - 1 == 4 + 15 + 3


def test_sweep_random_is_seed_deterministic(tmp_path, monkeypatch):
    cfg = tmp_path / "r.cfg"
    cfg.write_text("random.count = 2\nrandom.n_interior = 8\nrandom.n_boundary = 3\n"
                   "sweep.re_count = 3\nsweep.im_count = 2\n")
    outs = []
    for k, threads in enumerate(("0", "3", "0")):
        monkeypatch.setenv("DTN_KREIN_THREADS", threads)
        out = tmp_path / f"o{k}"
        seed = "99" if k < 2 else "100"
        assert run("dtn-sweep", "--config", str(cfg), "--preset", "random", "--seed", seed,
                   "--out", str(out), "-Q") == 0
        outs.append((out / "dtn_sweep.csv").read_bytes())
    assert outs[0] == outs[1]
    assert outs[0] != outs[2]


def test_toy_sweep_row_value(tmp_path):
    cfg = tmp_path / "toy.cfg"
    cfg.write_text("model.preset = toy\nlambda.points = 0\nsweep.re_count = 1\n"
                   "sweep.im_count = 1\nsweep.real_count = 1\n")
    out = tmp_path / "o"
    assert run("dtn-sweep", "--config", str(cfg), "--out", str(out), "-Q") == 0
    rows = list(csv.DictReader((out / "dtn_sweep.csv").read_text().splitlines()))
    first = rows[0]
    assert float(first["fro_norm_q"]) == 0.5
    assert float(first["min_eig_re_q"]) == -0.5
    assert first["skipped"] == "0"


def test_characterize_and_couple_verify(tmp_path):
    out = tmp_path / "o"
    assert run("characterize", "--preset", "toy", "--out", str(out), "-Q") == 0
    rep = json.loads((out / "characterization.json").read_text())
    r = rep["models"][0]["report"]
    assert r["simplicity"]["simple"] is True
    assert len(r["gamma"]["norm_over_eta"]) == 3

    assert run("couple-verify", "--preset", "path3", "--out", str(out), "-Q") == 0
    rep = json.loads((out / "couple_report.json").read_text())
    assert rep["command"] == "couple-verify" and rep["summary"]["passed"]
    assert all(k["site"] == "coupled" for k in rep["models"][0]["krein_reports"])


def test_couple_verify_needs_exterior(tmp_path):
    assert run("couple-verify", "--preset", "toy", "--out", str(tmp_path), "-Q") == 2


def test_fd_ratio_second_order():
    m = build(GridSpec(8, 8))
    errs, ratio = fd_ratio(lambda z: q_at(m, z), q_derivative(m, 1j), 1j)
    assert errs[1] < errs[0]
    assert 3.5 <= ratio <= 4.5
