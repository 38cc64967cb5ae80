"""End-to-end tests of the run driver and its on-disk artifacts."""

import json
import os

import numpy as np
import pytest

from rdeuler import driver, euler
from rdeuler.config import RunConfig
from rdeuler.errors import ConfigError


def read_ledger(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        rows = [[float(v) for v in line.split(",")] for line in fh]
    return header, np.array(rows)


def tiny_gresho(out_dir, **overrides):
    kw = dict(case="gresho", out_dir=out_dir, scheme="galerkin_cip", degree=1,
              correction="second_order", final_time=0.02, snapshots=2,
              resolution=6)
    kw.update(overrides)
    return RunConfig(**kw)


def test_run_artifacts(tmp_path):
    cfg = tiny_gresho(str(tmp_path / "out"))
    res = driver.run(cfg)
    assert res.status == "ok"
    assert res.steps > 0
    assert abs(res.t_final - 0.02) < 1e-12

    names = sorted(os.listdir(cfg.out_dir))
    assert "ledger.csv" in names
    assert "summary.json" in names
    assert "final.vtk" in names
    assert "snap_0000.vtk" in names and "snap_0002.vtk" in names

    header, data = read_ledger(os.path.join(cfg.out_dir, "ledger.csv"))
    assert header == ["t", "mass", "mx", "my", "E", "J", "dJ"]
    assert data.shape[0] == res.steps + 1
    assert data[0, 0] == 0.0
    assert np.all(np.diff(data[:, 0]) > 0)
    assert abs(data[-1, 0] - res.t_final) < 1e-12

    with open(os.path.join(cfg.out_dir, "summary.json")) as fh:
        summary = json.load(fh)
    assert summary["status"] == "ok"
    assert summary["steps"] == res.steps
    assert summary["blow_up_time"] is None
    assert summary["max_j_deviation"] == res.max_j_deviation
    # gresho has no exact reference, so no error norms are reported
    assert summary["final_norms"] is None


def test_run_is_reproducible(tmp_path):
    res_a = driver.run(tiny_gresho(str(tmp_path / "a")))
    res_b = driver.run(tiny_gresho(str(tmp_path / "b")))
    assert res_a.steps == res_b.steps
    for name in ("ledger.csv", "final.vtk"):
        with open(tmp_path / "a" / name, "rb") as fh:
            blob_a = fh.read()
        with open(tmp_path / "b" / name, "rb") as fh:
            blob_b = fh.read()
        assert blob_a == blob_b


def test_no_snapshots_requested(tmp_path):
    cfg = tiny_gresho(str(tmp_path / "out"), snapshots=0)
    driver.run(cfg)
    names = os.listdir(cfg.out_dir)
    assert not any(n.startswith("snap_") for n in names)
    assert "final.vtk" in names


def test_blow_up_is_captured(tmp_path):
    # a shock run with the jump stabilization switched off goes unstable
    cfg = RunConfig(case="sod", out_dir=str(tmp_path / "out"),
                    scheme="galerkin_cip", degree=1, correction="off",
                    theta_cip=0.0, snapshots=0, resolution=16)
    res = driver.run(cfg)
    assert res.status == "blow_up"
    assert res.blow_up_time is not None
    assert 0.0 < res.blow_up_time < 0.16
    assert res.steps > 0

    # the ledger holds only accepted steps and the final state is admissible
    header, data = read_ledger(os.path.join(cfg.out_dir, "ledger.csv"))
    assert data.shape[0] == res.steps + 1
    assert np.all(res.u[:, 0] > 0)
    assert np.all(euler.pressure(res.u, cfg.gamma, check=False) > 0)
    assert os.path.exists(os.path.join(cfg.out_dir, "final.vtk"))

    with open(os.path.join(cfg.out_dir, "summary.json")) as fh:
        summary = json.load(fh)
    assert summary["status"] == "blow_up"
    assert summary["blow_up_time"] == res.blow_up_time


def test_vortex_run_reports_error_norms(tmp_path):
    cfg = RunConfig(case="vortex", out_dir=str(tmp_path / "out"),
                    scheme="rusanov", degree=1, correction="off",
                    final_time=0.05, snapshots=0, resolution=8)
    res = driver.run(cfg)
    assert res.status == "ok"
    assert set(res.final_norms) == {"l1", "l2", "linf"}
    for key in ("l1", "l2", "linf"):
        vals = res.final_norms[key]
        assert len(vals) == 4
        assert all(np.isfinite(v) and v >= 0 for v in vals)


def test_convergence_study(tmp_path):
    cfg = RunConfig(case="vortex", out_dir=str(tmp_path / "study"),
                    scheme="rusanov", degree=1, correction="off",
                    final_time=0.05, snapshots=0)
    rows = driver.convergence_study(cfg, [8, 12])
    assert [r[0] for r in rows] == [8, 12]
    h8, h12 = rows[0][1], rows[1][1]
    assert h12 < h8
    assert rows[0][3] is None and rows[1][3] is not None

    assert os.path.isdir(tmp_path / "study" / "mesh_8")
    assert os.path.isdir(tmp_path / "study" / "mesh_12")
    with open(tmp_path / "study" / "study.csv") as fh:
        lines = fh.read().splitlines()
    assert lines[0] == "resolution,h,l2_rho,order"
    assert len(lines) == 3
    first = lines[1].split(",")
    assert int(first[0]) == 8
    assert float(first[1]) == h8
    assert first[3] == ""


def test_convergence_study_needs_reference(tmp_path):
    cfg = tiny_gresho(str(tmp_path / "out"))
    with pytest.raises(ConfigError):
        driver.convergence_study(cfg, [6, 8])


def test_convergence_study_needs_two_meshes(tmp_path):
    cfg = RunConfig(case="vortex", out_dir=str(tmp_path / "out"))
    with pytest.raises(ConfigError):
        driver.convergence_study(cfg, [8])
