"""Tests for INI parsing and run configuration validation."""

import pytest

from rdeuler.config import RunConfig, load_config
from rdeuler.errors import ConfigError


def write(tmp_path, text, name="run.ini"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


FULL = """
[run]
case = gresho
scheme = psi_cip
degree = 2
correction = high_order
cfl = 0.25
final_time = 0.16
snapshots = 4
theta_cip = 0.05
gamma = 1.4

[mesh]
source = generator
resolution = 12
"""


def test_full_config_parses(tmp_path):
    cfg = load_config(write(tmp_path, FULL))
    assert cfg.case == "gresho"
    assert cfg.scheme == "psi_cip"
    assert cfg.degree == 2
    assert cfg.correction == "high_order"
    assert cfg.cfl == 0.25
    assert cfg.final_time == 0.16
    assert cfg.snapshots == 4
    assert cfg.theta_cip == 0.05
    assert cfg.resolution == 12
    assert cfg.n_sub == 2  # defaults to the degree


def test_minimal_config(tmp_path):
    cfg = load_config(write(tmp_path, "[run]\ncase = sod\n"))
    assert cfg.case == "sod"
    assert cfg.scheme == "galerkin_cip"
    assert cfg.degree == 1
    assert cfg.correction == "off"
    assert cfg.cfl is None and cfg.final_time is None
    assert cfg.mesh_source == "generator" and cfg.mesh_kind == "tri"


def test_mesh_section_renames(tmp_path):
    text = "[run]\ncase = vortex\n[mesh]\nkind = quad\nresolution = 8\n"
    cfg = load_config(write(tmp_path, text))
    assert cfg.mesh_kind == "quad"
    assert cfg.resolution == 8


def test_case_section_beta(tmp_path):
    text = "[run]\ncase = four_vortex\n[case]\nbeta = 8\n"
    cfg = load_config(write(tmp_path, text))
    assert cfg.beta == 8.0


def test_unknown_section_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "[run]\ncase = sod\n[solver]\nx = 1\n"))


def test_unknown_key_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "[run]\ncase = sod\nscheem = rusanov\n"))


def test_bad_value_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "[run]\ncase = sod\ndegree = two\n"))


def test_missing_case_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(write(tmp_path, "[run]\nscheme = rusanov\n"))


def test_missing_file_rejected(tmp_path):
    with pytest.raises(ConfigError):
        load_config(str(tmp_path / "nope.ini"))


def test_validation_unknown_names():
    with pytest.raises(ConfigError):
        RunConfig(case="blast")
    with pytest.raises(ConfigError):
        RunConfig(case="sod", scheme="muscl")
    with pytest.raises(ConfigError):
        RunConfig(case="sod", correction="first_order")
    with pytest.raises(ConfigError):
        RunConfig(case="sod", degree=3)


def test_validation_incompatible_choices():
    with pytest.raises(ConfigError):
        RunConfig(case="sod", correction="second_order", degree=2)
    with pytest.raises(ConfigError):
        RunConfig(case="sod", mesh_kind="quad", degree=2)
    with pytest.raises(ConfigError):
        RunConfig(case="sod", mesh_kind="hex")
    with pytest.raises(ConfigError):
        RunConfig(case="sod", resolution=1)
    with pytest.raises(ConfigError):
        RunConfig(case="sod", cfl=-0.5)
    with pytest.raises(ConfigError):
        RunConfig(case="sod", snapshots=-1)


def test_validation_file_source(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig(case="sod", mesh_source="file")
    with pytest.raises(ConfigError):
        RunConfig(case="sod", mesh_source="file",
                  mesh_path=str(tmp_path / "missing.msh"))
    mesh = tmp_path / "box.msh"
    mesh.write_text("$MeshFormat\n")
    cfg = RunConfig(case="sod", mesh_source="file", mesh_path=str(mesh))
    assert cfg.mesh_path == str(mesh)


def test_n_sub_override():
    cfg = RunConfig(case="sod", degree=2, n_sub=1)
    assert cfg.n_sub == 1
