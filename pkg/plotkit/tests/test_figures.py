"""Figure tests: the plotted arrays must equal the fixture data exactly."""

import csv
import os

import numpy as np
import pytest

from plotkit import (FigureSpec, InputError, PLOT_FLOOR, plot_convergence,
                     plot_deviation, plot_field, read_vtk, render)
from plotkit.figures import _triangulate, field_values

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fx(name):
    return os.path.join(FIXTURES, name)


def csv_columns(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    head, body = rows[0], rows[1:]
    return {name: np.array([float(r[i]) if r[i] else np.nan for r in body])
            for i, name in enumerate(head)}


def scan_point_block(path, header_line, width):
    """Independent scan of one point-data block of a VTK file."""
    lines = [ln.strip() for ln in open(path)]
    n = next(int(ln.split()[1]) for ln in lines
             if ln.startswith("POINT_DATA"))
    i = lines.index(header_line)
    skip = 2 if header_line.startswith("SCALARS") else 1
    vals = np.array([[float(v) for v in ln.split()]
                     for ln in lines[i + skip:i + skip + n]])
    return vals[:, 0] if width == 1 else vals


def test_deviation_overlay_matches_fixtures(tmp_path):
    out = tmp_path / "dev.png"
    fig = plot_deviation(
        [fx("ledger_corrected.csv"), fx("ledger_uncorrected.csv")],
        labels=["corrected", "uncorrected"], out=out)
    ax = fig.axes[0]
    assert ax.get_yscale() == "log"
    assert [ln.get_label() for ln in ax.lines] == ["corrected",
                                                   "uncorrected"]
    for line, name in zip(ax.lines, ("ledger_corrected.csv",
                                     "ledger_uncorrected.csv")):
        cols = csv_columns(fx(name))
        assert np.array_equal(line.get_xdata(), cols["t"])
        assert np.array_equal(line.get_ydata(),
                              np.maximum(np.abs(cols["dJ"]), PLOT_FLOOR))
    assert out.read_bytes()[:4] == b"\x89PNG"


def test_deviation_default_labels_are_file_stems():
    fig = plot_deviation([fx("ledger_corrected.csv")])
    assert fig.axes[0].lines[0].get_label() == "ledger_corrected"


def test_deviation_zero_curve_sits_on_floor(tmp_path):
    path = tmp_path / "flat.csv"
    rows = ["t,mass,mx,my,E,J,dJ"]
    for k in range(5):
        rows.append(f"{0.1 * k},1.0,0.0,0.0,2.5,3.0,0.0")
    path.write_text("\n".join(rows) + "\n")
    fig = plot_deviation([path])
    y = fig.axes[0].lines[0].get_ydata()
    assert np.all(y == PLOT_FLOOR)


def test_deviation_rejects_empty_ledger(tmp_path):
    path = tmp_path / "empty.csv"
    path.write_text("t,mass,mx,my,E,J,dJ\n")
    with pytest.raises(InputError):
        plot_deviation([path])


def test_deviation_rejects_schema_mismatch(tmp_path):
    path = tmp_path / "other.csv"
    path.write_text("t,J\n0.0,1.0\n")
    with pytest.raises(InputError):
        plot_deviation([path])


def test_deviation_rejects_label_count_mismatch():
    with pytest.raises(InputError):
        plot_deviation([fx("ledger_corrected.csv")], labels=["a", "b"])


@pytest.mark.parametrize("snapshot,variable", [
    ("gresho_tri.vtk", "p"),
    ("sod_quad.vtk", "rho"),
])
def test_field_plots_fixture_values_exactly(tmp_path, snapshot, variable):
    out = tmp_path / "field.png"
    fig = plot_field(fx(snapshot), variable, out=out)
    assert len(fig.axes) == 2
    plotted = np.asarray(fig.axes[0].collections[0].get_array())
    want = scan_point_block(fx(snapshot),
                            f"SCALARS {variable} double", width=1)
    assert np.array_equal(plotted, want)
    assert out.read_bytes()[:4] == b"\x89PNG"


def test_field_velocity_plots_magnitude():
    fig = plot_field(fx("gresho_tri.vtk"), "velocity")
    plotted = np.asarray(fig.axes[0].collections[0].get_array())
    vec = scan_point_block(fx("gresho_tri.vtk"),
                           "VECTORS velocity double", width=3)
    assert np.array_equal(plotted, np.hypot(vec[:, 0], vec[:, 1]))


def test_field_rejects_unknown_variable():
    with pytest.raises(InputError, match="have: J, p, rho, velocity"):
        plot_field(fx("gresho_tri.vtk"), "vorticity")


def test_quads_are_split_into_two_triangles():
    snap = read_vtk(fx("sod_quad.vtk"))
    tri = _triangulate(snap)
    assert tri.triangles.shape == (2 * len(snap.cells), 3)


def test_triangles_pass_through_unsplit():
    snap = read_vtk(fx("gresho_tri.vtk"))
    tri = _triangulate(snap)
    assert tri.triangles.shape == (len(snap.cells), 3)


def test_field_values_requires_known_name():
    snap = read_vtk(fx("gresho_tri.vtk"))
    with pytest.raises(InputError):
        field_values(snap, "entropy")


def test_convergence_matches_fixture(tmp_path):
    out = tmp_path / "conv.png"
    fig = plot_convergence([fx("study.csv")], labels=["B1"], out=out)
    ax = fig.axes[0]
    assert ax.get_xscale() == "log" and ax.get_yscale() == "log"
    cols = csv_columns(fx("study.csv"))
    line = ax.lines[0]
    assert np.array_equal(line.get_xdata(), cols["h"])
    assert np.array_equal(line.get_ydata(), cols["l2_rho"])
    assert line.get_label().startswith("B1 (order ")
    assert out.read_bytes()[:4] == b"\x89PNG"


def test_plots_are_deterministic():
    ledgers = [fx("ledger_corrected.csv"), fx("ledger_uncorrected.csv")]
    first = plot_deviation(ledgers)
    second = plot_deviation(ledgers)
    for a, b in zip(first.axes[0].lines, second.axes[0].lines):
        assert np.array_equal(a.get_xdata(), b.get_xdata())
        assert np.array_equal(a.get_ydata(), b.get_ydata())


def test_figure_spec_validation():
    with pytest.raises(InputError):
        FigureSpec(inputs=(), kind="deviation", out="x.png")
    with pytest.raises(InputError):
        FigureSpec(inputs=("a.csv",), kind="scatter", out="x.png")
    with pytest.raises(InputError):
        FigureSpec(inputs=("a.vtk", "b.vtk"), kind="field", out="x.png",
                   variable="p")
    with pytest.raises(InputError):
        FigureSpec(inputs=("a.vtk",), kind="field", out="x.png")
    with pytest.raises(InputError):
        FigureSpec(inputs=("a.csv",), kind="deviation", out="x.png",
                   labels=("one", "two"))


def test_render_dispatches_every_kind(tmp_path):
    specs = [
        FigureSpec(inputs=(fx("ledger_corrected.csv"),), kind="deviation",
                   out=str(tmp_path / "a.png")),
        FigureSpec(inputs=(fx("gresho_tri.vtk"),), kind="field",
                   out=str(tmp_path / "b.png"), variable="rho"),
        FigureSpec(inputs=(fx("study.csv"),), kind="convergence",
                   out=str(tmp_path / "c.png")),
    ]
    for spec in specs:
        render(spec)
        assert os.path.getsize(spec.out) > 0
