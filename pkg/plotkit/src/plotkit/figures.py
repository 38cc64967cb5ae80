"""Figure builders: deviation curves, field pseudocolor, convergence.

Each builder returns the matplotlib Figure so callers and tests can
inspect the plotted arrays; passing an output path also writes the
image. The plotted data are taken from the input files unchanged, so a
figure built twice from the same inputs carries identical arrays.
"""

import os
from dataclasses import dataclass

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.tri import Triangulation

from .readers import InputError, Snapshot, read_ledger, read_study, read_vtk

# deviations of exactly zero cannot sit on a log axis; they are clamped
# to this floor, well below anything a double-precision run produces
PLOT_FLOOR = 1e-17

KINDS = ("deviation", "field", "convergence")

VTK_TRIANGLE = 5
VTK_QUAD = 9


@dataclass
class FigureSpec:
    """One figure request: inputs, kind, labels, output path."""
    inputs: tuple
    kind: str
    out: str
    labels: tuple = None
    variable: str = None

    def __post_init__(self):
        if isinstance(self.inputs, (str, os.PathLike)):
            self.inputs = (self.inputs,)
        self.inputs = tuple(self.inputs)
        if not self.inputs:
            raise InputError("a figure needs at least one input file")
        if self.kind not in KINDS:
            raise InputError(f"unknown figure kind {self.kind!r}")
        if self.labels is not None:
            self.labels = tuple(self.labels)
            if len(self.labels) != len(self.inputs):
                raise InputError(
                    f"{len(self.labels)} labels for {len(self.inputs)} "
                    "inputs")
        if self.kind == "field":
            if len(self.inputs) != 1:
                raise InputError("a field figure takes exactly one snapshot")
            if not self.variable:
                raise InputError("a field figure needs a variable name")


def render(spec: FigureSpec):
    """Build the figure a FigureSpec describes and write it to spec.out."""
    if spec.kind == "deviation":
        return plot_deviation(spec.inputs, spec.labels, spec.out)
    if spec.kind == "field":
        return plot_field(spec.inputs[0], spec.variable, spec.out)
    return plot_convergence(spec.inputs, spec.labels, spec.out)


def _default_labels(paths, labels):
    if labels is not None:
        if len(labels) != len(paths):
            raise InputError(f"{len(labels)} labels for {len(paths)} inputs")
        return list(labels)
    return [os.path.splitext(os.path.basename(p))[0] for p in paths]


def plot_deviation(ledgers, labels=None, out=None):
    """Angular momentum departure versus time, one curve per ledger.

    The y axis is logarithmic and shows |dJ| clamped at PLOT_FLOOR, so
    an exactly conserved run draws a flat line at the floor.
    """
    if isinstance(ledgers, (str, os.PathLike)):
        ledgers = (ledgers,)
    labels = _default_labels(ledgers, labels)
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for path, label in zip(ledgers, labels):
        data = read_ledger(path)
        dev = np.maximum(np.abs(data["dJ"]), PLOT_FLOOR)
        ax.semilogy(data["t"], dev, label=label)
    ax.set_xlabel("t")
    ax.set_ylabel("|J(t) - J(0)|")
    ax.set_title("Departure of angular momentum from its initial value")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    if out is not None:
        fig.savefig(out, dpi=160)
    return fig


def field_values(snap: Snapshot, variable):
    """Point values of one field; vector fields give their magnitude."""
    if variable not in snap.point_data:
        known = ", ".join(sorted(snap.point_data))
        raise InputError(f"no point data named {variable!r} (have: {known})")
    vals = snap.point_data[variable]
    if vals.ndim == 2:
        return np.hypot(vals[:, 0], vals[:, 1])
    return vals


def _triangulate(snap: Snapshot):
    """Triangulation over the snapshot's cells; quads split along a
    diagonal."""
    tris = []
    for cell, ctype in zip(snap.cells, snap.cell_types):
        if ctype == VTK_TRIANGLE:
            tris.append(cell)
        elif ctype == VTK_QUAD:
            tris.append([cell[0], cell[1], cell[2]])
            tris.append([cell[0], cell[2], cell[3]])
        else:
            raise InputError(f"cannot draw cell type {ctype}")
    return Triangulation(snap.points[:, 0], snap.points[:, 1], tris)


def plot_field(snapshot, variable, out=None):
    """Pseudocolor of one point-data field on the snapshot's mesh."""
    snap = snapshot if isinstance(snapshot, Snapshot) else read_vtk(snapshot)
    values = field_values(snap, variable)
    tri = _triangulate(snap)
    fig, ax = plt.subplots(figsize=(6.4, 5.2))
    mesh = ax.tripcolor(tri, values, shading="gouraud")
    fig.colorbar(mesh, ax=ax, label=variable)
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_title(variable)
    fig.tight_layout()
    if out is not None:
        fig.savefig(out, dpi=160)
    return fig


def plot_convergence(studies, labels=None, out=None):
    """Log-log error versus mesh size, one curve per study table.

    The legend shows each study's finest observed order when the table
    carries one.
    """
    if isinstance(studies, (str, os.PathLike)):
        studies = (studies,)
    labels = _default_labels(studies, labels)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    for path, label in zip(studies, labels):
        data = read_study(path)
        order = data["order"][-1] if len(data["order"]) else np.nan
        if np.isfinite(order):
            label = f"{label} (order {order:.2f})"
        ax.loglog(data["h"], data["l2_rho"], marker="o", label=label)
    ax.set_xlabel("h")
    ax.set_ylabel("L2(rho) error")
    ax.grid(True, which="both", alpha=0.3)
    ax.legend()
    fig.tight_layout()
    if out is not None:
        fig.savefig(out, dpi=160)
    return fig
