"""Readers for the solver's output files.

Three formats, all plain text: the conserved-quantity ledger CSV, the
convergence study CSV, and legacy ASCII VTK unstructured-grid
snapshots. Anything that does not match the documented layout raises
InputError instead of being guessed at.
"""

import csv
import os
from dataclasses import dataclass, field

import numpy as np

LEDGER_COLUMNS = ("t", "mass", "mx", "my", "E", "J", "dJ")
STUDY_COLUMNS = ("resolution", "h", "l2_rho", "order")


class InputError(ValueError):
    """An input file is missing, malformed, or lacks a required field."""


def read_ledger(path):
    """Ledger CSV -> dict of column name to float array.

    The header must match the conserved-quantity schema exactly and at
    least one data row must follow it.
    """
    rows = _read_csv(path)
    if not rows or tuple(rows[0]) != LEDGER_COLUMNS:
        raise InputError(
            f"{path}: expected ledger header {','.join(LEDGER_COLUMNS)}")
    body = rows[1:]
    if not body:
        raise InputError(f"{path}: ledger has no data rows")
    data = np.empty((len(body), len(LEDGER_COLUMNS)))
    for i, row in enumerate(body):
        if len(row) != len(LEDGER_COLUMNS):
            raise InputError(f"{path}: row {i + 2} has {len(row)} fields")
        try:
            data[i] = [float(v) for v in row]
        except ValueError as err:
            raise InputError(f"{path}: row {i + 2}: {err}") from err
    return {name: data[:, k].copy() for k, name in enumerate(LEDGER_COLUMNS)}


def read_study(path):
    """Convergence study CSV -> dict of column arrays.

    The 'order' field is empty on the coarsest mesh and becomes NaN.
    """
    rows = _read_csv(path)
    if not rows or tuple(rows[0]) != STUDY_COLUMNS:
        raise InputError(
            f"{path}: expected study header {','.join(STUDY_COLUMNS)}")
    body = rows[1:]
    if not body:
        raise InputError(f"{path}: study has no data rows")
    out = {name: [] for name in STUDY_COLUMNS}
    for i, row in enumerate(body):
        if len(row) != len(STUDY_COLUMNS):
            raise InputError(f"{path}: row {i + 2} has {len(row)} fields")
        try:
            out["resolution"].append(int(row[0]))
            out["h"].append(float(row[1]))
            out["l2_rho"].append(float(row[2]))
            out["order"].append(float(row[3]) if row[3] else np.nan)
        except ValueError as err:
            raise InputError(f"{path}: row {i + 2}: {err}") from err
    return {name: np.array(vals) for name, vals in out.items()}


def _read_csv(path):
    if not os.path.isfile(path):
        raise InputError(f"input file not found: {path}")
    with open(path, newline="") as fh:
        return [row for row in csv.reader(fh) if row]


@dataclass
class Snapshot:
    """One parsed VTK snapshot.

    points: (n, 3) coordinates; cells: connectivity per cell;
    cell_types: VTK type id per cell; point_data: field name to value
    array, shape (n,) for scalars and (n, 3) for vectors.
    """
    points: np.ndarray
    cells: list = field(default_factory=list)
    cell_types: np.ndarray = None
    point_data: dict = field(default_factory=dict)

    @property
    def n_points(self):
        return self.points.shape[0]


def read_vtk(path):
    """Parse a legacy ASCII VTK unstructured-grid file into a Snapshot."""
    if not os.path.isfile(path):
        raise InputError(f"input file not found: {path}")
    with open(path) as fh:
        lines = fh.read().splitlines()
    if len(lines) < 5 or not lines[0].startswith("# vtk DataFile"):
        raise InputError(f"{path}: not a legacy VTK file")
    # line 1 is the free-form title; everything after is whitespace
    # separated tokens
    toks = "\n".join(lines[2:]).split()
    cur = 0

    def take(n):
        nonlocal cur
        if cur + n > len(toks):
            raise InputError(f"{path}: truncated file")
        chunk = toks[cur:cur + n]
        cur += n
        return chunk

    def take_floats(n):
        try:
            return np.array([float(t) for t in take(n)])
        except ValueError as err:
            raise InputError(f"{path}: bad number: {err}") from err

    def take_int():
        tok = take(1)[0]
        try:
            return int(tok)
        except ValueError as err:
            raise InputError(f"{path}: expected a count, got {tok!r}") from err

    if take(1)[0] != "ASCII":
        raise InputError(f"{path}: only ASCII files are supported")
    if take(2) != ["DATASET", "UNSTRUCTURED_GRID"]:
        raise InputError(f"{path}: not an unstructured grid")

    snap = Snapshot(points=np.empty((0, 3)))
    n_data = None
    while cur < len(toks):
        key = take(1)[0]
        if key == "POINTS":
            n = take_int()
            take(1)  # dtype
            snap.points = take_floats(3 * n).reshape(n, 3)
        elif key == "CELLS":
            m = take_int()
            size = take_int()
            flat = [int(t) for t in take(size)]
            pos = 0
            for _ in range(m):
                k = flat[pos]
                snap.cells.append(flat[pos + 1:pos + 1 + k])
                pos += 1 + k
            if pos != size:
                raise InputError(f"{path}: cell list size mismatch")
        elif key == "CELL_TYPES":
            m = take_int()
            snap.cell_types = np.array([int(t) for t in take(m)])
        elif key == "POINT_DATA":
            n_data = take_int()
            if n_data != snap.n_points:
                raise InputError(
                    f"{path}: POINT_DATA count {n_data} does not match "
                    f"{snap.n_points} points")
        elif key == "SCALARS":
            name = take(1)[0]
            take(1)  # dtype; the optional component count is not written
            if take(2) != ["LOOKUP_TABLE", "default"]:
                raise InputError(f"{path}: SCALARS {name} needs a "
                                 "default lookup table")
            if n_data is None:
                raise InputError(f"{path}: SCALARS before POINT_DATA")
            snap.point_data[name] = take_floats(n_data)
        elif key == "VECTORS":
            name = take(1)[0]
            take(1)  # dtype
            if n_data is None:
                raise InputError(f"{path}: VECTORS before POINT_DATA")
            snap.point_data[name] = take_floats(3 * n_data).reshape(n_data, 3)
        else:
            raise InputError(f"{path}: unsupported section {key!r}")
    if snap.n_points == 0 or not snap.cells:
        raise InputError(f"{path}: no mesh in file")
    if snap.cell_types is None or len(snap.cell_types) != len(snap.cells):
        raise InputError(f"{path}: cell types do not match cells")
    return snap
