"""Legacy ASCII VTK snapshots of the solution fields.

Quadratic triangles are emitted as four straight-sided sub-triangles per
element so any VTK reader can render them without higher-order cell
support. Point data: density, velocity, pressure, and pointwise angular
momentum x ^ m at the DOF positions. On periodic meshes the cells that
wrap a seam appear stretched across the box; the data itself is correct.
"""

import numpy as np

from . import euler

SUBTRIS = ((0, 3, 4), (3, 1, 5), (4, 5, 2), (3, 5, 4))


def _cells(disc):
    """(connectivity rows, vtk cell type) for the discretization."""
    if disc.degree == 1:
        ctype = 5 if disc.mesh.kind == "tri" else 9
        return [list(row) for row in disc.elem_dofs], ctype
    rows = []
    for el in disc.elem_dofs:
        for sub in SUBTRIS:
            rows.append([el[s] for s in sub])
    return rows, 5


def write_vtk(path, disc, u, gamma=euler.GAMMA_DEFAULT, title="fields"):
    x = disc.dof_positions()
    rho = u[:, 0]
    v = u[:, 1:3] / rho[:, None]
    p = euler.pressure(u, gamma, check=False)
    j = x[:, 0] * u[:, 2] - x[:, 1] * u[:, 1]
    cells, ctype = _cells(disc)

    def fmt(val):
        return f"{val:.16e}"

    with open(path, "w") as fh:
        fh.write("# vtk DataFile Version 3.0\n")
        fh.write(title + "\n")
        fh.write("ASCII\n")
        fh.write("DATASET UNSTRUCTURED_GRID\n")
        fh.write(f"POINTS {disc.n_dof} double\n")
        for px, py in x:
            fh.write(f"{fmt(px)} {fmt(py)} 0.0\n")
        fh.write(f"CELLS {len(cells)} {sum(len(c) + 1 for c in cells)}\n")
        for c in cells:
            fh.write(" ".join(str(i) for i in [len(c)] + c) + "\n")
        fh.write(f"CELL_TYPES {len(cells)}\n")
        for _ in cells:
            fh.write(f"{ctype}\n")
        fh.write(f"POINT_DATA {disc.n_dof}\n")
        fh.write("SCALARS rho double\nLOOKUP_TABLE default\n")
        for val in rho:
            fh.write(fmt(val) + "\n")
        fh.write("VECTORS velocity double\n")
        for vx, vy in v:
            fh.write(f"{fmt(vx)} {fmt(vy)} 0.0\n")
        fh.write("SCALARS p double\nLOOKUP_TABLE default\n")
        for val in p:
            fh.write(fmt(val) + "\n")
        fh.write("SCALARS J double\nLOOKUP_TABLE default\n")
        for val in j:
            fh.write(fmt(val) + "\n")
