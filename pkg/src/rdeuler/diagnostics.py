"""Conservation bookkeeping and error norms.

The global angular momentum comes in two discrete flavors matching the
two correction families: a per-element quadrature over the DOF anchor
positions, and a lumped sum over basis moment anchors. A run must
measure J with the same flavor its correction enforces, or exactness is
lost to quadrature mismatch. Both flavors weight each DOF with a single
anchor value, so the functional stays well defined on periodic meshes.
"""

import numpy as np

from .errors import ConfigError


def totals(disc, u):
    """Lumped integrals of the conserved variables, shape (4,)."""
    return (disc.c_sigma[:, None] * u).sum(axis=0)


def total_j(disc, u, order="high_order"):
    """Global angular momentum in the requested discrete form."""
    if order == "second_order":
        m = u[disc.elem_dofs][:, :, 1:3]
        w = disc.a_el[..., 0] * m[..., 1] - disc.a_el[..., 1] * m[..., 0]
        return float(((disc.areas / disc.n_loc) * w.sum(axis=1)).sum())
    if order == "high_order":
        w = disc.y_sigma[:, 0] * u[:, 2] - disc.y_sigma[:, 1] * u[:, 1]
        return float((disc.c_sigma * w).sum())
    raise ConfigError(f"unknown angular momentum form {order!r}")


def j_form_for(degree, correction):
    """Measurement flavor consistent with a run's correction setup."""
    if correction == "second_order":
        return "second_order"
    if correction == "high_order":
        return "high_order"
    return "second_order" if degree == 1 else "high_order"


def error_norms(disc, u, ref):
    """L1, L2 and Linf of the expanded difference u - ref, per variable.

    The coefficient difference is evaluated at the volume quadrature
    points, so the norms measure the finite element function itself
    rather than its control values.
    """
    diff = (u - ref)[disc.elem_dofs]
    e_q = np.einsum("qs,esc->eqc", disc.vol_B, diff)
    l1 = np.einsum("eq,eqc->c", disc.vol_w, np.abs(e_q))
    l2 = np.sqrt(np.einsum("eq,eqc->c", disc.vol_w, e_q * e_q))
    linf = np.abs(e_q).max(axis=(0, 1))
    return l1, l2, linf


LEDGER_COLUMNS = ("t", "mass", "mx", "my", "E", "J", "dJ")


class ConservationLedger:
    """Per-step conservation record, written out as CSV."""

    def __init__(self, disc, j_order="high_order"):
        self.disc = disc
        self.j_order = j_order
        self.rows = []
        self.j0 = None

    def append(self, t, u):
        if self.rows and t < self.rows[-1][0]:
            raise ConfigError("ledger rows must advance in time")
        mass, mx, my, en = totals(self.disc, u)
        j = total_j(self.disc, u, self.j_order)
        if self.j0 is None:
            self.j0 = j
        self.rows.append((t, mass, mx, my, en, j, j - self.j0))

    @property
    def max_j_deviation(self):
        return max((abs(r[6]) for r in self.rows), default=0.0)

    def write_csv(self, path):
        with open(path, "w") as fh:
            fh.write(",".join(LEDGER_COLUMNS) + "\n")
            for row in self.rows:
                fh.write(",".join(repr(float(v)) for v in row) + "\n")
