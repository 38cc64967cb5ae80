"""Explicit deferred-correction time stepping for the residual schemes.

A step subdivides [t_n, t_n + dt] into M equal sub-intervals and iterates

    |C_sigma| (u^{p+1}_(l) - u^p_(l)) = -[L2(U^p)]_(l),

which is the defect correction update written with the low-order operator
inverted (it is diagonal). The high-order operator combines a per-element
time part with theta-weighted spatial residuals at all sub-step states;
M+1 iterations give order M+1. Angular momentum corrections hook into the
assembled element and boundary-face residuals of every sub-step before
the update.
"""

import numpy as np

from . import correction as corr
from . import euler, residuals
from .errors import ConfigError, StateError, StepFailureError

CORRECTION_MODES = ("off", "second_order", "high_order")


def theta_table(n_sub):
    """Integration weights of the Lagrange interpolant on the sub-grid.

    theta[k, l-1] integrates the k-th cardinal polynomial from 0 to l/M as
    a fraction of the step, so a column sums to l/M and degree-M
    polynomials are integrated exactly.
    """
    if n_sub not in (1, 2):
        raise ConfigError(f"unsupported sub-step count {n_sub}; use 1 or 2")
    nodes = np.arange(n_sub + 1) / n_sub
    th = np.zeros((n_sub + 1, n_sub))
    for k in range(n_sub + 1):
        others = np.delete(nodes, k)
        poly = np.polynomial.Polynomial.fromroots(others)
        anti = (poly / poly(nodes[k])).integ()
        for l in range(1, n_sub + 1):
            th[k, l - 1] = anti(nodes[l]) - anti(0.0)
    return th


def compute_dt(disc, u, cfl, gamma=euler.GAMMA_DEFAULT, dt_max=np.inf):
    """CFL time step from per-element size over fastest wave speed."""
    speed = euler.max_speed(u[disc.elem_dofs], gamma).max(axis=1)
    dt = cfl * float((disc.h_elem / speed).min()) / (2 * disc.degree - 1)
    return min(dt, dt_max)


def l1_apply(disc, U, dt, r0):
    """Low-order operator: lumped time change plus frozen spatial part.

    U is the sub-step stack (M+1, n_dof, 4); r0 the DOF-assembled spatial
    residual at the initial state. Returns (M, n_dof, 4) for l = 1..M.
    """
    n_sub = U.shape[0] - 1
    out = np.empty((n_sub, U.shape[1], 4))
    for l in range(1, n_sub + 1):
        out[l - 1] = (disc.c_sigma[:, None] * (U[l] - U[0])
                      + (l / n_sub) * dt * r0)
    return out


def scatter_parts(disc, elem, bf):
    """Accumulate element and boundary-face residual arrays onto DOFs."""
    out = np.zeros((disc.n_dof, 4))
    np.add.at(out, disc.elem_dofs, elem)
    if bf is not None and disc.n_bf:
        np.add.at(out, disc.elem_dofs[disc.bf_elem], bf)
    return out


class DecIntegrator:
    """Carries the discretization, scheme and step policy of one run."""

    def __init__(self, disc, scheme, bcs=None, n_sub=1, n_iter=None,
                 correction="off"):
        if correction not in CORRECTION_MODES:
            raise ConfigError(f"unknown correction mode {correction!r}")
        if correction == "second_order" and disc.degree != 1:
            raise ConfigError("the geometric correction form needs degree 1")
        self.disc = disc
        self.scheme = scheme
        self.bcs = bcs or {}
        self.n_sub = n_sub
        self.n_iter = (n_sub + 1) if n_iter is None else n_iter
        if self.n_iter < 1:
            raise ConfigError("need at least one correction iteration")
        self.correction = correction
        self.theta = theta_table(n_sub)
        self.lumped_time = scheme.name in ("rusanov", "psi_cip")

    def _time_part(self, du_el):
        disc = self.disc
        if self.lumped_time:
            return (disc.areas / disc.n_loc)[:, None, None] * du_el
        return np.einsum("est,etc->esc", disc.mass, du_el)

    def _combine(self, U, parts, dt, l):
        """Assemble the sub-step-l element/boundary residuals of one sweep."""
        disc, scheme = self.disc, self.scheme
        th = self.theta[:, l - 1]
        u_el = U[l][disc.elem_dofs]
        du_el = u_el - U[0][disc.elem_dofs]
        elem = self._time_part(du_el)
        space = sum(th[k] * parts[k].elem for k in range(len(parts)))
        elem = elem + dt * space
        if scheme.name == "psi_cip":
            ubar = u_el.mean(axis=1)
            elem = residuals.psi_limit(elem, ubar, scheme.gamma,
                                       scheme.velocity_floor)
            if parts[0].jump is not None:
                elem = elem + dt * sum(
                    th[k] * parts[k].jump for k in range(len(parts)))
        bf = None
        if disc.n_bf:
            bf = dt * sum(th[k] * parts[k].bf for k in range(len(parts)))
        if self.correction != "off":
            gflux = dt * sum(
                th[k] * parts[k].gflux_elem for k in range(len(parts)))
            m_now = u_el[:, :, 1:3]
            m_0 = U[0][disc.elem_dofs][:, :, 1:3]
            r_el = corr.element_correction(disc, elem, m_now, m_0, gflux,
                                           self.correction)
            r_bf = None
            if disc.n_bf:
                gflux_bf = dt * sum(
                    th[k] * parts[k].gflux_bf for k in range(len(parts)))
                r_bf = corr.boundary_face_correction(disc, bf, gflux_bf,
                                                     self.correction)
            corr.apply_corrections(disc, elem, bf, r_el, r_bf)
        return elem, bf

    def _spatial(self, u, t):
        return residuals.spatial_residuals(self.disc, u, self.scheme,
                                           self.bcs, t)

    def l2_apply(self, U, dt, t=0.0):
        """High-order operator values for l = 1..M at the given stack."""
        parts0 = self._spatial(U[0], t)
        parts = [parts0] + [self._spatial(U[k], t) for k in range(1, U.shape[0])]
        out = np.empty((self.n_sub, self.disc.n_dof, 4))
        for l in range(1, self.n_sub + 1):
            elem, bf = self._combine(U, parts, dt, l)
            out[l - 1] = scatter_parts(self.disc, elem, bf)
        return out

    def step(self, u, dt, t=0.0, track_defect=False):
        """Advance one time step; returns (u_next, info).

        info carries the theta-weighted boundary flux of the accepted
        update (for conservation accounting) and, on request, the defect
        norms of successive iterates.
        """
        disc = self.disc
        n_sub = self.n_sub
        U = np.repeat(u[None, :, :], n_sub + 1, axis=0)
        defects = [] if track_defect else None
        info = {"boundary_flux": np.zeros(4), "gflux_boundary": 0.0}
        try:
            parts0 = self._spatial(u, t)
            for p in range(self.n_iter):
                if p == 0:
                    parts = [parts0] * (n_sub + 1)
                else:
                    parts = [parts0] + [self._spatial(U[k], t)
                                        for k in range(1, n_sub + 1)]
                new_u = U.copy()
                defect = 0.0
                for l in range(1, n_sub + 1):
                    elem, bf = self._combine(U, parts, dt, l)
                    l2 = scatter_parts(disc, elem, bf)
                    new_u[l] = U[l] - l2 / disc.c_sigma[:, None]
                    if track_defect:
                        defect += float((l2 * l2).sum())
                    if l == n_sub:
                        th = self.theta[:, l - 1]
                        info["boundary_flux"] = sum(
                            th[k] * parts[k].bflux_total
                            for k in range(len(parts)))
                        if disc.n_bf:
                            info["gflux_boundary"] = float(sum(
                                th[k] * parts[k].gflux_bf.sum()
                                for k in range(len(parts))))
                if track_defect:
                    defects.append(np.sqrt(defect))
                U = new_u
            euler.pressure(U[n_sub], self.scheme.gamma, check=True)
            if track_defect:
                l2_final = self.l2_apply(U, dt, t)
                defects.append(float(np.sqrt((l2_final ** 2).sum())))
        except StateError as err:
            raise StepFailureError(f"inadmissible state: {err}", time=t) from err
        info["defects"] = defects
        return U[n_sub], info
