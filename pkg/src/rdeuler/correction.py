"""Momentum-residual corrections restoring local angular momentum balance.

Each kernel returns per-DOF momentum perturbations r with two exact
properties: the r sum to zero (so momentum conservation is untouched) and
their anchor-wedge sum equals a prescribed defect psi. Adding r to the
momentum rows of an assembled residual therefore moves the discrete
angular momentum balance onto its target without changing anything else.

Anchors differ by order: the geometric DOF positions x_sigma at second
order, the basis moment vectors y_sigma at high order. Both are stored
per DOF, hence single-valued across periodic identifications, which is
what makes the element-wise balances telescope into a global one. The
triangle gets a closed-form kernel; every other element/face shape uses
the mean-centered perpendicular construction, which solves the two
constraints for any anchor set with nonzero spread.
"""

import numpy as np

from . import euler
from .errors import ConfigError, DegenerateElementError

ORDERS = ("second_order", "high_order")


def _edge_scale(*points):
    best = 0.0
    for q in points[1:]:
        d = q - points[0]
        best = np.maximum(best, (d * d).sum(axis=-1))
    return best


def triangle_correction(psi, x1, x2, x3):
    """Closed-form kernel on a triangle: r_i proportional to opposite edges.

    Works batched over leading axes; psi has shape (...,), vertices (..., 2).
    Returns (r1, r2, r3).
    """
    area2 = euler.wedge(x2 - x1, x3 - x1)
    if np.any(np.abs(area2) <= 1e-14 * _edge_scale(x1, x2, x3)):
        raise DegenerateElementError("triangle too flat for the correction kernel")
    r = psi / (2.0 * area2)
    return (r[..., None] * (x2 - x3),
            r[..., None] * (x3 - x1),
            r[..., None] * (x1 - x2))


def tet_correction(psi, x1, x2, x3, x4):
    """Closed-form kernel on a tetrahedron; psi is a 3-vector here.

    Built from the ansatz r_j = alpha_j e + beta_j e' on edge directions,
    with the pairings beta_3 = -beta_4, alpha_4 = -beta_2, alpha_2 =
    -alpha_3 that make the three constraint projections decouple.
    """
    e2, e3, e4 = x2 - x1, x3 - x1, x4 - x1
    tau = -np.einsum("...i,...i->...", e2, np.cross(e3, e4))
    if np.any(np.abs(tau) <= 1e-14 * _edge_scale(x1, x2, x3, x4) ** 1.5):
        raise DegenerateElementError("tetrahedron too flat for the correction kernel")
    den = (2.0 * tau)[..., None]
    dot = lambda a, b: (a * b).sum(axis=-1)[..., None]
    alpha2 = dot(psi, e4) / den
    beta3 = dot(psi, e2) / den
    alpha4 = dot(psi, e3) / den
    r2 = alpha2 * (x1 - x3) - alpha4 * (x1 - x4)
    r3 = -alpha2 * (x1 - x2) + beta3 * (x1 - x4)
    r4 = alpha4 * (x1 - x2) - beta3 * (x1 - x3)
    r1 = -(r2 + r3 + r4)
    return r1, r2, r3, r4


def _perp_kernel(psi, anchors, what):
    """Mean-centered perpendicular solution of the two constraints.

    anchors: (..., n, 2); psi: (...,). Returns (..., n, 2).
    """
    dev = anchors - anchors.mean(axis=-2, keepdims=True)
    # one re-centering pass: the first subtraction leaves a rounding
    # residue of order eps times the anchor magnitude, which would make
    # the zero-sum property degrade when the spread is much smaller than
    # the anchors themselves
    dev = dev - dev.mean(axis=-2, keepdims=True)
    spread = (dev * dev).sum(axis=(-2, -1))
    scale = (anchors * anchors).sum(axis=(-2, -1)) + 1.0
    if np.any(spread <= 1e-14 * scale):
        raise DegenerateElementError(f"coincident anchors on a {what}")
    alpha = psi / spread
    return alpha[..., None, None] * euler.perp(dev)


def ho_correction(psi, anchors):
    """Perp kernel over an element's moment anchors."""
    return _perp_kernel(psi, anchors, "element")


def boundary_correction(psi, anchors):
    """Perp kernel over the DOF anchors of one boundary face."""
    if anchors.shape[-2] < 2:
        raise ConfigError("boundary correction needs at least two face DOFs")
    return _perp_kernel(psi, anchors, "boundary face")


def element_correction(disc, resid, m_now, m_0, gflux_int, order):
    """Correction vectors for every element of one sub-step update.

    resid holds the full assembled space-time residuals (n_e, n_loc, 4);
    m_now and m_0 the momentum DOF values at the current iterate and at
    sub-step zero; gflux_int the time-integrated boundary quadrature of
    the angular flux, Dt sum_k theta_k oint x^(f_m(u_(k)).n).
    """
    if order not in ORDERS:
        raise ConfigError(f"unknown correction order {order!r}")
    resid_m = resid[:, :, 1:3]
    if order == "second_order":
        anchors = disc.a_el
        dj = euler.wedge(anchors, m_now - m_0).sum(axis=1)
        phi_j = (disc.areas / disc.n_loc) * dj + gflux_int
        psi = phi_j - euler.wedge(anchors, resid_m).sum(axis=1)
        if disc.mesh.kind == "tri" and disc.degree == 1:
            r = np.stack(
                triangle_correction(psi, anchors[:, 0], anchors[:, 1],
                                    anchors[:, 2]), axis=1)
        else:
            r = _perp_kernel(psi, anchors, "element")
    else:
        y_el = disc.y_sigma[disc.elem_dofs]
        defect = (-euler.wedge(y_el, resid_m).sum(axis=1)
                  + disc.areas * euler.wedge(disc.z_moment, m_now - m_0).sum(axis=1)
                  + gflux_int)
        r = ho_correction(defect, y_el)
    return r


def boundary_face_correction(disc, resid_bf, gflux_bf_int, order):
    """Correction vectors on boundary faces, restricted to face DOFs."""
    if disc.n_bf == 0:
        return None
    rows = np.arange(disc.n_bf)[:, None]
    fd = disc.bf_fdofs
    resid_m = resid_bf[rows, fd, 1:3]
    if order == "second_order":
        anchors = disc.a_el[disc.bf_elem[:, None], fd]
    else:
        gdofs = disc.elem_dofs[disc.bf_elem[:, None], fd]
        anchors = disc.y_sigma[gdofs]
    psi = gflux_bf_int - euler.wedge(anchors, resid_m).sum(axis=1)
    return boundary_correction(psi, anchors)


def apply_corrections(disc, resid, resid_bf, r_elem, r_bf):
    """Add correction vectors onto the momentum rows, in place."""
    resid[:, :, 1:3] += r_elem
    if r_bf is not None and resid_bf is not None:
        rows = np.arange(disc.n_bf)[:, None]
        resid_bf[rows, disc.bf_fdofs, 1:3] += r_bf
