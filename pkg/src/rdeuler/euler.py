"""Compressible Euler equations in 2D conservative variables.

State vectors are ordered (rho, m_x, m_y, E) along the last axis. All
functions are vectorised over leading axes. The angular momentum density
J = x ^ m and its flux G are first-class citizens here because the
correction layer needs them at quadrature points.
"""

import numpy as np

from .errors import StateError

GAMMA_DEFAULT = 1.4


def wedge(a, b):
    """z-component of the 2D cross product, a ^ b = a_x b_y - a_y b_x."""
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def perp(a):
    """Rotate by +90 degrees: perp(a) = (-a_y, a_x), so a ^ perp(a) = |a|^2."""
    return np.stack([-a[..., 1], a[..., 0]], axis=-1)


def conservative(rho, v, p, gamma=GAMMA_DEFAULT):
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    p = np.asarray(p, dtype=float)
    E = p / (gamma - 1.0) + 0.5 * rho * (v**2).sum(axis=-1)
    return np.stack([rho, rho * v[..., 0], rho * v[..., 1], E], axis=-1)


def pressure(u, gamma=GAMMA_DEFAULT, check=True):
    rho = u[..., 0]
    p = (gamma - 1.0) * (u[..., 3] - 0.5 * (u[..., 1] ** 2 + u[..., 2] ** 2) / rho)
    if check:
        bad = ~((rho > 0) & (p > 0))
        if np.any(bad):
            idx = np.argwhere(bad)[0]
            raise StateError(
                f"non-admissible state at index {tuple(idx)}: "
                f"rho={rho[tuple(idx)]:.3e} p={p[tuple(idx)]:.3e}",
                where=tuple(idx))
    return p


def velocity(u):
    return u[..., 1:3] / u[..., 0:1]


def sound_speed(u, gamma=GAMMA_DEFAULT, check=True):
    p = pressure(u, gamma, check=check)
    return np.sqrt(gamma * p / u[..., 0])


def max_speed(u, gamma=GAMMA_DEFAULT, check=True):
    """|v| + c, the largest wave speed over all directions."""
    v = velocity(u)
    return np.hypot(v[..., 0], v[..., 1]) + sound_speed(u, gamma, check=check)


def flux(u, gamma=GAMMA_DEFAULT, check=True):
    """Flux tensor f(u), shape (..., 4, 2); f[..., :, d] is the d-direction flux."""
    p = pressure(u, gamma, check=check)
    v = velocity(u)
    out = np.empty(u.shape + (2,))
    for d in range(2):
        vd = v[..., d]
        out[..., 0, d] = u[..., d + 1]
        out[..., 1, d] = u[..., 1] * vd
        out[..., 2, d] = u[..., 2] * vd
        out[..., 3, d] = (u[..., 3] + p) * vd
    out[..., 1, 0] += p
    out[..., 2, 1] += p
    return out


def normal_flux(u, n, gamma=GAMMA_DEFAULT, check=True):
    """f(u) . n for unit normals n, shape (..., 4)."""
    f = flux(u, gamma, check=check)
    return f[..., 0] * n[..., None, 0] + f[..., 1] * n[..., None, 1]


def angular_flux(u, x, gamma=GAMMA_DEFAULT, check=True):
    """Flux of J = x ^ m: G_d = x ^ (momentum block of f_d), shape (..., 2)."""
    f = flux(u, gamma, check=check)
    return (x[..., 0, None] * f[..., 2, :] - x[..., 1, None] * f[..., 1, :])


def jacobians(u, gamma=GAMMA_DEFAULT):
    """Flux Jacobians (A, B) = (df_x/du, df_y/du), each shape (..., 4, 4)."""
    g1 = gamma - 1.0
    v = velocity(u)
    vx, vy = v[..., 0], v[..., 1]
    k = 0.5 * (vx**2 + vy**2)
    H = (u[..., 3] + pressure(u, gamma, check=False)) / u[..., 0]
    z = np.zeros_like(vx)
    o = np.ones_like(vx)
    A = np.stack([
        np.stack([z, o, z, z], axis=-1),
        np.stack([g1 * k - vx**2, (3 - gamma) * vx, -g1 * vy, g1 * o], axis=-1),
        np.stack([-vx * vy, vy, vx, z], axis=-1),
        np.stack([vx * (g1 * k - H), H - g1 * vx**2, -g1 * vx * vy, gamma * vx], axis=-1),
    ], axis=-2)
    B = np.stack([
        np.stack([z, z, o, z], axis=-1),
        np.stack([-vx * vy, vy, vx, z], axis=-1),
        np.stack([g1 * k - vy**2, -g1 * vx, (3 - gamma) * vy, g1 * o], axis=-1),
        np.stack([vy * (g1 * k - H), -g1 * vx * vy, H - g1 * vy**2, gamma * vy], axis=-1),
    ], axis=-2)
    return A, B


def rusanov_flux(uL, uR, n, gamma=GAMMA_DEFAULT, check=True):
    """Two-state Rusanov numerical flux through unit normal n."""
    fL = normal_flux(uL, n, gamma, check=check)
    fR = normal_flux(uR, n, gamma, check=check)
    vL = velocity(uL)
    vR = velocity(uR)
    qL = vL[..., 0] * n[..., 0] + vL[..., 1] * n[..., 1]
    qR = vR[..., 0] * n[..., 0] + vR[..., 1] * n[..., 1]
    s = np.maximum(np.abs(qL) + sound_speed(uL, gamma, check=check),
                   np.abs(qR) + sound_speed(uR, gamma, check=check))
    return 0.5 * (fL + fR) - 0.5 * s[..., None] * (uR - uL)


def mirror_state(u, n):
    """Reflect the normal velocity component: slip wall ghost state."""
    vn = u[..., 1] * n[..., 0] + u[..., 2] * n[..., 1]
    out = u.copy()
    out[..., 1] -= 2.0 * vn * n[..., 0]
    out[..., 2] -= 2.0 * vn * n[..., 1]
    return out


def characteristic_basis(u, d, gamma=GAMMA_DEFAULT):
    """Right and left eigenvector matrices of the flux Jacobian along d.

    d must hold unit vectors. Returns (R, L) with rows of L and columns of
    R ordered (q_n - c, q_n, shear, q_n + c), so L @ R = I.
    """
    rho = u[..., 0]
    p = pressure(u, gamma)
    c = np.sqrt(gamma * p / rho)
    v = velocity(u)
    vx, vy = v[..., 0], v[..., 1]
    n1, n2 = d[..., 0], d[..., 1]
    t1, t2 = -n2, n1
    qn = vx * n1 + vy * n2
    vt = vx * t1 + vy * t2
    k = 0.5 * (vx**2 + vy**2)
    H = (u[..., 3] + p) / rho
    o = np.ones_like(rho)
    z = np.zeros_like(rho)
    R = np.stack([
        np.stack([o, o, z, o], axis=-1),
        np.stack([vx - c * n1, vx, t1 * o, vx + c * n1], axis=-1),
        np.stack([vy - c * n2, vy, t2 * o, vy + c * n2], axis=-1),
        np.stack([H - c * qn, k, vt, H + c * qn], axis=-1),
    ], axis=-2)
    b = (gamma - 1.0) / c**2
    L = np.stack([
        0.5 * np.stack([b * k + qn / c, -(b * vx + n1 / c), -(b * vy + n2 / c), b], axis=-1),
        np.stack([1.0 - b * k, b * vx, b * vy, -b], axis=-1),
        np.stack([-vt, t1 * o, t2 * o, z], axis=-1),
        0.5 * np.stack([b * k - qn / c, -(b * vx - n1 / c), -(b * vy - n2 / c), b], axis=-1),
    ], axis=-2)
    return R, L
