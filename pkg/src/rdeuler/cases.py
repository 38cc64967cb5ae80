"""Benchmark initial conditions and run setups.

Each case provides a primitive-variable initializer, boundary kinds per
mesh tag, a default mesh builder, and run defaults (final time, CFL).
Initializers are vectorized over leading axes of the position array and
return [rho, vx, vy, p] stacked on the last axis.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .meshing import disc_mesh, make_periodic, rect_mesh

VORTEX_BOX = 20.0


def _vortex_bump(dx, dy, beta, gamma):
    """Primitive perturbation of one isentropic vortex at offset (dx, dy)."""
    r2 = dx * dx + dy * dy
    fac = beta / (2.0 * np.pi) * np.exp(0.5 * (1.0 - r2))
    rho = (1.0 - (gamma - 1.0) * beta ** 2 / (8.0 * gamma * np.pi ** 2)
           * np.exp(1.0 - r2)) ** (1.0 / (gamma - 1.0))
    return rho, fac


def _check_beta(beta, gamma):
    core = 1.0 - (gamma - 1.0) * beta ** 2 / (8.0 * gamma * np.pi ** 2) * np.e
    if core <= 0.0:
        raise ConfigError(f"vortex strength beta={beta} empties the core")


def isentropic_vortex(x, beta=5.0, center=(0.0, 0.0), gamma=1.4):
    """Single vortex superposed on a uniform (1, 0) stream."""
    _check_beta(beta, gamma)
    dx = x[..., 0] - center[0]
    dy = x[..., 1] - center[1]
    rho, fac = _vortex_bump(dx, dy, beta, gamma)
    vx = 1.0 - fac * dy
    vy = fac * dx
    return np.stack([rho, vx, vy, rho ** gamma], axis=-1)


def vortex_exact(x, t, beta=5.0, center=(0.0, 0.0), gamma=1.4, box=VORTEX_BOX):
    """Vortex advected by the free stream on a doubly periodic box."""
    _check_beta(beta, gamma)
    dx = x[..., 0] - center[0] - t
    dy = x[..., 1] - center[1]
    dx = (dx + 0.5 * box) % box - 0.5 * box
    dy = (dy + 0.5 * box) % box - 0.5 * box
    rho, fac = _vortex_bump(dx, dy, beta, gamma)
    vx = 1.0 - fac * dy
    vy = fac * dx
    return np.stack([rho, vx, vy, rho ** gamma], axis=-1)


def four_vortex(x, beta=5.0, gamma=1.4):
    """Four counter-rotating vortexes, one per quadrant, fluid at rest afar."""
    _check_beta(beta, gamma)
    cx = np.where(x[..., 0] >= 0.0, 2.5, -2.5)
    cy = np.where(x[..., 1] >= 0.0, 2.5, -2.5)
    dx = x[..., 0] - cx
    dy = x[..., 1] - cy
    rho, fac = _vortex_bump(dx, dy, beta, gamma)
    sign = np.where(x[..., 0] * x[..., 1] >= 0.0, 1.0, -1.0)
    vx = -sign * fac * dy
    vy = sign * fac * dx
    return np.stack([rho, vx, vy, rho ** gamma], axis=-1)


def gresho(x):
    """Rotating equilibrium: centrifugal force balanced by pressure."""
    r = np.hypot(x[..., 0], x[..., 1])
    v_phi = np.where(r < 0.2, 5.0 * r,
                     np.where(r < 0.4, 2.0 - 5.0 * r, 0.0))
    rsafe = np.where(r > 0.0, r, 1.0)
    p = np.where(
        r < 0.2, 5.0 + 12.5 * r * r,
        np.where(r < 0.4,
                 9.0 - 4.0 * np.log(0.2) + 12.5 * r * r - 20.0 * r
                 + 4.0 * np.log(rsafe),
                 3.0 + 4.0 * np.log(2.0)))
    vx = -v_phi * x[..., 1] / rsafe
    vy = v_phi * x[..., 0] / rsafe
    rho = np.ones_like(r)
    return np.stack([rho, vx, vy, p], axis=-1)


def gresho_reference_j(r):
    """Angular momentum density of the Gresho field as a function of radius."""
    r = np.asarray(r, dtype=float)
    return np.where(r < 0.2, 5.0 * r * r,
                    np.where(r < 0.4, 2.0 * r - 5.0 * r * r, 0.0))


def sod2d(x):
    """Circular Sod tube: high-pressure disc inside radius one half."""
    inner = np.hypot(x[..., 0], x[..., 1]) <= 0.5
    rho = np.where(inner, 1.0, 0.125)
    p = np.where(inner, 1.0, 0.1)
    z = np.zeros_like(rho)
    return np.stack([rho, z, z, p], axis=-1)


@dataclass
class CaseSpec:
    """Everything the driver needs to set up one benchmark run."""

    name: str
    init: callable
    mesh_builder: callable
    bc_kind: str
    final_time: float
    cfl: float
    reference: callable = None
    params: dict = field(default_factory=dict)

    def initial(self, x):
        return self.init(x)

    def bcs(self, tags):
        if self.bc_kind == "periodic":
            return {}
        return {tag: (self.bc_kind, None) for tag in tags}


def _square_builder(bounds, kind, periodic):
    def build(n):
        mesh = rect_mesh(n, n, bounds, kind=kind)
        if periodic:
            mesh = make_periodic(mesh, [("left", "right"), ("bottom", "top")])
        return mesh

    return build


def get_case(name, beta=None, gamma=1.4, kind="tri"):
    """Look up a benchmark by name; beta applies to the vortex cases."""
    if name == "vortex":
        b = 5.0 if beta is None else beta
        half = VORTEX_BOX / 2.0
        return CaseSpec(
            name=name,
            init=lambda x: isentropic_vortex(x, beta=b, gamma=gamma),
            mesh_builder=_square_builder((-half, half, -half, half), kind,
                                         periodic=True),
            bc_kind="periodic",
            final_time=1.0,
            cfl=0.5,
            reference=lambda x, t: vortex_exact(x, t, beta=b, gamma=gamma),
            params={"beta": b})
    if name == "four_vortex":
        b = 5.0 if beta is None else beta
        return CaseSpec(
            name=name,
            init=lambda x: four_vortex(x, beta=b, gamma=gamma),
            mesh_builder=_square_builder((-10.0, 10.0, -10.0, 10.0), kind,
                                         periodic=False),
            bc_kind="wall",
            final_time=1.0,
            cfl=0.5,
            params={"beta": b})
    if name == "gresho":
        return CaseSpec(
            name=name,
            init=lambda x: gresho(x),
            mesh_builder=lambda n: disc_mesh(2.0, n),
            bc_kind="gradient_free",
            final_time=0.16,
            cfl=0.25)
    if name == "sod":
        return CaseSpec(
            name=name,
            init=lambda x: sod2d(x),
            mesh_builder=_square_builder((-1.0, 1.0, -1.0, 1.0), kind,
                                         periodic=False),
            bc_kind="wall",
            final_time=0.16,
            cfl=0.4)
    raise ConfigError(f"unknown case {name!r}")


CASE_NAMES = ("vortex", "four_vortex", "gresho", "sod")
