"""Batch run orchestration: mesh, case, time loop, artifacts.

A run writes into its output directory:
  ledger.csv    conservation time series, one row per accepted step
  snap_NNNN.vtk field snapshots at a fixed cadence (plus the initial one)
  final.vtk     last valid state (also on blow-up)
  summary.json  run metadata, final norms, blow-up time if any
"""

import json
import os
import time
from dataclasses import dataclass, replace

import numpy as np

from . import diagnostics, euler, vtk_io
from .cases import get_case
from .dec import DecIntegrator, compute_dt
from .errors import ConfigError, StepFailureError
from .meshing import Discretization, load_gmsh, make_periodic
from .residuals import SchemeConfig

MAX_STEPS = 200000


@dataclass
class RunResult:
    status: str
    steps: int
    t_final: float
    blow_up_time: float
    wall_time: float
    max_j_deviation: float
    final_norms: dict
    out_dir: str
    disc: object
    u: np.ndarray
    ledger: object


def build_mesh(cfg, case):
    if cfg.mesh_source == "file":
        mesh = load_gmsh(cfg.mesh_path)
        if case.bc_kind == "periodic":
            mesh = make_periodic(mesh, [("left", "right"), ("bottom", "top")])
        return mesh
    return case.mesh_builder(cfg.resolution)


def initial_state(case, disc, gamma):
    prim = case.initial(disc.dof_positions())
    u = euler.conservative(prim[..., 0], prim[..., 1:3], prim[..., 3], gamma)
    return disc.interpolate(u)


def _reference_state(case, disc, t, gamma):
    prim = case.reference(disc.dof_positions(), t)
    u = euler.conservative(prim[..., 0], prim[..., 1:3], prim[..., 3], gamma)
    return disc.interpolate(u)


def run(cfg):
    """Execute one configured run; returns a RunResult with artifacts on disk."""
    started = time.perf_counter()
    case = get_case(cfg.case, beta=cfg.beta, gamma=cfg.gamma,
                    kind=cfg.mesh_kind)
    t_end = cfg.final_time if cfg.final_time is not None else case.final_time
    cfl = cfg.cfl if cfg.cfl is not None else case.cfl

    mesh = build_mesh(cfg, case)
    disc = Discretization(mesh, cfg.degree)
    scheme = SchemeConfig(cfg.scheme, theta_cip=cfg.theta_cip,
                          tau_supg=cfg.tau_supg, gamma=cfg.gamma)
    bcs = case.bcs(disc.bf_tags)
    stepper = DecIntegrator(disc, scheme, bcs=bcs, n_sub=cfg.n_sub,
                            n_iter=cfg.n_iter, correction=cfg.correction)
    u = initial_state(case, disc, cfg.gamma)

    os.makedirs(cfg.out_dir, exist_ok=True)
    j_order = diagnostics.j_form_for(cfg.degree, cfg.correction)
    ledger = diagnostics.ConservationLedger(disc, j_order)
    ledger.append(0.0, u)

    snap_times = [t_end * k / cfg.snapshots for k in range(1, cfg.snapshots + 1)]
    snap_index = 0
    if cfg.snapshots > 0:
        vtk_io.write_vtk(os.path.join(cfg.out_dir, f"snap_{snap_index:04d}.vtk"),
                         disc, u, cfg.gamma)

    t = 0.0
    steps = 0
    status = "ok"
    blow_up_time = None
    while t < t_end - 1e-12 * max(t_end, 1.0):
        try:
            dt = compute_dt(disc, u, cfl, cfg.gamma, dt_max=t_end - t)
            if dt <= 1e-13 * max(t_end, 1.0):
                raise StepFailureError("time step collapsed", time=t)
            if steps >= MAX_STEPS:
                raise StepFailureError("step budget exhausted", time=t)
            u_next, _ = stepper.step(u, dt, t)
        except StepFailureError as err:
            status = "blow_up"
            blow_up_time = err.time if err.time is not None else t
            break
        u = u_next
        t += dt
        steps += 1
        ledger.append(t, u)
        while snap_index < len(snap_times) and \
                t >= snap_times[snap_index] - 1e-12 * max(t_end, 1.0):
            snap_index += 1
            vtk_io.write_vtk(
                os.path.join(cfg.out_dir, f"snap_{snap_index:04d}.vtk"),
                disc, u, cfg.gamma)

    vtk_io.write_vtk(os.path.join(cfg.out_dir, "final.vtk"), disc, u,
                     cfg.gamma)
    ledger.write_csv(os.path.join(cfg.out_dir, "ledger.csv"))

    final_norms = None
    if case.reference is not None and status == "ok":
        ref = _reference_state(case, disc, t, cfg.gamma)
        l1, l2, linf = diagnostics.error_norms(disc, u, ref)
        final_norms = {"l1": l1.tolist(), "l2": l2.tolist(),
                       "linf": linf.tolist()}

    wall = time.perf_counter() - started
    summary = {
        "case": cfg.case, "scheme": cfg.scheme, "degree": cfg.degree,
        "correction": cfg.correction, "status": status, "steps": steps,
        "t_final": t, "blow_up_time": blow_up_time,
        "max_j_deviation": ledger.max_j_deviation,
        "wall_time_s": wall, "final_norms": final_norms,
    }
    with open(os.path.join(cfg.out_dir, "summary.json"), "w") as fh:
        json.dump(summary, fh, indent=2)

    return RunResult(status=status, steps=steps, t_final=t,
                     blow_up_time=blow_up_time, wall_time=wall,
                     max_j_deviation=ledger.max_j_deviation,
                     final_norms=final_norms, out_dir=cfg.out_dir, disc=disc,
                     u=u, ledger=ledger)


def convergence_study(cfg, resolutions):
    """Run a mesh sequence against the case's exact reference.

    Returns one row per mesh: (resolution, h, L2 density error, observed
    order versus the previous mesh, None for the first).
    """
    case = get_case(cfg.case, beta=cfg.beta, gamma=cfg.gamma,
                    kind=cfg.mesh_kind)
    if case.reference is None:
        raise ConfigError(f"case {cfg.case!r} has no exact reference")
    if len(resolutions) < 2:
        raise ConfigError("a convergence study needs at least two meshes")
    rows = []
    for n in resolutions:
        sub = replace(cfg, resolution=int(n), snapshots=0,
                      out_dir=os.path.join(cfg.out_dir, f"mesh_{n}"))
        result = run(sub)
        if result.status != "ok":
            raise StepFailureError(
                f"study run on mesh {n} failed", time=result.blow_up_time)
        h = float(np.sqrt(result.disc.areas.sum() / result.disc.mesh.n_elems))
        err = result.final_norms["l2"][0]
        order = None
        if rows:
            _, h_prev, err_prev, _ = rows[-1]
            order = float(np.log(err_prev / err) / np.log(h_prev / h))
        rows.append((int(n), h, err, order))
    os.makedirs(cfg.out_dir, exist_ok=True)
    with open(os.path.join(cfg.out_dir, "study.csv"), "w") as fh:
        fh.write("resolution,h,l2_rho,order\n")
        for n, h, err, order in rows:
            tail = "" if order is None else repr(order)
            fh.write(f"{n},{h!r},{err!r},{tail}\n")
    return rows
