"""Command line entry point.

Verbs:
  run <config>                    one simulation from an INI config
  study <config> --meshes a,b,c  convergence study on a mesh sequence
  kernels-selftest                property checks of the correction kernels

Exit codes: 0 success, 1 selftest failure, 2 configuration error,
3 mesh error, 4 run ended in a blow-up.
"""

import argparse
import sys

import numpy as np

from .config import load_config
from .correction import (boundary_correction, ho_correction, tet_correction,
                         triangle_correction)
from .driver import convergence_study, run
from .errors import ConfigError, MeshError, SolverError


def _wedge(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def kernels_selftest(samples=1000, seed=0, out=None):
    """Run the zero-sum / anchor-wedge property loops on all four kernels.

    Samples are drawn with a relative non-degeneracy filter: a nearly
    flat element makes the wedge identity ill conditioned for any
    floating point evaluation (and would be an invalid mesh element
    anyway), so draws are oversampled and flat ones discarded.
    """
    if out is None:
        out = sys.stdout
    rng = np.random.default_rng(seed)
    failures = 0

    def report(name, sum_rel, wedge_rel, sum_tol=1e-14, wedge_tol=1e-12):
        nonlocal failures
        ok = sum_rel <= sum_tol and wedge_rel <= wedge_tol
        verdict = "PASS" if ok else "FAIL"
        failures += 0 if ok else 1
        out.write(f"{name}: {samples} samples, max scaled |sum r| = "
                  f"{sum_rel:.2e}, max wedge defect = {wedge_rel:.2e} "
                  f"-> {verdict}\n")

    draw = 2 * samples
    x = rng.normal(size=(3, draw, 2)) * rng.uniform(0.1, 10.0, (3, draw, 1))
    area2 = np.abs(_wedge(x[1] - x[0], x[2] - x[0]))
    span2 = np.maximum.reduce([((x[i] - x[j]) ** 2).sum(axis=1)
                               for i, j in ((0, 1), (1, 2), (2, 0))])
    keep = np.flatnonzero(area2 > 1e-3 * span2)[:samples]
    x1, x2, x3 = x[0][keep], x[1][keep], x[2][keep]
    psi = rng.normal(size=x1.shape[0]) * 10.0
    r1, r2, r3 = triangle_correction(psi, x1, x2, x3)
    scale = np.abs(np.stack([r1, r2, r3])).max(axis=(0, 2)) + 1e-300
    wsum = _wedge(x1, r1) + _wedge(x2, r2) + _wedge(x3, r3)
    report("triangle kernel",
           (np.abs(r1 + r2 + r3).max(axis=1) / scale).max(),
           (np.abs(wsum - psi) / np.maximum(np.abs(psi), 1e-30)).max())

    pts = rng.normal(size=(4, draw, 3)) * rng.uniform(0.1, 10.0, (4, draw, 1))
    vol6 = np.abs(np.einsum("ni,ni->n", pts[1] - pts[0],
                            np.cross(pts[2] - pts[0], pts[3] - pts[0])))
    span = np.sqrt(np.maximum.reduce([((pts[i] - pts[j]) ** 2).sum(axis=1)
                                      for i in range(4) for j in range(i)]))
    keep = np.flatnonzero(vol6 > 1e-2 * span ** 3)[:samples]
    xs = [p[keep] for p in pts]
    psi3 = rng.normal(size=(xs[0].shape[0], 3)) * 5.0
    r = tet_correction(psi3, *xs)
    scale = np.abs(np.stack(r)).max(axis=(0, 2)) + 1e-300
    wsum3 = sum(np.cross(p, ri) for p, ri in zip(xs, r))
    report("tet kernel",
           (np.abs(sum(r)).max(axis=1) / scale).max(),
           (np.abs(wsum3 - psi3).max(axis=1) / np.abs(psi3).max(axis=1)).max())

    anchors = rng.normal(size=(samples, 5, 2)) * rng.uniform(0.1, 10.0,
                                                             (samples, 1, 1))
    psi = rng.normal(size=samples) * 5.0
    r = ho_correction(psi, anchors)
    scale = np.abs(r).max(axis=(1, 2)) + 1e-300
    report("interior anchor kernel",
           (np.abs(r.sum(axis=1)).max(axis=1) / scale).max(),
           (np.abs(_wedge(anchors, r).sum(axis=1) - psi) / np.abs(psi)).max())

    fail_b = 0.0
    fail_s = 0.0
    done = 0
    while done < samples:
        k = rng.integers(2, 4)
        a = rng.normal(size=(k, 2)) * rng.uniform(0.5, 5.0)
        dev = np.abs(a - a.mean(axis=0)).max()
        if dev < 1e-3 * (np.abs(a).max() + 1.0):
            continue
        p = float(rng.normal() * 5.0)
        rb = boundary_correction(np.array(p), a)
        scale = np.abs(rb).max() + 1e-300
        fail_s = max(fail_s, np.abs(rb.sum(axis=0)).max() / scale)
        fail_b = max(fail_b, abs(_wedge(a, rb).sum() - p) / max(abs(p), 1e-30))
        done += 1
    report("boundary anchor kernel", fail_s, fail_b)

    return failures


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="rdeuler",
        description="Residual distribution Euler solver with angular "
                    "momentum correction.")
    sub = parser.add_subparsers(dest="verb", required=True)

    p_run = sub.add_parser("run", help="run one configured simulation")
    p_run.add_argument("config")
    p_run.add_argument("--out", help="override the output directory")

    p_study = sub.add_parser("study", help="convergence study over meshes")
    p_study.add_argument("config")
    p_study.add_argument("--meshes", required=True,
                         help="comma separated resolutions, e.g. 16,32,64")
    p_study.add_argument("--out", help="override the output directory")

    p_self = sub.add_parser("kernels-selftest",
                            help="property checks of the correction kernels")
    p_self.add_argument("--samples", type=int, default=1000)
    p_self.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)

    if args.verb == "kernels-selftest":
        return 1 if kernels_selftest(args.samples, args.seed) else 0

    try:
        cfg = load_config(args.config)
        if args.out:
            cfg.out_dir = args.out
        if args.verb == "run":
            result = run(cfg)
            print(f"{cfg.case}: {result.status}, {result.steps} steps, "
                  f"t = {result.t_final:.6g}, max |dJ| = "
                  f"{result.max_j_deviation:.3e}")
            if result.status == "blow_up":
                print(f"blow-up at t = {result.blow_up_time:.6g}; last valid "
                      f"snapshot in {result.out_dir}")
                return 4
            return 0
        try:
            meshes = [int(tok) for tok in args.meshes.split(",") if tok]
        except ValueError:
            raise ConfigError(f"bad --meshes list: {args.meshes!r}")
        rows = convergence_study(cfg, meshes)
        print("resolution        h        L2(rho)     order")
        for n, h, err, order in rows:
            tail = "    -" if order is None else f"{order:9.3f}"
            print(f"{n:10d} {h:10.5f} {err:12.5e} {tail}")
        return 0
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except MeshError as err:
        print(f"mesh error: {err}", file=sys.stderr)
        return 3
    except SolverError as err:
        print(f"run failed: {err}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
