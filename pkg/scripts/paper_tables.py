#!/usr/bin/env python3
"""Bound-constant and error-norm tables for a converted benchmark bundle.

Reproduces the headline comparison on the beam (or CDplayer) benchmark: bound
constants for the joint method across beta, the heuristic-vs-optimized shift
rates, the separate-projection constants, and measured error norms for all six
methods.

Usage:
    python scripts/paper_tables.py benchmarks/beam --example beam-x0
    python scripts/paper_tables.py benchmarks/CDplayer --example cdplayer-x0
"""

import argparse

import numpy as np

from shiftbt import (
    ExperimentConfig,
    MethodSpec,
    PiecewiseConstantInput,
    TimeGrid,
    btbt_posteriori_bound,
    c_u_of_alpha,
    construct_example,
    gramian_factors,
    heuristic_alpha,
    optimize_alpha,
    precompute_blocks,
    reduce_sshift,
    run_comparison,
    sample_alpha,
    sshift_bound,
)
from shiftbt.bundle import read_system_bundle

BEAM_SIGNAL = dict(
    u=PiecewiseConstantInput([0.0, 500.0, 1000.0], [[0.0], [1.0], [0.0]]),
    z0=np.array([10.0, -1.0]),
    grid=TimeGrid.from_horizon(2000.0, 0.25),
)
CD_SIGNAL = dict(
    u=PiecewiseConstantInput(
        [0.0, 1.5, 3.0], [[0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]
    ),
    z0=np.array([1.0, 10.0]),
    grid=TimeGrid.from_horizon(6.0, 0.00075),
)


def optimized_alpha(blocks, r, beta):
    start = sample_alpha(blocks, r, beta).alpha_star
    return optimize_alpha(blocks, r, beta, start)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("bundle", help="system bundle directory")
    ap.add_argument("--example", choices=["beam-x0", "cdplayer-x0"], required=True)
    ap.add_argument("--order", type=int, default=30)
    ap.add_argument("--split-order", type=int, default=15)
    args = ap.parse_args()

    sysm, name = read_system_bundle(args.bundle)
    sysm = construct_example(args.example, sysm)
    print(f"{name}: n={sysm.n} m={sysm.m} p={sysm.p} q={sysm.q}")
    factors = gramian_factors(sysm)
    blocks = precompute_blocks(factors, sysm.A)

    r = args.order
    print(f"\njoint-method bound constants (r={r}, optimized shift rate)")
    print(f"{'beta':>8} {'alpha*':>12} {'c_u':>12} {'c_x0':>12}")
    for beta in (0.01, 0.1, 1.0, 10.0, 100.0):
        opt = optimized_alpha(blocks, r, beta)
        print(
            f"{beta:8.2f} {opt.alpha_star:12.4e} {opt.c_u_at_star:12.4e} "
            f"{beta * opt.c_u_at_star:12.4e}"
        )

    print(f"\nshift-rate choices (r={r}, beta=1)")
    opt = optimized_alpha(blocks, r, 1.0)
    rows = [("optimized", opt.alpha_star)]
    rows.append(("fro-ratio", heuristic_alpha("fro-ratio", sysm.A, sysm.X0)))
    rows.append(("spectral", heuristic_alpha("spectral", sysm.A, sysm.X0)))
    for tag, alpha in rows:
        print(f"{tag:>12} alpha={alpha:12.4e} c_u={c_u_of_alpha(blocks, r, 1.0, alpha):12.4e}")

    k = ell = args.split_order
    iv = blocks.without_input
    iv_opt = optimized_alpha(iv, ell, 1.0)
    srom = reduce_sshift(sysm, k, ell, iv_opt.alpha_star)
    bc = sshift_bound(srom.sigma, srom.theta, k, ell)
    bb = btbt_posteriori_bound(sysm, k, ell)
    print(f"\nseparate-projection constants (k=l={ell})")
    print(f"  shared c_u           {bc.c_u:12.4e}")
    print(f"  shift method c_x0    {bc.c_x0:12.4e}")
    print(f"  two-truncation c_x0  {bb.c_x0:12.4e}")

    signal = BEAM_SIGNAL if args.example == "beam-x0" else CD_SIGNAL
    cfg = ExperimentConfig(
        system=sysm,
        methods=(
            MethodSpec("bt", (r,)),
            MethodSpec("trlbt", (r,)),
            MethodSpec("augbt", (r,)),
            MethodSpec("btbt", (k, ell)),
            MethodSpec("sshift", (k, ell)),
            MethodSpec("jshift", (r,), beta=0.01),
            MethodSpec("jshift", (r,), beta=0.1),
            MethodSpec("jshift", (r,), beta=1.0),
            MethodSpec("jshift", (r,), beta=10.0),
            MethodSpec("jshift", (r,), beta=100.0),
        ),
        alpha_mode="optimize",
        beta="heur",
        **signal,
    )
    report = run_comparison(cfg)
    print("\nmeasured error norms")
    print(f"{'method':>18} {'L2 error':>12} {'Linf error':>12} {'bound':>12}")
    for row in report.rows:
        bound = "-" if row.bound is None else f"{row.bound:12.4e}"
        if row.error is not None:
            print(f"{row.label:>18} failed: {row.error}")
            continue
        print(f"{row.label:>18} {row.l2_error:12.4e} {row.linf_error:12.4e} {bound:>12}")


if __name__ == "__main__":
    main()
