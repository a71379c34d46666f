#!/usr/bin/env python3
"""Randomized bound verification: reduce random systems with every method and
print measured errors next to the bound totals.

Usage: python scripts/bound_demo.py [--systems N] [--seed S]
"""

import argparse
import sys

import numpy as np

sys.path.insert(0, "tests")

from shiftbt import ExperimentConfig, MethodSpec, run_comparison


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--systems", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    from conftest import grid_for, random_l2_input, random_system

    header = f"{'system':>6} {'method':>16} {'measured L2':>12} {'bound':>12} {'ok':>3}"
    print(header)
    print("-" * len(header))
    violations = 0
    for i in range(args.systems):
        rng = np.random.default_rng(args.seed + i)
        n = int(rng.integers(8, 16))
        sysm = random_system(rng, n=n, m=2, p=2, q=2, margin=0.8)
        u = random_l2_input(rng, 2, 0.02, t_off=1.0)
        r = max(int(n // 2), 2)
        cfg = ExperimentConfig(
            system=sysm,
            methods=(
                MethodSpec("bt", (r,)),
                MethodSpec("augbt", (r,)),
                MethodSpec("jshift", (r,)),
                MethodSpec("btbt", (r // 2, r // 2)),
                MethodSpec("sshift", (r // 2, r // 2)),
            ),
            u=u,
            z0=rng.standard_normal(2),
            grid=grid_for(sysm, u, step=0.02),
            alpha_mode="optimize",
            beta="heur",
        )
        report = run_comparison(cfg)
        for row in report.rows:
            bound = "-" if row.bound is None else f"{row.bound:12.4e}"
            ok = "-" if row.bound is None else ("no" if row.bound_violated else "yes")
            print(f"{i:>6} {row.label:>16} {row.l2_error:12.4e} {bound:>12} {ok:>3}")
            violations += row.bound_violated
    print(f"\nbound violations: {violations}")
    return 1 if violations else 0


if __name__ == "__main__":
    raise SystemExit(main())
