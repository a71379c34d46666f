#!/usr/bin/env python3
"""Write a small synthetic system bundle for trying out the CLI.

Usage: python scripts/make_demo_bundle.py [outdir]   (default: demo/sys)
"""

import sys

import numpy as np

from shiftbt import LtiSystem
from shiftbt.bundle import write_system_bundle


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "demo/sys"
    rng = np.random.default_rng(7)
    n = 12
    M = rng.standard_normal((n, n))
    sysm = LtiSystem(
        A=M - (np.linalg.norm(M, 2) + 0.8) * np.eye(n),
        B=rng.standard_normal((n, 1)),
        C=rng.standard_normal((1, n)),
        D=np.zeros((1, 1)),
        X0=rng.standard_normal((n, 2)),
    )
    write_system_bundle(out, sysm, name="demo")
    print(f"wrote {out} (n={n}, m=1, p=1, q=2)")


if __name__ == "__main__":
    main()
