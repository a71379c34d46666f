"""End-to-end experiments: reduce with several methods, evaluate the bounds,
simulate the error trajectories, and assemble a comparison report."""

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import bounds as bnd
from . import paramopt as po
from .balancing import bt, gramian_factors
from .errors import DimensionTooSmall
from .lti import (
    LtiSystem,
    Trajectory,
    l2_norm_input,
    l2_norm_trajectory,
    linf_norm_trajectory,
    simulate,
)
from .reduction import (
    reduce_augbt,
    reduce_bt,
    reduce_btbt,
    reduce_jshift,
    reduce_sshift,
    reduce_trlbt,
    rom_output,
)

METHODS = ("augbt", "bt", "btbt", "jshift", "sshift", "trlbt")
SEPARATE_METHODS = ("btbt", "sshift")


@dataclass(frozen=True)
class MethodSpec:
    """One reduction run: method name, order(s), and the shift weight for the
    joint method (None picks the config-level beta)."""

    method: str
    orders: tuple
    beta: float | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        want = 2 if self.method in SEPARATE_METHODS else 1
        if len(self.orders) != want:
            raise ValueError(
                f"{self.method} takes {want} order value(s), got {self.orders}"
            )

    @property
    def label(self):
        tag = self.method
        if self.beta is not None:
            tag += f"(beta={self.beta:g})"
        return tag


@dataclass(frozen=True)
class ExperimentConfig:
    """A full comparison run on one system."""

    system: LtiSystem
    methods: tuple
    u: object  # PiecewiseConstantInput
    z0: np.ndarray
    grid: object  # TimeGrid
    alpha_mode: object = "optimize"  # 'heur-fro' | 'heur-spec' | 'sample' | 'optimize' | float
    beta: object = "heur"  # float | 'heur'
    smooth_window: int = 1

    def __post_init__(self):
        object.__setattr__(self, "z0", np.atleast_1d(np.asarray(self.z0, dtype=float)))
        object.__setattr__(self, "methods", tuple(self.methods))


@dataclass
class MethodReport:
    label: str
    method: str
    orders: tuple
    alpha: float | None
    beta: float | None
    c_u: float | None
    c_x0: float | None
    a_priori: bool | None
    l2_error: float | None
    linf_error: float | None
    bound: float | None
    bound_violated: bool
    seconds: float
    error: str | None = None


@dataclass
class ComparisonReport:
    rows: list
    u_norm: float
    z0_norm: float
    fom_output: Trajectory
    error_trajectories: dict = field(default_factory=dict)

    @property
    def any_violation(self):
        return any(r.bound_violated for r in self.rows)


def error_trajectory(fom_output, rom, u, z0, grid):
    """Pointwise 2-norm of y(t) - y_r(t) on the grid."""
    yr = rom_output(rom, u, z0, grid)
    diff = fom_output.samples - yr.samples
    return Trajectory(grid.step, np.linalg.norm(diff, axis=1))


def smooth(traj, window):
    """Centered moving average; the window shrinks symmetrically at the edges.

    window must be odd and >= 1; window = 1 is the identity.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1")
    if window == 1:
        return Trajectory(traj.step, traj.samples.copy())
    n = traj.npoints
    half = window // 2
    out = np.empty_like(traj.samples)
    for i in range(n):
        w = min(half, i, n - 1 - i)
        out[i] = traj.samples[i - w : i + w + 1].mean(axis=0)
    return Trajectory(traj.step, out)


def construct_example(which, sys):
    """Attach the benchmark initial-value bases used in the experiments.

    'beam-x0': two sparse columns, entry (5,1) = 1 and (101,2) = 100 in
    1-based indexing.  'cdplayer-x0': an orthonormal pair spanning a subspace
    the standard r=50 truncation cannot see (kernel of W_r^T).
    """
    if which == "beam-x0":
        if sys.n < 101:
            raise DimensionTooSmall("beam-style X0 needs n >= 101")
        X0 = np.zeros((sys.n, 2))
        X0[4, 0] = 1.0
        X0[100, 1] = 100.0
        return LtiSystem(sys.A, sys.B, sys.C, sys.D, X0)
    if which == "cdplayer-x0":
        r = 50
        res = bt(sys.A, sys.B, sys.C, r)
        U = np.linalg.svd(res.W, full_matrices=True)[0]
        X0 = U[:, r : r + 2]
        if X0.shape[1] < 2:
            raise DimensionTooSmall("cdplayer-style X0 needs n >= 52")
        return LtiSystem(sys.A, sys.B, sys.C, sys.D, X0)
    raise ValueError(f"unknown example {which!r}")


def _resolve_beta(cfg, spec, u_norm, z0_norm):
    if spec.beta is not None:
        return float(spec.beta)
    if cfg.beta == "heur":
        return po.heuristic_beta(u_norm, z0_norm)
    return float(cfg.beta)


def _resolve_alpha(mode, blocks, sys, r, beta):
    """Pick the shift rate according to the configured mode."""
    if isinstance(mode, (int, float)):
        return float(mode)
    if mode == "heur-fro":
        return po.heuristic_alpha("fro-ratio", sys.A, sys.X0)
    if mode == "heur-spec":
        return po.heuristic_alpha("spectral", sys.A, sys.X0)
    if mode == "sample":
        return po.sample_alpha(blocks, r, beta).alpha_star
    if mode == "optimize":
        start = po.sample_alpha(blocks, r, beta).alpha_star
        return po.optimize_alpha(blocks, r, beta, start).alpha_star
    raise ValueError(f"unknown alpha mode {mode!r}")


def _reduce_and_bound(cfg, spec, blocks, factors, u_norm, z0_norm):
    """Build the reduced model and its bound constants for one method spec."""
    sys = cfg.system
    homogeneous = z0_norm == 0.0
    if spec.method == "bt":
        (r,) = spec.orders
        rom = reduce_bt(sys, r)
        c_u = bnd.bt_bound(rom.hsv, r)
        c_x0 = bnd.bt_initial_value_error_term(
            sys.A, rom.Ar, sys.X0, rom.X0r, sys.C, rom.Cr
        )
        return rom, bnd.BoundConstants(c_u, c_x0, "bt", (r,), a_priori=homogeneous), None, None
    if spec.method == "trlbt":
        (r,) = spec.orders
        rom = reduce_trlbt(sys, cfg.z0, r)
        return rom, None, None, None
    if spec.method == "augbt":
        (r,) = spec.orders
        rom = reduce_augbt(sys, r)
        bc = bnd.augbt_posteriori_bound(
            rom.hsv, r, factors.obs, sys.A, sys.X0, rom.Ar, rom.X0r
        )
        return rom, bc, None, None
    if spec.method == "btbt":
        k, ell = spec.orders
        rom = reduce_btbt(sys, k, ell)
        return rom, bnd.btbt_posteriori_bound(sys, k, ell), None, None
    if spec.method == "jshift":
        (r,) = spec.orders
        beta = _resolve_beta(cfg, spec, u_norm, z0_norm)
        alpha = _resolve_alpha(cfg.alpha_mode, blocks, sys, r, beta)
        rom = reduce_jshift(sys, r, alpha, beta)
        return rom, bnd.jshift_bound(rom.hsv, r, beta), rom.alpha, beta
    if spec.method == "sshift":
        k, ell = spec.orders
        iv_blocks = blocks.without_input
        alpha = _resolve_alpha(cfg.alpha_mode, iv_blocks, sys, ell, 1.0)
        rom = reduce_sshift(sys, k, ell, alpha)
        return rom, bnd.sshift_bound(rom.sigma, rom.theta, k, ell), rom.alpha, None
    raise ValueError(f"unknown method {spec.method!r}")


def run_comparison(cfg):
    """Reduce with every configured method, evaluate bounds and measured
    errors, and assemble the report (rows sorted by label).

    Per-method failures are recorded in the row and the run continues.
    """
    sys = cfg.system
    u_norm = l2_norm_input(cfg.u)
    z0_norm = float(np.linalg.norm(cfg.z0))
    y = simulate(sys, cfg.u, sys.initial_state(cfg.z0), cfg.grid)
    factors = gramian_factors(sys)
    blocks = po.precompute_blocks(factors, sys.A)

    rows = []
    err_trajs = {}
    for spec in cfg.methods:
        t0 = time.perf_counter()
        try:
            rom, bc, alpha, beta = _reduce_and_bound(
                cfg, spec, blocks, factors, u_norm, z0_norm
            )
            err = error_trajectory(y, rom, cfg.u, cfg.z0, cfg.grid)
            l2 = l2_norm_trajectory(err)
            linf = linf_norm_trajectory(err)
            total = bc.total(u_norm, z0_norm) if bc is not None else None
            violated = total is not None and l2 > total + 1e-6
            if violated:
                warnings.warn(
                    f"{spec.label}: measured error {l2:.6e} exceeds bound {total:.6e}",
                    UserWarning,
                )
            rows.append(
                MethodReport(
                    label=spec.label, method=spec.method, orders=spec.orders,
                    alpha=alpha, beta=beta,
                    c_u=None if bc is None else bc.c_u,
                    c_x0=None if bc is None else bc.c_x0,
                    a_priori=None if bc is None else bc.a_priori,
                    l2_error=l2, linf_error=linf, bound=total,
                    bound_violated=violated,
                    seconds=time.perf_counter() - t0,
                )
            )
            err_trajs[spec.label] = (
                smooth(err, cfg.smooth_window) if cfg.smooth_window > 1 else err
            )
        except Exception as exc:  # record and keep going
            rows.append(
                MethodReport(
                    label=spec.label, method=spec.method, orders=spec.orders,
                    alpha=None, beta=None, c_u=None, c_x0=None, a_priori=None,
                    l2_error=None, linf_error=None, bound=None,
                    bound_violated=False, seconds=time.perf_counter() - t0,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    rows.sort(key=lambda row: row.label)
    return ComparisonReport(
        rows=rows, u_norm=u_norm, z0_norm=z0_norm, fom_output=y,
        error_trajectories=err_trajs,
    )
