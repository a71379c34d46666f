"""LTI state-space model, piecewise-constant inputs, exact simulation on
uniform time grids, and the L2 / H2 norms used by the error bounds.

Simulation uses exact exponential stepping: for piecewise-constant input the
discrete propagation x_{k+1} = e^{Ah} x_k + (int_0^h e^{A tau} dtau) B u_k is
exact up to the accuracy of the matrix exponential.  This keeps bound
verification free of ODE-solver tolerance noise.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import DimensionMismatch, GridMisaligned, NotStable, UnboundedInput
from .linalg import as_matrix, matrix_exponential, solve_lyapunov, spectral_abscissa


@dataclass(frozen=True)
class LtiSystem:
    """State-space model x' = Ax + Bu, y = Cx + Du with initial-value basis X0.

    Feasible initial states are x(0) = X0 z0; X0 may have zero columns for the
    homogeneous-only case.  Stability is checked lazily, never at construction.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    X0: np.ndarray

    def __post_init__(self):
        A = as_matrix(self.A, "A")
        n = A.shape[0]
        if A.shape[1] != n:
            raise DimensionMismatch(f"A must be square, got {A.shape}")
        B = as_matrix(self.B, "B")
        C = as_matrix(self.C, "C")
        if B.shape[0] != n:
            raise DimensionMismatch(f"B has {B.shape[0]} rows, expected {n}")
        if C.shape[1] != n:
            raise DimensionMismatch(f"C has {C.shape[1]} cols, expected {n}")
        D = as_matrix(self.D, "D") if self.D is not None else np.zeros((C.shape[0], B.shape[1]))
        if D.shape != (C.shape[0], B.shape[1]):
            raise DimensionMismatch(f"D must be {C.shape[0]}x{B.shape[1]}, got {D.shape}")
        X0 = as_matrix(self.X0, "X0") if self.X0 is not None else np.zeros((n, 0))
        if X0.shape[0] != n:
            raise DimensionMismatch(f"X0 has {X0.shape[0]} rows, expected {n}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "D", D)
        object.__setattr__(self, "X0", X0)

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def p(self):
        return self.C.shape[0]

    @property
    def q(self):
        return self.X0.shape[1]

    def initial_state(self, z0):
        z0 = np.atleast_1d(np.asarray(z0, dtype=float))
        if z0.shape != (self.q,):
            raise DimensionMismatch(f"z0 must have length {self.q}, got {z0.shape}")
        return self.X0 @ z0


def is_asymptotically_stable(sys):
    """True iff the spectral abscissa of A is strictly negative."""
    return spectral_abscissa(sys.A) < 0.0


@dataclass(frozen=True)
class PiecewiseConstantInput:
    """Right-continuous piecewise-constant signal.

    values[i] is held on [breakpoints[i], breakpoints[i+1]); the last value is
    held forever and must be zero for the signal to be square integrable.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bp = np.atleast_1d(np.asarray(self.breakpoints, dtype=float))
        vals = np.asarray(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals.reshape(-1, 1)  # scalar input, one row per interval
        if vals.shape[0] != bp.shape[0]:
            raise DimensionMismatch(
                f"need one value row per breakpoint: {vals.shape[0]} rows, {bp.shape[0]} breakpoints"
            )
        if bp[0] != 0.0:
            raise ValueError("breakpoints must start at 0")
        if np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls, m):
        return cls(np.zeros(1), np.zeros((1, m)))

    @property
    def m(self):
        return self.values.shape[1]

    def at(self, t):
        """Value of the signal at times t (right-continuous)."""
        t = np.asarray(t, dtype=float)
        idx = np.clip(np.searchsorted(self.breakpoints, t, side="right") - 1, 0, None)
        return self.values[idx]


def l2_norm_input(u):
    """Exact L2 norm of a piecewise-constant input, sqrt(sum ||u_i||^2 dt_i)."""
    if np.any(u.values[-1] != 0.0):
        raise UnboundedInput("trailing value must be zero for an L2 input")
    dt = np.diff(u.breakpoints)
    sq = np.sum(u.values[:-1] ** 2, axis=1)
    return math.sqrt(float(np.dot(sq, dt)))


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_k = k h, k = 0..npoints-1."""

    step: float
    npoints: int

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if self.npoints < 2:
            raise ValueError("grid needs at least 2 points")

    @classmethod
    def from_horizon(cls, horizon, step):
        npoints = int(round(horizon / step)) + 1
        return cls(step, npoints)

    @property
    def times(self):
        return np.arange(self.npoints) * self.step

    @property
    def horizon(self):
        return (self.npoints - 1) * self.step


@dataclass(frozen=True)
class Trajectory:
    """Sampled vector signal on a uniform grid starting at t = 0."""

    step: float
    samples: np.ndarray  # (npoints, p)

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim == 1:
            samples = samples.reshape(-1, 1)
        object.__setattr__(self, "samples", samples)

    @property
    def times(self):
        return np.arange(self.samples.shape[0]) * self.step

    @property
    def npoints(self):
        return self.samples.shape[0]


def _check_grid_alignment(u, grid):
    h = grid.step
    horizon = grid.horizon
    for b in u.breakpoints:
        if b > horizon + 1e-9 * h:
            continue  # breakpoint past the simulated window is irrelevant
        k = round(b / h)
        if abs(b - k * h) > 1e-9 * max(h, abs(b)):
            raise GridMisaligned(f"breakpoint t={b} is not a grid point for step h={h}")


def step_matrices(A, B, h):
    """Exact one-step propagators (e^{Ah}, int_0^h e^{A tau} dtau B).

    The integral term comes from the exponential of the augmented matrix
    [[A, B], [0, 0]].
    """
    n, m = A.shape[0], B.shape[1]
    if m == 0:
        return matrix_exponential(A, h), np.zeros((n, 0))
    aug = np.zeros((n + m, n + m))
    aug[:n, :n] = A
    aug[:n, n:] = B
    E = matrix_exponential(aug, h)
    return E[:n, :n], E[:n, n:]


def simulate(sys, u, x0, grid):
    """Propagate the system exactly on the grid for piecewise-constant input.

    x_{k+1} = e^{Ah} x_k + (int_0^h e^{A tau} dtau) B u_k,  y_k = C x_k + D u_k,
    with u_k the input value on [t_k, t_{k+1}).  Every input breakpoint inside
    the simulated window must be a grid point.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (sys.n,):
        raise DimensionMismatch(f"x0 must have length {sys.n}, got {x0.shape}")
    if u.m != sys.m:
        raise DimensionMismatch(f"input has width {u.m}, system expects {sys.m}")
    _check_grid_alignment(u, grid)

    E, F = step_matrices(sys.A, sys.B, grid.step)
    uu = u.at(grid.times)  # (N, m), right-continuous
    x = np.empty((grid.npoints, sys.n))
    x[0] = x0
    for k in range(grid.npoints - 1):
        x[k + 1] = E @ x[k] + F @ uu[k]
    y = x @ sys.C.T + uu @ sys.D.T
    return Trajectory(grid.step, y)


def l2_norm_trajectory(traj):
    """Composite Simpson quadrature of ||y(t)||^2 over the grid, square rooted.

    Quadrature error is O(h^4) for smooth integrands.
    """
    if traj.npoints < 3:
        raise ValueError("need at least 3 grid points for Simpson quadrature")
    sq = np.sum(traj.samples**2, axis=1)
    val = float(simpson(sq, dx=traj.step))
    return math.sqrt(max(val, 0.0))


def linf_norm_trajectory(traj):
    """Max over grid points of the pointwise Euclidean norm."""
    return float(np.max(np.linalg.norm(traj.samples, axis=1)))


def h2_norm(A, B, C):
    """H2 norm sqrt(trace(C P C^T)) with A P + P A^T + B B^T = 0."""
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    C = as_matrix(C, "C")
    if B.shape[1] == 0 or not B.any():
        require_stable_h2(A)
        return 0.0
    P = solve_lyapunov(A, B)
    return math.sqrt(max(float(np.trace(C @ P @ C.T)), 0.0))


def require_stable_h2(A):
    if not spectral_abscissa(A) < 0.0:
        raise NotStable("H2 norm needs an asymptotically stable A")


def default_horizon(A, tol=1e-8, after=0.0, cap=None):
    """Horizon T with e^{abscissa * (T - after)} <= tol, optionally capped.

    `after` shifts the decay window past the support of the input.
    """
    a = spectral_abscissa(A)
    if not a < 0.0:
        raise NotStable("default horizon needs a stable system")
    T = after + math.log(1.0 / tol) / (-a)
    if cap is not None:
        T = min(T, cap)
    return T
