"""Fast evaluation and optimization of the shift parameters.

The nonzero Hankel singular values of the shift-augmented system are the
singular values of the small matrix

    M(alpha, beta) = [ L^T R,  (1/(beta sqrt(2 alpha))) L^T A Rhat
                               + (sqrt(alpha)/(sqrt(2) beta)) L^T Rhat ],

so once the three factor products are precomputed, sweeping or optimizing
alpha costs one small SVD per evaluation.  The bound coefficient to minimize
is c_u(alpha) = 2 * (eta_{r+1} + ... + eta_n).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, SingularityWarning, ZeroX0, ZeroZ0
from .linalg import as_matrix, spectral_abscissa


@dataclass(frozen=True)
class PrecomputedBlocks:
    """The three factor products entering M(alpha, beta); independent of both
    parameters, built once per system."""

    obs_ctrl: np.ndarray   # L^T R
    obs_A_init: np.ndarray  # L^T A Rhat
    obs_init: np.ndarray   # L^T Rhat

    @property
    def without_input(self):
        """Blocks of the input-free system (initial-value channel only)."""
        return PrecomputedBlocks(
            obs_ctrl=np.zeros((self.obs_ctrl.shape[0], 0)),
            obs_A_init=self.obs_A_init,
            obs_init=self.obs_init,
        )


def precompute_blocks(factors, A):
    """Form L^T R, L^T A Rhat, L^T Rhat from Gramian factors."""
    A = as_matrix(A, "A")
    L, R, Rhat = factors.obs, factors.ctrl, factors.init
    if L.shape[0] != A.shape[0] or R.shape[0] != A.shape[0] or Rhat.shape[0] != A.shape[0]:
        raise DimensionMismatch("factor row counts must match the state dimension")
    return PrecomputedBlocks(
        obs_ctrl=L.T @ R,
        obs_A_init=L.T @ A @ Rhat,
        obs_init=L.T @ Rhat,
    )


def hsv_matrix(blocks, alpha, beta):
    """Assemble M(alpha, beta); its nonzero singular values are the Hankel
    singular values of the shift-augmented system."""
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    c1 = 1.0 / (beta * math.sqrt(2.0 * alpha))
    c2 = math.sqrt(alpha) / (math.sqrt(2.0) * beta)
    return np.hstack([blocks.obs_ctrl, c1 * blocks.obs_A_init + c2 * blocks.obs_init])


def hsv_matrix_derivative(blocks, alpha, beta):
    """d M / d alpha: the input block is constant, the shift block varies."""
    c1 = -1.0 / (2.0 * beta * alpha * math.sqrt(2.0 * alpha))
    c2 = 1.0 / (2.0 * beta * math.sqrt(2.0 * alpha))
    return np.hstack(
        [np.zeros_like(blocks.obs_ctrl), c1 * blocks.obs_A_init + c2 * blocks.obs_init]
    )


def shift_hsv(blocks, alpha, beta):
    """Singular values of M(alpha, beta), descending (not zero padded)."""
    M = hsv_matrix(blocks, alpha, beta)
    if min(M.shape) == 0:
        return np.zeros(0)
    return np.linalg.svd(M, compute_uv=False)


def c_u_of_alpha(blocks, r, beta, alpha):
    """Bound coefficient 2 * sum_{i>r} eta_i(alpha) from the SVD of M."""
    s = shift_hsv(blocks, alpha, beta)
    return 2.0 * float(np.sum(s[r:])) if r < s.size else 0.0


def c_u_gradient(blocks, r, beta, alpha):
    """Derivative of c_u at alpha via the singular-value derivative formula
    d eta_j / d alpha = u_j^T (dM/dalpha) v_j.

    Requires the trailing singular values to be simple; near a multiplicity
    (gap below 1e-8 * eta_1) a one-sided finite difference is used instead and
    a SingularityWarning is emitted.
    """
    M = hsv_matrix(blocks, alpha, beta)
    if min(M.shape) == 0:
        return 0.0
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    if r >= s.size:
        return 0.0
    gap_tol = 1e-8 * s[0] if s[0] > 0 else 0.0
    gaps = np.abs(np.diff(s))
    # simplicity matters at the tail boundary and inside the tail
    simple = np.all(gaps[max(r - 1, 0):] > gap_tol) if s.size > 1 else True
    if not simple:
        warnings.warn(
            "trailing singular values are numerically multiple; "
            "falling back to a one-sided difference",
            SingularityWarning,
        )
        h = 1e-7 * alpha
        return (c_u_of_alpha(blocks, r, beta, alpha + h)
                - c_u_of_alpha(blocks, r, beta, alpha)) / h
    dM = hsv_matrix_derivative(blocks, alpha, beta)
    grad = 0.0
    for j in range(r, s.size):
        grad += float(U[:, j] @ dM @ Vt[j, :])
    return 2.0 * grad


def heuristic_alpha(kind, A, X0):
    """Shift-rate guesses: 'fro-ratio' = ||A X0||_F / ||X0||_F, which minimizes
    the norm of the augmented input block; 'spectral' = negative spectral
    abscissa, matching the slowest decay of the homogeneous response."""
    A = as_matrix(A, "A")
    if kind == "fro-ratio":
        X0 = as_matrix(X0, "X0")
        denom = np.linalg.norm(X0, "fro")
        if denom == 0.0:
            raise ZeroX0("fro-ratio heuristic needs a nonzero X0")
        return float(np.linalg.norm(A @ X0, "fro") / denom)
    if kind == "spectral":
        a = spectral_abscissa(A)
        if not a < 0:
            raise ValueError("spectral heuristic needs a stable A")
        return -a
    raise ValueError(f"unknown heuristic kind {kind!r}")


def heuristic_beta(u_norm, z0_norm):
    """Weight guess ||u||_L2 / ||z0||_2, balancing the two bound summands."""
    if z0_norm <= 0:
        raise ZeroZ0("beta heuristic needs ||z0|| > 0")
    if u_norm == 0:
        warnings.warn("||u|| = 0 gives the degenerate weight beta = 0", UserWarning)
    return float(u_norm) / float(z0_norm)


@dataclass(frozen=True)
class OptResult:
    """Outcome of a shift-rate search: best point, trace of evaluations,
    convergence flag and iteration count."""

    alpha_star: float
    c_u_at_star: float
    trace: tuple
    converged: bool
    iterations: int


def sample_alpha(blocks, r, beta, jmin=-6, jmax=6):
    """Evaluate c_u on the decade grid alpha in {10^j, jmin <= j <= jmax} and
    return the best sample (ties broken toward the smallest alpha)."""
    if jmin > jmax:
        raise ValueError("jmin must not exceed jmax")
    trace = []
    best_alpha, best_val = None, np.inf
    for j in range(jmin, jmax + 1):
        a = 10.0**j
        val = c_u_of_alpha(blocks, r, beta, a)
        trace.append((a, val))
        if val < best_val:
            best_alpha, best_val = a, val
    return OptResult(
        alpha_star=best_alpha, c_u_at_star=best_val, trace=tuple(trace),
        converged=True, iterations=len(trace),
    )


def optimize_alpha(blocks, r, beta, alpha0, max_iter=200):
    """Local descent on g(s) = c_u(10^s) with backtracking line search.

    Stops when |dc_u/dalpha| * alpha <= 1e-8 * c_u or after ``max_iter``
    iterations; the returned value never exceeds c_u(alpha0).
    """
    if alpha0 <= 0:
        raise ValueError("alpha0 must be positive")
    ln10 = math.log(10.0)
    s = math.log10(alpha0)
    val = c_u_of_alpha(blocks, r, beta, alpha0)
    trace = [(alpha0, val)]
    best_alpha, best_val = alpha0, val
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        alpha = 10.0**s
        grad_alpha = c_u_gradient(blocks, r, beta, alpha)
        grad_s = grad_alpha * alpha * ln10
        if abs(grad_alpha) * alpha <= 1e-8 * max(val, 1e-300):
            converged = True
            break
        step = min(1.0, 1.0 / abs(grad_s) * max(val, 1e-300) * 0.1)
        accepted = False
        for _ in range(40):
            s_new = s - step * grad_s
            alpha_new = 10.0**s_new
            val_new = c_u_of_alpha(blocks, r, beta, alpha_new)
            trace.append((alpha_new, val_new))
            if val_new < best_val:  # rejected trials count toward the best too
                best_alpha, best_val = alpha_new, val_new
            if val_new <= val - 1e-4 * step * grad_s**2:
                s, val = s_new, val_new
                accepted = True
                break
            step *= 0.5
        if not accepted:
            # no descent possible at line-search resolution (kink or minimum)
            converged = abs(grad_alpha) * alpha <= 1e-6 * max(val, 1e-300)
            break
    return OptResult(
        alpha_star=best_alpha, c_u_at_star=best_val, trace=tuple(trace),
        converged=converged, iterations=iterations,
    )
