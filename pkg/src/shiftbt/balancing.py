"""Gramian factor computation and square-root balanced truncation.

The square-root method works on low-rank factors: with P = R R^T and
Q = L L^T, the SVD L^T R = U S Z^T yields the Petrov-Galerkin bases
V = R Z_1 S_1^{-1/2}, W = L U_1 S_1^{-1/2} and the Hankel singular values on
the diagonal of S.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NotBiorthogonal, NotMinimalWarning, RankDeficient, TiedSingularValues
from .linalg import as_matrix, psd_factor, require_stable, solve_lyapunov


@dataclass(frozen=True)
class GramianFactors:
    """Low-rank factors of the three Gramians driving the reduction.

    ctrl:  R with R R^T the controllability Gramian (input channel B)
    init:  Rhat with Rhat Rhat^T the controllability Gramian of the X0 channel
    obs:   L with L L^T the observability Gramian
    """

    ctrl: np.ndarray
    init: np.ndarray
    obs: np.ndarray


def gramian_factors(sys, tol=None):
    """Solve the three Lyapunov equations and factor the solutions.

    A P + P A^T + B B^T = 0, A Phat + Phat A^T + X0 X0^T = 0,
    A^T Q + Q A + C^T C = 0.
    """
    require_stable(sys.A)
    R = psd_factor(solve_lyapunov(sys.A, sys.B), tol).factor
    Rhat = psd_factor(solve_lyapunov(sys.A, sys.X0), tol).factor
    L = psd_factor(solve_lyapunov(sys.A.T, sys.C.T), tol).factor
    return GramianFactors(ctrl=R, init=Rhat, obs=L)


@dataclass(frozen=True)
class BtResult:
    """Projection pair and the full Hankel singular value list (length n)."""

    V: np.ndarray
    W: np.ndarray
    hsv: np.ndarray

    @property
    def order(self):
        return self.V.shape[1]


def _numerical_rank(s, shape):
    if s.size == 0:
        return 0
    cut = max(shape) * np.finfo(float).eps * s[0]
    return int(np.count_nonzero(s > cut))


def _sqrt_bt(R, L, r, n):
    """Square-root truncation from Gramian factors; r = 0 gives empty bases."""
    prod = L.T @ R
    if min(prod.shape) == 0:
        s = np.zeros(0)
        U = np.zeros((L.shape[1], 0))
        Zt = np.zeros((0, R.shape[1]))
    else:
        U, s, Zt = np.linalg.svd(prod, full_matrices=False)
    rank = _numerical_rank(s, prod.shape if min(prod.shape) else (1, 1))
    if r > rank:
        raise RankDeficient(f"requested order {r} exceeds numerical rank {rank}")
    if 0 < r < s.size and s[r - 1] <= s[r] * (1 + 1e-12):
        warnings.warn(
            f"singular values {r} and {r + 1} coincide; reduced model stability "
            "is not guaranteed",
            TiedSingularValues,
        )
    scale = 1.0 / np.sqrt(s[:r]) if r else np.zeros(0)
    V = R @ Zt[:r].T * scale
    W = L @ U[:, :r] * scale
    hsv = np.zeros(n)
    hsv[: s.size] = s
    return BtResult(V=V, W=W, hsv=hsv), rank


def bt(A, B, C, r):
    """Balanced truncation bases and Hankel singular values for (A, B, C).

    Returns V, W (n x r, biorthogonal) and all n Hankel singular values
    (zero padded past the rank of the factor product).
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    C = as_matrix(C, "C")
    n = A.shape[0]
    if not 1 <= r <= n:
        raise RankDeficient(f"reduced order must be in [1, {n}], got {r}")
    require_stable(A)
    R = psd_factor(solve_lyapunov(A, B)).factor
    L = psd_factor(solve_lyapunov(A.T, C.T)).factor
    res, _ = _sqrt_bt(R, L, r, n)
    return res


def project(sys, V, W):
    """Petrov-Galerkin projection (W^T A V, W^T B, C V, D)."""
    V = as_matrix(V, "V")
    W = as_matrix(W, "W")
    r = V.shape[1]
    gap = np.linalg.norm(W.T @ V - np.eye(r), "fro")
    if gap > 1e-6:
        raise NotBiorthogonal(f"||W^T V - I||_F = {gap:.3e}")
    return W.T @ sys.A @ V, W.T @ sys.B, sys.C @ V, sys.D.copy()


@dataclass(frozen=True)
class BalancedRealization:
    A: np.ndarray
    G: np.ndarray
    C: np.ndarray
    hsv: np.ndarray
    minimal: bool  # False when balancing fell back to the minimal subsystem


def balance_full(A, G, C):
    """Fully balanced realization of (A, G, C): both Gramians become diag(hsv).

    If the realization is numerically non-minimal the balancing is done on the
    minimal subsystem (smaller state dimension) and `minimal` is set False.
    Dense computation, intended for small n.
    """
    A = as_matrix(A, "A")
    G = as_matrix(G, "G")
    C = as_matrix(C, "C")
    n = A.shape[0]
    require_stable(A)
    R = psd_factor(solve_lyapunov(A, G)).factor
    L = psd_factor(solve_lyapunov(A.T, C.T)).factor
    prod = L.T @ R
    if min(prod.shape) == 0:
        warnings.warn("realization is completely non-minimal", NotMinimalWarning)
        return BalancedRealization(
            np.zeros((0, 0)), np.zeros((0, G.shape[1])), np.zeros((C.shape[0], 0)),
            np.zeros(0), minimal=False,
        )
    U, s, Zt = np.linalg.svd(prod, full_matrices=False)
    rank = _numerical_rank(s, prod.shape)
    minimal = rank >= n
    if not minimal:
        warnings.warn(
            f"numerical rank {rank} < n = {n}; balancing the minimal subsystem",
            NotMinimalWarning,
        )
    k = min(rank, n)
    scale = 1.0 / np.sqrt(s[:k])
    T = R @ Zt[:k].T * scale       # right transform (n x k)
    Tinv = (L @ U[:, :k] * scale).T  # left inverse, Tinv @ T = I_k
    return BalancedRealization(
        A=Tinv @ A @ T, G=Tinv @ G, C=C @ T, hsv=s[:k].copy(), minimal=minimal
    )
