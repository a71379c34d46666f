"""Error-bound constants for the reduction methods.

Every bound here has the shape  ||y - y_r||_L2 <= c_u ||u||_L2 + c_x0 ||z0||_2.
The shift methods admit a priori constants built from singular-value tails;
the augmented and two-truncation methods only admit a posteriori constants
that involve the reduced model.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .balancing import balance_full
from .errors import NegativeUnderRoot
from .linalg import psd_factor, solve_lyapunov, solve_sylvester
from .lti import h2_norm


@dataclass(frozen=True)
class BoundConstants:
    """Coefficients of the bound c_u * ||u||_L2 + c_x0 * ||z0||_2."""

    c_u: float
    c_x0: float
    method: str
    orders: tuple
    a_priori: bool = True

    def total(self, u_norm, z0_norm):
        return self.c_u * u_norm + self.c_x0 * z0_norm


def tail_sum(sv, r):
    sv = np.asarray(sv, dtype=float)
    if np.any(np.diff(sv) > 1e-12 * max(float(sv[0]) if sv.size else 0.0, 1e-300)):
        raise ValueError("singular-value list must be nonincreasing")
    return float(np.sum(sv[r:])) if r < sv.size else 0.0


def bt_bound(sigma, r):
    """Standard truncation bound 2 (sigma_{r+1} + ... + sigma_n), valid for x0 = 0."""
    return 2.0 * tail_sum(sigma, r)


def jshift_bound(eta, r, beta):
    """A priori bound of the joint decaying-shift method: c_u = 2 tail,
    c_x0 = beta * c_u."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    c_u = 2.0 * tail_sum(eta, r)
    return BoundConstants(c_u=c_u, c_x0=beta * c_u, method="jshift", orders=(r,))


def sshift_bound(sigma, theta, k, ell):
    """A priori bound of the separate decaying-shift method."""
    return BoundConstants(
        c_u=2.0 * tail_sum(sigma, k),
        c_x0=2.0 * tail_sum(theta, ell),
        method="sshift",
        orders=(k, ell),
    )


def augbt_posteriori_bound(eta, r, L, A, X0, Ar, X0r):
    """A posteriori bound for the input-augmented truncation.

    c_x0 = 3 * 2^{-1/3} * tail^{2/3} * (||L^T A X0||_2 + ||S_r^{1/2} Ar X0r||_2)^{1/3}
    with S_r = diag(eta_1..eta_r); L is the observability factor of the
    augmented system, which coincides with the original one (C is unchanged).
    Spectral matrix norms throughout.
    """
    eta = np.asarray(eta, dtype=float)
    tail = tail_sum(eta, r)
    sqrt_sr = np.sqrt(eta[:r])
    term = float(
        np.linalg.norm(L.T @ A @ X0, 2) + np.linalg.norm(sqrt_sr[:, None] * (Ar @ X0r), 2)
    )
    c_x0 = 3.0 * 2.0 ** (-1.0 / 3.0) * tail ** (2.0 / 3.0) * term ** (1.0 / 3.0)
    return BoundConstants(
        c_u=2.0 * tail, c_x0=c_x0, method="augbt", orders=(r,), a_priori=False
    )


def btbt_posteriori_bound(sys, k, ell):
    """A posteriori bound for the two-truncation method.

    Needs a fully balanced realization (Ab, X0b, Cb) of [A, X0, C]; with Y
    solving  Ab^T Y + Y Ab[:l,:l] + (Cb^T Cb)[:, :l] = 0  and
    T = X0b X0b^T + 2 Y Ab[:l, :], the initial-value constant is
    (sum_{i>l} t_ii theta_i)^{1/2}.  A negative sum under the root is clamped
    to zero with a warning.
    """
    R = psd_factor(solve_lyapunov(sys.A, sys.B)).factor
    L = psd_factor(solve_lyapunov(sys.A.T, sys.C.T)).factor
    prod = L.T @ R
    sigma = np.linalg.svd(prod, compute_uv=False) if min(prod.shape) else np.zeros(0)
    c_u = 2.0 * float(np.sum(sigma[k:])) if k < sigma.size else 0.0

    bal = balance_full(sys.A, sys.X0, sys.C)
    nb = bal.A.shape[0]
    if ell >= nb:
        return BoundConstants(c_u=c_u, c_x0=0.0, method="btbt", orders=(k, ell), a_priori=False)
    Y = solve_sylvester(bal.A.T, bal.A[:ell, :ell], (bal.C.T @ bal.C)[:, :ell])
    T = bal.G @ bal.G.T + 2.0 * Y @ bal.A[:ell, :]
    raw = float(np.sum(np.diag(T)[ell:] * bal.hsv[ell:]))
    if raw < 0:
        warnings.warn(
            f"weighted tail sum {raw:.3e} is negative; clamping the bound at 0",
            NegativeUnderRoot,
        )
    c_x0 = float(np.sqrt(max(raw, 0.0)))
    return BoundConstants(c_u=c_u, c_x0=c_x0, method="btbt", orders=(k, ell), a_priori=False)


def bt_initial_value_error_term(A, Ar, X0, X0r, C, Cr):
    """L2 norm of C e^{At} X0 - Cr e^{Ar t} X0r: the H2 norm of the paired
    difference system with state matrix diag(A, Ar)."""
    n, r = A.shape[0], Ar.shape[0]
    Aaug = np.zeros((n + r, n + r))
    Aaug[:n, :n] = A
    Aaug[n:, n:] = Ar
    Gaug = np.vstack([X0, X0r])
    Caug = np.hstack([C, -Cr])
    return h2_norm(Aaug, Gaug, Caug)
