"""Dense linear-algebra kernels: Lyapunov/Sylvester solves, PSD factorization,
matrix exponential, spectral abscissa.

Everything here is dense and intended for desk-scale systems (n up to a few
hundred).  The matrix-equation solves go through SciPy's Bartels-Stewart
routines (real Schur form plus back substitution).
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import DimensionMismatch, NotPsd, NotStable, SingularPencil


def as_matrix(a, name="matrix"):
    """Coerce to a 2-d float array and reject non-finite entries."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.ndim != 2:
        raise DimensionMismatch(f"{name} must be 2-d, got ndim={a.ndim}")
    if a.size and not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return a


def spectral_abscissa(A):
    """Largest real part over the eigenvalues of A."""
    A = as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"spectral_abscissa needs a square matrix, got {A.shape}")
    if A.shape[0] == 0:
        return -np.inf
    return float(np.max(np.linalg.eigvals(A).real))


def require_stable(A, what="A"):
    a = spectral_abscissa(A)
    if not a < 0.0:
        raise NotStable(f"{what} has spectral abscissa {a:.3e} >= 0")
    return a


def solve_lyapunov(A, G):
    """Solve A X + X A^T + G G^T = 0 for symmetric X.

    A must be asymptotically stable.  The result is symmetrized, which keeps
    the downstream eigen/SVD pipeline well behaved.
    """
    A = as_matrix(A, "A")
    G = as_matrix(G, "G")
    n = A.shape[0]
    if A.shape[1] != n:
        raise DimensionMismatch(f"A must be square, got {A.shape}")
    if G.shape[0] != n:
        raise DimensionMismatch(f"G has {G.shape[0]} rows, expected {n}")
    require_stable(A)
    if G.shape[1] == 0:
        return np.zeros((n, n))
    X = sla.solve_continuous_lyapunov(A, -G @ G.T)
    return 0.5 * (X + X.T)


def solve_sylvester(A, B, C):
    """Solve A Y + Y B + C = 0.

    Requires the spectra of A and -B to be disjoint; an overlap surfaces as a
    singular (or wildly ill-conditioned) triangular solve.
    """
    A = as_matrix(A, "A")
    B = as_matrix(B, "B")
    C = as_matrix(C, "C")
    if A.shape[0] != A.shape[1] or B.shape[0] != B.shape[1]:
        raise DimensionMismatch("A and B must be square")
    if C.shape != (A.shape[0], B.shape[0]):
        raise DimensionMismatch(
            f"C must be {A.shape[0]}x{B.shape[0]}, got {C.shape}"
        )
    if min(C.shape) == 0:
        return np.zeros(C.shape)
    ev_a = np.linalg.eigvals(A)
    ev_b = np.linalg.eigvals(B)
    gap = np.min(np.abs(ev_a[:, None] + ev_b[None, :]))
    scale = max(np.linalg.norm(A, 2), np.linalg.norm(B, 2), 1e-300)
    if gap <= 1e-10 * scale:
        raise SingularPencil(
            f"spectra of A and -B overlap (closest eigenvalue sum {gap:.3e})"
        )
    try:
        Y = sla.solve_sylvester(A, B, -C)
    except np.linalg.LinAlgError as exc:
        raise SingularPencil(str(exc)) from exc
    if not np.all(np.isfinite(Y)):
        raise SingularPencil("Sylvester solve produced non-finite entries")
    return Y


@dataclass(frozen=True)
class PsdFactor:
    """Tall factor R with R R^T ~ P, columns ordered by decreasing weight."""

    factor: np.ndarray
    tol: float

    @property
    def rank(self):
        return self.factor.shape[1]


def psd_factor(P, tol=None):
    """Factor a symmetric PSD matrix as R R^T via eigendecomposition.

    Eigenvalues below tol * lambda_max are treated as zero (columns dropped);
    eigenvalues below -tol * lambda_max raise NotPsd.  Default tol is
    n * machine epsilon, which is robust for rank-deficient Gramians.
    """
    P = as_matrix(P, "P")
    n = P.shape[0]
    if P.shape[1] != n:
        raise DimensionMismatch(f"P must be square, got {P.shape}")
    fro = np.linalg.norm(P, "fro")
    if np.linalg.norm(P - P.T, "fro") > 1e-8 * max(fro, 1e-300):
        raise NotPsd("matrix is not symmetric within tolerance")
    if tol is None:
        tol = n * np.finfo(float).eps
    if n == 0:
        return PsdFactor(np.zeros((0, 0)), tol)
    lam, vec = np.linalg.eigh(0.5 * (P + P.T))
    lam_max = max(float(lam[-1]), 0.0)
    cut = tol * lam_max
    if float(lam[0]) < -cut:
        raise NotPsd(f"eigenvalue {lam[0]:.3e} below -tol*lambda_max = {-cut:.3e}")
    keep = lam > cut
    lam = lam[keep][::-1]
    vec = vec[:, keep][:, ::-1]
    return PsdFactor(vec * np.sqrt(lam), tol)


def matrix_exponential(A, t=1.0):
    """e^{A t} by scaling-and-squaring with a Pade approximant (scipy.linalg.expm)."""
    A = as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise DimensionMismatch(f"matrix_exponential needs a square matrix, got {A.shape}")
    if A.shape[0] == 0:
        return np.zeros((0, 0))
    return sla.expm(A * float(t))


def block_diag(*blocks):
    """Block-diagonal stack that tolerates 0-size blocks."""
    blocks = [as_matrix(b) for b in blocks]
    return sla.block_diag(*blocks) if blocks else np.zeros((0, 0))
