"""Reduced-order models for LTI systems with nonzero initial conditions.

Six reduction routes are provided:

* ``reduce_bt``     - standard balanced truncation, initial value projected.
* ``reduce_trlbt``  - constant state translation x - x0, extra input column A x0.
* ``reduce_augbt``  - truncation of the input-augmented system [A, [B X0], C].
* ``reduce_btbt``   - separate projection: BT for the input channel, BT of
                      [A, X0, C] for the initial-value channel.
* ``reduce_jshift`` - joint projection with a decaying state shift
                      x - x0 e^{-alpha t}; carries an a priori error bound.
* ``reduce_sshift`` - separate projection with the same decaying shift on the
                      initial-value subsystem.

The shift-based reduced models produce outputs of the form
y_r(t) = C_r x_r(t) + D_r u(t) + F_r z0 e^{-alpha t}; the correction term can
be folded back into standard state-space form with ``expand_rom_phi`` or
``expand_rom_psi``.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .balancing import _numerical_rank, _sqrt_bt, bt, project
from .errors import AlphaResonance, AlphaResonanceWarning, DimensionMismatch
from .linalg import block_diag, matrix_exponential, psd_factor, require_stable, solve_lyapunov
from .lti import LtiSystem, Trajectory, simulate


@dataclass(frozen=True)
class Rom:
    """Reduced model with optional decaying output correction.

    Output law: y_r(t) = Cr x_r(t) + Dr u(t) + Fr z0 e^{-alpha t} with
    x_r(0) = X0r z0.  Methods without a correction term carry Fr = 0 and
    alpha = None; the translation method uses alpha = 0 (constant offset).
    ``hsv`` holds the singular values backing the method's error bound.
    """

    Ar: np.ndarray
    Br: np.ndarray
    Cr: np.ndarray
    Dr: np.ndarray
    X0r: np.ndarray
    Fr: np.ndarray
    alpha: float | None
    method: str
    hsv: np.ndarray

    @property
    def order(self):
        return self.Ar.shape[0]

    @property
    def q(self):
        return self.X0r.shape[1]

    def system(self):
        return LtiSystem(self.Ar, self.Br, self.Cr, self.Dr, self.X0r)


@dataclass(frozen=True)
class SeparateRom:
    """Block-decoupled reduced model: input part + initial-value part.

    The input part (Ak, Bk, Ck, Dk) starts at rest; the initial-value part
    (Al, Cl, X0l, Fl, alpha) has no input.  ``sigma`` and ``theta`` are the
    singular-value lists of the two truncations.
    """

    Ak: np.ndarray
    Bk: np.ndarray
    Ck: np.ndarray
    Dk: np.ndarray
    Al: np.ndarray
    Cl: np.ndarray
    X0l: np.ndarray
    Fl: np.ndarray
    alpha: float | None
    method: str
    sigma: np.ndarray
    theta: np.ndarray

    @property
    def order(self):
        return self.Ak.shape[0] + self.Al.shape[0]

    def combined(self):
        """Assemble the block-diagonal composite model."""
        k, ell = self.Ak.shape[0], self.Al.shape[0]
        q = self.X0l.shape[1]
        m = self.Bk.shape[1]
        return Rom(
            Ar=block_diag(self.Ak, self.Al),
            Br=np.vstack([self.Bk, np.zeros((ell, m))]),
            Cr=np.hstack([self.Ck, self.Cl]),
            Dr=self.Dk.copy(),
            X0r=np.vstack([np.zeros((k, q)), self.X0l]),
            Fr=self.Fl.copy(),
            alpha=self.alpha,
            method=self.method,
            hsv=self.sigma.copy(),
        )


def _bt_clamped(A, G, C, r, n, channel):
    """Square-root BT that clamps r to the channel's numerical rank.

    Separate-projection methods stay usable when one channel is trivial
    (e.g. B = 0): the corresponding part just gets order 0.
    """
    R = psd_factor(solve_lyapunov(A, G)).factor
    L = psd_factor(solve_lyapunov(A.T, C.T)).factor
    prod = L.T @ R
    s = np.linalg.svd(prod, compute_uv=False) if min(prod.shape) else np.zeros(0)
    rank = _numerical_rank(s, prod.shape if min(prod.shape) else (1, 1))
    if r > rank:
        warnings.warn(
            f"{channel} channel has numerical rank {rank} < requested order {r}; "
            f"using order {rank}",
            UserWarning,
        )
        r = rank
    res, _ = _sqrt_bt(R, L, r, n)
    return res


def reduce_bt(sys, r):
    """Standard BT; the initial-value basis is projected with W^T."""
    res = bt(sys.A, sys.B, sys.C, r)
    Ar, Br, Cr, Dr = project(sys, res.V, res.W)
    return Rom(
        Ar=Ar, Br=Br, Cr=Cr, Dr=Dr,
        X0r=res.W.T @ sys.X0,
        Fr=np.zeros((sys.p, sys.q)),
        alpha=None, method="bt", hsv=res.hsv,
    )


def reduce_augbt(sys, r):
    """BT of the input-augmented system [A, [B X0], C]; projection applied to
    the original matrices, so Br = W^T B and X0r = W^T X0."""
    res = bt(sys.A, np.hstack([sys.B, sys.X0]), sys.C, r)
    Ar, Br, Cr, Dr = project(sys, res.V, res.W)
    return Rom(
        Ar=Ar, Br=Br, Cr=Cr, Dr=Dr,
        X0r=res.W.T @ sys.X0,
        Fr=np.zeros((sys.p, sys.q)),
        alpha=None, method="augbt", hsv=res.hsv,
    )


def reduce_trlbt(sys, z0, r):
    """Translation method: shift the state by the fixed x0 = X0 z0.

    BT is applied to [A, [B, A x0], C].  The reduced model is folded back to
    output-correction form with a constant (alpha = 0) correction channel, so
    y_r(0) = y(0) holds by construction.  The projection is tuned to the z0
    given here; the returned model still maps any z0 linearly.
    """
    x0 = sys.initial_state(z0)
    res = bt(sys.A, np.hstack([sys.B, (sys.A @ x0).reshape(-1, 1)]), sys.C, r)
    Ar, Br, Cr, Dr = project(sys, res.V, res.W)
    X0r = np.linalg.solve(Ar, res.W.T @ sys.A @ sys.X0)
    return Rom(
        Ar=Ar, Br=Br, Cr=Cr, Dr=Dr,
        X0r=X0r,
        Fr=sys.C @ sys.X0 - Cr @ X0r,
        alpha=0.0, method="trlbt", hsv=res.hsv,
    )


def _resonant(Ar, alpha):
    r = Ar.shape[0]
    if r == 0:
        return False
    M = Ar + alpha * np.eye(r)
    s = np.linalg.svd(M, compute_uv=False)
    return s[-1] <= 1e-12 * s[0]


def _shifted_column(A, X0, alpha, weight):
    n = A.shape[0]
    return weight * ((A + alpha * np.eye(n)) @ X0)


def reduce_jshift(sys, r, alpha, beta):
    """Joint-projection decaying-shift truncation.

    BT of [A, [B, (1/(beta sqrt(2 alpha))) (A + alpha I) X0], C]; the reduced
    initial-value map and output correction are

        X0r = (Ar + alpha I)^{-1} W^T (A + alpha I) X0,
        Fr  = C X0 - Cr X0r,

    giving y_r(t) = Cr x_r(t) + Dr u(t) + Fr z0 e^{-alpha t} with
    y_r(0) = y(0).  If -alpha is (numerically) an eigenvalue of Ar the rate is
    nudged by a relative 1e-6 and the reduction retried.
    """
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    for _ in range(5):
        weight = 1.0 / (beta * np.sqrt(2.0 * alpha))
        Baug = np.hstack([sys.B, _shifted_column(sys.A, sys.X0, alpha, weight)])
        res = bt(sys.A, Baug, sys.C, r)
        Ar, Br, Cr, Dr = project(sys, res.V, res.W)
        if not _resonant(Ar, alpha):
            break
        warnings.warn(
            f"shift rate alpha={alpha:.6e} resonates with the reduced spectrum; "
            "retrying with a perturbed rate",
            AlphaResonanceWarning,
        )
        alpha = alpha * (1.0 + 1e-6)
    else:
        raise AlphaResonance("could not step off the reduced spectrum after 5 retries")
    shifted = (sys.A + alpha * np.eye(sys.n)) @ sys.X0
    X0r = np.linalg.solve(Ar + alpha * np.eye(r), res.W.T @ shifted)
    return Rom(
        Ar=Ar, Br=Br, Cr=Cr, Dr=Dr,
        X0r=X0r,
        Fr=sys.C @ sys.X0 - Cr @ X0r,
        alpha=alpha, method="jshift", hsv=res.hsv,
    )


def reduce_btbt(sys, k, ell):
    """Separate projection: BT(A, B, C, k) for the input channel and
    BT(A, X0, C, ell) for the initial-value channel, combined block
    diagonally with X0l = What^T X0 and no output correction."""
    require_stable(sys.A)
    inp = _bt_clamped(sys.A, sys.B, sys.C, k, sys.n, "input")
    Ak, Bk, Ck, Dk = project(sys, inp.V, inp.W)
    iv = _bt_clamped(sys.A, sys.X0, sys.C, ell, sys.n, "initial-value")
    Al = iv.W.T @ sys.A @ iv.V
    return SeparateRom(
        Ak=Ak, Bk=Bk, Ck=Ck, Dk=Dk,
        Al=Al, Cl=sys.C @ iv.V,
        X0l=iv.W.T @ sys.X0,
        Fl=np.zeros((sys.p, sys.q)),
        alpha=None, method="btbt", sigma=inp.hsv, theta=iv.hsv,
    )


def reduce_sshift(sys, k, ell, alpha):
    """Separate-projection decaying-shift truncation.

    Input part as in ``reduce_btbt``; the initial-value part applies the
    decaying shift (weight 1/sqrt(2 alpha), no beta) to [A, X0, C].
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    require_stable(sys.A)
    inp = _bt_clamped(sys.A, sys.B, sys.C, k, sys.n, "input")
    Ak, Bk, Ck, Dk = project(sys, inp.V, inp.W)
    for _ in range(5):
        weight = 1.0 / np.sqrt(2.0 * alpha)
        Giv = _shifted_column(sys.A, sys.X0, alpha, weight)
        iv = _bt_clamped(sys.A, Giv, sys.C, ell, sys.n, "initial-value")
        Al = iv.W.T @ sys.A @ iv.V
        if not _resonant(Al, alpha):
            break
        warnings.warn(
            f"shift rate alpha={alpha:.6e} resonates with the reduced spectrum; "
            "retrying with a perturbed rate",
            AlphaResonanceWarning,
        )
        alpha = alpha * (1.0 + 1e-6)
    else:
        raise AlphaResonance("could not step off the reduced spectrum after 5 retries")
    ell_eff = Al.shape[0]
    Cl = sys.C @ iv.V
    shifted = (sys.A + alpha * np.eye(sys.n)) @ sys.X0
    X0l = np.linalg.solve(Al + alpha * np.eye(ell_eff), iv.W.T @ shifted)
    return SeparateRom(
        Ak=Ak, Bk=Bk, Ck=Ck, Dk=Dk,
        Al=Al, Cl=Cl, X0l=X0l,
        Fl=sys.C @ sys.X0 - Cl @ X0l,
        alpha=alpha, method="sshift", sigma=inp.hsv, theta=iv.hsv,
    )


def expand_rom_phi(rom, z0):
    """Fold the correction term into the state by appending phi(t) = e^{-alpha t}.

    Order grows by exactly one.  The result is tied to the given z0: its
    initial state is [X0r z0; 1] (affine in z0) and it is evaluated with the
    scalar coefficient z0' = [1].
    """
    if rom.alpha is None:
        raise ValueError("model has no output-correction term to expand")
    z0 = np.atleast_1d(np.asarray(z0, dtype=float))
    r, m, p = rom.order, rom.Br.shape[1], rom.Cr.shape[0]
    return Rom(
        Ar=block_diag(rom.Ar, np.array([[-rom.alpha]])),
        Br=np.vstack([rom.Br, np.zeros((1, m))]),
        Cr=np.hstack([rom.Cr, (rom.Fr @ z0).reshape(-1, 1)]),
        Dr=rom.Dr.copy(),
        X0r=np.concatenate([rom.X0r @ z0, [1.0]]).reshape(-1, 1),
        Fr=np.zeros((p, 1)),
        alpha=None, method=rom.method + "+phi", hsv=rom.hsv.copy(),
    )


def expand_rom_psi(rom):
    """Fold the correction term into the state via a rank-revealing split of Fr.

    With Fr = Lr Rr (SVD, threshold max(p, q) eps ||Fr||_2), appends the state
    psi(t) = Rr z0 e^{-alpha t}.  The result is in standard form, linear in
    z0, of order r + rank(Fr) <= r + min(p, q).
    """
    if rom.alpha is None:
        raise ValueError("model has no output-correction term to expand")
    p, q = rom.Fr.shape
    r, m = rom.order, rom.Br.shape[1]
    if min(p, q) == 0 or not rom.Fr.any():
        rank = 0
        Lr = np.zeros((p, 0))
        Rr = np.zeros((0, q))
    else:
        U, s, Vt = np.linalg.svd(rom.Fr, full_matrices=False)
        rank = int(np.count_nonzero(s > max(p, q) * np.finfo(float).eps * s[0]))
        Lr = U[:, :rank] * s[:rank]
        Rr = Vt[:rank]
    return Rom(
        Ar=block_diag(rom.Ar, -rom.alpha * np.eye(rank)),
        Br=np.vstack([rom.Br, np.zeros((rank, m))]),
        Cr=np.hstack([rom.Cr, Lr]),
        Dr=rom.Dr.copy(),
        X0r=np.vstack([rom.X0r, Rr]),
        Fr=np.zeros((p, q)),
        alpha=None, method=rom.method + "+psi", hsv=rom.hsv.copy(),
    )


def correction_term(rom, z0, times):
    """Sampled output correction Fr z0 e^{-alpha t} (zero when absent)."""
    z0 = np.atleast_1d(np.asarray(z0, dtype=float))
    fz = rom.Fr @ z0
    if rom.alpha is None or not fz.any():
        return np.zeros((len(times), rom.Fr.shape[0]))
    return np.exp(-rom.alpha * np.asarray(times))[:, None] * fz[None, :]


def rom_output(rom, u, z0, grid):
    """Simulate the reduced dynamics and add the output correction analytically."""
    if isinstance(rom, SeparateRom):
        rom = rom.combined()
    z0 = np.atleast_1d(np.asarray(z0, dtype=float))
    if z0.shape != (rom.q,):
        raise DimensionMismatch(f"z0 must have length {rom.q}, got {z0.shape}")
    base = simulate(rom.system(), u, rom.X0r @ z0, grid)
    return Trajectory(grid.step, base.samples + correction_term(rom, z0, grid.times))


def precompute_initial_responses(srom, basis, grid):
    """Initial-value responses of the decoupled part for each basis coefficient.

    ``basis`` columns are coefficient vectors b_i; returns one trajectory
    y_i(t) = Cl e^{Al t} X0l b_i + Fl b_i e^{-alpha t} per column.  The
    response for any z0 = sum_i zeta_i b_i is the matching superposition.
    """
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    q = srom.X0l.shape[1]
    if basis.shape[0] != q:
        raise DimensionMismatch(f"basis rows must equal q = {q}")
    E = matrix_exponential(srom.Al, grid.step)
    X = srom.X0l @ basis  # (ell, nbasis)
    out = np.empty((grid.npoints, srom.Cl.shape[0], basis.shape[1]))
    decay = (
        np.exp(-srom.alpha * grid.times) if srom.alpha is not None
        else np.ones(grid.npoints)
    )
    F = srom.Fl @ basis
    for kk in range(grid.npoints):
        out[kk] = srom.Cl @ X + decay[kk] * F
        X = E @ X
    return [Trajectory(grid.step, out[:, :, j]) for j in range(basis.shape[1])]


def superpose(trajectories, zeta):
    """Linear combination sum_i zeta_i * trajectories[i]."""
    zeta = np.atleast_1d(np.asarray(zeta, dtype=float))
    if len(zeta) != len(trajectories):
        raise DimensionMismatch("one coefficient per trajectory required")
    acc = np.zeros_like(trajectories[0].samples)
    for c, tr in zip(zeta, trajectories):
        acc = acc + c * tr.samples
    return Trajectory(trajectories[0].step, acc)
