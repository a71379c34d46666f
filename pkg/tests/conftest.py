import numpy as np
import pytest

from shiftbt import LtiSystem, PiecewiseConstantInput, TimeGrid


def random_stable(n, rng, margin=1.0):
    """Random dense matrix shifted left of the imaginary axis by `margin`."""
    M = rng.standard_normal((n, n))
    return M - (np.linalg.norm(M, 2) + margin) * np.eye(n)


def random_system(rng, n=8, m=2, p=2, q=2, margin=1.0):
    return LtiSystem(
        A=random_stable(n, rng, margin),
        B=rng.standard_normal((n, m)),
        C=rng.standard_normal((p, n)),
        D=np.zeros((p, m)),
        X0=rng.standard_normal((n, q)) if q else np.zeros((n, 0)),
    )


def oscillator_system(rng, n=60, m=2, p=2, q=0):
    """Lightly damped modal system; its Hankel singular values decay slowly,
    so truncation stays meaningful at large reduced orders."""
    import scipy.linalg as sla

    blocks = []
    for i in range(n // 2):
        d = rng.uniform(0.05, 0.3)
        w = 1.0 + 3.0 * i + rng.uniform(0.0, 1.0)
        blocks.append(np.array([[-d, w], [-w, -d]]))
    if n % 2:
        blocks.append(np.array([[-1.0]]))
    return LtiSystem(
        A=sla.block_diag(*blocks),
        B=rng.standard_normal((n, m)),
        C=rng.standard_normal((p, n)),
        D=np.zeros((p, m)),
        X0=rng.standard_normal((n, q)) if q else np.zeros((n, 0)),
    )


def random_l2_input(rng, m, step, t_off=4.0):
    """Piecewise-constant input supported on [0, t_off], breakpoints on the grid."""
    nseg = rng.integers(1, 4)
    cuts = np.sort(rng.integers(1, int(round(t_off / step)), size=nseg))
    cuts = np.unique(cuts) * step
    bps = np.concatenate([[0.0], cuts])
    vals = rng.standard_normal((len(bps), m))
    vals[-1] = 0.0
    return PiecewiseConstantInput(bps, vals)


def grid_for(sys, u, step=0.01, tol=1e-8):
    """Grid long enough that the homogeneous tail is below `tol`."""
    from shiftbt import default_horizon

    horizon = default_horizon(sys.A, tol=tol, after=float(u.breakpoints[-1]))
    horizon = np.ceil(horizon / step) * step
    return TimeGrid.from_horizon(horizon, step)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
