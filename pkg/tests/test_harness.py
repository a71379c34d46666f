import dataclasses

import numpy as np
import pytest

from shiftbt import (
    ExperimentConfig,
    MethodSpec,
    PiecewiseConstantInput,
    TimeGrid,
    Trajectory,
    bt,
    construct_example,
    error_trajectory,
    reduce_bt,
    run_comparison,
    simulate,
    smooth,
)
from shiftbt.errors import DimensionTooSmall

from conftest import grid_for, random_l2_input, random_system


def test_error_trajectory_lossless(rng):
    sys = random_system(rng, n=5, m=1, p=1, q=1)
    rom = reduce_bt(sys, 5)
    u = random_l2_input(rng, 1, 0.01, t_off=1.0)
    z0 = rng.standard_normal(1)
    grid = TimeGrid.from_horizon(3.0, 0.01)
    y = simulate(sys, u, sys.initial_state(z0), grid)
    err = error_trajectory(y, rom, u, z0, grid)
    assert np.max(err.samples) <= 1e-8


def test_error_trajectory_zero(rng):
    sys = random_system(rng, n=4, m=1, p=1, q=1)
    rom = reduce_bt(sys, 2)
    grid = TimeGrid.from_horizon(2.0, 0.01)
    u = PiecewiseConstantInput.zero(1)
    y = simulate(sys, u, np.zeros(4), grid)
    err = error_trajectory(y, rom, u, [0.0], grid)
    assert np.max(err.samples) == 0.0


def test_smooth_constant_and_identity():
    traj = Trajectory(0.1, np.full((20, 2), 3.0))
    assert np.array_equal(smooth(traj, 5).samples, traj.samples)
    wiggly = Trajectory(0.1, np.arange(10.0).reshape(-1, 1))
    assert np.array_equal(smooth(wiggly, 1).samples, wiggly.samples)


def test_smooth_alternating():
    sig = np.array([1.0, -1.0] * 5).reshape(-1, 1)
    out = smooth(Trajectory(1.0, sig), 3).samples[:, 0]
    assert np.allclose(np.abs(out[1:-1]), 1.0 / 3.0)


def test_smooth_rejects_even_window():
    with pytest.raises(ValueError):
        smooth(Trajectory(1.0, np.zeros((5, 1))), 4)


def test_construct_example_beam(rng):
    sys = random_system(rng, n=110, m=1, p=1, q=0, margin=2.0)
    out = construct_example("beam-x0", sys)
    nz = np.nonzero(out.X0)
    assert out.X0.shape == (110, 2)
    assert list(zip(*nz)) == [(4, 0), (100, 1)]
    assert out.X0[4, 0] == 1.0 and out.X0[100, 1] == 100.0


def test_construct_example_beam_too_small(rng):
    with pytest.raises(DimensionTooSmall):
        construct_example("beam-x0", random_system(rng, n=20))


def test_construct_example_cdplayer(rng):
    from conftest import oscillator_system

    sys = oscillator_system(rng, n=60, m=2, p=2)
    out = construct_example("cdplayer-x0", sys)
    assert out.X0.shape == (60, 2)
    assert np.allclose(out.X0.T @ out.X0, np.eye(2), atol=1e-12)
    res = bt(sys.A, sys.B, sys.C, 50)
    assert np.linalg.norm(res.W.T @ out.X0, "fro") <= 1e-8


def full_config(rng, z0=None, **kw):
    sys = random_system(rng, n=14, m=2, p=2, q=2, margin=0.8)
    u = random_l2_input(rng, 2, 0.01, t_off=1.0)
    grid = grid_for(sys, u, step=0.01)
    methods = (
        MethodSpec("bt", (6,)),
        MethodSpec("trlbt", (6,)),
        MethodSpec("augbt", (6,)),
        MethodSpec("jshift", (6,)),
        MethodSpec("btbt", (3, 3)),
        MethodSpec("sshift", (3, 3)),
    )
    z0 = rng.standard_normal(2) if z0 is None else z0
    return ExperimentConfig(system=sys, methods=methods, u=u, z0=z0, grid=grid, **kw)


def test_run_comparison_six_methods(rng):
    cfg = full_config(rng)
    report = run_comparison(cfg)
    assert len(report.rows) == 6
    assert [r.label for r in report.rows] == sorted(r.label for r in report.rows)
    for row in report.rows:
        assert row.error is None, row.error
        assert row.l2_error is not None and np.isfinite(row.l2_error)
    assert not report.any_violation


def test_run_comparison_homogeneous(rng):
    cfg = full_config(rng, z0=np.zeros(2), beta=1.0)
    report = run_comparison(cfg)
    by = {r.method: r for r in report.rows}
    assert not report.any_violation
    # with x0 = 0 both truncations obey their a priori input bounds, so the
    # measured errors can differ by at most the two bound totals
    gap = abs(by["bt"].l2_error - by["jshift"].l2_error)
    assert gap <= by["bt"].c_u * report.u_norm + by["jshift"].bound + 1e-6


def test_run_comparison_empty():
    rng = np.random.default_rng(0)
    sys = random_system(rng, n=5)
    u = PiecewiseConstantInput.zero(2)
    cfg = ExperimentConfig(
        system=sys, methods=(), u=u, z0=np.zeros(2),
        grid=TimeGrid.from_horizon(1.0, 0.1),
    )
    assert run_comparison(cfg).rows == []


def test_run_comparison_lossless_linf(rng):
    sys = random_system(rng, n=6, m=1, p=1, q=1)
    u = random_l2_input(rng, 1, 0.01, t_off=1.0)
    grid = grid_for(sys, u, step=0.01)
    z0 = rng.standard_normal(1)
    cfg = ExperimentConfig(
        system=sys, methods=(MethodSpec("bt", (6,)),), u=u, z0=z0, grid=grid,
    )
    report = run_comparison(cfg)
    ymax = float(np.max(np.linalg.norm(report.fom_output.samples, axis=1)))
    assert report.rows[0].linf_error <= 1e-7 * (1.0 + ymax)


def test_run_comparison_deterministic(rng):
    cfg = full_config(rng, beta=1.0, alpha_mode="sample")
    r1 = run_comparison(cfg)
    r2 = run_comparison(cfg)
    for a, b in zip(r1.rows, r2.rows):
        da, db = dataclasses.asdict(a), dataclasses.asdict(b)
        da.pop("seconds"), db.pop("seconds")
        assert da == db  # bit-identical apart from timing


def test_run_comparison_records_failures(rng):
    sys = random_system(rng, n=5, m=1, p=1, q=1)
    u = random_l2_input(rng, 1, 0.01, t_off=1.0)
    cfg = ExperimentConfig(
        system=sys,
        methods=(MethodSpec("bt", (99,)), MethodSpec("jshift", (2,))),
        u=u, z0=np.ones(1), grid=grid_for(sys, u, step=0.01), beta=1.0,
    )
    report = run_comparison(cfg)
    failed = [r for r in report.rows if r.error is not None]
    assert len(failed) == 1 and failed[0].method == "bt"
    assert "RankDeficient" in failed[0].error


def test_randomized_bound_regression():
    # 500 instances, n <= 20, alternating over the methods with a priori bounds
    violations = 0
    betas = (0.1, 1.0, 10.0)
    for seed in range(500):
        gen = np.random.default_rng(90000 + seed)
        n = int(gen.integers(4, 21))
        sys = random_system(gen, n=n, m=2, p=2, q=2, margin=1.0)
        probe = reduce_bt(sys, 1).hsv
        rank = int(np.count_nonzero(probe > 2 * n * np.finfo(float).eps * probe[0]))
        r = int(gen.integers(2, max(rank, 3)))
        if seed % 2:
            spec = MethodSpec("jshift", (r,), beta=betas[seed % 3])
        else:
            spec = MethodSpec("sshift", (max(r // 2, 1), max(r // 2, 1)))
        u = random_l2_input(gen, 2, 0.02, t_off=0.5)
        cfg = ExperimentConfig(
            system=sys, methods=(spec,), u=u, z0=gen.standard_normal(2),
            grid=grid_for(sys, u, step=0.02), beta=1.0,
            alpha_mode=float(10.0 ** gen.uniform(-1.5, 1.5)),
        )
        report = run_comparison(cfg)
        assert report.rows[0].error is None, report.rows[0].error
        violations += sum(row.bound_violated for row in report.rows)
    assert violations == 0
