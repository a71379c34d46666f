"""Command-line interface.

Subcommands:

* ``reduce``   - reduce a system bundle with one method, write a ROM bundle.
* ``bounds``   - print bound-constant records (JSON lines) for a method.
* ``simulate`` - simulate a bundle (and optionally a ROM) on a grid and write
                 a trajectory table.
* ``compare``  - run a full comparison described by an INI config file.

Exit codes: 0 success, 2 usage/input error, 3 numerical failure.
"""

import argparse
import configparser
import json
import os
import sys as _sys

import numpy as np

from . import paramopt as po
from .balancing import gramian_factors
from .bounds import (
    augbt_posteriori_bound,
    bt_bound,
    bt_initial_value_error_term,
    btbt_posteriori_bound,
    jshift_bound,
    sshift_bound,
)
from .bundle import (
    atomic_write_text,
    format_table,
    read_rom_bundle,
    read_system_bundle,
    write_report,
    write_rom_bundle,
    write_trajectory,
)
from .errors import (
    AlphaResonance,
    NotBiorthogonal,
    NotPsd,
    NotStable,
    RankDeficient,
    ShiftBtError,
    SingularPencil,
)
from .harness import ExperimentConfig, MethodSpec, construct_example, run_comparison
from .lti import PiecewiseConstantInput, TimeGrid, Trajectory, l2_norm_input, simulate
from .reduction import (
    reduce_augbt,
    reduce_bt,
    reduce_btbt,
    reduce_jshift,
    reduce_sshift,
    reduce_trlbt,
    rom_output,
)

NUMERICAL_ERRORS = (
    NotStable, SingularPencil, NotPsd, RankDeficient, NotBiorthogonal,
    AlphaResonance, np.linalg.LinAlgError,
)


class UsageError(Exception):
    pass


def parse_z0(text, q):
    if text is None:
        return np.zeros(q)
    z0 = np.array([float(v) for v in text.split(",") if v.strip() != ""])
    if z0.shape != (q,):
        raise UsageError(f"--z0 needs {q} comma-separated values")
    return z0


def parse_grid(text):
    try:
        horizon, step = (float(v) for v in text.split(","))
    except Exception as exc:
        raise UsageError("--grid expects T,H") from exc
    return TimeGrid.from_horizon(horizon, step)


def read_input_file(path, m):
    """Breakpoint/value list: each line 't v1 ... vm', values held from t on."""
    bps, vals = [], []
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = [float(v) for v in line.replace(",", " ").split()]
            if len(parts) != 1 + m:
                raise UsageError(f"input line needs 1 + {m} numbers: {line!r}")
            bps.append(parts[0])
            vals.append(parts[1:])
    if not bps:
        raise UsageError("input file is empty")
    return PiecewiseConstantInput(np.array(bps), np.array(vals))


def parse_orders(args, method):
    if method in ("btbt", "sshift"):
        if args.orders is None:
            raise UsageError(f"{method} needs --orders K,L")
        k, ell = (int(v) for v in args.orders.split(","))
        return (k, ell)
    if args.order is None:
        raise UsageError(f"{method} needs --order R")
    return (int(args.order),)


def resolve_alpha(spec, system, blocks, r, beta):
    """--alpha is a mode name or a literal positive number."""
    if spec in ("heur-fro", "heur-spec", "sample", "optimize"):
        mode = spec
    else:
        try:
            return float(spec), None
        except ValueError as exc:
            raise UsageError(f"bad --alpha value {spec!r}") from exc
    if mode == "heur-fro":
        return po.heuristic_alpha("fro-ratio", system.A, system.X0), None
    if mode == "heur-spec":
        return po.heuristic_alpha("spectral", system.A, system.X0), None
    sampled = po.sample_alpha(blocks, r, beta)
    if mode == "sample":
        return sampled.alpha_star, sampled
    refined = po.optimize_alpha(blocks, r, beta, sampled.alpha_star)
    return refined.alpha_star, refined


def cmd_reduce(args):
    system, _ = read_system_bundle(args.system)
    orders = parse_orders(args, args.method)
    beta = None
    alpha = None
    opt = None
    extra = {}
    if args.method in ("jshift", "sshift"):
        factors = gramian_factors(system)
        blocks = po.precompute_blocks(factors, system.A)
        if args.method == "jshift":
            if args.beta == "heur":
                raise UsageError(
                    "reduce cannot derive the heuristic beta (no input/z0 given); "
                    "pass a numeric --beta"
                )
            beta = 1.0 if args.beta is None else float(args.beta)
            alpha, opt = resolve_alpha(args.alpha, system, blocks, orders[0], beta)
        else:
            alpha, opt = resolve_alpha(
                args.alpha, system, blocks.without_input, orders[1], 1.0
            )
    if args.method == "bt":
        rom = reduce_bt(system, orders[0])
    elif args.method == "trlbt":
        z0 = parse_z0(args.z0, system.q)
        rom = reduce_trlbt(system, z0, orders[0])
    elif args.method == "augbt":
        rom = reduce_augbt(system, orders[0])
    elif args.method == "btbt":
        srom = reduce_btbt(system, *orders)
        extra["theta"] = [float(v) for v in srom.theta]
        rom = srom.combined()
    elif args.method == "jshift":
        rom = reduce_jshift(system, orders[0], alpha, beta)
    elif args.method == "sshift":
        srom = reduce_sshift(system, *orders, alpha)
        extra["theta"] = [float(v) for v in srom.theta]
        rom = srom.combined()
    else:
        raise UsageError(f"unknown method {args.method!r}")
    extra["orders"] = list(orders)
    if beta is not None:
        extra["beta"] = beta
    if opt is not None:
        extra["alpha_trace"] = [[float(a), float(c)] for a, c in opt.trace]
        extra["alpha_converged"] = opt.converged
    write_rom_bundle(args.out, rom, extra)
    print(f"wrote ROM bundle to {args.out}")
    return 0


def _bound_record(args, system, method, orders, beta_value):
    factors = gramian_factors(system)
    blocks = po.precompute_blocks(factors, system.A)
    rec = {"method": method}
    if method in ("btbt", "sshift"):
        rec["k"], rec["l"] = orders
    else:
        rec["r"] = orders[0]
    if method == "bt":
        rom = reduce_bt(system, orders[0])
        rec["c_u"] = bt_bound(rom.hsv, orders[0])
        rec["c_x0"] = bt_initial_value_error_term(
            system.A, rom.Ar, system.X0, rom.X0r, system.C, rom.Cr
        )
    elif method == "augbt":
        rom = reduce_augbt(system, orders[0])
        bc = augbt_posteriori_bound(
            rom.hsv, orders[0], factors.obs, system.A, system.X0, rom.Ar, rom.X0r
        )
        rec["c_u"], rec["c_x0"] = bc.c_u, bc.c_x0
    elif method == "btbt":
        bc = btbt_posteriori_bound(system, *orders)
        rec["c_u"], rec["c_x0"] = bc.c_u, bc.c_x0
    elif method == "jshift":
        alpha, _ = resolve_alpha(args.alpha, system, blocks, orders[0], beta_value)
        rec["alpha"] = alpha
        rec["beta"] = beta_value
        eta = np.sort(np.concatenate([po.shift_hsv(blocks, alpha, beta_value),
                                      np.zeros(system.n)]))[::-1][: system.n]
        bc = jshift_bound(eta, orders[0], beta_value)
        rec["c_u"], rec["c_x0"] = bc.c_u, bc.c_x0
    elif method == "sshift":
        iv = blocks.without_input
        alpha, _ = resolve_alpha(args.alpha, system, iv, orders[1], 1.0)
        rec["alpha"] = alpha
        sigma = np.sort(np.concatenate([
            np.linalg.svd(blocks.obs_ctrl, compute_uv=False)
            if min(blocks.obs_ctrl.shape) else np.zeros(0),
            np.zeros(system.n),
        ]))[::-1][: system.n]
        theta = np.sort(np.concatenate([po.shift_hsv(iv, alpha, 1.0),
                                        np.zeros(system.n)]))[::-1][: system.n]
        bc = sshift_bound(sigma, theta, *orders)
        rec["c_u"], rec["c_x0"] = bc.c_u, bc.c_x0
    else:
        raise UsageError(f"no bound is defined for method {method!r}")
    return rec


def cmd_bounds(args):
    system, _ = read_system_bundle(args.system)
    orders = parse_orders(args, args.method)
    if args.beta == "heur":
        if args.input is None or args.z0 is None:
            raise UsageError("--beta heur needs --input and --z0")
        u = read_input_file(args.input, system.m)
        z0 = parse_z0(args.z0, system.q)
        betas = [po.heuristic_beta(l2_norm_input(u), float(np.linalg.norm(z0)))]
    else:
        betas = [float(v) for v in args.beta.split(",")]
    for beta in betas:
        rec = _bound_record(args, system, args.method, orders, beta)
        print(json.dumps(rec))
    return 0


def cmd_simulate(args):
    system, _ = read_system_bundle(args.system)
    grid = parse_grid(args.grid)
    u = (
        read_input_file(args.input, system.m)
        if args.input
        else PiecewiseConstantInput.zero(system.m)
    )
    z0 = parse_z0(args.z0, system.q)
    y = simulate(system, u, system.initial_state(z0), grid)
    if args.rom:
        rom, _ = read_rom_bundle(args.rom)
        yr = rom_output(rom, u, z0, grid)
        err = np.linalg.norm(y.samples - yr.samples, axis=1)
        write_trajectory(args.out, Trajectory(grid.step, err), labels=["err"])
    else:
        write_trajectory(args.out, y)
    print(f"wrote trajectory to {args.out}")
    return 0


def _parse_vector(text):
    return np.array([float(v) for v in text.replace(",", " ").split()])


def load_config(path):
    """Parse the INI experiment description; see configs/ for examples."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    if not cp.read(path):
        raise UsageError(f"cannot read config file {path!r}")
    if not cp.has_section("system") or not cp.has_option("system", "dir"):
        raise UsageError("config needs [system] dir = ...")
    base = os.path.dirname(os.path.abspath(path))

    def resolve(p):
        return p if os.path.isabs(p) else os.path.join(base, p)

    system, _ = read_system_bundle(resolve(cp.get("system", "dir")))
    if cp.has_option("system", "x0"):
        system = construct_example(cp.get("system", "x0"), system)

    if cp.has_option("signal", "input"):
        u = read_input_file(resolve(cp.get("signal", "input")), system.m)
    else:
        bps = _parse_vector(cp.get("signal", "breakpoints"))
        vals = [
            _parse_vector(chunk) for chunk in cp.get("signal", "values").split("|")
        ]
        u = PiecewiseConstantInput(bps, np.array(vals))
    z0 = _parse_vector(cp.get("signal", "z0", fallback=""))
    if z0.size == 0:
        z0 = np.zeros(system.q)

    grid = TimeGrid.from_horizon(
        cp.getfloat("grid", "horizon"), cp.getfloat("grid", "step")
    )

    if not cp.has_section("methods") or not cp.options("methods"):
        raise UsageError("config needs a non-empty [methods] section")
    specs = []
    jshift_betas = None
    if cp.has_option("parameters", "jshift_betas"):
        jshift_betas = [float(v) for v in cp.get("parameters", "jshift_betas").split()]
    for method in cp.options("methods"):
        orders = tuple(int(v) for v in _parse_vector(cp.get("methods", method)).astype(int))
        if method == "jshift" and jshift_betas:
            for beta in jshift_betas:
                specs.append(MethodSpec(method, orders, beta=beta))
        else:
            specs.append(MethodSpec(method, orders))

    alpha_mode = cp.get("parameters", "alpha", fallback="optimize")
    try:
        alpha_mode = float(alpha_mode)
    except ValueError:
        pass
    beta = cp.get("parameters", "beta", fallback="heur")
    if beta != "heur":
        beta = float(beta)

    cfg = ExperimentConfig(
        system=system, methods=tuple(specs), u=u, z0=z0, grid=grid,
        alpha_mode=alpha_mode, beta=beta,
        smooth_window=cp.getint("output", "smooth_window", fallback=1),
    )
    sweep = None
    if cp.getboolean("output", "sweep", fallback=False):
        sweep = {
            "order": cp.getint("output", "sweep_order"),
            "beta": cp.getfloat("output", "sweep_beta", fallback=1.0),
            "points": cp.getint("output", "sweep_points", fallback=121),
        }
    return cfg, sweep


def cmd_compare(args):
    cfg, sweep = load_config(args.config)
    report = run_comparison(cfg)
    os.makedirs(args.out, exist_ok=True)
    write_report(os.path.join(args.out, "report.csv"), report)
    for label, traj in report.error_trajectories.items():
        safe = label.replace("(", "_").replace(")", "").replace("=", "")
        write_trajectory(os.path.join(args.out, f"err_{safe}.csv"), traj, labels=["err"])
    if sweep is not None:
        factors = gramian_factors(cfg.system)
        blocks = po.precompute_blocks(factors, cfg.system.A)
        alphas = np.logspace(-6, 6, sweep["points"])
        rows = [
            [float(a), po.c_u_of_alpha(blocks, sweep["order"], sweep["beta"], a)]
            for a in alphas
        ]
        atomic_write_text(
            os.path.join(args.out, "alpha_sweep.csv"),
            format_table(["alpha", "c_u"], rows),
        )
    failed = [r for r in report.rows if r.error is not None]
    for r in failed:
        print(f"{r.label}: {r.error}", file=_sys.stderr)
    if len(failed) == len(report.rows) and report.rows:
        return 3
    print(f"wrote report for {len(report.rows)} method(s) to {args.out}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="shiftbt",
        description="Balanced truncation model reduction with initial-value support",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", required=True, help="system bundle directory")

    red = sub.add_parser("reduce", parents=[common], help="reduce and write a ROM bundle")
    red.add_argument("--method", required=True)
    red.add_argument("--order", type=int)
    red.add_argument("--orders", help="K,L for the separate-projection methods")
    red.add_argument("--alpha", default="optimize",
                     help="heur-fro | heur-spec | sample | optimize | VALUE")
    red.add_argument("--beta", default=None, help="VALUE | heur")
    red.add_argument("--z0", help="comma-separated coefficients (trlbt)")
    red.add_argument("--out", required=True)
    red.set_defaults(func=cmd_reduce)

    bnds = sub.add_parser("bounds", parents=[common], help="print bound constants")
    bnds.add_argument("--method", required=True)
    bnds.add_argument("--order", type=int)
    bnds.add_argument("--orders")
    bnds.add_argument("--alpha", default="optimize")
    bnds.add_argument("--beta", default="1", help="VALUE[,VALUE...] | heur")
    bnds.add_argument("--input", help="input file (for --beta heur)")
    bnds.add_argument("--z0")
    bnds.set_defaults(func=cmd_bounds)

    sim = sub.add_parser("simulate", parents=[common], help="simulate to a table")
    sim.add_argument("--rom", help="ROM bundle directory (writes error norms)")
    sim.add_argument("--input", help="breakpoint/value list file")
    sim.add_argument("--z0")
    sim.add_argument("--grid", required=True, help="T,H")
    sim.add_argument("--out", required=True)
    sim.set_defaults(func=cmd_simulate)

    cmp_ = sub.add_parser("compare", help="run a comparison config")
    cmp_.add_argument("config")
    cmp_.add_argument("--out", required=True)
    cmp_.set_defaults(func=cmd_compare)
    return ap


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=_sys.stderr)
        return 3
    except (UsageError, ShiftBtError, ValueError, KeyError, OSError,
            configparser.Error) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
