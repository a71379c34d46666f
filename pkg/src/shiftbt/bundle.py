"""On-disk formats: system/ROM bundles (MatrixMarket matrices plus a
key-value manifest), delimited trajectory and report tables.

All numeric text output uses 17-significant-digit scientific notation so a
re-parse reproduces the doubles exactly.  Files are written atomically
(temp file + rename).
"""


import json
import os
import tempfile

import numpy as np
import scipy.io
import scipy.sparse

from .lti import LtiSystem, Trajectory
from .reduction import Rom

FMT = "%.16e"  # 17 significant digits


def atomic_write_text(path, text):
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_matrix(path, M):
    # MatrixMarket dense array format, written directly: scipy's writer tops
    # out at 16 significant digits, one short of an exact float64 round trip.
    M = np.atleast_2d(np.asarray(M, dtype=float))
    lines = ["%%MatrixMarket matrix array real general", "%"]
    lines.append(f"{M.shape[0]} {M.shape[1]}")
    lines.extend(FMT % v for v in M.T.flat)  # column-major per the format
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_matrix(path):
    M = scipy.io.mmread(path)
    if scipy.sparse.issparse(M):
        M = M.toarray()
    return np.atleast_2d(np.asarray(M, dtype=float))


def write_manifest(path, entries):
    lines = [f"{k} = {v}" for k, v in entries.items()]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_manifest(path):
    entries = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    return entries


SYSTEM_MATRICES = ("A", "B", "C", "D", "X0")


def write_system_bundle(dirpath, sys, name="system"):
    """Lay out an LTI system as one MatrixMarket file per matrix + manifest."""
    os.makedirs(dirpath, exist_ok=True)
    entries = {"name": name, "n": sys.n, "m": sys.m, "p": sys.p, "q": sys.q}
    for key in SYSTEM_MATRICES:
        M = getattr(sys, key)
        if M.shape[1] == 0:
            continue  # optional zero-width blocks (no X0 / no D columns)
        fname = f"{key}.mtx"
        write_matrix(os.path.join(dirpath, fname), M)
        entries[key.lower()] = fname
    write_manifest(os.path.join(dirpath, "manifest.txt"), entries)


def read_system_bundle(dirpath):
    manifest = read_manifest(os.path.join(dirpath, "manifest.txt"))
    n = int(manifest["n"])
    m = int(manifest["m"])
    p = int(manifest["p"])
    q = int(manifest.get("q", 0))

    def load(key, shape):
        fname = manifest.get(key.lower())
        if fname is None:
            return np.zeros(shape)
        M = read_matrix(os.path.join(dirpath, fname))
        if M.shape != shape:
            raise ValueError(f"{key} has shape {M.shape}, manifest says {shape}")
        return M

    sys = LtiSystem(
        A=load("A", (n, n)),
        B=load("B", (n, m)),
        C=load("C", (p, n)),
        D=load("D", (p, m)),
        X0=load("X0", (n, q)),
    )
    return sys, manifest.get("name", "system")


ROM_MATRICES = ("Ar", "Br", "Cr", "Dr", "X0r", "Fr")


def write_rom_bundle(dirpath, rom, extra=None):
    """Write the six reduced matrices plus a JSON metadata record.

    Zero-size blocks (no inputs, no initial-value basis) are recorded in the
    metadata instead of as files.
    """
    os.makedirs(dirpath, exist_ok=True)
    for key in ROM_MATRICES:
        M = getattr(rom, key)
        if min(M.shape) > 0:
            write_matrix(os.path.join(dirpath, f"{key}.mtx"), M)
    meta = {
        "method": rom.method,
        "order": rom.order,
        "m": rom.Br.shape[1],
        "p": rom.Cr.shape[0],
        "q": rom.q,
        "alpha": rom.alpha,
        "hsv": [float(v) for v in rom.hsv],
    }
    if extra:
        meta.update(extra)
    atomic_write_text(
        os.path.join(dirpath, "rom.json"), json.dumps(meta, indent=2) + "\n"
    )


def read_rom_bundle(dirpath):
    with open(os.path.join(dirpath, "rom.json")) as fh:
        meta = json.load(fh)
    r, m, p, q = meta["order"], meta["m"], meta["p"], meta["q"]
    shapes = {
        "Ar": (r, r), "Br": (r, m), "Cr": (p, r), "Dr": (p, m),
        "X0r": (r, q), "Fr": (p, q),
    }
    mats = {}
    for key, shape in shapes.items():
        path = os.path.join(dirpath, f"{key}.mtx")
        mats[key] = read_matrix(path) if os.path.exists(path) else np.zeros(shape)
        if mats[key].shape != shape:
            raise ValueError(f"{key} has shape {mats[key].shape}, metadata says {shape}")
    alpha = meta.get("alpha")
    return Rom(
        **mats,
        alpha=None if alpha is None else float(alpha),
        method=meta["method"],
        hsv=np.asarray(meta["hsv"], dtype=float),
    ), meta


def format_table(header, rows):
    """Comma-delimited table with full-precision numerics."""
    out = [",".join(header)]
    for row in rows:
        cells = []
        for v in row:
            if v is None:
                cells.append("")
            elif isinstance(v, float):
                cells.append(FMT % v)
            else:
                cells.append(str(v))
        out.append(",".join(cells))
    return "\n".join(out) + "\n"


def write_trajectory(path, traj, labels=None):
    p = traj.samples.shape[1]
    if labels is None:
        labels = [f"y{i + 1}" for i in range(p)]
    header = ["t"] + list(labels)
    rows = [
        [float(t)] + [float(v) for v in sample]
        for t, sample in zip(traj.times, traj.samples)
    ]
    atomic_write_text(path, format_table(header, rows))


def read_trajectory(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.array(
            [[float(c) if c else np.nan for c in line.strip().split(",")] for line in fh if line.strip()]
        )
    t = data[:, 0]
    step = float(t[1] - t[0]) if len(t) > 1 else 1.0
    return Trajectory(step, data[:, 1:]), header[1:]


REPORT_COLUMNS = (
    "label", "method", "orders", "alpha", "beta", "c_u", "c_x0", "a_priori",
    "l2_error", "linf_error", "bound", "bound_violated", "seconds", "error",
)


def write_report(path, report):
    rows = []
    for r in report.rows:
        rows.append([
            r.label, r.method, "x".join(str(o) for o in r.orders),
            r.alpha, r.beta, r.c_u, r.c_x0,
            "" if r.a_priori is None else str(r.a_priori).lower(),
            r.l2_error, r.linf_error, r.bound,
            str(r.bound_violated).lower(), r.seconds, r.error or "",
        ])
    atomic_write_text(path, format_table(REPORT_COLUMNS, rows))
