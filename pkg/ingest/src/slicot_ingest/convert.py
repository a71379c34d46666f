"""One-shot converter: SLICOT model-reduction benchmark archive -> system
bundle directory (MatrixMarket matrices plus a key-value manifest).

The benchmark distributions ship a MAT-file container per model (sometimes
inside a zip).  Only the two models used here are supported: beam
(n=348, m=p=1) and CDplayer (n=120, m=p=2).  A missing D is written as zeros.
The output layout is the bundle format the reduction CLI consumes; values are
written with 17 significant digits so the doubles round-trip exactly.

Usage: slicot-convert ARCHIVE NAME OUTDIR
"""

import argparse
import io
import os
import sys
import tempfile
import zipfile

import numpy as np
import scipy.io
import scipy.sparse

FMT = "%.16e"

EXPECTED = {
    "beam": (348, 1, 1),
    "CDplayer": (120, 2, 2),
}


class ConvertError(Exception):
    pass


def _load_mat(archive_path, name):
    """Dict of variables from a .mat file, possibly inside a .zip archive."""
    if not os.path.exists(archive_path):
        raise ConvertError(f"archive not found: {archive_path}")
    if zipfile.is_zipfile(archive_path):
        with zipfile.ZipFile(archive_path) as zf:
            mats = [n for n in zf.namelist() if n.lower().endswith(".mat")]
            wanted = [n for n in mats if os.path.basename(n).lower().startswith(name.lower())]
            if not wanted:
                wanted = mats
            if not wanted:
                raise ConvertError(f"no .mat file inside {archive_path}")
            data = zf.read(wanted[0])
        try:
            return scipy.io.loadmat(io.BytesIO(data))
        except Exception as exc:
            raise ConvertError(f"cannot parse MAT container: {exc}") from exc
    try:
        return scipy.io.loadmat(archive_path)
    except Exception as exc:
        raise ConvertError(f"cannot parse MAT container: {exc}") from exc


def _pick(variables, key):
    for cand in (key, key.lower(), key.upper()):
        if cand in variables:
            M = variables[cand]
            if scipy.sparse.issparse(M):
                M = M.toarray()
            return np.atleast_2d(np.asarray(M, dtype=float))
    return None


def _write_text(path, text):
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


def _write_matrix(path, M):
    lines = ["%%MatrixMarket matrix array real general", "%"]
    lines.append(f"{M.shape[0]} {M.shape[1]}")
    lines.extend(FMT % v for v in M.T.flat)  # column-major per the format
    _write_text(path, "\n".join(lines) + "\n")


def convert(archive_path, name, out_dir):
    """Convert the named benchmark and return the manifest entries."""
    if name not in EXPECTED:
        raise ConvertError(f"unsupported benchmark {name!r}; choose from {sorted(EXPECTED)}")
    variables = _load_mat(archive_path, name)
    A = _pick(variables, "A")
    B = _pick(variables, "B")
    C = _pick(variables, "C")
    if A is None or B is None or C is None:
        raise ConvertError("archive is missing one of the A, B, C matrices")
    n_exp, m_exp, p_exp = EXPECTED[name]
    n, m, p = A.shape[0], B.shape[1], C.shape[0]
    if A.shape != (n_exp, n_exp) or B.shape != (n_exp, m_exp) or C.shape != (p_exp, n_exp):
        raise ConvertError(
            f"dimension mismatch for {name}: got A {A.shape}, B {B.shape}, C {C.shape}; "
            f"expected n={n_exp}, m={m_exp}, p={p_exp}"
        )
    D = _pick(variables, "D")
    if D is None:
        D = np.zeros((p, m))
    if D.shape != (p, m):
        raise ConvertError(f"D has shape {D.shape}, expected {(p, m)}")
    if not all(np.isfinite(M).all() for M in (A, B, C, D)):
        raise ConvertError("archive matrices contain non-finite entries")

    os.makedirs(out_dir, exist_ok=True)
    entries = {"name": name, "n": n, "m": m, "p": p, "q": 0}
    for key, M in (("A", A), ("B", B), ("C", C), ("D", D)):
        fname = f"{key}.mtx"
        _write_matrix(os.path.join(out_dir, fname), M)
        entries[key.lower()] = fname
    _write_text(
        os.path.join(out_dir, "manifest.txt"),
        "\n".join(f"{k} = {v}" for k, v in entries.items()) + "\n",
    )
    return entries


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="slicot-convert",
        description="convert a SLICOT benchmark archive into a system bundle",
    )
    ap.add_argument("archive", help=".mat file or .zip containing it")
    ap.add_argument("name", choices=sorted(EXPECTED), help="benchmark name")
    ap.add_argument("outdir", help="bundle directory to write")
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        entries = convert(args.archive, args.name, args.outdir)
    except ConvertError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"wrote {args.outdir}: n={entries['n']} m={entries['m']} p={entries['p']}"
    )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
