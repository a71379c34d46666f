import os
import shutil
import subprocess
import zipfile

import numpy as np
import pytest
import scipy.io
import scipy.sparse

from slicot_ingest import ConvertError, convert
from slicot_ingest.convert import main


def beam_like_matrices(rng):
    """Stable matrices with the beam benchmark's dimensions (n=348, m=p=1)."""
    n = 348
    diag = -np.linspace(0.005, 5.0, n)
    off = 0.01 * rng.standard_normal(n - 1)
    A = np.diag(diag) + np.diag(off, 1) - np.diag(off, -1)
    B = rng.standard_normal((n, 1))
    C = rng.standard_normal((1, n))
    return A, B, C


def write_mat(path, mats, fmt="5", sparse_a=False):
    data = dict(mats)
    if sparse_a:
        data["A"] = scipy.sparse.csc_matrix(data["A"])
    scipy.io.savemat(path, data, format=fmt)


def read_manifest(path):
    out = {}
    for line in open(path):
        if line.strip():
            k, _, v = line.partition("=")
            out[k.strip()] = v.strip()
    return out


def read_mtx(path):
    with open(path) as fh:
        assert fh.readline().startswith("%%MatrixMarket matrix array real")
        line = fh.readline()
        while line.startswith("%"):
            line = fh.readline()
        rows, cols = (int(v) for v in line.split())
        vals = np.array([float(fh.readline()) for _ in range(rows * cols)])
    return vals.reshape((cols, rows)).T


@pytest.mark.parametrize("fmt", ["4", "5"])
def test_convert_beam_shape(tmp_path, fmt):
    rng = np.random.default_rng(0)
    A, B, C = beam_like_matrices(rng)
    mat = tmp_path / "beam.mat"
    write_mat(mat, {"A": A, "B": B, "C": C}, fmt=fmt)
    out = tmp_path / "bundle"
    entries = convert(mat, "beam", out)
    assert (entries["n"], entries["m"], entries["p"]) == (348, 1, 1)
    manifest = read_manifest(out / "manifest.txt")
    assert manifest["n"] == "348" and manifest["m"] == "1" and manifest["p"] == "1"
    # D absent from the archive: written as zeros
    assert np.array_equal(read_mtx(out / "D.mtx"), np.zeros((1, 1)))


def test_convert_roundtrip_exact(tmp_path):
    rng = np.random.default_rng(1)
    A, B, C = beam_like_matrices(rng)
    mat = tmp_path / "beam.mat"
    write_mat(mat, {"A": A, "B": B, "C": C}, sparse_a=True)
    out = tmp_path / "bundle"
    convert(mat, "beam", out)
    assert np.array_equal(read_mtx(out / "A.mtx"), A)
    assert np.array_equal(read_mtx(out / "B.mtx"), B)
    assert np.array_equal(read_mtx(out / "C.mtx"), C)


def test_convert_idempotent(tmp_path):
    rng = np.random.default_rng(2)
    A, B, C = beam_like_matrices(rng)
    mat = tmp_path / "beam.mat"
    write_mat(mat, {"A": A, "B": B, "C": C})
    out = tmp_path / "bundle"
    convert(mat, "beam", out)
    first = {f: (out / f).read_bytes() for f in os.listdir(out)}
    convert(mat, "beam", out)
    second = {f: (out / f).read_bytes() for f in os.listdir(out)}
    assert first == second


def test_convert_zip_archive(tmp_path):
    rng = np.random.default_rng(3)
    n = 120
    A = np.diag(-np.linspace(0.1, 10.0, n))
    B = rng.standard_normal((n, 2))
    C = rng.standard_normal((2, n))
    D = rng.standard_normal((2, 2))
    mat = tmp_path / "CDplayer.mat"
    write_mat(mat, {"A": A, "B": B, "C": C, "D": D})
    archive = tmp_path / "CDplayer.zip"
    with zipfile.ZipFile(archive, "w") as zf:
        zf.write(mat, "CDplayer.mat")
    out = tmp_path / "bundle"
    entries = convert(archive, "CDplayer", out)
    assert (entries["n"], entries["m"], entries["p"]) == (120, 2, 2)
    assert np.array_equal(read_mtx(out / "D.mtx"), D)


def test_convert_missing_archive(tmp_path):
    assert main([str(tmp_path / "nope.mat"), "beam", str(tmp_path / "o")]) == 2


def test_convert_garbage_archive(tmp_path):
    bad = tmp_path / "bad.mat"
    bad.write_bytes(b"this is not a MAT container")
    assert main([str(bad), "beam", str(tmp_path / "o")]) == 2


def test_convert_dimension_mismatch(tmp_path):
    rng = np.random.default_rng(4)
    mat = tmp_path / "beam.mat"
    write_mat(mat, {"A": -np.eye(10), "B": rng.standard_normal((10, 1)),
                    "C": rng.standard_normal((1, 10))})
    with pytest.raises(ConvertError, match="dimension mismatch"):
        convert(mat, "beam", tmp_path / "o")
    assert main([str(mat), "beam", str(tmp_path / "o")]) == 2


def test_convert_unknown_name(tmp_path):
    mat = tmp_path / "x.mat"
    write_mat(mat, {"A": -np.eye(2), "B": np.ones((2, 1)), "C": np.ones((1, 2))})
    assert main([str(mat), "iss", str(tmp_path / "o")]) == 2


@pytest.mark.skipif(shutil.which("shiftbt") is None, reason="reduction CLI not on PATH")
def test_bundle_loads_in_reduction_cli(tmp_path):
    # the bundle directory is the interface contract: the reduction CLI must
    # accept the converter's output (this also checks stability of A on load)
    rng = np.random.default_rng(5)
    A, B, C = beam_like_matrices(rng)
    mat = tmp_path / "beam.mat"
    write_mat(mat, {"A": A, "B": B, "C": C})
    out = tmp_path / "bundle"
    convert(mat, "beam", out)
    proc = subprocess.run(
        ["shiftbt", "bounds", "--system", str(out), "--method", "bt", "--order", "10"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    assert '"c_u"' in proc.stdout
