import struct
import subprocess
import sys

import numpy as np
import pytest

from zeromass.harness import make_initial_em, random_spinor, run_duality
from zeromass.io import (
    HEADER,
    MAGIC,
    read_snapshot_binary,
    write_plot_script,
    write_series_csv,
    write_snapshot_binary,
    write_snapshot_csv,
)
from zeromass.solver import GridSpec

GRID = GridSpec(n=8, box=3.0)


def test_binary_roundtrip_real(tmp_path):
    state = make_initial_em(GRID, 1, band=2, with_sources=True)
    path = write_snapshot_binary(tmp_path / "f.zmdw", state)
    header, data = read_snapshot_binary(path)
    assert (header.n, header.box, header.m, header.is_complex) == (8, 3.0, 8, False)
    assert np.array_equal(data, state.stack())


def test_binary_roundtrip_complex(tmp_path):
    psi = random_spinor(GRID, 2, m=4, band=2)
    header, data = read_snapshot_binary(write_snapshot_binary(tmp_path / "p.zmdw", psi))
    assert header.is_complex and header.m == 4
    assert np.array_equal(data, psi.values)


def test_binary_layout(tmp_path):
    psi = random_spinor(GRID, 2, m=2, band=2)
    raw = write_snapshot_binary(tmp_path / "p.zmdw", psi).read_bytes()
    assert raw[:4] == MAGIC
    assert struct.unpack_from("<I", raw, 4)[0] == 1
    assert len(raw) == HEADER.size + 2 * 2 * 8 ** 3 * 8
    # component-major: first block is Re psi0 in C order
    first = np.frombuffer(raw, "<f8", count=8 ** 3, offset=HEADER.size).reshape(8, 8, 8)
    assert np.array_equal(first, psi.values[0].real)


def test_binary_rejects_corruption(tmp_path):
    path = write_snapshot_binary(tmp_path / "f.zmdw", make_initial_em(GRID, 1, band=2))
    raw = bytearray(path.read_bytes())
    (tmp_path / "short").write_bytes(bytes(raw[:-8]))
    with pytest.raises(ValueError, match="payload"):
        read_snapshot_binary(tmp_path / "short")
    raw[:4] = b"NOPE"
    (tmp_path / "magic").write_bytes(bytes(raw))
    with pytest.raises(ValueError, match="magic"):
        read_snapshot_binary(tmp_path / "magic")


def test_snapshot_csv(tmp_path):
    psi = random_spinor(GRID, 2, m=2, band=2)
    path = write_snapshot_csv(tmp_path / "p.csv", psi)
    lines = path.read_text().splitlines()
    assert lines[0] == "x,y,z,re_psi0,im_psi0,re_psi1,im_psi1"
    assert len(lines) == 1 + 8 ** 3
    table = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.array_equal(table[:, 3], psi.values[0].real.ravel())


def test_series_and_plot_script(tmp_path):
    rep = run_duality(GridSpec(n=8, steps=4), 1, band=2)
    cols, table = rep.series_table()
    csv_path = write_series_csv(tmp_path / "duality.csv", cols, table)
    assert csv_path.read_text().splitlines()[0].startswith("t,diff[")
    script = write_plot_script(tmp_path / "plot.py", csv_path.name, "duality")
    compile(script.read_text(), str(script), "exec")
    pytest.importorskip("matplotlib")
    proc = subprocess.run([sys.executable, script.name, "out.png"], cwd=tmp_path, capture_output=True,
                          env={"MPLBACKEND": "Agg", "PATH": ""})
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "out.png").exists()
