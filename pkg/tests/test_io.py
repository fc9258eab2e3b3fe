import csv
import struct

import numpy as np
import pytest

from semgeom import errors
from semgeom.io import (
    load_cloud,
    load_head,
    write_cloud,
    write_csv_table,
    write_head,
)
from semgeom.types import PointCloud, UnembeddingHead


def test_cloud_roundtrip_f32(tmp_path):
    path = tmp_path / "c.lsm"
    with open(path, "wb") as f:
        f.write(b"LSM1")
        f.write(struct.pack("<IIB", 2, 3, 0))
        f.write(np.zeros(6, dtype="<f4").tobytes())
    c = load_cloud(path)
    assert c.n == 2 and c.d == 3
    assert np.all(c.points == 0)


def test_truncated_cloud(tmp_path):
    path = tmp_path / "c.lsm"
    with open(path, "wb") as f:
        f.write(b"LSM1")
        f.write(struct.pack("<IIB", 2, 3, 1))
        f.write(np.zeros(3, dtype="<f8").tobytes())
    with pytest.raises(errors.TruncatedFile):
        load_cloud(path)


def test_cloud_write_load_bit_identity(tmp_path):
    rng = np.random.default_rng(1)
    c = PointCloud(rng.standard_normal((7, 4)), layer_index=3)
    path = tmp_path / "c.lsm"
    write_cloud(c, path)
    back = load_cloud(path, expected_layer=3)
    assert np.array_equal(back.points, c.points)
    assert back.layer_index == 3


def test_cloud_f32_widened(tmp_path):
    rng = np.random.default_rng(2)
    c = PointCloud(rng.standard_normal((5, 2)))
    path = tmp_path / "c.lsm"
    write_cloud(c, path, dtype=np.float32)
    back = load_cloud(path)
    assert back.points.dtype == np.float64
    assert np.array_equal(back.points, c.points.astype(np.float32).astype(np.float64))


def test_head_identity_no_bias(tmp_path):
    h = UnembeddingHead(np.eye(2))
    path = tmp_path / "h.lsmh"
    write_head(h, path)
    back = load_head(path)
    assert np.array_equal(back.W, np.eye(2))
    assert back.b is None


def test_head_with_bias(tmp_path):
    h = UnembeddingHead(np.eye(3), b=np.array([1.0, 2.0, 3.0]))
    path = tmp_path / "h.lsmh"
    write_head(h, path)
    back = load_head(path)
    assert np.array_equal(back.b, h.b)


def test_bad_magic(tmp_path):
    path = tmp_path / "h.lsmh"
    with open(path, "wb") as f:
        f.write(b"XXXX" + b"\0" * 16)
    with pytest.raises(errors.BadMagic):
        load_head(path)
    with pytest.raises(errors.BadMagic):
        load_cloud(path)


def test_csv_single_row(tmp_path):
    path = tmp_path / "t.csv"
    write_csv_table([(1.0, 2.0)], path, header=["a", "b"])
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "a,b"
    assert [float(x) for x in lines[1].split(",")] == [1.0, 2.0]


def test_csv_empty_rows_header_only(tmp_path):
    path = tmp_path / "t.csv"
    write_csv_table([], path, header=["a", "b"])
    assert path.read_text().strip() == "a,b"


def test_csv_reparse_within_one_ulp(tmp_path):
    # oracle: round-trip through the written text must reproduce the float
    rng = np.random.default_rng(3)
    vals = rng.standard_normal(20) * 10.0 ** rng.integers(-8, 8, size=20)
    path = tmp_path / "t.csv"
    write_csv_table([tuple(vals)], path, header=[f"c{i}" for i in range(20)])
    with open(path) as f:
        rows = list(csv.reader(f))
    parsed = np.array([float(x) for x in rows[1]])
    assert np.all(np.abs(parsed - vals) <= np.spacing(np.abs(vals)))


def test_csv_ragged_rejected(tmp_path):
    with pytest.raises(errors.IoFailure):
        write_csv_table([(1, 2), (1,)], tmp_path / "t.csv", header=["a", "b"])
