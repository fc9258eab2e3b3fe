"""Round-trips through the analysis toolkit's loaders, which define the
consuming side of the LSM1/LSMH contract."""

import os

import numpy as np
import pytest

from lsm_extractor.formats import write_cloud_file, write_head_file
from semgeom.io import load_cloud, load_head


def test_cloud_roundtrip_f32(tmp_path):
    rng = np.random.default_rng(0)
    m = rng.standard_normal((7, 5))
    path = tmp_path / "c.lsm"
    write_cloud_file(path, m, dtype=np.float32)
    cloud = load_cloud(path)
    assert cloud.points.shape == (7, 5)
    np.testing.assert_array_equal(cloud.points, m.astype(np.float32))


def test_cloud_roundtrip_f64(tmp_path):
    rng = np.random.default_rng(1)
    m = rng.standard_normal((4, 3))
    path = tmp_path / "c.lsm"
    write_cloud_file(path, m, dtype=np.float64)
    np.testing.assert_array_equal(load_cloud(path).points, m)


def test_head_roundtrip_with_and_without_bias(tmp_path):
    rng = np.random.default_rng(2)
    W = rng.standard_normal((9, 4))
    b = rng.standard_normal(9)
    p1, p2 = tmp_path / "h1.lsmh", tmp_path / "h2.lsmh"
    write_head_file(p1, W, None, dtype=np.float64)
    write_head_file(p2, W, b, dtype=np.float64)
    h1, h2 = load_head(p1), load_head(p2)
    np.testing.assert_array_equal(h1.W, W)
    assert h1.b is None
    np.testing.assert_array_equal(h2.b, b)


def test_header_bytes(tmp_path):
    path = tmp_path / "c.lsm"
    write_cloud_file(path, np.zeros((2, 3)), dtype=np.float32)
    raw = path.read_bytes()
    assert raw[:4] == b"LSM1"
    assert raw[4:8] == (2).to_bytes(4, "little")
    assert raw[8:12] == (3).to_bytes(4, "little")
    assert raw[12] == 0
    assert len(raw) == 13 + 2 * 3 * 4


def test_bias_length_mismatch_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_head_file(tmp_path / "h.lsmh", np.zeros((3, 2)), np.zeros(4))


def test_no_temp_files_left(tmp_path):
    write_cloud_file(tmp_path / "c.lsm", np.zeros((2, 2)))
    write_head_file(tmp_path / "h.lsmh", np.zeros((2, 2)))
    leftovers = [f for f in os.listdir(tmp_path) if f.endswith(".tmp")]
    assert leftovers == []
