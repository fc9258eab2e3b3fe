"""Binary point-cloud / head file formats and CSV emission.

Cloud files ("LSM1"): magic, n (u32 LE), d (u32 LE), dtype byte
(0 = float32, 1 = float64), then n*d values row-major little-endian.

Head files ("LSMH"): magic, N (u32 LE), d (u32 LE), has_bias byte,
dtype byte, then W row-major, then b (length N) if has_bias.
"""

import csv
import struct

import numpy as np

from .errors import BadMagic, IoFailure, TruncatedFile
from .types import PointCloud, UnembeddingHead

CLOUD_MAGIC = b"LSM1"
HEAD_MAGIC = b"LSMH"

_DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<f8")}
_DTYPE_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}


def _read_exact(f, size, what):
    buf = f.read(size)
    if len(buf) != size:
        raise TruncatedFile(f"file ended while reading {what}")
    return buf


def _read_matrix(f, rows, cols, dtype_code):
    if dtype_code not in _DTYPES:
        raise BadMagic(f"unknown dtype byte {dtype_code}")
    dt = _DTYPES[dtype_code]
    raw = _read_exact(f, rows * cols * dt.itemsize, "payload")
    return np.frombuffer(raw, dtype=dt).reshape(rows, cols).astype(np.float64)


def load_cloud(path, expected_layer=None) -> PointCloud:
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic")
        if magic != CLOUD_MAGIC:
            raise BadMagic(f"expected {CLOUD_MAGIC!r}, got {magic!r}")
        n, d = struct.unpack("<II", _read_exact(f, 8, "header"))
        (dtype_code,) = struct.unpack("<B", _read_exact(f, 1, "dtype"))
        pts = _read_matrix(f, n, d, dtype_code)
    layer = expected_layer if expected_layer is not None else 0
    return PointCloud(pts, layer_index=layer, source_id=str(path))


def write_cloud(cloud: PointCloud, path, dtype=np.float64):
    dt = np.dtype(dtype)
    code = _DTYPE_CODES[dt]
    with open(path, "wb") as f:
        f.write(CLOUD_MAGIC)
        f.write(struct.pack("<IIB", cloud.n, cloud.d, code))
        f.write(np.ascontiguousarray(cloud.points, dtype=dt.newbyteorder("<")).tobytes())


def load_head(path) -> UnembeddingHead:
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic")
        if magic != HEAD_MAGIC:
            raise BadMagic(f"expected {HEAD_MAGIC!r}, got {magic!r}")
        N, d = struct.unpack("<II", _read_exact(f, 8, "header"))
        has_bias, dtype_code = struct.unpack("<BB", _read_exact(f, 2, "flags"))
        W = _read_matrix(f, N, d, dtype_code)
        b = None
        if has_bias:
            b = _read_matrix(f, N, 1, dtype_code).ravel()
    return UnembeddingHead(W, b)


def write_head(head: UnembeddingHead, path, dtype=np.float64):
    dt = np.dtype(dtype)
    code = _DTYPE_CODES[dt]
    le = dt.newbyteorder("<")
    with open(path, "wb") as f:
        f.write(HEAD_MAGIC)
        f.write(struct.pack("<IIBB", head.vocab_size, head.d,
                            1 if head.b is not None else 0, code))
        f.write(np.ascontiguousarray(head.W, dtype=le).tobytes())
        if head.b is not None:
            f.write(np.ascontiguousarray(head.b, dtype=le).tobytes())


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return f"{value:.17g}"
    return str(value)


def write_csv_table(rows, path, header=None):
    """Write rectangular rows as RFC-4180 CSV with a header row.

    Floats are printed with 17 significant digits so a re-parse is
    within 1 ulp of the input.
    """
    rows = list(rows)
    widths = {len(r) for r in rows}
    if len(widths) > 1:
        raise IoFailure("rows must be rectangular")
    try:
        with open(path, "w", newline="") as f:
            w = csv.writer(f)
            if header is not None:
                w.writerow(header)
            for r in rows:
                w.writerow([_fmt(v) for v in r])
    except OSError as e:
        raise IoFailure(str(e)) from e
