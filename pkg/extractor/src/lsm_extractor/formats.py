"""Writers for the LSM1 cloud and LSMH head binary formats.

Implemented independently of the analysis toolkit: the byte layout is
the contract between the two packages.

LSM1: b"LSM1", n (u32 LE), d (u32 LE), dtype byte (0 = f32, 1 = f64),
then n*d values row-major little-endian.
LSMH: b"LSMH", N (u32 LE), d (u32 LE), has_bias byte, dtype byte,
then W row-major, then b (length N) if has_bias.
"""

import os
import struct
import tempfile

import numpy as np

_DTYPE_CODES = {np.dtype(np.float32): 0, np.dtype(np.float64): 1}


def _atomic_write(path, payload: bytes):
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_cloud_file(path, matrix, dtype=np.float32):
    m = np.asarray(matrix)
    if m.ndim != 2:
        raise ValueError("cloud must be a 2-d matrix")
    dt = np.dtype(dtype)
    header = b"LSM1" + struct.pack("<IIB", m.shape[0], m.shape[1], _DTYPE_CODES[dt])
    body = np.ascontiguousarray(m, dtype=dt.newbyteorder("<")).tobytes()
    _atomic_write(path, header + body)


def write_head_file(path, W, b=None, dtype=np.float32):
    W = np.asarray(W)
    dt = np.dtype(dtype)
    le = dt.newbyteorder("<")
    header = b"LSMH" + struct.pack(
        "<IIBB", W.shape[0], W.shape[1], 0 if b is None else 1, _DTYPE_CODES[dt]
    )
    body = np.ascontiguousarray(W, dtype=le).tobytes()
    if b is not None:
        b = np.asarray(b).ravel()
        if b.shape[0] != W.shape[0]:
            raise ValueError("bias length must equal vocab size")
        body += np.ascontiguousarray(b, dtype=le).tobytes()
    _atomic_write(path, header + body)
