# utils/tensor_file.py
"""
CWT1 binary tensor files.

Layout (little-endian): magic ``b"CWT1"``, u32 version (1), u8 dtype code
(0 = float64, 1 = float32), u8 ndim, ndim × u64 extents, then the raw
row-major payload.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from utils.errors import DataError

MAGIC = b"CWT1"
VERSION = 1
DTYPES = {0: np.dtype("<f8"), 1: np.dtype("<f4")}
CODES = {np.dtype("<f8"): 0, np.dtype("<f4"): 1}
_HEADER = struct.Struct("<4sIBB")


def encode_tensor(array, dtype: str = "float64") -> bytes:
    target = np.dtype(dtype).newbyteorder("<")
    if target not in CODES:
        raise DataError(f"CWT1 stores float64 or float32, not {dtype}")
    arr = np.ascontiguousarray(np.asarray(array), dtype=target)
    header = _HEADER.pack(MAGIC, VERSION, CODES[target], arr.ndim)
    extents = struct.pack(f"<{arr.ndim}Q", *arr.shape)
    return header + extents + arr.tobytes(order="C")


def decode_tensor(blob: bytes, source: str = "<bytes>") -> np.ndarray:
    if len(blob) < _HEADER.size:
        raise DataError(f"{source}: truncated CWT1 header")
    magic, version, code, ndim = _HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise DataError(f"{source}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise DataError(f"{source}: unsupported CWT1 version {version}")
    if code not in DTYPES:
        raise DataError(f"{source}: unknown dtype code {code}")
    offset = _HEADER.size
    if len(blob) < offset + 8 * ndim:
        raise DataError(f"{source}: truncated extents")
    shape = struct.unpack_from(f"<{ndim}Q", blob, offset)
    offset += 8 * ndim
    dtype = DTYPES[code]
    expected = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
    if len(blob) - offset != expected:
        raise DataError(f"{source}: payload is {len(blob) - offset} bytes, expected {expected}")
    return np.frombuffer(blob, dtype=dtype, offset=offset).reshape(shape).copy()


def write_tensor(path, array, dtype: str = "float64") -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_tensor(array, dtype))
    return path


def read_tensor(path) -> np.ndarray:
    path = Path(path)
    if not path.exists():
        raise DataError(f"tensor file not found: {path}")
    return decode_tensor(path.read_bytes(), str(path))
