"""Binary tensor file format, bit-exact across machines.

Layout (all little-endian):
    bytes 0..3    magic "STPT"
    bytes 4..7    version, u32 (currently 1)
    bytes 8..11   rank, u32
    then rank u64 extents
    then the payload: row-major IEEE-754 float64, 8 * prod(dims) bytes.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from ..errors import TensorFileError

MAGIC = b"STPT"
VERSION = 1


def tensor_to_bytes(array) -> bytes:
    data = getattr(array, "data", array)
    arr = np.asarray(data, dtype=np.float64)
    if arr.ndim > 0:  # ascontiguousarray would promote 0-d to 1-d
        arr = np.ascontiguousarray(arr)
    parts = [MAGIC, struct.pack("<II", VERSION, arr.ndim),
             struct.pack(f"<{arr.ndim}Q", *arr.shape),
             arr.astype("<f8", copy=False).tobytes()]
    return b"".join(parts)


def tensor_from_bytes(blob: bytes, base: int = 0):
    """Decode one record starting at ``base``; returns (array, end offset).

    Error offsets are absolute within ``blob`` so corruption reports point
    at the right byte in multi-record containers.
    """
    if len(blob) < base + 4 or blob[base:base + 4] != MAGIC:
        raise TensorFileError(
            f"bad magic {blob[base:base + 4]!r}, expected {MAGIC!r}",
            offset=base)
    if len(blob) < base + 12:
        raise TensorFileError("truncated header", offset=len(blob))
    version, rank = struct.unpack_from("<II", blob, base + 4)
    if version != VERSION:
        raise TensorFileError(f"unsupported version {version}", offset=base + 4)
    dims_end = base + 12 + 8 * rank
    if len(blob) < dims_end:
        raise TensorFileError("truncated dimension list", offset=len(blob))
    dims = struct.unpack_from(f"<{rank}Q", blob, base + 12)
    count = 1
    for d in dims:
        count *= d
    end = dims_end + 8 * count
    if len(blob) < end:
        raise TensorFileError(
            f"payload length {len(blob) - dims_end} != expected {8 * count}",
            offset=len(blob))
    out = np.frombuffer(blob, dtype="<f8", count=count, offset=dims_end)
    return out.astype(np.float64).reshape(dims), end


def write_tensor_file(path, array) -> None:
    Path(path).write_bytes(tensor_to_bytes(array))


def read_tensor_file(path) -> np.ndarray:
    blob = Path(path).read_bytes()
    arr, end = tensor_from_bytes(blob, 0)
    if end != len(blob):
        raise TensorFileError(f"{len(blob) - end} trailing bytes after payload",
                              offset=end)
    return arr
