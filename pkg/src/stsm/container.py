"""Bit-exact binary container for mode and map arrays.

Layout (all integers little-endian unsigned 64-bit unless noted):

    magic   4 bytes       b"STSM"
    version u32 LE        1
    records, each:
        name_len  u64
        name      utf-8 bytes
        rank      u64
        dims      rank x u64
        elem_kind u64     1 = float64, 2 = complex128
        payload   IEEE-754 binary64 LE; complex interleaved (re, im)

The elem_kind word makes mixed real/complex containers self-describing;
everything else is trivially parseable from any language.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import ConfigError

__all__ = ["save_arrays", "load_arrays", "MAGIC", "VERSION"]

MAGIC = b"STSM"
VERSION = 1
_KIND_REAL = 1
_KIND_COMPLEX = 2


def save_arrays(path: str, arrays: dict[str, np.ndarray]) -> None:
    """Write named arrays in insertion order; float64/complex128 only."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", VERSION))
        for name, arr in arrays.items():
            arr = np.asarray(arr)
            if np.iscomplexobj(arr):
                kind, payload = _KIND_COMPLEX, np.ascontiguousarray(arr, dtype="<c16")
            else:
                kind, payload = _KIND_REAL, np.ascontiguousarray(arr, dtype="<f8")
            name_b = name.encode("utf-8")
            fh.write(struct.pack("<Q", len(name_b)))
            fh.write(name_b)
            fh.write(struct.pack("<Q", payload.ndim))
            fh.write(struct.pack(f"<{payload.ndim}Q", *payload.shape))
            fh.write(struct.pack("<Q", kind))
            fh.write(payload.tobytes())


def load_arrays(path: str) -> dict[str, np.ndarray]:
    """Read a container back; inverse of :func:`save_arrays`, bit-exact."""
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] != MAGIC:
        raise ConfigError(f"{path}: not a mode container (bad magic)")
    (version,) = struct.unpack_from("<I", data, 4)
    if version != VERSION:
        raise ConfigError(f"{path}: unsupported container version {version}")
    pos = 8
    out: dict[str, np.ndarray] = {}
    while pos < len(data):
        (name_len,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        name = data[pos: pos + name_len].decode("utf-8")
        pos += name_len
        (rank,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        dims = struct.unpack_from(f"<{rank}Q", data, pos)
        pos += 8 * rank
        (kind,) = struct.unpack_from("<Q", data, pos)
        pos += 8
        count = int(np.prod(dims, dtype=np.int64))
        if kind == _KIND_REAL:
            nbytes, dtype = 8 * count, "<f8"
        elif kind == _KIND_COMPLEX:
            nbytes, dtype = 16 * count, "<c16"
        else:
            raise ConfigError(f"{path}: unknown element kind {kind}")
        if len(data) - pos < nbytes:
            raise ConfigError(f"{path}: truncated container")
        out[name] = np.frombuffer(data[pos: pos + nbytes], dtype=dtype).reshape(dims).copy()
        pos += nbytes
    return out
