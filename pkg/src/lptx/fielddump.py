"""Binary field dumps.

Layout (little-endian)::

    bytes 0-7    magic b"LPTXF1" padded with two NUL bytes
    bytes 8-11   u32 n_points
    bytes 12-15  u32 flags (bit 0: samples are spectral coefficients)
    then         n*n complex samples, row-major, interleaved (re, im) f64

The domain length is not stored; readers pass it in (default 2 pi).
"""
from __future__ import annotations

import math
import os
import struct

import numpy as np

from .grid import Field, Grid

MAGIC = b"LPTXF1\x00\x00"
HEADER = struct.Struct("<8sII")
FLAG_SPECTRAL = 0x1


class DumpFormatError(ValueError):
    pass


def encode_field(field: Field) -> bytes:
    n = field.grid.n_points
    flags = FLAG_SPECTRAL if field.spectral else 0
    body = np.ascontiguousarray(field.values, dtype="<c16").tobytes()
    return HEADER.pack(MAGIC, n, flags) + body


def decode_field(data: bytes, domain_length: float = 2 * math.pi) -> Field:
    if len(data) < HEADER.size:
        raise DumpFormatError("truncated header")
    magic, n, flags = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise DumpFormatError(f"bad magic {magic!r}")
    expected = HEADER.size + 16 * n * n
    if len(data) != expected:
        raise DumpFormatError(f"expected {expected} bytes for n={n}, got {len(data)}")
    values = np.frombuffer(data, dtype="<c16", offset=HEADER.size).reshape(n, n)
    return Field(Grid(n, domain_length), values.astype(complex), bool(flags & FLAG_SPECTRAL))


def save_field(path: str | os.PathLike, field: Field) -> None:
    with open(path, "wb") as fh:
        fh.write(encode_field(field))


def load_field(path: str | os.PathLike, domain_length: float = 2 * math.pi) -> Field:
    with open(path, "rb") as fh:
        return decode_field(fh.read(), domain_length)
