"""Symbol-sequence normalization shared by the index structures."""

from __future__ import annotations

import numpy as np


def normalize_text(s):
    """Return (codes int64 array, kind) for a str, bytes, or integer sequence.

    Strings map to code points, bytes to byte values; the kind tag lets the
    structures hand symbols back in the caller's own type.
    """
    if isinstance(s, str):
        return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32).astype(np.int64), "str"
    if isinstance(s, (bytes, bytearray, memoryview)):
        return np.frombuffer(bytes(s), dtype=np.uint8).astype(np.int64), "bytes"
    arr = np.asarray(s)
    if arr.ndim != 1:
        raise ValueError("text must be one-dimensional")
    if arr.size and arr.min() < 0:
        raise ValueError("symbols must be non-negative integers")
    return arr.astype(np.int64), "int"


def symbol_to_int(c):
    if isinstance(c, str):
        if len(c) != 1:
            raise ValueError("symbol strings must be single characters")
        return ord(c)
    if isinstance(c, (bytes, bytearray)):
        if len(c) != 1:
            raise ValueError("symbol byte strings must be single bytes")
        return c[0]
    return int(c)


def int_to_symbol(v: int, kind: str):
    if kind == "str":
        return chr(v)
    return int(v)


def symbols_to_ints(cs) -> np.ndarray:
    if isinstance(cs, str):
        return np.frombuffer(cs.encode("utf-32-le"), dtype=np.uint32).astype(np.int64)
    if isinstance(cs, (bytes, bytearray)):
        return np.frombuffer(bytes(cs), dtype=np.uint8).astype(np.int64)
    out = np.asarray([symbol_to_int(c) for c in cs] if not isinstance(cs, np.ndarray) else cs)
    return out.astype(np.int64)
