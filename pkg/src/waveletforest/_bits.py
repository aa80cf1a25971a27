"""Bit packing helpers shared by the builders and the serializer.

Bit order convention: bit i (0-based) of a sequence lives in bit (i mod 64)
of word i // 64, i.e. LSB-first within each little-endian word.
"""

from __future__ import annotations

import numpy as np

_M64 = (1 << 64) - 1


def as_bit_array(bits) -> np.ndarray:
    """Normalize a bit sequence ('0101' string, bytes, iterable, ndarray) to uint8 0/1."""
    if isinstance(bits, str):
        if bits and set(bits) - {"0", "1"}:
            raise ValueError("bit string may only contain '0' and '1'")
        return np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0") if bits else np.zeros(0, np.uint8)
    arr = np.asarray(bits)
    if arr.dtype == np.bool_:
        return arr.astype(np.uint8)
    arr = arr.astype(np.uint8)
    if arr.size and arr.max(initial=0) > 1:
        raise ValueError("bit values must be 0 or 1")
    return arr


def pack_bits(bits: np.ndarray) -> np.ndarray:
    """Pack a 0/1 uint8 array into uint64 words (LSB-first)."""
    if len(bits) == 0:
        return np.zeros(0, dtype=np.uint64)
    by = np.packbits(bits, bitorder="little")
    pad = (-len(by)) % 8
    if pad:
        by = np.concatenate([by, np.zeros(pad, np.uint8)])
    return by.view("<u8").astype(np.uint64)


def unpack_bits(words: np.ndarray, m: int) -> np.ndarray:
    """Inverse of pack_bits; returns the first m bits as uint8 0/1."""
    if m == 0:
        return np.zeros(0, np.uint8)
    by = words.astype("<u8").view(np.uint8)
    return np.unpackbits(by, bitorder="little")[:m].copy()


class BitWriter:
    """Append fields of up to 64 bits; flushes completed words as it goes."""

    def __init__(self):
        self._words: list[int] = []
        self._acc = 0
        self._fill = 0
        self.nbits = 0

    def write(self, value: int, width: int) -> None:
        if width < 0 or width > 64:
            raise ValueError("field width must be in [0, 64]")
        if width == 0:
            return
        value &= (1 << width) - 1
        self._acc |= value << self._fill
        self._fill += width
        self.nbits += width
        while self._fill >= 64:
            self._words.append(self._acc & _M64)
            self._acc >>= 64
            self._fill -= 64

    def to_words(self) -> np.ndarray:
        ws = list(self._words)
        if self._fill:
            ws.append(self._acc & _M64)
        return np.array(ws, dtype=np.uint64)


def read_field(words: np.ndarray, pos: int, width: int) -> int:
    """Pure-python field read, for tests and small administrative parsing."""
    if width == 0:
        return 0
    w, off = divmod(pos, 64)
    val = int(words[w]) >> off
    got = 64 - off
    while got < width:
        w += 1
        val |= int(words[w]) << got
        got += 64
    return val & ((1 << width) - 1)
