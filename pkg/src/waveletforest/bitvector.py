"""Bit sequences with rank and select support.

Two interchangeable backends: an uncompressed vector with a two-level count
directory plus sampled select positions, and an RRR-compressed vector storing
per-block (popcount class, enumerative offset) pairs with a sparse group
directory. Both answer access/rank/select identically for the same bits.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as _k
from ._bits import as_bit_array, pack_bits, unpack_bits

_EMPTY_U16 = np.zeros(0, dtype=np.uint16)
_EMPTY_U64 = np.zeros(0, dtype=np.uint64)

DEFAULT_SUPERBLOCK_BITS = 512
DEFAULT_SELECT_STRIDE = 8192


def _select_samples(words, cum, m, stride, bitval):
    """Positions (0-based) of every (stride*k + 1)-th bit equal to bitval."""
    total_ones = int(cum[-1])
    total = total_ones if bitval == 1 else m - total_ones
    if total == 0:
        return _EMPTY_U64
    targets = np.arange(1, total + 1, stride, dtype=np.int64)
    if bitval == 1:
        per_word = cum
    else:
        per_word = np.arange(len(cum), dtype=np.int64) * 64 - cum
    widx = np.searchsorted(per_word, targets, side="left") - 1
    rem = targets - per_word[widx]
    out = np.empty(len(targets), dtype=np.int64)
    _k._inword_select_fill(words, widx.astype(np.int64), rem.astype(np.int64),
                           np.int64(bitval), out)
    return out.astype(np.uint64)


class PlainBitVector:
    """Uncompressed bits with superblock/word rank counts and select samples."""

    backend = "plain"

    def __init__(self, words, m, sb_bits, stride, sups, rel, s1, s0):
        self.words = words
        self.m = int(m)
        self.sb_bits = int(sb_bits)
        self.stride = int(stride)
        self._sups = sups
        self._rel = rel
        self._s1 = s1
        self._s0 = s0

    @classmethod
    def from_words(cls, words, m, sb_bits=DEFAULT_SUPERBLOCK_BITS, stride=DEFAULT_SELECT_STRIDE):
        if sb_bits % 64 != 0 or sb_bits <= 0 or sb_bits > 65536:
            raise ValueError("superblock size must be a positive multiple of 64 up to 65536 bits")
        if stride < 1:
            raise ValueError("select sample stride must be positive")
        words = np.ascontiguousarray(words, dtype=np.uint64)
        wps = sb_bits // 64
        nwords = len(words)
        pc = np.bitwise_count(words).astype(np.int64)
        cum = np.concatenate([np.zeros(1, np.int64), np.cumsum(pc)])
        nsup = -(-nwords // wps) if nwords else 0
        idxs = np.minimum(np.arange(nsup + 1, dtype=np.int64) * wps, nwords)
        sups = cum[idxs].astype(np.uint64)
        if nwords:
            rel = (cum[:-1] - cum[np.arange(nwords) // wps * wps]).astype(np.uint16)
        else:
            rel = _EMPTY_U16
        s1 = _select_samples(words, cum, m, stride, 1)
        s0 = _select_samples(words, cum, m, stride, 0)
        return cls(words, m, sb_bits, stride, sups, rel, s1, s0)

    # the uniform (tag, m, p0, p1, a, b, c, d, e) bundle used by the kernels
    @property
    def kernel_args(self):
        return (np.int64(0), np.int64(self.m), np.int64(self.sb_bits), np.int64(self.stride),
                self.words, self._sups, self._s1, self._s0, self._rel)

    def __len__(self):
        return self.m

    @property
    def ones(self) -> int:
        return int(self._sups[-1])

    def access(self, i: int) -> int:
        """The i-th bit, 1-based."""
        if not 1 <= i <= self.m:
            raise IndexError(f"position {i} out of range [1, {self.m}]")
        return int(_k._getbit(self.words, np.int64(i - 1)))

    def rank1(self, i: int) -> int:
        """Set bits among the first i bits."""
        if not 0 <= i <= self.m:
            raise IndexError(f"prefix length {i} out of range [0, {self.m}]")
        return int(_k._plain_rank1(self.words, self._sups, self._rel,
                                   np.int64(self.sb_bits), np.int64(self.m), np.int64(i)))

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def _select(self, r, bitval):
        if r < 1:
            raise ValueError("occurrence index must be >= 1")
        samples = self._s1 if bitval else self._s0
        pos = int(_k._plain_select(self.words, self._sups, samples,
                                   np.int64(self.sb_bits), np.int64(self.stride),
                                   np.int64(self.m), np.int64(r), np.int64(bitval)))
        return None if pos < 0 else pos

    def select1(self, r: int):
        """Position of the r-th set bit; None when fewer than r exist."""
        return self._select(r, 1)

    def select0(self, r: int):
        return self._select(r, 0)

    def to_bits(self) -> np.ndarray:
        return unpack_bits(self.words, self.m)

    # batch helpers (tests, differential checks)
    def rank1_many(self, idx):
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        out = np.empty(len(idx), dtype=np.int64)
        _k._bv_rank1_many(*self.kernel_args, idx, out)
        return out

    def select_many(self, rs, bitval=1):
        rs = np.ascontiguousarray(rs, dtype=np.int64)
        out = np.empty(len(rs), dtype=np.int64)
        _k._bv_select_many(*self.kernel_args, rs, np.int64(bitval), out)
        return out

    def access_many(self, idx):
        idx = np.ascontiguousarray(idx, dtype=np.int64) - 1
        out = np.empty(len(idx), dtype=np.int64)
        _k._bv_access_many(*self.kernel_args, idx, out)
        return out


class RrrBitVector:
    """RRR-compressed bits: per-block classes and enumerative offsets."""

    backend = "rrr"

    def __init__(self, cls_words, off_words, dir_rank, dir_off, m, t, group=_k.RRR_GROUP):
        self.cls_words = cls_words
        self.off_words = off_words
        self.dir_rank = dir_rank
        self.dir_off = dir_off
        self.m = int(m)
        self.t = int(t)
        self.group = int(group)

    @classmethod
    def from_words(cls, words, m, t=63, group=_k.RRR_GROUP):
        if t not in _k.RRR_BLOCK_SIZES:
            raise ValueError(f"RRR block size must be one of {_k.RRR_BLOCK_SIZES}, got {t}")
        words = np.ascontiguousarray(words, dtype=np.uint64)
        classes, off_bits = _k._rrr_scan(words, np.int64(m), np.int64(t))
        nblocks = len(classes)
        cw = int(t).bit_length()
        ngroups = -(-nblocks // group) if nblocks else 0
        cls_words = np.zeros(-(-(nblocks * cw) // 64) or 0, dtype=np.uint64)
        off_words = np.zeros(max(-(-(int(off_bits) + 64) // 64), 1), dtype=np.uint64)
        dir_rank = np.zeros(ngroups + 1, dtype=np.uint64)
        dir_off = np.zeros(ngroups + 1, dtype=np.uint64)
        _k._rrr_pack(words, np.int64(m), np.int64(t), np.int64(group), classes,
                     cls_words, off_words, dir_rank, dir_off)
        return cls(cls_words, off_words, dir_rank, dir_off, m, t, group)

    @property
    def kernel_args(self):
        return (np.int64(1), np.int64(self.m), np.int64(self.t), np.int64(self.group),
                self.cls_words, self.off_words, self.dir_rank, self.dir_off, _EMPTY_U16)

    def __len__(self):
        return self.m

    @property
    def ones(self) -> int:
        return int(self.dir_rank[-1])

    def access(self, i: int) -> int:
        if not 1 <= i <= self.m:
            raise IndexError(f"position {i} out of range [1, {self.m}]")
        return int(_k._rrr_access(self.cls_words, self.off_words, self.dir_rank, self.dir_off,
                                  np.int64(self.t), np.int64(self.group),
                                  np.int64(self.m), np.int64(i - 1)))

    def rank1(self, i: int) -> int:
        if not 0 <= i <= self.m:
            raise IndexError(f"prefix length {i} out of range [0, {self.m}]")
        return int(_k._rrr_rank1(self.cls_words, self.off_words, self.dir_rank, self.dir_off,
                                 np.int64(self.t), np.int64(self.group),
                                 np.int64(self.m), np.int64(i)))

    def rank0(self, i: int) -> int:
        return i - self.rank1(i)

    def _select(self, r, bitval):
        if r < 1:
            raise ValueError("occurrence index must be >= 1")
        pos = int(_k._rrr_select(self.cls_words, self.off_words, self.dir_rank, self.dir_off,
                                 np.int64(self.t), np.int64(self.group),
                                 np.int64(self.m), np.int64(r), np.int64(bitval)))
        return None if pos < 0 else pos

    def select1(self, r: int):
        return self._select(r, 1)

    def select0(self, r: int):
        return self._select(r, 0)

    def decode(self) -> np.ndarray:
        """Reconstruct the original bit sequence (encode/decode identity check)."""
        out = np.empty(self.m, dtype=np.int64)
        if self.m:
            _k._bv_access_many(*self.kernel_args, np.arange(self.m, dtype=np.int64), out)
        return out.astype(np.uint8)

    to_bits = decode

    @property
    def classes(self) -> np.ndarray:
        """Per-block popcounts (decoded from the packed class stream)."""
        nblocks = -(-self.m // self.t) if self.m else 0
        out = np.empty(nblocks, dtype=np.int64)
        if nblocks:
            _k._unpack_fields(self.cls_words, np.int64(nblocks),
                              np.int64(int(self.t).bit_length()), out)
        return out

    rank1_many = PlainBitVector.rank1_many
    select_many = PlainBitVector.select_many
    access_many = PlainBitVector.access_many


def build_plain(bits, sb_bits=DEFAULT_SUPERBLOCK_BITS, stride=DEFAULT_SELECT_STRIDE) -> PlainBitVector:
    """Build the uncompressed variant from a bit sequence (empty allowed)."""
    arr = as_bit_array(bits)
    return PlainBitVector.from_words(pack_bits(arr), len(arr), sb_bits, stride)


def build_rrr(bits, t=63) -> RrrBitVector:
    """Build the RRR variant; t must be one of 15, 31, 63, 127."""
    arr = as_bit_array(bits)
    return RrrBitVector.from_words(pack_bits(arr), len(arr), t)


def bitvector_from_words(words, m, backend="plain", rrr_t=63,
                         sb_bits=DEFAULT_SUPERBLOCK_BITS, stride=DEFAULT_SELECT_STRIDE):
    if backend == "plain":
        return PlainBitVector.from_words(words, m, sb_bits, stride)
    if backend == "rrr":
        return RrrBitVector.from_words(words, m, rrr_t)
    raise ValueError(f"unknown bitvector backend {backend!r}")
