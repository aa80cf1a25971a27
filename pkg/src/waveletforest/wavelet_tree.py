"""Whole-text Huffman-shaped wavelet tree (the standalone baseline).

The tree is level-concatenated: the bits of all internal nodes of one depth
sit next to each other, levels follow each other in one support-augmented
bitvector, and explicit per-level node bounds replace child pointers. Node
order within a level follows the canonical code, so leaves always occupy the
lowest prefixes and internal nodes the highest.
"""

from __future__ import annotations

import numpy as np

from . import _kernels as _k
from ._text import int_to_symbol, normalize_text, symbol_to_int, symbols_to_ints
from .bitvector import bitvector_from_words
from .huffman import canonical_codes_from_lengths, code_lengths


def _level_layout(hist: np.ndarray, sigma: int):
    """Internal-node counts per level, bounds offsets, total bound entries."""
    nint = []
    m_d = 1 if sigma > 1 else 0
    d = 0
    while m_d > 0:
        nint.append(m_d)
        m_d = 2 * m_d - int(hist[d + 1])
        d += 1
    boff = np.zeros(len(nint) + 1, dtype=np.int64)
    for d, m in enumerate(nint):
        boff[d + 1] = boff[d] + m + 1
    return nint, boff


def _emit_levels(dense, codes, lens, hist, sigma, n, total_bits):
    """Emit the level-major bits; returns (words, bounds, boff, lvloff)."""
    nint, boff = _level_layout(hist, sigma)
    bounds = np.zeros(int(boff[-1]), dtype=np.int64)
    words = np.zeros(-(-total_bits // 64), dtype=np.uint64)
    lvloff = np.zeros(len(nint) + 1, dtype=np.int64)
    if sigma > 1:
        nav_sink = np.zeros(max(sigma - 1, 1), dtype=np.int64)
        buf_a = np.empty(n, dtype=np.int32)
        buf_b = np.empty(n, dtype=np.int32)
        cur = np.empty(260, dtype=np.int64)
        nxt = np.empty(260, dtype=np.int64)
        _k._emit_tree(dense.astype(np.int32), codes, lens, hist,
                      words, np.int64(0), nav_sink, np.int64(0),
                      bounds, boff, True, buf_a, buf_b, cur, nxt)
        for d in range(len(nint)):
            lvloff[d + 1] = lvloff[d] + bounds[boff[d + 1] - 1]
    return words, bounds, boff, lvloff


class HuffmanWaveletTree:
    """Rank/select/access over a symbol sequence in code-length many steps."""

    structure = "wt"

    def __init__(self, *, alphabet, totals, lengths, backend, rrr_t, n, kind,
                 bv, bounds, boff, lvloff):
        self.alphabet = alphabet          # sorted distinct symbol values
        self.totals = totals              # occurrences per symbol
        self.lengths = lengths            # canonical code length per symbol
        self.backend = backend
        self.rrr_t = int(rrr_t)
        self.n = int(n)
        self.kind = kind
        self.sigma = len(alphabet)
        self.height = int(lengths.max()) if self.sigma > 1 else 0
        self.total_bits = int((totals * lengths).sum())

        self.codes = canonical_codes_from_lengths(lengths)
        self.hist = (np.bincount(lengths, minlength=self.height + 2).astype(np.int64)
                     if self.sigma > 1 else np.array([1, 0], dtype=np.int64))
        order = np.argsort(lengths, kind="stable")
        self.leafsym = order.astype(np.int32)      # dense ids in canonical order
        self.leafoff = np.concatenate([[0], np.cumsum(self.hist)]).astype(np.int64)

        self.bounds = bounds
        self.boff = boff
        self.lvloff = lvloff
        self.bits = bv
        self._wmeta = np.array([self.n, self.sigma, self.height, *bv.kernel_args[:4]],
                               dtype=np.int64)
        self._code_len = lengths.astype(np.int64)

    # -- queries ------------------------------------------------------------

    def _dense_of(self, c) -> int:
        v = symbol_to_int(c)
        i = int(np.searchsorted(self.alphabet, v))
        if i < len(self.alphabet) and self.alphabet[i] == v:
            return i
        return -1

    def rank(self, i: int, c) -> int:
        """Occurrences of c among the first i symbols."""
        if not 0 <= i <= self.n:
            raise IndexError(f"prefix length {i} out of range [0, {self.n}]")
        cd = self._dense_of(c)
        if cd < 0:
            return 0
        return int(_k._wt_rank_one(self._wmeta, self.codes, self._code_len, self.hist,
                                   self.lvloff, self.bounds, self.boff, self.totals,
                                   *self.bits.kernel_args[4:], np.int64(i), np.int64(cd)))

    def select(self, r: int, c):
        """Position of the r-th occurrence of c, or None when absent."""
        if r < 1:
            raise ValueError("occurrence index must be >= 1")
        cd = self._dense_of(c)
        if cd < 0:
            return None
        st_s = np.empty(66, dtype=np.int64)
        st_b = np.empty(66, dtype=np.int64)
        r0 = np.empty(66, dtype=np.int64)
        ck = np.full(1, -1, dtype=np.int64)
        pos = int(_k._wt_select_one(self._wmeta, self.codes, self._code_len, self.hist,
                                    self.lvloff, self.bounds, self.boff, self.totals,
                                    *self.bits.kernel_args[4:], np.int64(r), np.int64(cd),
                                    ck, st_s, st_b, r0))
        return None if pos < 0 else pos

    def access(self, i: int):
        """The i-th symbol, in the type the tree was built from."""
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} out of range [1, {self.n}]")
        cd = int(_k._wt_access_one(self._wmeta, self.codes, self._code_len, self.hist,
                                   self.lvloff, self.bounds, self.boff,
                                   self.leafsym, self.leafoff,
                                   *self.bits.kernel_args[4:], np.int64(i)))
        return int_to_symbol(int(self.alphabet[cd]), self.kind)

    # -- batch forms --------------------------------------------------------

    def _dense_many(self, cs):
        vals = symbols_to_ints(cs)
        idx = np.searchsorted(self.alphabet, vals)
        idx[idx >= self.sigma] = self.sigma - 1
        miss = self.alphabet[idx] != vals
        idx[miss] = -1
        return idx.astype(np.int64)

    def rank_many(self, idx, cs):
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        out = np.empty(len(idx), dtype=np.int64)
        _k._wt_rank_many(self._wmeta, self.codes, self._code_len, self.hist,
                         self.lvloff, self.bounds, self.boff, self.totals,
                         *self.bits.kernel_args[4:], idx, self._dense_many(cs), out)
        return out

    def select_many(self, rs, cs):
        rs = np.ascontiguousarray(rs, dtype=np.int64)
        out = np.empty(len(rs), dtype=np.int64)
        _k._wt_select_many(self._wmeta, self.codes, self._code_len, self.hist,
                           self.lvloff, self.bounds, self.boff, self.totals,
                           *self.bits.kernel_args[4:], rs, self._dense_many(cs), out)
        return out

    def access_many(self, idx):
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        out = np.empty(len(idx), dtype=np.int64)
        _k._wt_access_many(self._wmeta, self.codes, self._code_len, self.hist,
                           self.lvloff, self.bounds, self.boff,
                           self.leafsym, self.leafoff,
                           *self.bits.kernel_args[4:], idx, out)
        return self.alphabet[out]


def build_wt(s, backend: str = "plain", rrr_t: int = 63) -> HuffmanWaveletTree:
    """Build the baseline Huffman-shaped wavelet tree over a symbol sequence."""
    codes, kind = normalize_text(s)
    n = len(codes)
    if n < 1:
        raise ValueError("text must be non-empty")
    alphabet, dense = np.unique(codes, return_inverse=True)
    sigma = len(alphabet)
    totals = np.bincount(dense, minlength=sigma).astype(np.int64)
    lengths = code_lengths(totals)
    if lengths.max(initial=0) > 63:
        raise ValueError("input induces code lengths beyond 63 bits")
    total_bits = int((totals * lengths).sum())
    cw = canonical_codes_from_lengths(lengths)
    hist = (np.bincount(lengths, minlength=int(lengths.max()) + 2).astype(np.int64)
            if sigma > 1 else np.array([1, 0], dtype=np.int64))
    words, bounds, boff, lvloff = _emit_levels(
        dense.astype(np.int64), cw, lengths.astype(np.int64), hist, sigma, n, total_bits)
    bv = bitvector_from_words(words, total_bits, backend, rrr_t)
    return HuffmanWaveletTree(alphabet=alphabet.astype(np.int64), totals=totals,
                              lengths=lengths, backend=backend, rrr_t=rrr_t, n=n,
                              kind=kind, bv=bv, bounds=bounds, boff=boff, lvloff=lvloff)
