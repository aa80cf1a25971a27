"""Block-partitioned wavelet-tree index with hierarchical rank directories.

The text is cut into blocks, superblocks, and hyperblocks (b | b_s | b_h).
Each block gets its own pointerless canonical-Huffman wavelet tree; the bits
of all trees live in one merged bitvector, block-major then level-major.
Ranks at partition boundaries are kept in relative form: an absolute count
per (symbol, hyperblock), a hyperblock-relative count per (symbol,
superblock), and a superblock-relative count per block for the block's own
local alphabet only. Select composes six steps: two binary searches, a
right-to-left header scan, a root-to-leaf descent that records a frame
stack, a local select that unwinds the stack, and the final offset addition.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels as _k
from ._bits import BitWriter
from ._text import int_to_symbol, normalize_text, symbol_to_int, symbols_to_ints
from .bitvector import DEFAULT_SELECT_STRIDE, DEFAULT_SUPERBLOCK_BITS, bitvector_from_words
from .huffman import MAX_BLOCK_HEIGHT, canonical_codes_from_lengths, code_lengths

MAX_BLOCK_SIZE = 1 << 16


@dataclass(frozen=True)
class ForestParams:
    block: int = 1 << 13
    superblock: int = 1 << 20
    hyperblock: int = 1 << 32
    nav_headers: bool = True
    backend: str = "plain"
    rrr_t: int = 63
    bv_superblock_bits: int = DEFAULT_SUPERBLOCK_BITS
    bv_select_stride: int = DEFAULT_SELECT_STRIDE

    def validate(self) -> None:
        if self.block < 1 or self.block > MAX_BLOCK_SIZE:
            raise ValueError(f"block size must be in [1, {MAX_BLOCK_SIZE}]")
        if self.superblock % self.block != 0:
            raise ValueError("block size must divide superblock size")
        if self.hyperblock % self.superblock != 0:
            raise ValueError("superblock size must divide hyperblock size")
        if self.backend not in ("plain", "rrr"):
            raise ValueError(f"unknown backend {self.backend!r}")
        if self.backend == "rrr" and self.rrr_t not in _k.RRR_BLOCK_SIZES:
            raise ValueError(f"RRR block size must be one of {_k.RRR_BLOCK_SIZES}")


@dataclass(frozen=True)
class SelectTrace:
    """Intermediate values of one six-step select, for debugging and tests."""

    hyperblock: int      # i_h, 1-based
    superblock: int      # i_s, 1-based
    block: int           # i_b, 1-based
    local_rank: int      # j', the occurrence index relative to the block
    local_position: int  # k, the position inside the block


class DescentStack:
    """Frames recorded while walking from a block-tree root to a leaf."""

    def __init__(self, starts, lens, zeros, bits, depth, leaf_count, block):
        self.starts = starts[:depth].copy()   # global bit offsets of segments
        self.lens = lens[:depth].copy()
        self.zeros = zeros[:depth].copy()
        self.bits = bits[:depth].copy()       # branch taken below each frame
        self.depth = int(depth)
        self.leaf_count = int(leaf_count)     # occurrences of the symbol in the block
        self.block = int(block)               # 1-based block index

    def __len__(self):
        return self.depth


def _descend_scratch():
    return (np.full(2, -1, dtype=np.int64), np.zeros(8, dtype=np.int64),
            np.empty(23, dtype=np.int64),
            np.empty(24, dtype=np.int64), np.empty(24, dtype=np.int64),
            np.empty(24, dtype=np.int64))


def _access_scratch():
    return (np.empty(260, dtype=np.int64), np.empty(260, dtype=np.int64),
            np.empty(24, dtype=np.int64), np.empty(24, dtype=np.int64))


def _stack_scratch():
    return (np.empty(23, dtype=np.int64), np.empty(23, dtype=np.int64),
            np.empty(23, dtype=np.int64), np.empty(23, dtype=np.int64))


class WaveletForest:
    structure = "wf"

    def __init__(self, *, params, n, kind, alphabet, totals, ah, as_, sbmap, sbinv, sbsig,
                 hdroff, treeoff, hdr_words, bv, total_bits):
        self.params = params
        self.n = int(n)
        self.kind = kind
        self.alphabet = alphabet
        self.totals = totals
        self.ah = ah
        self.as_ = as_
        self.sbmap = sbmap
        self.sbinv = sbinv
        self.sbsig = sbsig
        self.hdroff = hdroff
        self.treeoff = treeoff
        self.hdr_words = hdr_words
        self.bits = bv
        self.total_bits = int(total_bits)
        self.sigma = len(alphabet)

        b, bs, bh = params.block, params.superblock, params.hyperblock
        nb = -(-self.n // b)
        nsb = -(-self.n // bs)
        nh = -(-self.n // bh)
        self.meta = np.array([
            self.n, self.sigma, b, bs, bh, nb, nsb, nh,
            bs // b, bh // bs, (bs - 1).bit_length(), 1 if params.nav_headers else 0,
            *bv.kernel_args[:4],
        ], dtype=np.int64)

    # -- plumbing -----------------------------------------------------------

    @property
    def _qargs(self):
        return (self.meta, self.ah, self.as_, self.totals, self.sbmap, self.sbinv,
                self.sbsig, self.hdroff, self.treeoff, self.hdr_words,
                *self.bits.kernel_args[4:])

    def _dense_of(self, c) -> int:
        v = symbol_to_int(c)
        i = int(np.searchsorted(self.alphabet, v))
        if i < len(self.alphabet) and self.alphabet[i] == v:
            return i
        return -1

    def _dense_many(self, cs):
        vals = symbols_to_ints(cs)
        idx = np.searchsorted(self.alphabet, vals)
        idx[idx >= self.sigma] = self.sigma - 1
        miss = self.alphabet[idx] != vals
        idx[miss] = -1
        return idx.astype(np.int64)

    def count(self, c) -> int:
        cd = self._dense_of(c)
        return 0 if cd < 0 else int(self.totals[cd])

    # -- queries ------------------------------------------------------------

    def rank(self, i: int, c) -> int:
        """Occurrences of c among the first i symbols."""
        if not 0 <= i <= self.n:
            raise IndexError(f"prefix length {i} out of range [0, {self.n}]")
        cd = self._dense_of(c)
        if cd < 0:
            return 0
        return int(_k._f_rank_one(*self._qargs, np.int64(i), np.int64(cd),
                                  *_descend_scratch(), *_stack_scratch()))

    def select(self, j: int, c):
        """Position of the j-th occurrence of c, or None when absent."""
        pos, _ = self.select_trace(j, c)
        return pos

    def select_trace(self, j: int, c):
        """Like select, but also reports the six-step intermediates."""
        if j < 1:
            raise ValueError("occurrence index must be >= 1")
        cd = self._dense_of(c)
        if cd < 0:
            return None, None
        res = _k._f_select_one(*self._qargs, np.int64(j), np.int64(cd),
                               *_descend_scratch(), *_stack_scratch())
        pos = int(res[0])
        if pos < 0:
            return None, None
        trace = SelectTrace(hyperblock=int(res[1]), superblock=int(res[2]),
                            block=int(res[3]), local_rank=int(res[4]),
                            local_position=int(res[5]))
        return pos, trace

    def access(self, i: int):
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} out of range [1, {self.n}]")
        cd = int(_k._f_access_one(*self._qargs, np.int64(i), *_access_scratch()))
        return int_to_symbol(int(self.alphabet[cd]), self.kind)

    def rank_many(self, idx, cs):
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        out = np.empty(len(idx), dtype=np.int64)
        _k._f_rank_many(*self._qargs, idx, self._dense_many(cs), out)
        return out

    def select_many(self, rs, cs):
        rs = np.ascontiguousarray(rs, dtype=np.int64)
        out = np.empty(len(rs), dtype=np.int64)
        _k._f_select_many(*self._qargs, rs, self._dense_many(cs), out)
        return out

    def access_many(self, idx):
        idx = np.ascontiguousarray(idx, dtype=np.int64)
        out = np.empty(len(idx), dtype=np.int64)
        _k._f_access_many(*self._qargs, idx, out)
        return self.alphabet[out]

    # -- individual select steps (exposed for inspection and tests) ---------

    def locate_hyperblock(self, j: int, c):
        """Largest 1-based i_h whose stored rank of c is below j, or None."""
        cd = self._dense_of(c)
        if cd < 0 or j < 1 or j > self.totals[cd]:
            return None
        nh = int(self.meta[7])
        return int(_k._largest_lt(self.ah[cd], np.int64(0), np.int64(nh), np.int64(j))) + 1

    def locate_superblock(self, j: int, c, i_h: int) -> int:
        cd = self._dense_of(c)
        base_h = int(self.ah[cd, i_h - 1])
        sbph = int(self.meta[9])
        nsb = int(self.meta[6])
        lo = (i_h - 1) * sbph
        hi = min(lo + sbph, nsb)
        row = self.as_[cd]
        while lo + 1 < hi:
            mid = (lo + hi) >> 1
            if base_h + row[mid] < j:
                lo = mid
            else:
                hi = mid
        return lo + 1

    def locate_block(self, j: int, c, i_s: int):
        """Right-to-left header scan inside superblock i_s; returns (i_b, j')."""
        cd = self._dense_of(c)
        is0 = i_s - 1
        sbph = int(self.meta[9])
        base = int(self.ah[cd, is0 // sbph]) + int(self.as_[cd, is0])
        bpsb = int(self.meta[8])
        nb = int(self.meta[5])
        wb = int(self.meta[10])
        ssig = np.int64(self.sbsig[is0])
        lsym = np.int64(self.sbmap[is0, cd])
        blo = is0 * bpsb
        bhi = min(blo + bpsb, nb)
        for blk in range(bhi - 1, blo - 1, -1):
            rel = int(_k._blk_rel(self.hdr_words, np.int64(self.hdroff[blk]), ssig,
                                  np.int64(wb), lsym))
            if rel >= 0 and base + rel < j:
                return blk + 1, j - (base + rel)
        raise ValueError("no block in the superblock holds the symbol below j")

    def block_relative_rank(self, i_b: int, c):
        """The stored rank of c at block i_b relative to its superblock, or
        None when the block's local alphabet lacks c."""
        cd = self._dense_of(c)
        ib0 = i_b - 1
        if not 0 <= ib0 < self.block_count:
            raise IndexError(f"block {i_b} out of range [1, {self.block_count}]")
        is0 = ib0 * int(self.meta[2]) // int(self.meta[3])
        if cd < 0:
            return None
        lsym = int(self.sbmap[is0, cd])
        if lsym < 0:
            return None
        rel = int(_k._blk_rel(self.hdr_words, np.int64(self.hdroff[ib0]),
                              np.int64(self.sbsig[is0]), np.int64(self.meta[10]),
                              np.int64(lsym)))
        return None if rel < 0 else rel

    def descend_to_leaf(self, i_b: int, c) -> DescentStack:
        cd = self._dense_of(c)
        ib0 = i_b - 1
        b = int(self.meta[2])
        is0 = ib0 * b // int(self.meta[3])
        lsym = int(self.sbmap[is0, cd])
        if lsym < 0:
            raise ValueError("symbol does not occur in the block's superblock")
        blen = min(b, self.n - ib0 * b)
        st = _stack_scratch()
        ckey, creg, r0, hist, fc, lv = _descend_scratch()
        depth, leafcount = _k._descend(
            self.hdr_words, np.int64(self.hdroff[ib0]), np.int64(self.sbsig[is0]),
            np.int64(self.meta[10]), np.int64(self.meta[11]), np.int64(self.treeoff[ib0]),
            np.int64(blen), np.int64(lsym), *self.bits.kernel_args,
            ckey, creg, hist, fc, lv, *st)
        return DescentStack(*st, depth, leafcount, i_b)

    def local_select_up(self, stack: DescentStack, j_local: int) -> int:
        if not 1 <= j_local <= stack.leaf_count:
            raise ValueError("local occurrence index out of range for the block")
        if stack.depth == 0:
            return j_local
        r0 = np.empty(23, dtype=np.int64)
        _k._fill_bound_ranks(np.int64(stack.depth), stack.starts, r0, *self.bits.kernel_args)
        return int(_k._ascend(np.int64(stack.depth), stack.starts, stack.bits,
                              np.int64(j_local), r0, *self.bits.kernel_args))

    # -- reporting ----------------------------------------------------------

    @property
    def block_count(self) -> int:
        return int(self.meta[5])

    @property
    def superblock_count(self) -> int:
        return int(self.meta[6])

    @property
    def hyperblock_count(self) -> int:
        return int(self.meta[7])


def build_forest(s, params: ForestParams | None = None, **kw) -> WaveletForest:
    """Build a WaveletForest over a symbol sequence.

    Keyword arguments are forwarded to ForestParams when no params object is
    given. Short final blocks/superblocks/hyperblocks are clamped, never
    padded.
    """
    if params is None:
        params = ForestParams(**kw)
    elif kw:
        raise TypeError("pass either a params object or keyword overrides, not both")
    params.validate()
    codes, kind = normalize_text(s)
    n = len(codes)
    if n < 1:
        raise ValueError("text must be non-empty")

    alphabet, dense = np.unique(codes, return_inverse=True)
    alphabet = alphabet.astype(np.int64)
    dense = dense.astype(np.int64)
    sigma = len(alphabet)
    b, bs, bh = params.block, params.superblock, params.hyperblock
    nb = -(-n // b)
    nsb = -(-n // bs)
    nh = -(-n // bh)
    bpsb = bs // b
    sbph = bh // bs
    wb = (bs - 1).bit_length()

    blk_bounds = np.minimum(np.arange(nb + 1, dtype=np.int64) * b, n)
    cnts = np.zeros((nb, sigma), dtype=np.int64)
    for ib in range(nb):
        cnts[ib] = np.bincount(dense[blk_bounds[ib]:blk_bounds[ib + 1]], minlength=sigma)
    cum = np.vstack([np.zeros((1, sigma), np.int64), np.cumsum(cnts, axis=0)])
    totals = np.ascontiguousarray(cum[nb])

    hb_blocks = np.arange(nh, dtype=np.int64) * (bh // b)
    ah = np.ascontiguousarray(cum[hb_blocks].T)
    sb_blocks = np.arange(nsb, dtype=np.int64) * bpsb
    hb_of_sb = np.arange(nsb, dtype=np.int64) // sbph
    as_ = np.ascontiguousarray((cum[sb_blocks] - cum[hb_blocks][hb_of_sb]).T)

    # superblock alphabets
    sb_cnt = np.add.reduceat(cnts, sb_blocks, axis=0) if nb else np.zeros((nsb, sigma), np.int64)
    sbmap = np.full((nsb, sigma), -1, dtype=np.int32)
    sbinv = np.full((nsb, sigma), -1, dtype=np.int32)
    sbsig = np.zeros(nsb, dtype=np.int64)
    for is0 in range(nsb):
        present = np.flatnonzero(sb_cnt[is0] > 0)
        sbmap[is0, present] = np.arange(len(present), dtype=np.int32)
        sbinv[is0, :len(present)] = present
        sbsig[is0] = len(present)

    # per-block codes
    loc_parts, len_parts, code_parts, rel_parts, lvl_parts = [], [], [], [], []
    blk_off = np.zeros(nb + 1, dtype=np.int64)
    tree_off = np.zeros(nb + 1, dtype=np.int64)
    nav_off = np.zeros(nb + 1, dtype=np.int64)
    for ib in range(nb):
        is0 = (ib * b) // bs
        present = np.flatnonzero(cnts[ib] > 0)
        local_counts = cnts[ib][present]
        lens = code_lengths(local_counts)
        height = int(lens.max(initial=0))
        if height > MAX_BLOCK_HEIGHT:
            raise AssertionError("block code deeper than the height bound")
        cw = canonical_codes_from_lengths(lens)
        loc_parts.append(sbmap[is0][present].astype(np.int32))
        len_parts.append(lens.astype(np.uint8))
        code_parts.append(cw)
        rel_parts.append((cum[ib][present] - cum[sb_blocks[is0]][present]).astype(np.int64))
        if height >= 2:
            # bit length of level d = symbols still in play below depth d
            ended = np.zeros(height + 1, dtype=np.int64)
            np.add.at(ended, lens, local_counts)
            lvl_parts.append(int(local_counts.sum()) - np.cumsum(ended)[1:height])
        else:
            lvl_parts.append(np.zeros(0, dtype=np.int64))
        blk_off[ib + 1] = blk_off[ib] + len(present)
        tree_off[ib + 1] = tree_off[ib] + int((local_counts * lens).sum())
        nav_off[ib + 1] = nav_off[ib] + (len(present) - 1 if len(present) >= 2 else 0)

    blk_loc = np.concatenate(loc_parts) if loc_parts else np.zeros(0, np.int32)
    blk_len = np.concatenate(len_parts) if len_parts else np.zeros(0, np.uint8)
    blk_code = np.concatenate(code_parts) if code_parts else np.zeros(0, np.uint64)
    total_bits = int(tree_off[nb])

    # superblock-local symbol stream
    s_local = np.empty(n, dtype=np.int32)
    for is0 in range(nsb):
        lo = is0 * bs
        hi = min(lo + bs, n)
        s_local[lo:hi] = sbmap[is0][dense[lo:hi]]

    merged = np.zeros(-(-total_bits // 64) if total_bits else 0, dtype=np.uint64)
    nav_vals = np.zeros(max(int(nav_off[nb]), 1), dtype=np.int64)
    _k._emit_forest(s_local, blk_bounds, blk_off, blk_loc, blk_len, blk_code,
                    tree_off[:-1].copy(), nav_off[:-1].copy(), np.int64(max(int(sbsig.max(initial=1)), 1)),
                    merged, nav_vals)

    # pack block headers
    w = BitWriter()
    hdroff = np.zeros(nb, dtype=np.int64)
    for ib in range(nb):
        is0 = (ib * b) // bs
        ssig = int(sbsig[is0])
        hdroff[ib] = w.nbits
        loc = blk_loc[blk_off[ib]:blk_off[ib + 1]]
        bm = 0
        for l in loc:
            bm |= 1 << int(l)
        pos = 0
        while pos < ssig:
            chunk = min(64, ssig - pos)
            w.write((bm >> pos) & ((1 << chunk) - 1), chunk)
            pos += chunk
        for ln in blk_len[blk_off[ib]:blk_off[ib + 1]]:
            w.write(int(ln), 5)
        for rv in rel_parts[ib]:
            w.write(int(rv), wb)
        for lvl in lvl_parts[ib]:
            w.write(int(lvl), _k.LVL_W)
        if params.nav_headers:
            for v in nav_vals[nav_off[ib]:nav_off[ib + 1]]:
                w.write(int(v), 16)
    hdr_words = np.concatenate([w.to_words(), np.zeros(1, np.uint64)])

    bv = bitvector_from_words(merged, total_bits, params.backend, params.rrr_t,
                              params.bv_superblock_bits, params.bv_select_stride)
    return WaveletForest(params=params, n=n, kind=kind, alphabet=alphabet, totals=totals,
                         ah=ah, as_=as_, sbmap=sbmap, sbinv=sbinv, sbsig=sbsig,
                         hdroff=hdroff, treeoff=np.ascontiguousarray(tree_off[:-1]),
                         hdr_words=hdr_words, bv=bv, total_bits=total_bits)
