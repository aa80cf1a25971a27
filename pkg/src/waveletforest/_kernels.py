"""Numba kernels for the hot query and build paths.

Conventions used throughout:
  * bit positions handed to helpers are 0-based offsets into uint64 words,
    LSB-first within a word;
  * rank arguments are prefix lengths (0..m);
  * select helpers return 1-based positions, or -1 when fewer matching bits
    exist;
  * the five-array bitvector bundle (tag, m, p0, p1, a, b, c, d, e) means
      tag 0 (plain): a=words, b=superblock counts, c=one samples,
                     d=zero samples, e=per-word counts (u16);
                     p0=superblock bits, p1=sample stride
      tag 1 (RRR):   a=class words, b=offset words, c=group ranks,
                     d=group offset positions, e unused; p0=t, p1=group size.
"""

import math

import numpy as np
from numba import njit

# ---------------------------------------------------------------------------
# tables (module constants; frozen into the compiled kernels)


def _build_sel8():
    t = np.full(256 * 8, 255, dtype=np.uint8)
    for b in range(256):
        k = 0
        for bit in range(8):
            if b & (1 << bit):
                t[b * 8 + k] = bit
                k += 1
    return t


def _build_binom():
    lo = np.zeros((128, 128), dtype=np.uint64)
    hi = np.zeros((128, 128), dtype=np.uint64)
    w = np.zeros((128, 128), dtype=np.int64)
    mask = (1 << 64) - 1
    for n in range(128):
        for k in range(n + 1):
            c = math.comb(n, k)
            lo[n, k] = c & mask
            hi[n, k] = c >> 64
            w[n, k] = 0 if c == 1 else (c - 1).bit_length()
    return lo, hi, w


_SEL8 = _build_sel8()
_C_LO, _C_HI, _OFF_W = _build_binom()
# transposed copies: the decode loops walk n at fixed k, which is contiguous here
_C_LO_T = np.ascontiguousarray(_C_LO.T)
_C_HI_T = np.ascontiguousarray(_C_HI.T)

RRR_BLOCK_SIZES = (15, 31, 63, 127)
RRR_GROUP = 32


# ---------------------------------------------------------------------------
# bit primitives


@njit(cache=True, inline="always")
def _pop64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return np.int64((x * np.uint64(0x0101010101010101)) >> np.uint64(56))


@njit(cache=True, inline="always")
def _sel64(x, j):
    # 0-based position of the j-th (1-based) set bit; the caller guarantees
    # the word holds at least j ones
    base = np.int64(0)
    while True:
        b = np.int64(x & np.uint64(0xFF))
        c = _pop64(np.uint64(b))
        if c >= j:
            return base + np.int64(_SEL8[(b << 3) + (j - 1)])
        j -= c
        x >>= np.uint64(8)
        base += 8


@njit(cache=True, inline="always")
def _getbit(words, pos):
    return np.int64((words[pos >> 6] >> np.uint64(pos & 63)) & np.uint64(1))


@njit(cache=True, inline="always")
def _read(words, pos, width):
    # width in [1, 64]
    w = pos >> 6
    off = pos & 63
    lo = words[w] >> np.uint64(off)
    got = 64 - off
    if got < width:
        lo |= words[w + 1] << np.uint64(got)
    if width >= 64:
        return lo
    return lo & ((np.uint64(1) << np.uint64(width)) - np.uint64(1))


@njit(cache=True, inline="always")
def _write(words, pos, val, width):
    # target bits must currently be zero; width in [1, 64]
    w = pos >> 6
    off = pos & 63
    words[w] |= val << np.uint64(off)
    got = 64 - off
    if got < width:
        words[w + 1] |= val >> np.uint64(got)


@njit(cache=True, inline="always")
def _largest_lt(row, lo, hi, j):
    # largest idx in [lo, hi) with row[idx] < j; requires row[lo] < j
    while lo + 1 < hi:
        mid = (lo + hi) >> 1
        if row[mid] < j:
            lo = mid
        else:
            hi = mid
    return lo


# ---------------------------------------------------------------------------
# plain bitvector


@njit(cache=True)
def _plain_rank1(words, sups, rel, sb_bits, m, i):
    if i <= 0:
        return np.int64(0)
    if i >= m:
        return np.int64(sups[len(sups) - 1])
    q = i >> 6
    r = i & 63
    res = np.int64(sups[q // (sb_bits >> 6)]) + np.int64(rel[q])
    if r > 0:
        res += _pop64(words[q] & ((np.uint64(1) << np.uint64(r)) - np.uint64(1)))
    return res


@njit(cache=True)
def _plain_select(words, sups, samples, sb_bits, stride, m, r, bitval):
    if m == 0 or r < 1:
        return np.int64(-1)
    ones_total = np.int64(sups[len(sups) - 1])
    total = ones_total if bitval == 1 else m - ones_total
    if r > total:
        return np.int64(-1)
    k = (r - 1) // stride
    lo_pos = np.int64(samples[k])
    hi_pos = np.int64(samples[k + 1]) if k + 1 < len(samples) else m - 1
    lo = lo_pos // sb_bits
    hi = hi_pos // sb_bits
    while lo < hi:
        mid = (lo + hi + 1) >> 1
        cum = np.int64(sups[mid]) if bitval == 1 else mid * sb_bits - np.int64(sups[mid])
        if cum < r:
            lo = mid
        else:
            hi = mid - 1
    cum = np.int64(sups[lo]) if bitval == 1 else lo * sb_bits - np.int64(sups[lo])
    rr = r - cum
    w = lo * (sb_bits >> 6)
    while True:
        wbits = 64 if ((w + 1) << 6) <= m else m - (w << 6)
        x = words[w]
        c = _pop64(x) if bitval == 1 else wbits - _pop64(x)
        if c >= rr:
            xx = x if bitval == 1 else ~x
            return (w << 6) + _sel64(xx, rr) + 1
        rr -= c
        w += 1


# ---------------------------------------------------------------------------
# RRR bitvector


@njit(cache=True, inline="always")
def _rrr_off128(off_words, pos, width):
    # returns (hi, lo) of a field up to 124 bits wide
    if width == 0:
        return np.uint64(0), np.uint64(0)
    if width <= 64:
        return np.uint64(0), _read(off_words, pos, width)
    return _read(off_words, pos + 64, width - 64), _read(off_words, pos, 64)


@njit(cache=True)
def _rrr_count_prefix(t, cls, ohi, olo, upto):
    # ones among the first `upto` bits of a block with popcount `cls`
    ones = np.int64(0)
    kk = cls
    if t <= 63:  # offsets fit one word, skip the high-part bookkeeping
        for idx in range(upto):
            if kk == 0:
                break
            clo = _C_LO_T[kk, t - 1 - idx]
            if olo >= clo:
                olo = olo - clo
                kk -= 1
                ones += 1
        return ones
    for idx in range(upto):
        if kk == 0:
            break
        chi = _C_HI_T[kk, t - 1 - idx]
        clo = _C_LO_T[kk, t - 1 - idx]
        if ohi > chi or (ohi == chi and olo >= clo):
            borrow = np.uint64(1) if olo < clo else np.uint64(0)
            olo = olo - clo
            ohi = ohi - chi - borrow
            kk -= 1
            ones += 1
    return ones


@njit(cache=True)
def _rrr_bit_at(t, cls, ohi, olo, at):
    kk = cls
    if t <= 63:
        for idx in range(at + 1):
            if kk == 0:
                return np.int64(0)
            clo = _C_LO_T[kk, t - 1 - idx]
            if idx == at:
                return np.int64(1) if olo >= clo else np.int64(0)
            if olo >= clo:
                olo = olo - clo
                kk -= 1
        return np.int64(0)
    for idx in range(at + 1):
        if kk == 0:
            return np.int64(0)
        chi = _C_HI_T[kk, t - 1 - idx]
        clo = _C_LO_T[kk, t - 1 - idx]
        one = ohi > chi or (ohi == chi and olo >= clo)
        if idx == at:
            return np.int64(1) if one else np.int64(0)
        if one:
            borrow = np.uint64(1) if olo < clo else np.uint64(0)
            olo = olo - clo
            ohi = ohi - chi - borrow
            kk -= 1
    return np.int64(0)


@njit(cache=True, inline="always")
def _rrr_cls(cls_words, cw, blk):
    return np.int64(_read(cls_words, blk * cw, cw))


@njit(cache=True, inline="always")
def _rrr_walk(cls_words, cw, t, frm, to):
    # sum of classes and offset widths over blocks [frm, to), read word-chunked
    ones = np.int64(0)
    offbits = np.int64(0)
    mask = (np.uint64(1) << np.uint64(cw)) - np.uint64(1)
    per = 60 // cw
    blk = frm
    bitpos = frm * cw
    offw_row = _OFF_W[t]
    while blk < to:
        take = per if to - blk >= per else to - blk
        x = _read(cls_words, bitpos, cw * take)
        for _ in range(take):
            cls = np.int64(x & mask)
            ones += cls
            offbits += offw_row[cls]
            x >>= np.uint64(cw)
        bitpos += cw * take
        blk += take
    return ones, offbits


@njit(cache=True)
def _rrr_rank1(cls_words, off_words, dir_rank, dir_off, t, group, m, i):
    if i <= 0:
        return np.int64(0)
    if i >= m:
        return np.int64(dir_rank[len(dir_rank) - 1])
    cw = np.int64(4) if t == 15 else (np.int64(5) if t == 31 else (np.int64(6) if t == 63 else np.int64(7)))
    q = i // t
    r = i - q * t
    g = q // group
    dones, doff = _rrr_walk(cls_words, cw, t, g * group, q)
    ones = np.int64(dir_rank[g]) + dones
    offpos = np.int64(dir_off[g]) + doff
    if r > 0:
        cls = _rrr_cls(cls_words, cw, q)
        if cls == 0:
            pass
        elif cls == t:
            ones += r
        else:
            ohi, olo = _rrr_off128(off_words, offpos, _OFF_W[t, cls])
            ones += _rrr_count_prefix(t, cls, ohi, olo, r)
    return ones


@njit(cache=True)
def _rrr_access(cls_words, off_words, dir_rank, dir_off, t, group, m, i0):
    cw = np.int64(4) if t == 15 else (np.int64(5) if t == 31 else (np.int64(6) if t == 63 else np.int64(7)))
    q = i0 // t
    r = i0 - q * t
    g = q // group
    _ones, doff = _rrr_walk(cls_words, cw, t, g * group, q)
    offpos = np.int64(dir_off[g]) + doff
    cls = _rrr_cls(cls_words, cw, q)
    if cls == 0:
        return np.int64(0)
    if cls == t:
        return np.int64(1)
    ohi, olo = _rrr_off128(off_words, offpos, _OFF_W[t, cls])
    return _rrr_bit_at(t, cls, ohi, olo, r)


@njit(cache=True)
def _rrr_select(cls_words, off_words, dir_rank, dir_off, t, group, m, r, bitval):
    if m == 0 or r < 1:
        return np.int64(-1)
    nblocks = (m + t - 1) // t
    ngroups = (nblocks + group - 1) // group
    ones_total = np.int64(dir_rank[len(dir_rank) - 1])
    total = ones_total if bitval == 1 else m - ones_total
    if r > total:
        return np.int64(-1)
    cw = np.int64(4) if t == 15 else (np.int64(5) if t == 31 else (np.int64(6) if t == 63 else np.int64(7)))
    # binary search for the group: largest g with count-before-group < r
    lo = np.int64(0)
    hi = np.int64(ngroups)
    while lo + 1 < hi:
        mid = (lo + hi) >> 1
        cum = np.int64(dir_rank[mid]) if bitval == 1 else mid * group * t - np.int64(dir_rank[mid])
        if cum < r:
            lo = mid
        else:
            hi = mid
    g = lo
    cnt = np.int64(dir_rank[g]) if bitval == 1 else g * group * t - np.int64(dir_rank[g])
    offpos = np.int64(dir_off[g])
    rr = r - cnt
    blk = g * group
    while True:
        bt = t if (blk + 1) * t <= m else m - blk * t
        cls = _rrr_cls(cls_words, cw, blk)
        inblk = cls if bitval == 1 else bt - cls
        if inblk >= rr:
            if bitval == 1 and cls == t:
                return blk * t + rr
            if bitval == 0 and cls == 0:
                return blk * t + rr
            ohi, olo = _rrr_off128(off_words, offpos, _OFF_W[t, cls])
            kk = cls
            seen = np.int64(0)
            for idx in range(bt):
                one = False
                if kk > 0:
                    chi = _C_HI_T[kk, t - 1 - idx]
                    clo = _C_LO_T[kk, t - 1 - idx]
                    one = ohi > chi or (ohi == chi and olo >= clo)
                    if one:
                        borrow = np.uint64(1) if olo < clo else np.uint64(0)
                        olo = olo - clo
                        ohi = ohi - chi - borrow
                        kk -= 1
                if (one and bitval == 1) or ((not one) and bitval == 0):
                    seen += 1
                    if seen == rr:
                        return blk * t + idx + 1
        rr -= inblk
        offpos += _OFF_W[t, cls]
        blk += 1


# ---------------------------------------------------------------------------
# unified bitvector dispatch


@njit(cache=True, inline="always")
def _bv_rank1(tag, m, p0, p1, a, b, c, d, e, i):
    if tag == 0:
        return _plain_rank1(a, b, e, p0, m, i)
    return _rrr_rank1(a, b, c, d, p0, p1, m, i)


@njit(cache=True, inline="always")
def _bv_select(tag, m, p0, p1, a, b, c, d, e, r, bitval):
    if tag == 0:
        samples = c if bitval == 1 else d
        return _plain_select(a, b, samples, p0, p1, m, r, bitval)
    return _rrr_select(a, b, c, d, p0, p1, m, r, bitval)


@njit(cache=True, inline="always")
def _bv_access(tag, m, p0, p1, a, b, c, d, e, i0):
    if tag == 0:
        return _getbit(a, i0)
    return _rrr_access(a, b, c, d, p0, p1, m, i0)


# batch wrappers for tests and benchmarks over raw bitvectors


@njit(cache=True)
def _bv_rank1_many(tag, m, p0, p1, a, b, c, d, e, idx, out):
    for q in range(len(idx)):
        out[q] = _bv_rank1(tag, m, p0, p1, a, b, c, d, e, idx[q])


@njit(cache=True)
def _bv_select_many(tag, m, p0, p1, a, b, c, d, e, rs, bitval, out):
    for q in range(len(rs)):
        out[q] = _bv_select(tag, m, p0, p1, a, b, c, d, e, rs[q], bitval)


@njit(cache=True)
def _bv_access_many(tag, m, p0, p1, a, b, c, d, e, idx, out):
    for q in range(len(idx)):
        out[q] = _bv_access(tag, m, p0, p1, a, b, c, d, e, idx[q])


# ---------------------------------------------------------------------------
# support construction helpers


@njit(cache=True)
def _inword_select_fill(words, word_idx, remainder, bitval, out):
    for k in range(len(word_idx)):
        x = words[word_idx[k]]
        if bitval == 0:
            x = ~x
        out[k] = (word_idx[k] << 6) + _sel64(x, remainder[k])


@njit(cache=True)
def _rrr_scan(words, m, t):
    # first pass: per-block classes and the total width of the offset stream
    nblocks = (m + t - 1) // t
    classes = np.empty(nblocks, dtype=np.uint8)
    total = np.int64(0)
    for blk in range(nblocks):
        start = blk * t
        bt = t if start + t <= m else m - start
        if t <= 64:
            x = _read(words, start, bt)
            cls = _pop64(x)
        else:
            x0 = _read(words, start, 64)
            rem = bt - 64
            cls = _pop64(x0)
            if rem > 0:
                cls += _pop64(_read(words, start + 64, rem))
        classes[blk] = cls
        total += _OFF_W[t, cls]
    return classes, total


@njit(cache=True)
def _rrr_pack(words, m, t, group, classes, cls_words, off_words, dir_rank, dir_off):
    nblocks = len(classes)
    cw = np.int64(4) if t == 15 else (np.int64(5) if t == 31 else (np.int64(6) if t == 63 else np.int64(7)))
    ones = np.int64(0)
    offpos = np.int64(0)
    gi = 0
    for blk in range(nblocks):
        if blk % group == 0:
            dir_rank[gi] = np.uint64(ones)
            dir_off[gi] = np.uint64(offpos)
            gi += 1
        start = blk * t
        bt = t if start + t <= m else m - start
        cls = np.int64(classes[blk])
        _write(cls_words, blk * cw, np.uint64(cls), cw)
        width = _OFF_W[t, cls]
        if width > 0:
            ohi = np.uint64(0)
            olo = np.uint64(0)
            kk = cls
            for idx in range(bt):
                if kk == 0:
                    break
                if _getbit(words, start + idx) == 1:
                    clo = _C_LO_T[kk, t - 1 - idx]
                    chi = _C_HI_T[kk, t - 1 - idx]
                    ns = olo + clo
                    carry = np.uint64(1) if ns < olo else np.uint64(0)
                    olo = ns
                    ohi = ohi + chi + carry
                    kk -= 1
            if width <= 64:
                _write(off_words, offpos, olo, width)
            else:
                _write(off_words, offpos, olo, 64)
                _write(off_words, offpos + 64, ohi, width - 64)
        ones += cls
        offpos += width
    dir_rank[gi] = np.uint64(ones)
    dir_off[gi] = np.uint64(offpos)


@njit(cache=True)
def _unpack_fields(words, count, width, out):
    for k in range(count):
        out[k] = np.int64(_read(words, k * width, width))


# ---------------------------------------------------------------------------
# wavelet-tree bit emission (shared by the forest blocks and the baseline tree)


@njit(cache=True)
def _emit_tree(seq, code_tab, len_tab, hist, out_words, bit_base,
               nav_out, nav_base, bounds_out, bounds_off, record_bounds,
               buf_a, buf_b, cur_len, nxt_len):
    """Emit the level-major bits of one canonical-Huffman wavelet tree.

    seq holds local symbol ids (>= 2 distinct); code_tab/len_tab are indexed
    by id; hist[d] counts code lengths equal to d. Zero counts of internal
    nodes are written to nav_out in BFS order. When record_bounds is set,
    bounds_out[bounds_off[d] + t] receives cumulative internal-segment starts
    per level (node count + 1 entries). Returns the number of emitted bits.
    """
    n = len(seq)
    for x in range(n):
        buf_a[x] = seq[x]
    m_d = np.int64(1)
    cur_len[0] = n
    bitpos = bit_base
    nav_idx = nav_base
    d = np.int64(0)
    while m_d > 0:
        nleaf_next = hist[d + 1]
        src = buf_a if (d & 1) == 0 else buf_b
        dst = buf_b if (d & 1) == 0 else buf_a
        pos_src = np.int64(0)
        pos_dst = np.int64(0)
        if record_bounds:
            bounds_out[bounds_off[d]] = 0
        for tnode in range(m_d):
            L = cur_len[tnode]
            z = np.int64(0)
            zkeep = np.int64(0)
            for x in range(pos_src, pos_src + L):
                sym = src[x]
                ln = np.int64(len_tab[sym])
                bit = np.int64((code_tab[sym] >> np.uint64(ln - 1 - d)) & np.uint64(1))
                if bit == 0:
                    z += 1
                    if ln > d + 1:
                        zkeep += 1
                else:
                    w = bitpos >> 6
                    out_words[w] |= np.uint64(1) << np.uint64(bitpos & 63)
                bitpos += 1
            # stable partition of surviving elements: left child then right
            pz = pos_dst
            po = pos_dst + zkeep
            for x in range(pos_src, pos_src + L):
                sym = src[x]
                ln = np.int64(len_tab[sym])
                if ln <= d + 1:
                    continue
                bit = np.int64((code_tab[sym] >> np.uint64(ln - 1 - d)) & np.uint64(1))
                if bit == 0:
                    dst[pz] = sym
                    pz += 1
                else:
                    dst[po] = sym
                    po += 1
            pos_dst = po
            nav_out[nav_idx] = z
            nav_idx += 1
            i0 = 2 * tnode
            if i0 >= nleaf_next:
                nxt_len[i0 - nleaf_next] = z
            if i0 + 1 >= nleaf_next:
                nxt_len[i0 + 1 - nleaf_next] = L - z
            pos_src += L
            if record_bounds:
                bounds_out[bounds_off[d] + tnode + 1] = pos_src
        m_next = 2 * m_d - nleaf_next
        for t2 in range(m_next):
            cur_len[t2] = nxt_len[t2]
        m_d = m_next
        d += 1
    return bitpos - bit_base


@njit(cache=True)
def _emit_forest(s_local, blk_bounds, blk_off, blk_loc, blk_len, blk_code,
                 tree_off, nav_off, sigma_max, out_words, nav_out):
    """Emit per-block trees for the whole text.

    blk_bounds[ib], blk_bounds[ib+1] delimit block ib in s_local; the flat
    (blk_loc, blk_len, blk_code) triple describes each block's local code via
    blk_off. tree_off/nav_off are precomputed bit/entry offsets.
    """
    nb = len(blk_bounds) - 1
    code_tab = np.zeros(sigma_max, dtype=np.uint64)
    len_tab = np.zeros(sigma_max, dtype=np.int64)
    hist = np.zeros(66, dtype=np.int64)
    bmax = np.int64(0)
    for ib in range(nb):
        L = blk_bounds[ib + 1] - blk_bounds[ib]
        if L > bmax:
            bmax = L
    buf_a = np.empty(bmax, dtype=np.int32)
    buf_b = np.empty(bmax, dtype=np.int32)
    cur_len = np.empty(260, dtype=np.int64)
    nxt_len = np.empty(260, dtype=np.int64)
    dummy_bounds = np.zeros(1, dtype=np.int64)
    dummy_boff = np.zeros(67, dtype=np.int64)
    for ib in range(nb):
        lo = blk_off[ib]
        hi = blk_off[ib + 1]
        cnt = hi - lo
        if cnt <= 1:
            continue
        for k in range(lo, hi):
            sym = blk_loc[k]
            len_tab[sym] = blk_len[k]
            code_tab[sym] = blk_code[k]
        for dd in range(66):
            hist[dd] = 0
        for k in range(lo, hi):
            hist[blk_len[k]] += 1
        _emit_tree(s_local[blk_bounds[ib]:blk_bounds[ib + 1]], code_tab, len_tab, hist,
                   out_words, tree_off[ib], nav_out, nav_off[ib],
                   dummy_bounds, dummy_boff, False, buf_a, buf_b, cur_len, nxt_len)
    return 0


# ---------------------------------------------------------------------------
# forest block headers
#
# Per-block header layout, at bit offset hdroff[ib]:
#   bitmap over the superblock alphabet (ssig bits)
#   code lengths, 5 bits per present symbol (ascending local id)
#   relative ranks, wb bits per present symbol (same order)
#   level bit lengths, 17 bits per level 1..height-1 (level 0 is the block)
#   zero counts, 16 bits per internal node in BFS order (only with nav)
#
# With level lengths at hand, the start of a child segment follows from the
# parent's start and zero count alone: bits in front of the child at the next
# level are (bits in front of the parent) + (left-sibling length when the
# branch is 1) - (bits of symbols whose codes end at the next level), and the
# last term is the difference of consecutive level lengths.

LVL_W = 17  # level length field width; level lengths never exceed 2^16


@njit(cache=True, inline="always")
def _ctz64(x):
    return _pop64((x & (np.uint64(0) - x)) - np.uint64(1))


@njit(cache=True, inline="always")
def _blk_rel(hdrw, off, ssig, wb, lsym):
    # stored relative rank of lsym in this block, or -1 when absent;
    # one pass over the bitmap yields both its index and the symbol count
    if _getbit(hdrw, off + lsym) == 0:
        return np.int64(-1)
    idx = np.int64(0)
    cnt = np.int64(0)
    p = off
    rem = ssig
    seen = np.int64(0)
    while rem > 0:
        chunk = 64 if rem >= 64 else rem
        x = _read(hdrw, p, chunk)
        c = _pop64(x)
        cnt += c
        if seen < lsym:
            take = lsym - seen
            if take >= chunk:
                idx += c
            else:
                idx += _pop64(x & ((np.uint64(1) << np.uint64(take)) - np.uint64(1)))
        seen += chunk
        p += chunk
        rem -= chunk
    return np.int64(_read(hdrw, off + ssig + 5 * cnt + wb * idx, wb))


@njit(cache=True)
def _hdr_parse(hdrw, off, ssig, loc, lens):
    # fills loc (ascending local ids) and lens; returns symbol count
    cnt = np.int64(0)
    p = off
    rem = ssig
    base = np.int64(0)
    while rem > 0:
        chunk = 64 if rem >= 64 else rem
        x = _read(hdrw, p, chunk)
        while x != np.uint64(0):
            loc[cnt] = base + _ctz64(x)
            cnt += 1
            x &= x - np.uint64(1)
        base += chunk
        p += chunk
        rem -= chunk
    lb = off + ssig
    for k in range(cnt):
        lens[k] = np.int64(_read(hdrw, lb + 5 * k, 5))
    return cnt


@njit(cache=True, inline="always")
def _hdr_find(hdrw, off, ssig, lsym):
    # one bitmap pass; returns (symbol count, index of lsym or -1)
    idx_c = np.int64(-1)
    cnt = np.int64(0)
    p = off
    rem = ssig
    seen = np.int64(0)
    while rem > 0:
        chunk = 64 if rem >= 64 else rem
        x = _read(hdrw, p, chunk)
        if seen <= lsym and lsym < seen + chunk:
            sh = lsym - seen
            if (x >> np.uint64(sh)) & np.uint64(1):
                if sh == 0:
                    idx_c = cnt
                else:
                    idx_c = cnt + _pop64(x & ((np.uint64(1) << np.uint64(sh)) - np.uint64(1)))
        cnt += _pop64(x)
        seen += chunk
        p += chunk
        rem -= chunk
    return cnt, idx_c


@njit(cache=True)
def _descend(hdrw, hdr_off, ssig, wb, navflag, tree_base, blen, lsym,
             bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve,
             ckey, creg, hist, fc, lv,
             st_start, st_len, st_zero, st_beta):
    """Walk from the block-tree root to lsym's leaf, recording one frame per
    internal node on the path. Returns (depth, leaf segment length).

    The frames depend only on (block, symbol), so the last result is memoized
    in (ckey, creg) and the st_* arrays; batches that revisit a block reuse it.
    """
    if ckey[0] == hdr_off and ckey[1] == lsym and creg[0] == 1:
        return creg[1], creg[2]
    creg[0] = 0
    creg[3] = 0  # boundary ranks (filled lazily by the rank path) are stale
    cnt, idx_c = _hdr_find(hdrw, hdr_off, ssig, lsym)
    if idx_c < 0:
        raise ValueError("symbol missing from block local alphabet")
    if cnt == 1:
        ckey[0] = hdr_off
        ckey[1] = lsym
        creg[0] = 1
        creg[1] = 0
        creg[2] = blen
        return np.int64(0), blen
    lens_base = hdr_off + ssig
    len_c = np.int64(_read(hdrw, lens_base + 5 * idx_c, 5))
    if len_c > 22:
        raise ValueError("block tree deeper than 22 levels")
    for dd in range(24):
        hist[dd] = 0
    samerank = np.int64(0)
    k = np.int64(0)
    while k < cnt:
        take = 12 if cnt - k >= 12 else cnt - k
        x = _read(hdrw, lens_base + 5 * k, 5 * take)
        for _ in range(take):
            ln = np.int64(x & np.uint64(31))
            hist[ln] += 1
            if k < idx_c and ln == len_c:
                samerank += 1
            x >>= np.uint64(5)
            k += 1
    fc[0] = 0
    for ln in range(1, 24):
        fc[ln] = (fc[ln - 1] + hist[ln - 1]) << 1
    code = fc[len_c] + samerank

    h = np.int64(22)
    while hist[h] == 0:
        h -= 1
    lv_base = lens_base + 5 * cnt + wb * cnt
    lv[0] = blen
    for d in range(1, h):
        lv[d] = np.int64(_read(hdrw, lv_base + LVL_W * (d - 1), LVL_W))
    nav_bit = lv_base + LVL_W * (h - 1)

    m_d = np.int64(1)
    path_t = np.int64(0)
    nav_idx_base = np.int64(0)
    level_base = tree_base
    s_rel = np.int64(0)
    L = blen
    leafcount = np.int64(0)
    for d in range(len_c):
        beta = np.int64((code >> (len_c - 1 - d)) & 1)
        s = level_base + s_rel
        if navflag == 1:
            z = np.int64(_read(hdrw, nav_bit + 16 * (nav_idx_base + path_t), 16))
        else:
            r0 = _bv_rank1(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, s)
            r1 = _bv_rank1(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, s + L)
            z = L - (r1 - r0)
        st_start[d] = s
        st_len[d] = L
        st_zero[d] = z
        st_beta[d] = beta
        child_len = z if beta == 0 else L - z
        if d + 1 == len_c:
            leafcount = child_len
        else:
            nleaf_next = hist[d + 1]
            s_rel += (z if beta == 1 else 0) - (lv[d] - lv[d + 1])
            level_base += lv[d]
            nav_idx_base += m_d
            path_t = 2 * path_t + beta - nleaf_next
            m_d = 2 * m_d - nleaf_next
            L = child_len
    ckey[0] = hdr_off
    ckey[1] = lsym
    creg[0] = 1
    creg[1] = len_c
    creg[2] = leafcount
    return len_c, leafcount


@njit(cache=True)
def _fill_bound_ranks(depth, st_start, r0,
                      bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve):
    # ones in front of each frame's segment; constant per (block, symbol)
    for d in range(depth):
        r0[d] = _bv_rank1(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, st_start[d])


@njit(cache=True)
def _ascend(depth, st_start, st_beta, jloc, r0,
            bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve):
    # map a leaf-local occurrence index back to a block position (step 5)
    q = jloc
    for d in range(depth - 1, -1, -1):
        s = st_start[d]
        if st_beta[d] == 1:
            pos = _bv_select(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, r0[d] + q, 1)
        else:
            pos = _bv_select(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve,
                             (s - r0[d]) + q, 0)
        q = pos - s
    return q


@njit(cache=True)
def _map_down(depth, st_start, st_beta, p, r0,
              bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve):
    # push a prefix length through the recorded path (rank traversal)
    for d in range(depth):
        ones = _bv_rank1(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve,
                         st_start[d] + p) - r0[d]
        p = ones if st_beta[d] == 1 else p - ones
    return p


# meta layout for the forest kernels
# 0:n 1:sigma 2:b 3:bs 4:bh 5:nb 6:nsb 7:nh 8:bpsb 9:sbph 10:wb 11:nav
# 12:bvtag 13:bvm 14:bvp0 15:bvp1


@njit(cache=True)
def _f_select_one(meta, ah, as_, tot, sbmap, sbinv, sbsig, hdroff, treeoff, hdrw,
                  bva, bvb, bvc, bvd, bve, j, cd,
                  ckey, creg, r0, hist, fc, lv,
                  st_start, st_len, st_zero, st_beta):
    zero = np.int64(0)
    if cd < 0 or cd >= meta[1] or j < 1 or j > tot[cd]:
        return np.int64(-1), zero, zero, zero, zero, zero
    n = meta[0]
    b = meta[2]
    nb = meta[5]
    nsb = meta[6]
    nh = meta[7]
    bpsb = meta[8]
    sbph = meta[9]
    wb = meta[10]
    navflag = meta[11]
    bvtag = meta[12]
    bvm = meta[13]
    bvp0 = meta[14]
    bvp1 = meta[15]
    # step 1: hyperblock
    ih0 = _largest_lt(ah[cd], 0, nh, j)
    base_h = ah[cd, ih0]
    # step 2: superblock within the hyperblock
    lo = ih0 * sbph
    hi = min(lo + sbph, nsb)
    srow = as_[cd]
    while lo + 1 < hi:
        mid = (lo + hi) >> 1
        if base_h + srow[mid] < j:
            lo = mid
        else:
            hi = mid
    is0 = lo
    base = base_h + srow[is0]
    # step 3: right-to-left header scan
    ssig = sbsig[is0]
    lsym = np.int64(sbmap[is0, cd])
    blo = is0 * bpsb
    bhi = min(blo + bpsb, nb)
    ib0 = np.int64(-1)
    rel = np.int64(0)
    for blk in range(bhi - 1, blo - 1, -1):
        r2 = _blk_rel(hdrw, hdroff[blk], ssig, wb, lsym)
        if r2 >= 0 and base + r2 < j:
            ib0 = blk
            rel = r2
            break
    if ib0 < 0:
        raise ValueError("select: no candidate block holds the target symbol")
    jloc = j - (base + rel)
    # steps 4-5: descend and run the local select
    blen = b if (ib0 + 1) * b <= n else n - ib0 * b
    depth, leafcount = _descend(hdrw, hdroff[ib0], ssig, wb, navflag, treeoff[ib0],
                                blen, lsym, bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve,
                                ckey, creg, hist, fc, lv,
                                st_start, st_len, st_zero, st_beta)
    if depth == 0:
        k = jloc
    else:
        if creg[3] == 0:
            _fill_bound_ranks(depth, st_start, r0,
                              bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve)
            creg[3] = 1
        k = _ascend(depth, st_start, st_beta, jloc, r0,
                    bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve)
    # step 6
    return ib0 * b + k, ih0 + 1, is0 + 1, ib0 + 1, jloc, k


@njit(cache=True)
def _f_rank_one(meta, ah, as_, tot, sbmap, sbinv, sbsig, hdroff, treeoff, hdrw,
                bva, bvb, bvc, bvd, bve, i, cd,
                ckey, creg, r0, hist, fc, lv,
                st_start, st_len, st_zero, st_beta):
    if i <= 0 or cd < 0 or cd >= meta[1]:
        return np.int64(0)
    n = meta[0]
    b = meta[2]
    bs = meta[3]
    bh = meta[4]
    bpsb = meta[8]
    wb = meta[10]
    navflag = meta[11]
    bvtag = meta[12]
    bvm = meta[13]
    bvp0 = meta[14]
    bvp1 = meta[15]
    ib0 = (i - 1) // b
    is0 = (i - 1) // bs
    ih0 = (i - 1) // bh
    base = ah[cd, ih0] + as_[cd, is0]
    ssig = sbsig[is0]
    lsym = np.int64(sbmap[is0, cd])
    if lsym < 0:
        return base
    p = i - ib0 * b
    rel = _blk_rel(hdrw, hdroff[ib0], ssig, wb, lsym)
    if rel >= 0:
        blen = b if (ib0 + 1) * b <= n else n - ib0 * b
        depth, _leaf = _descend(hdrw, hdroff[ib0], ssig, wb, navflag, treeoff[ib0],
                                blen, lsym, bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve,
                                ckey, creg, hist, fc, lv,
                                st_start, st_len, st_zero, st_beta)
        if depth == 0:
            inblk = p
        else:
            if creg[3] == 0:
                _fill_bound_ranks(depth, st_start, r0,
                                  bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve)
                creg[3] = 1
            inblk = _map_down(depth, st_start, st_beta, p, r0,
                              bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve)
        return base + rel + inblk
    # the containing block has no occurrence: take the rank at its left edge
    # from the nearest earlier block in the superblock that stores the symbol
    blo = is0 * bpsb
    for blk in range(ib0 - 1, blo - 1, -1):
        r2 = _blk_rel(hdrw, hdroff[blk], ssig, wb, lsym)
        if r2 >= 0:
            blen2 = b if (blk + 1) * b <= n else n - blk * b
            _d2, leafcount = _descend(hdrw, hdroff[blk], ssig, wb, navflag, treeoff[blk],
                                      blen2, lsym, bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve,
                                      ckey, creg, hist, fc, lv,
                                      st_start, st_len, st_zero, st_beta)
            return base + r2 + leafcount
    return base


@njit(cache=True)
def _f_access_one(meta, ah, as_, tot, sbmap, sbinv, sbsig, hdroff, treeoff, hdrw,
                  bva, bvb, bvc, bvd, bve, i,
                  loc, lens, hist, lv):
    n = meta[0]
    b = meta[2]
    bs = meta[3]
    wb = meta[10]
    navflag = meta[11]
    bvtag = meta[12]
    bvm = meta[13]
    bvp0 = meta[14]
    bvp1 = meta[15]
    ib0 = (i - 1) // b
    is0 = (i - 1) // bs
    ssig = sbsig[is0]
    hdr_off = hdroff[ib0]
    cnt = _hdr_parse(hdrw, hdr_off, ssig, loc, lens)
    if cnt == 1:
        return np.int64(sbinv[is0, loc[0]])
    p = i - ib0 * b  # 1-based within the block
    blen = b if (ib0 + 1) * b <= n else n - ib0 * b
    for dd in range(24):
        hist[dd] = 0
    for k in range(cnt):
        hist[lens[k]] += 1
    h = np.int64(22)
    while hist[h] == 0:
        h -= 1
    lv_base = hdr_off + ssig + 5 * cnt + wb * cnt
    lv[0] = blen
    for d in range(1, h):
        lv[d] = np.int64(_read(hdrw, lv_base + LVL_W * (d - 1), LVL_W))
    nav_bit = lv_base + LVL_W * (h - 1)

    m_d = np.int64(1)
    path_t = np.int64(0)
    nav_idx_base = np.int64(0)
    level_base = treeoff[ib0]
    s_rel = np.int64(0)
    L = blen
    d = np.int64(0)
    while True:
        s = level_base + s_rel
        beta = _bv_access(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, s + p - 1)
        r0 = _bv_rank1(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, s)
        ones = _bv_rank1(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, s + p) - r0
        p = ones if beta == 1 else p - ones
        if navflag == 1:
            z = np.int64(_read(hdrw, nav_bit + 16 * (nav_idx_base + path_t), 16))
        else:
            r1 = _bv_rank1(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, s + L)
            z = L - (r1 - r0)
        child_idx = 2 * path_t + beta
        nleaf_next = hist[d + 1]
        if child_idx < nleaf_next:
            # leaf: the child_idx-th local symbol of code length d+1
            seen = np.int64(0)
            for k in range(cnt):
                if lens[k] == d + 1:
                    if seen == child_idx:
                        return np.int64(sbinv[is0, loc[k]])
                    seen += 1
            raise ValueError("leaf index out of range")
        s_rel += (z if beta == 1 else 0) - (lv[d] - lv[d + 1])
        level_base += lv[d]
        nav_idx_base += m_d
        path_t = child_idx - nleaf_next
        m_d = 2 * m_d - nleaf_next
        L = z if beta == 0 else L - z
        d += 1


@njit(cache=True)
def _f_select_many(meta, ah, as_, tot, sbmap, sbinv, sbsig, hdroff, treeoff, hdrw,
                   bva, bvb, bvc, bvd, bve, rs, cs, out):
    ckey = np.full(2, -1, dtype=np.int64)
    creg = np.zeros(8, dtype=np.int64)
    r0 = np.empty(23, dtype=np.int64)
    hist = np.empty(24, dtype=np.int64)
    fc = np.empty(24, dtype=np.int64)
    lv = np.empty(24, dtype=np.int64)
    st_start = np.empty(23, dtype=np.int64)
    st_len = np.empty(23, dtype=np.int64)
    st_zero = np.empty(23, dtype=np.int64)
    st_beta = np.empty(23, dtype=np.int64)
    for q in range(len(rs)):
        res = _f_select_one(meta, ah, as_, tot, sbmap, sbinv, sbsig, hdroff, treeoff, hdrw,
                            bva, bvb, bvc, bvd, bve, rs[q], cs[q],
                            ckey, creg, r0, hist, fc, lv,
                            st_start, st_len, st_zero, st_beta)
        out[q] = res[0]


@njit(cache=True)
def _f_rank_many(meta, ah, as_, tot, sbmap, sbinv, sbsig, hdroff, treeoff, hdrw,
                 bva, bvb, bvc, bvd, bve, idx, cs, out):
    ckey = np.full(2, -1, dtype=np.int64)
    creg = np.zeros(8, dtype=np.int64)
    r0 = np.empty(23, dtype=np.int64)
    hist = np.empty(24, dtype=np.int64)
    fc = np.empty(24, dtype=np.int64)
    lv = np.empty(24, dtype=np.int64)
    st_start = np.empty(23, dtype=np.int64)
    st_len = np.empty(23, dtype=np.int64)
    st_zero = np.empty(23, dtype=np.int64)
    st_beta = np.empty(23, dtype=np.int64)
    for q in range(len(idx)):
        out[q] = _f_rank_one(meta, ah, as_, tot, sbmap, sbinv, sbsig, hdroff, treeoff, hdrw,
                             bva, bvb, bvc, bvd, bve, idx[q], cs[q],
                             ckey, creg, r0, hist, fc, lv,
                             st_start, st_len, st_zero, st_beta)


@njit(cache=True)
def _f_access_many(meta, ah, as_, tot, sbmap, sbinv, sbsig, hdroff, treeoff, hdrw,
                   bva, bvb, bvc, bvd, bve, idx, out):
    loc = np.empty(260, dtype=np.int64)
    lens = np.empty(260, dtype=np.int64)
    hist = np.empty(24, dtype=np.int64)
    lv = np.empty(24, dtype=np.int64)
    for q in range(len(idx)):
        out[q] = _f_access_one(meta, ah, as_, tot, sbmap, sbinv, sbsig, hdroff, treeoff, hdrw,
                               bva, bvb, bvc, bvd, bve, idx[q],
                               loc, lens, hist, lv)


# ---------------------------------------------------------------------------
# baseline whole-text wavelet tree
#
# wmeta layout: 0:n 1:sigma 2:height 3:bvtag 4:bvm 5:bvp0 6:bvp1
# bounds[boff[d] + t] holds cumulative starts of internal segments at depth d
# (relative to the level region); lvloff[d] is the global bit offset of the
# level-d region.


@njit(cache=True)
def _wt_rank_one(wmeta, code_val, code_len, hist, lvloff, bounds, boff, tot,
                 bva, bvb, bvc, bvd, bve, i, cd, ck, st_start, st_beta, r0):
    if i <= 0 or cd < 0 or cd >= wmeta[1]:
        return np.int64(0)
    if wmeta[2] == 0:
        return i
    bvtag = wmeta[3]
    bvm = wmeta[4]
    bvp0 = wmeta[5]
    bvp1 = wmeta[6]
    len_c = code_len[cd]
    if ck[0] != cd:
        code = code_val[cd]
        t = np.int64(0)
        for d in range(len_c):
            beta = np.int64((code >> np.uint64(len_c - 1 - d)) & np.uint64(1))
            st_start[d] = lvloff[d] + bounds[boff[d] + t]
            st_beta[d] = beta
            if d + 1 < len_c:
                t = 2 * t + beta - hist[d + 1]
        _fill_bound_ranks(len_c, st_start, r0,
                          bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve)
        ck[0] = cd
    return _map_down(len_c, st_start, st_beta, i, r0,
                     bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve)


@njit(cache=True)
def _wt_select_one(wmeta, code_val, code_len, hist, lvloff, bounds, boff, tot,
                   bva, bvb, bvc, bvd, bve, r, cd, ck, st_start, st_beta, r0):
    if cd < 0 or cd >= wmeta[1] or r < 1 or r > tot[cd]:
        return np.int64(-1)
    if wmeta[2] == 0:
        return r
    bvtag = wmeta[3]
    bvm = wmeta[4]
    bvp0 = wmeta[5]
    bvp1 = wmeta[6]
    len_c = code_len[cd]
    if ck[0] != cd:
        code = code_val[cd]
        t = np.int64(0)
        for d in range(len_c):
            beta = np.int64((code >> np.uint64(len_c - 1 - d)) & np.uint64(1))
            st_start[d] = lvloff[d] + bounds[boff[d] + t]
            st_beta[d] = beta
            if d + 1 < len_c:
                t = 2 * t + beta - hist[d + 1]
        _fill_bound_ranks(len_c, st_start, r0,
                          bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve)
        ck[0] = cd
    return _ascend(len_c, st_start, st_beta, r, r0,
                   bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve)


@njit(cache=True)
def _wt_access_one(wmeta, code_val, code_len, hist, lvloff, bounds, boff,
                   leafsym, leafoff, bva, bvb, bvc, bvd, bve, i):
    if wmeta[2] == 0:
        return np.int64(leafsym[0])
    bvtag = wmeta[3]
    bvm = wmeta[4]
    bvp0 = wmeta[5]
    bvp1 = wmeta[6]
    t = np.int64(0)
    p = i
    d = np.int64(0)
    while True:
        s = lvloff[d] + bounds[boff[d] + t]
        beta = _bv_access(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, s + p - 1)
        ones = (_bv_rank1(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, s + p)
                - _bv_rank1(bvtag, bvm, bvp0, bvp1, bva, bvb, bvc, bvd, bve, s))
        p = ones if beta == 1 else p - ones
        child = 2 * t + beta
        if child < hist[d + 1]:
            return np.int64(leafsym[leafoff[d + 1] + child])
        t = child - hist[d + 1]
        d += 1


@njit(cache=True)
def _wt_rank_many(wmeta, code_val, code_len, hist, lvloff, bounds, boff, tot,
                  bva, bvb, bvc, bvd, bve, idx, cs, out):
    ck = np.full(1, -1, dtype=np.int64)
    st_start = np.empty(66, dtype=np.int64)
    st_beta = np.empty(66, dtype=np.int64)
    r0 = np.empty(66, dtype=np.int64)
    for q in range(len(idx)):
        out[q] = _wt_rank_one(wmeta, code_val, code_len, hist, lvloff, bounds, boff, tot,
                              bva, bvb, bvc, bvd, bve, idx[q], cs[q],
                              ck, st_start, st_beta, r0)


@njit(cache=True)
def _wt_select_many(wmeta, code_val, code_len, hist, lvloff, bounds, boff, tot,
                    bva, bvb, bvc, bvd, bve, rs, cs, out):
    ck = np.full(1, -1, dtype=np.int64)
    st_start = np.empty(66, dtype=np.int64)
    st_beta = np.empty(66, dtype=np.int64)
    r0 = np.empty(66, dtype=np.int64)
    for q in range(len(rs)):
        out[q] = _wt_select_one(wmeta, code_val, code_len, hist, lvloff, bounds, boff, tot,
                                bva, bvb, bvc, bvd, bve, rs[q], cs[q], ck, st_start, st_beta, r0)


@njit(cache=True)
def _wt_access_many(wmeta, code_val, code_len, hist, lvloff, bounds, boff,
                    leafsym, leafoff, bva, bvb, bvc, bvd, bve, idx, out):
    for q in range(len(idx)):
        out[q] = _wt_access_one(wmeta, code_val, code_len, hist, lvloff, bounds, boff,
                                leafsym, leafoff, bva, bvb, bvc, bvd, bve, idx[q])
