"""Index file format.

Layout: magic "WFSEL1", version byte, structure byte, a fixed parameter
record, n and sigma, then length-prefixed sections. All integers are
little-endian. Directory arrays are stored at their declared widths: the
superblock directory is bit-packed at ceil(log2 hyperblock) bits per entry
(block-relative ranks are already packed inside the block headers).
"""

from __future__ import annotations

import io
import struct

import numpy as np

from . import _kernels as _k
from ._bits import BitWriter
from .bitvector import PlainBitVector, RrrBitVector
from .forest import ForestParams, WaveletForest
from .wavelet_tree import HuffmanWaveletTree

MAGIC = b"WFSEL1"
VERSION = 1

_STRUCT_TAGS = {"wf": 0, "wt": 1}
_STRUCT_NAMES = {v: k for k, v in _STRUCT_TAGS.items()}
_BACKEND_TAGS = {"plain": 0, "rrr": 1}
_BACKEND_NAMES = {v: k for k, v in _BACKEND_TAGS.items()}
_KIND_TAGS = {"bytes": 0, "str": 1, "int": 2}
_KIND_NAMES = {v: k for k, v in _KIND_TAGS.items()}

FOREST_SECTIONS = ("alphabet", "totals", "rank_hyper", "rank_super",
                   "superblock_headers", "block_header_offsets",
                   "block_tree_offsets", "block_headers", "merged_bits")
WT_SECTIONS = ("alphabet", "totals", "code_lengths", "level_offsets",
               "bound_offsets", "node_bounds", "merged_bits")


class IndexFormatError(Exception):
    """Raised when an index blob fails validation."""


def _w_arr(buf, arr, dtype):
    data = np.ascontiguousarray(arr).astype(dtype).tobytes()
    buf.write(struct.pack("<Q", len(data)))
    buf.write(data)


def _r_arr(buf, dtype):
    (nbytes,) = struct.unpack("<Q", _take(buf, 8))
    return np.frombuffer(_take(buf, nbytes), dtype=dtype).copy()


def _take(buf, k):
    data = buf.read(k)
    if len(data) != k:
        raise IndexFormatError("truncated index data")
    return data


def _w_section(buf, payload: bytes):
    buf.write(struct.pack("<Q", len(payload)))
    buf.write(payload)


def _r_section(buf) -> io.BytesIO:
    (ln,) = struct.unpack("<Q", _take(buf, 8))
    return io.BytesIO(_take(buf, ln))


def _pack_bv(bv) -> bytes:
    out = io.BytesIO()
    if isinstance(bv, PlainBitVector):
        out.write(struct.pack("<BQII", 0, bv.m, bv.sb_bits, bv.stride))
        _w_arr(out, bv.words, "<u8")
        _w_arr(out, bv._sups, "<u8")
        _w_arr(out, bv._rel, "<u2")
        _w_arr(out, bv._s1, "<u8")
        _w_arr(out, bv._s0, "<u8")
    elif isinstance(bv, RrrBitVector):
        out.write(struct.pack("<BQII", 1, bv.m, bv.t, bv.group))
        _w_arr(out, bv.cls_words, "<u8")
        _w_arr(out, bv.off_words, "<u8")
        _w_arr(out, bv.dir_rank, "<u8")
        _w_arr(out, bv.dir_off, "<u8")
    else:
        raise TypeError(f"not a serializable bitvector: {type(bv)!r}")
    return out.getvalue()


def _unpack_bv(data: bytes):
    buf = io.BytesIO(data)
    tag, m, p0, p1 = struct.unpack("<BQII", _take(buf, 17))
    if tag == 0:
        words = _r_arr(buf, "<u8").astype(np.uint64)
        sups = _r_arr(buf, "<u8").astype(np.uint64)
        rel = _r_arr(buf, "<u2").astype(np.uint16)
        s1 = _r_arr(buf, "<u8").astype(np.uint64)
        s0 = _r_arr(buf, "<u8").astype(np.uint64)
        return PlainBitVector(words, m, p0, p1, sups, rel, s1, s0)
    if tag == 1:
        cls_words = _r_arr(buf, "<u8").astype(np.uint64)
        off_words = _r_arr(buf, "<u8").astype(np.uint64)
        dir_rank = _r_arr(buf, "<u8").astype(np.uint64)
        dir_off = _r_arr(buf, "<u8").astype(np.uint64)
        return RrrBitVector(cls_words, off_words, dir_rank, dir_off, m, p0, p1)
    raise IndexFormatError(f"unknown bitvector variant {tag}")


def _pack_width(values: np.ndarray, width: int) -> bytes:
    w = BitWriter()
    for v in values:
        w.write(int(v), width)
    return w.to_words().astype("<u8").tobytes()


def _unpack_width(data: bytes, count: int, width: int) -> np.ndarray:
    words = np.frombuffer(data, dtype="<u8").astype(np.uint64)
    words = np.concatenate([words, np.zeros(1, np.uint64)])
    out = np.empty(count, dtype=np.int64)
    if count:
        _k._unpack_fields(words, np.int64(count), np.int64(width), out)
    return out


def dumps_index(obj) -> bytes:
    out = io.BytesIO()
    if isinstance(obj, WaveletForest):
        if obj.sigma > 0xFFFF:
            raise ValueError("alphabet too large for the index format")
        p = obj.params
        out.write(MAGIC)
        out.write(struct.pack("<BB", VERSION, _STRUCT_TAGS["wf"]))
        out.write(struct.pack("<BBBBII", _BACKEND_TAGS[p.backend], p.rrr_t,
                              1 if p.nav_headers else 0, _KIND_TAGS[obj.kind],
                              p.bv_superblock_bits, p.bv_select_stride))
        out.write(struct.pack("<QQQ", p.block, p.superblock, p.hyperblock))
        out.write(struct.pack("<QQ", obj.n, obj.sigma))
        _w_section(out, np.ascontiguousarray(obj.alphabet).astype("<i8").tobytes())
        _w_section(out, np.ascontiguousarray(obj.totals).astype("<i8").tobytes())
        _w_section(out, np.ascontiguousarray(obj.ah).astype("<u8").tobytes())
        wh = (p.hyperblock - 1).bit_length()
        _w_section(out, _pack_width(obj.as_.ravel(), wh))
        sb = io.BytesIO()
        _w_arr(sb, obj.sbsig, "<u2")
        inv_flat = np.concatenate([obj.sbinv[i, :obj.sbsig[i]] for i in range(len(obj.sbsig))]) \
            if len(obj.sbsig) else np.zeros(0, np.int32)
        _w_arr(sb, inv_flat, "<u2")
        _w_section(out, sb.getvalue())
        _w_section(out, np.ascontiguousarray(obj.hdroff).astype("<u8").tobytes())
        _w_section(out, np.ascontiguousarray(obj.treeoff).astype("<u8").tobytes())
        _w_section(out, np.ascontiguousarray(obj.hdr_words).astype("<u8").tobytes())
        _w_section(out, struct.pack("<Q", obj.total_bits) + _pack_bv(obj.bits))
        return out.getvalue()
    if isinstance(obj, HuffmanWaveletTree):
        out.write(MAGIC)
        out.write(struct.pack("<BB", VERSION, _STRUCT_TAGS["wt"]))
        out.write(struct.pack("<BBBBII", _BACKEND_TAGS[obj.backend], obj.rrr_t, 0,
                              _KIND_TAGS[obj.kind], 0, 0))
        out.write(struct.pack("<QQQ", 0, 0, 0))
        out.write(struct.pack("<QQ", obj.n, obj.sigma))
        _w_section(out, np.ascontiguousarray(obj.alphabet).astype("<i8").tobytes())
        _w_section(out, np.ascontiguousarray(obj.totals).astype("<i8").tobytes())
        _w_section(out, np.ascontiguousarray(obj.lengths).astype("<u1").tobytes())
        _w_section(out, np.ascontiguousarray(obj.lvloff).astype("<i8").tobytes())
        _w_section(out, np.ascontiguousarray(obj.boff).astype("<i8").tobytes())
        _w_section(out, np.ascontiguousarray(obj.bounds).astype("<i8").tobytes())
        _w_section(out, struct.pack("<Q", obj.total_bits) + _pack_bv(obj.bits))
        return out.getvalue()
    raise TypeError(f"not a serializable index: {type(obj)!r}")


def loads_index(data: bytes):
    buf = io.BytesIO(data)
    if _take(buf, 6) != MAGIC:
        raise IndexFormatError("bad magic; not a wavelet index file")
    version, stag = struct.unpack("<BB", _take(buf, 2))
    if version != VERSION:
        raise IndexFormatError(f"unsupported index version {version}")
    if stag not in _STRUCT_NAMES:
        raise IndexFormatError(f"unknown structure tag {stag}")
    btag, rrr_t, nav, ktag, bv_sb, bv_stride = struct.unpack("<BBBBII", _take(buf, 12))
    if btag not in _BACKEND_NAMES:
        raise IndexFormatError(f"unknown backend tag {btag}")
    if ktag not in _KIND_NAMES:
        raise IndexFormatError(f"unknown symbol kind {ktag}")
    b, bs, bh = struct.unpack("<QQQ", _take(buf, 24))
    n, sigma = struct.unpack("<QQ", _take(buf, 16))

    if _STRUCT_NAMES[stag] == "wf":
        params = ForestParams(block=b, superblock=bs, hyperblock=bh,
                              nav_headers=bool(nav), backend=_BACKEND_NAMES[btag],
                              rrr_t=rrr_t, bv_superblock_bits=bv_sb, bv_select_stride=bv_stride)
        params.validate()
        alphabet = np.frombuffer(_r_section(buf).read(), dtype="<i8").astype(np.int64)
        totals = np.frombuffer(_r_section(buf).read(), dtype="<i8").astype(np.int64)
        nh = -(-n // bh)
        nsb = -(-n // bs)
        nb = -(-n // b)
        ah_raw = np.frombuffer(_r_section(buf).read(), dtype="<u8").astype(np.int64)
        if len(alphabet) != sigma or len(ah_raw) != sigma * nh:
            raise IndexFormatError("directory sections disagree with the header")
        ah = np.ascontiguousarray(ah_raw.reshape(sigma, nh))
        wh = (bh - 1).bit_length()
        as_ = np.ascontiguousarray(
            _unpack_width(_r_section(buf).read(), sigma * nsb, wh).reshape(sigma, nsb))
        sb = _r_section(buf)
        sbsig = _r_arr(sb, "<u2").astype(np.int64)
        inv_flat = _r_arr(sb, "<u2").astype(np.int32)
        if len(sbsig) != nsb or len(inv_flat) != int(sbsig.sum()):
            raise IndexFormatError("superblock tables disagree with the header")
        sbmap = np.full((nsb, sigma), -1, dtype=np.int32)
        sbinv = np.full((nsb, sigma), -1, dtype=np.int32)
        at = 0
        for i in range(nsb):
            k = int(sbsig[i])
            row = inv_flat[at:at + k]
            sbinv[i, :k] = row
            sbmap[i, row] = np.arange(k, dtype=np.int32)
            at += k
        hdroff = np.frombuffer(_r_section(buf).read(), dtype="<u8").astype(np.int64)
        treeoff = np.frombuffer(_r_section(buf).read(), dtype="<u8").astype(np.int64)
        hdr_words = np.frombuffer(_r_section(buf).read(), dtype="<u8").astype(np.uint64)
        sec = _r_section(buf)
        (total_bits,) = struct.unpack("<Q", _take(sec, 8))
        bv = _unpack_bv(sec.read())
        if bv.m != total_bits or len(hdroff) != nb or len(treeoff) != nb:
            raise IndexFormatError("bit sections disagree with the header")
        return WaveletForest(params=params, n=n, kind=_KIND_NAMES[ktag], alphabet=alphabet,
                             totals=totals, ah=ah, as_=as_, sbmap=sbmap, sbinv=sbinv,
                             sbsig=sbsig, hdroff=hdroff, treeoff=treeoff,
                             hdr_words=hdr_words, bv=bv, total_bits=total_bits)

    alphabet = np.frombuffer(_r_section(buf).read(), dtype="<i8").astype(np.int64)
    totals = np.frombuffer(_r_section(buf).read(), dtype="<i8").astype(np.int64)
    lengths = np.frombuffer(_r_section(buf).read(), dtype="<u1").astype(np.int64)
    lvloff = np.frombuffer(_r_section(buf).read(), dtype="<i8").astype(np.int64)
    boff = np.frombuffer(_r_section(buf).read(), dtype="<i8").astype(np.int64)
    bounds = np.frombuffer(_r_section(buf).read(), dtype="<i8").astype(np.int64)
    if len(alphabet) != sigma or len(lengths) != sigma:
        raise IndexFormatError("alphabet sections disagree with the header")
    sec = _r_section(buf)
    (total_bits,) = struct.unpack("<Q", _take(sec, 8))
    bv = _unpack_bv(sec.read())
    if bv.m != total_bits:
        raise IndexFormatError("bit sections disagree with the header")
    return HuffmanWaveletTree(alphabet=alphabet, totals=totals, lengths=lengths,
                              backend=_BACKEND_NAMES[btag], rrr_t=rrr_t, n=n,
                              kind=_KIND_NAMES[ktag], bv=bv, bounds=bounds,
                              boff=boff, lvloff=lvloff)


def save_index(obj, path) -> int:
    data = dumps_index(obj)
    with open(path, "wb") as fh:
        fh.write(data)
    return len(data)


def load_index(path):
    with open(path, "rb") as fh:
        return loads_index(fh.read())


def section_sizes(data_or_path) -> dict:
    """Byte length of every section, keyed by section name."""
    if isinstance(data_or_path, (bytes, bytearray)):
        data = bytes(data_or_path)
    else:
        with open(data_or_path, "rb") as fh:
            data = fh.read()
    buf = io.BytesIO(data)
    if _take(buf, 6) != MAGIC:
        raise IndexFormatError("bad magic; not a wavelet index file")
    _version, stag = struct.unpack("<BB", _take(buf, 2))
    _take(buf, 12 + 24 + 16)
    names = FOREST_SECTIONS if _STRUCT_NAMES.get(stag) == "wf" else WT_SECTIONS
    sizes = {}
    for name in names:
        (ln,) = struct.unpack("<Q", _take(buf, 8))
        _take(buf, ln)
        sizes[name] = ln
    return sizes
