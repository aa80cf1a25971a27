import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveletforest.bitvector import build_plain, build_rrr

RRR_SIZES = (15, 31, 63, 127)


def test_fig_bitstring_plain():
    bv = build_plain("0111000")
    assert bv.m == 7
    assert bv.ones == 3
    assert bv.access(1) == 0
    assert bv.access(2) == 1
    assert bv.rank1(4) == 3
    assert bv.rank1(0) == 0
    assert bv.rank1(7) == 3
    assert bv.select1(2) == 3
    assert bv.select1(4) is None
    assert bv.select0(1) == 1


def test_empty_sequence():
    bv = build_plain("")
    assert bv.m == 0 and bv.ones == 0
    assert bv.rank1(0) == 0
    assert bv.select1(1) is None
    with pytest.raises(IndexError):
        bv.access(1)


def test_bounds_and_parameter_errors():
    bv = build_plain("0111000")
    with pytest.raises(IndexError):
        bv.access(8)
    with pytest.raises(IndexError):
        bv.access(0)
    with pytest.raises(IndexError):
        bv.rank1(8)
    with pytest.raises(ValueError):
        bv.select1(0)
    with pytest.raises(ValueError):
        build_rrr("0101", t=17)


def test_rrr_all_zero_block():
    r = build_rrr([0] * 63, t=63)
    assert list(r.classes) == [0]
    assert int(r.dir_off[-1]) == 0  # class 0 stores no offset bits
    assert r.rank1(63) == 0


def test_rrr_single_one_offset_width():
    bits = np.zeros(63, np.uint8)
    bits[17] = 1
    r = build_rrr(bits, t=63)
    assert list(r.classes) == [1]
    # C(63,1) = 63 distinct blocks, so the offset takes 6 bits
    assert int(r.dir_off[-1]) == 6
    assert r.select1(1) == 18
    assert np.array_equal(r.decode(), bits)


def test_rrr_padded_roundtrip():
    r = build_rrr("0111000", t=15)
    assert list(r.classes) == [3]
    assert np.array_equal(r.decode(), np.array([0, 1, 1, 1, 0, 0, 0], np.uint8))
    assert r.rank1(4) == 3
    assert r.select0(1) == 1


@pytest.mark.parametrize("t", RRR_SIZES)
def test_rrr_matches_plain_on_random_bits(t):
    rng = np.random.default_rng(1000 + t)
    for density in (0.02, 0.5, 0.97):
        bits = (rng.random(5000) < density).astype(np.uint8)
        p = build_plain(bits)
        r = build_rrr(bits, t=t)
        idx = np.arange(len(bits) + 1)
        assert np.array_equal(p.rank1_many(idx), r.rank1_many(idx))
        pos = np.arange(1, len(bits) + 1)
        assert np.array_equal(p.access_many(pos), r.access_many(pos))
        for bitval in (0, 1):
            rs = np.arange(1, len(bits) + 2)  # one past the total probes absence
            assert np.array_equal(p.select_many(rs, bitval), r.select_many(rs, bitval))


def test_linear_scan_oracle_100k_bits():
    rng = np.random.default_rng(7)
    bits = (rng.random(100_000) < 0.37).astype(np.uint8)
    cum = np.concatenate([[0], np.cumsum(bits)]).astype(np.int64)
    p = build_plain(bits)
    idx = np.arange(len(bits) + 1)
    assert np.array_equal(p.rank1_many(idx), cum)
    ones = np.flatnonzero(bits) + 1
    zeros = np.flatnonzero(bits == 0) + 1
    assert np.array_equal(p.select_many(np.arange(1, len(ones) + 1), 1), ones)
    assert np.array_equal(p.select_many(np.arange(1, len(zeros) + 1), 0), zeros)


def test_rank_select_inverse_and_complement():
    rng = np.random.default_rng(21)
    bits = (rng.random(4096) < 0.5).astype(np.uint8)
    for bv in (build_plain(bits), build_rrr(bits, 31)):
        for i in rng.integers(0, len(bits) + 1, size=100):
            i = int(i)
            assert bv.rank0(i) + bv.rank1(i) == i
            r = bv.rank1(i)
            if r:
                assert bv.select1(r) <= i
        for r in rng.integers(1, bv.ones + 1, size=100):
            r = int(r)
            assert bv.rank1(bv.select1(r)) == r


def test_custom_plain_geometry():
    rng = np.random.default_rng(3)
    bits = (rng.random(3000) < 0.2).astype(np.uint8)
    bv = build_plain(bits, sb_bits=256, stride=64)
    cum = np.concatenate([[0], np.cumsum(bits)]).astype(np.int64)
    assert np.array_equal(bv.rank1_many(np.arange(len(bits) + 1)), cum)
    ones = np.flatnonzero(bits) + 1
    assert np.array_equal(bv.select_many(np.arange(1, len(ones) + 1), 1), ones)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 1), max_size=400), st.sampled_from(RRR_SIZES))
def test_rrr_encode_decode_identity(bits, t):
    arr = np.array(bits, dtype=np.uint8)
    r = build_rrr(arr, t=t)
    assert np.array_equal(r.decode(), arr)
