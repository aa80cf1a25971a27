import numpy as np
import pytest

from waveletforest.oracle import ScanningOracle
from waveletforest.wavelet_tree import build_wt


def test_example_text_queries():
    wt = build_wt("ANNB$AA")
    assert wt.rank(7, "A") == 3
    assert wt.rank(0, "N") == 0
    assert wt.rank(4, "N") == 2
    assert wt.select(2, "A") == 6
    assert wt.select(1, "$") == 5
    assert wt.select(4, "A") is None
    assert wt.access(5) == "$"
    assert wt.access(1) == "A"
    with pytest.raises(IndexError):
        wt.access(8)
    with pytest.raises(ValueError):
        wt.select(0, "A")
    assert wt.rank(7, "Z") == 0
    assert wt.select(1, "Z") is None


def test_root_bits_are_top_code_bits():
    # codes: A=0, N=10, B=110, $=111, so the root level holds 0111100
    wt = build_wt("ANNB$AA")
    root = [wt.bits.access(i) for i in range(1, 8)]
    assert root == [0, 1, 1, 1, 1, 0, 0]


def test_unary_text():
    wt = build_wt("AAAA")
    assert wt.total_bits == 0
    assert wt.height == 0
    assert wt.rank(4, "A") == 4
    assert wt.select(2, "A") == 2
    assert wt.select(5, "A") is None
    assert wt.access(3) == "A"


def test_empty_text_rejected():
    with pytest.raises(ValueError):
        build_wt("")


def test_stored_bits_match_code_cost():
    rng = np.random.default_rng(1)
    s = rng.integers(0, 30, size=5000)
    wt = build_wt(s)
    assert wt.total_bits == int((wt.totals * wt.lengths).sum())
    assert len(wt.bits) == wt.total_bits


@pytest.mark.parametrize("backend", ["plain", "rrr"])
def test_oracle_equivalence_random_text(backend):
    rng = np.random.default_rng(42)
    s = rng.integers(0, 64, size=10_000)
    wt = build_wt(s, backend=backend)
    oracle = ScanningOracle(s)
    n = len(s)
    alpha = oracle.alphabet
    idx = np.tile(np.arange(n + 1), len(alpha))
    cs = np.repeat(alpha, n + 1)
    assert np.array_equal(wt.rank_many(idx, cs), oracle.rank_many(idx, cs))
    rs_parts, cs_parts = [], []
    for c in alpha:
        k = oracle.count(int(c))
        rs_parts.append(np.arange(1, k + 2))
        cs_parts.append(np.full(k + 1, c))
    rs = np.concatenate(rs_parts)
    cs2 = np.concatenate(cs_parts)
    assert np.array_equal(wt.select_many(rs, cs2), oracle.select_many(rs, cs2))
    assert np.array_equal(wt.access_many(np.arange(1, n + 1)), s)


def test_plain_and_rrr_agree():
    rng = np.random.default_rng(17)
    s = rng.integers(0, 100, size=8000)
    a = build_wt(s, backend="plain")
    b = build_wt(s, backend="rrr", rrr_t=31)
    idx = rng.integers(0, len(s) + 1, size=3000)
    cs = rng.integers(0, 110, size=3000)
    assert np.array_equal(a.rank_many(idx, cs), b.rank_many(idx, cs))
    rs = rng.integers(1, 200, size=3000)
    assert np.array_equal(a.select_many(rs, cs), b.select_many(rs, cs))


def test_select_rank_roundtrip_and_rank_total():
    rng = np.random.default_rng(23)
    s = rng.integers(0, 16, size=3000)
    wt = build_wt(s)
    for i in rng.integers(1, len(s) + 1, size=200):
        c = int(s[i - 1])
        assert wt.select(wt.rank(int(i), c), c) == i
    assert sum(wt.rank(len(s), int(c)) for c in np.unique(s)) == len(s)
