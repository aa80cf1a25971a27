import numpy as np
import pytest

from waveletforest.forest import ForestParams, build_forest
from waveletforest.oracle import ScanningOracle
from waveletforest.wavelet_tree import build_wt

HAND = "ABABABABCDCDCDCD"


@pytest.fixture(scope="module")
def hand_forest():
    return build_forest(HAND, block=4, superblock=8, hyperblock=16)


def test_hand_partitioning(hand_forest):
    f = hand_forest
    assert (f.block_count, f.superblock_count, f.hyperblock_count) == (4, 2, 1)
    a = f._dense_of("A")
    assert f.as_[a, 1] == 4          # rank of A at superblock 2
    assert f.block_relative_rank(2, "A") == 2
    assert f.block_relative_rank(3, "A") is None  # block CDCD lacks A
    assert f.rank(8, "A") == 4
    assert f.rank(0, "A") == 0


def test_short_tail_partitioning():
    f = build_forest("ABCDE", block=4, superblock=8, hyperblock=16)
    assert f.block_count == 2 and f.superblock_count == 1
    for i, c in enumerate("ABCDE", 1):
        assert f.access(i) == c
        assert f.rank(i, c) == 1
        assert f.select(1, c) == i


def test_locate_superblock_and_block(hand_forest):
    f = hand_forest
    assert f.locate_superblock(3, "A", 1) == 1   # rank at sb2 is 4 >= 3
    assert f.locate_superblock(5, "A", 1) == 2
    assert f.locate_superblock(1, "A", 1) == 1
    assert f.locate_block(3, "A", 1) == (2, 1)
    assert f.locate_block(1, "C", 2) == (3, 1)   # block 4 stores rank 2 >= 1
    # rightmost candidate: rank at block 4 is 2 and block 4 holds 2 more
    assert f.locate_block(4, "C", 2) == (4, 2)


def test_locate_hyperblock_boundaries():
    # three hyperblocks of 8 symbols with 5, 4, 2 As: ranks at starts 0, 5, 9
    text = "AAAAABBB" + "AAAABBBB" + "AABBBBBB"
    f = build_forest(text, block=8, superblock=8, hyperblock=8)
    a = f._dense_of("A")
    assert list(f.ah[a]) == [0, 5, 9]
    assert f.locate_hyperblock(6, "A") == 2
    assert f.locate_hyperblock(5, "A") == 1
    assert f.locate_hyperblock(10, "A") == 3
    assert f.locate_hyperblock(12, "A") is None  # only 11 As
    assert f.locate_hyperblock(1, "Z") is None


def test_six_step_select_trace(hand_forest):
    pos, tr = hand_forest.select_trace(3, "A")
    assert pos == 5
    assert (tr.hyperblock, tr.superblock, tr.block) == (1, 1, 2)
    assert (tr.local_rank, tr.local_position) == (1, 1)


def test_select_absent_and_errors(hand_forest):
    assert hand_forest.select(9, "A") is None
    assert hand_forest.select(1, "Z") is None
    with pytest.raises(ValueError):
        hand_forest.select(0, "A")
    with pytest.raises(IndexError):
        hand_forest.rank(17, "A")
    with pytest.raises(IndexError):
        hand_forest.access(0)


def test_descend_examples():
    f = build_forest("ABAB", block=4, superblock=4, hyperblock=4)
    st = f.descend_to_leaf(1, "A")
    assert st.depth == 1 and st.leaf_count == 2
    assert f.local_select_up(st, 1) == 1

    g = build_forest("AAAA", block=4, superblock=4, hyperblock=4)
    st = g.descend_to_leaf(1, "A")
    assert st.depth == 0
    assert g.local_select_up(st, 2) == 2  # unary block: identity

    h = build_forest("ANNB$AA", block=8, superblock=8, hyperblock=8)
    st = h.descend_to_leaf(1, "$")
    assert st.depth == 3
    st_a = h.descend_to_leaf(1, "A")
    assert h.local_select_up(st_a, 2) == 6


def test_example_bwt_forest():
    f = build_forest("ANNB$AA", block=4, superblock=8, hyperblock=16)
    oracle = ScanningOracle("ANNB$AA")
    for c in "ANB$":
        for i in range(8):
            assert f.rank(i, c) == oracle.rank(i, c)
        for r in range(1, 5):
            assert f.select(r, c) == oracle.select(r, c)
    assert f.select(1, "$") == 5
    assert f.access(4) == "B"


def test_invalid_params():
    with pytest.raises(ValueError):
        build_forest("AB", block=3, superblock=8, hyperblock=16)
    with pytest.raises(ValueError):
        build_forest("AB", block=4, superblock=8, hyperblock=12)
    with pytest.raises(ValueError):
        build_forest("AB", block=1 << 17, superblock=1 << 17, hyperblock=1 << 17)
    with pytest.raises(ValueError):
        build_forest("", block=4, superblock=8, hyperblock=16)
    with pytest.raises(ValueError):
        build_forest("AB", backend="rrr", rrr_t=16)


def _exhaustive_match(f, oracle):
    n = oracle.n
    alpha = oracle.alphabet
    idx = np.tile(np.arange(n + 1), len(alpha))
    cs = np.repeat(alpha, n + 1)
    assert np.array_equal(f.rank_many(idx, cs), oracle.rank_many(idx, cs))
    rs_parts, cs_parts = [], []
    for c in alpha:
        k = oracle.count(int(c))
        rs_parts.append(np.arange(1, k + 2))
        cs_parts.append(np.full(k + 1, c))
    rs = np.concatenate(rs_parts)
    cs2 = np.concatenate(cs_parts)
    assert np.array_equal(f.select_many(rs, cs2), oracle.select_many(rs, cs2))
    assert np.array_equal(np.asarray(f.access_many(np.arange(1, n + 1))), oracle.codes)


@pytest.mark.parametrize("backend", ["plain", "rrr"])
@pytest.mark.parametrize("nav", [True, False])
def test_oracle_equivalence_multilevel(backend, nav):
    rng = np.random.default_rng(77)
    s = rng.integers(0, 48, size=6000)
    f = build_forest(s, block=64, superblock=512, hyperblock=2048,
                     nav_headers=nav, backend=backend)
    assert f.hyperblock_count == 3
    _exhaustive_match(f, ScanningOracle(s))


def test_cross_structure_equivalence():
    rng = np.random.default_rng(13)
    s = rng.integers(0, 32, size=4000)
    f = build_forest(s, block=128, superblock=1024, hyperblock=4096)
    w = build_wt(s)
    idx = rng.integers(0, len(s) + 1, size=2000)
    cs = rng.integers(0, 40, size=2000)
    assert np.array_equal(f.rank_many(idx, cs), w.rank_many(idx, cs))
    rs = rng.integers(1, 300, size=2000)
    assert np.array_equal(f.select_many(rs, cs), w.select_many(rs, cs))


def test_roundtrip_monotonic_and_stack_depth():
    rng = np.random.default_rng(5)
    s = rng.integers(0, 20, size=3000)
    f = build_forest(s, block=64, superblock=256, hyperblock=1024)
    for i in rng.integers(1, len(s) + 1, size=300):
        c = int(s[i - 1])
        assert f.select(f.rank(int(i), c), c) == i
    for c in np.unique(s)[:5]:
        pos = f.select_many(np.arange(1, f.count(int(c)) + 1), np.full(f.count(int(c)), c))
        assert np.all(np.diff(pos) > 0)
    for i_b in range(1, f.block_count + 1):
        for c in np.unique(s):
            if f.block_relative_rank(i_b, int(c)) is not None:
                assert f.descend_to_leaf(i_b, int(c)).depth <= 22


def test_directory_composition_at_block_starts():
    rng = np.random.default_rng(31)
    s = rng.integers(0, 25, size=5000)
    f = build_forest(s, block=64, superblock=512, hyperblock=1024)
    oracle = ScanningOracle(s)
    b, bs, bh = 64, 512, 1024
    for ib0 in range(f.block_count):
        p = ib0 * b
        for c in np.unique(s)[:8]:
            cd = f._dense_of(int(c))
            base = int(f.ah[cd, p // bh]) + int(f.as_[cd, p // bs])
            rel = f.block_relative_rank(ib0 + 1, int(c))
            if rel is not None:
                assert base + rel == oracle.rank(p, int(c))
            else:
                assert f.rank(p, int(c)) == oracle.rank(p, int(c))


def test_nav_headers_change_nothing_but_headers():
    rng = np.random.default_rng(99)
    s = rng.integers(0, 40, size=8000)
    f_on = build_forest(s, block=256, superblock=1024, hyperblock=4096, nav_headers=True)
    f_off = build_forest(s, block=256, superblock=1024, hyperblock=4096, nav_headers=False)
    assert np.array_equal(f_on.bits.words, f_off.bits.words)
    assert f_on.total_bits == f_off.total_bits
    idx = rng.integers(0, len(s) + 1, size=3000)
    cs = rng.integers(0, 40, size=3000)
    assert np.array_equal(f_on.rank_many(idx, cs), f_off.rank_many(idx, cs))
    rs = rng.integers(1, 250, size=3000)
    assert np.array_equal(f_on.select_many(rs, cs), f_off.select_many(rs, cs))
    assert np.array_equal(f_on.access_many(np.arange(1, len(s) + 1)),
                          f_off.access_many(np.arange(1, len(s) + 1)))


def test_stored_bits_equal_code_cost():
    rng = np.random.default_rng(3)
    s = rng.integers(0, 30, size=2000)
    b = 128
    f = build_forest(s, block=b, superblock=512, hyperblock=2048)
    from waveletforest.huffman import code_lengths
    expect = 0
    for lo in range(0, len(s), b):
        blk = s[lo:lo + b]
        counts = np.bincount(blk, minlength=30)
        counts = counts[counts > 0]
        expect += int((counts * code_lengths(counts)).sum())
    assert f.total_bits == expect


def test_symbol_absent_from_superblock():
    # D only occurs in the second superblock; queries in the first must
    # short-circuit through the directories
    s = "ABABABAB" + "CDCDCDCD"
    f = build_forest(s, block=4, superblock=8, hyperblock=16)
    assert f.rank(8, "D") == 0
    assert f.rank(16, "D") == 4
    assert f.select(1, "D") == 10
    assert f.rank(5, "D") == 0


def test_rank_uses_left_scan_when_block_lacks_symbol():
    # A occurs in blocks 1 and 4 of one superblock but not 2 and 3
    s = "AABB" + "BBBB" + "CCCC" + "AACC"
    f = build_forest(s, block=4, superblock=16, hyperblock=16)
    oracle = ScanningOracle(s)
    for i in range(len(s) + 1):
        assert f.rank(i, "A") == oracle.rank(i, "A")
        assert f.rank(i, "B") == oracle.rank(i, "B")
        assert f.rank(i, "C") == oracle.rank(i, "C")


def test_params_validation_object():
    p = ForestParams(block=8, superblock=64, hyperblock=256)
    p.validate()
    with pytest.raises(ValueError):
        ForestParams(block=8, superblock=63, hyperblock=256).validate()
