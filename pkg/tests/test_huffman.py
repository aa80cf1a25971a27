import numpy as np
import pytest

from waveletforest.huffman import (
    build_canonical,
    canonical_codes_from_lengths,
    code_lengths,
    min_length_for_height,
)


def test_block_example_code():
    code = build_canonical({"A": 3, "N": 2, "B": 1, "$": 1})
    assert code.code_of("A") == (0b0, 1)
    assert code.code_of("N") == (0b10, 2)
    assert code.code_of("B") == (0b110, 3)
    assert code.code_of("$") == (0b111, 3)
    assert code.height == 3
    assert code.bits_of("N") == "10"


def test_single_symbol():
    code = build_canonical({"X": 5})
    assert code.code_of("X") == (0, 0)
    assert code.height == 0


def test_unknown_symbol_and_empty_map():
    code = build_canonical({"A": 1, "B": 1})
    with pytest.raises(KeyError):
        code.code_of("Z")
    with pytest.raises(ValueError):
        build_canonical({})
    with pytest.raises(ValueError):
        build_canonical({"A": 0})


def _fib(i):
    a, b = 1, 1
    for _ in range(i - 1):
        a, b = b, a + b
    return a


@pytest.mark.parametrize("h", range(1, 17))
def test_fibonacci_weights_reach_height(h):
    weights = [1] + [_fib(i) for i in range(1, h + 1)]
    code = build_canonical({f"s{i}": w for i, w in enumerate(weights)})
    assert code.height == h


def test_min_length_for_height():
    assert min_length_for_height(0) == 1
    assert min_length_for_height(22) == 46368
    assert min_length_for_height(23) == 75025
    with pytest.raises(ValueError):
        min_length_for_height(-1)


def test_kraft_equality():
    rng = np.random.default_rng(5)
    for _ in range(50):
        k = int(rng.integers(2, 40))
        counts = rng.integers(1, 1000, size=k)
        lens = code_lengths(counts)
        assert abs(sum(2.0 ** -l for l in lens) - 1.0) < 1e-12


def _all_depth_multisets(k):
    # depth multisets of all full binary trees with k leaves
    if k == 1:
        return {(0,)}
    out = set()
    for left in range(1, k):
        for dl in _all_depth_multisets(left):
            for dr in _all_depth_multisets(k - left):
                out.add(tuple(sorted(d + 1 for d in dl + dr)))
    return out


@pytest.mark.parametrize("k", range(2, 7))
def test_optimal_against_exhaustive_tree_search(k):
    rng = np.random.default_rng(100 + k)
    shapes = _all_depth_multisets(k)
    for _ in range(30):
        counts = np.sort(rng.integers(1, 50, size=k))[::-1].astype(np.int64)
        best = min(sum(c * d for c, d in zip(counts, sorted(shape))) for shape in shapes)
        lens = code_lengths(counts)
        assert int((counts * lens).sum()) == best


def test_determinism():
    freqs = {"a": 4, "b": 4, "c": 2, "d": 2, "e": 1}
    c1 = build_canonical(freqs)
    c2 = build_canonical(dict(freqs))
    assert c1.symbols == c2.symbols
    assert c1.lengths == c2.lengths
    assert all(c1.code_of(s) == c2.code_of(s) for s in freqs)


def test_height_bound_for_block_sized_inputs():
    rng = np.random.default_rng(9)
    for _ in range(100):
        k = int(rng.integers(2, 200))
        total = int(rng.integers(k, 2**16))
        counts = rng.multinomial(total - k, np.ones(k) / k) + 1
        assert code_lengths(counts).max() <= 22


def test_canonical_codes_are_prefix_free():
    rng = np.random.default_rng(11)
    for _ in range(30):
        k = int(rng.integers(2, 60))
        lens = code_lengths(rng.integers(1, 500, size=k))
        codes = canonical_codes_from_lengths(lens)
        seen = set()
        for c, l in zip(codes, lens):
            bits = format(int(c), f"0{int(l)}b")
            for other in seen:
                assert not other.startswith(bits) and not bits.startswith(other)
            seen.add(bits)
