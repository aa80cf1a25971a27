import numpy as np
import pytest

from waveletforest.bwt import BwtResult, bwt, suffix_array, text_stats


def brute_bwt(s: str) -> str:
    rots = sorted(s[i:] + s[:i] for i in range(len(s)))
    return "".join(r[-1] for r in rots)


def test_banana():
    assert list(suffix_array("BANANA$")) == [7, 6, 4, 2, 1, 5, 3]
    res = bwt("BANANA$")
    assert isinstance(res, BwtResult)
    assert res.bwt == "ANNB$AA"
    assert res.sentinel == "$"
    assert res.runs == 5


def test_tiny_suffix_arrays():
    assert list(suffix_array("A$")) == [2, 1]
    assert list(suffix_array("$")) == [1]


def test_unary_plus_sentinel():
    res = bwt("AAAA$")
    assert res.bwt == brute_bwt("AAAA$")
    assert res.runs <= 3


def test_sentinel_required():
    with pytest.raises(ValueError):
        bwt("AB")          # ends with the largest symbol
    with pytest.raises(ValueError):
        bwt("A$B$")        # sentinel not unique
    with pytest.raises(ValueError):
        bwt("")


def test_rotation_oracle_small_strings():
    rng = np.random.default_rng(41)
    for _ in range(150):
        n = int(rng.integers(1, 120))
        s = "".join(chr(int(c)) for c in rng.integers(ord("a"), ord("f"), size=n)) + "$"
        assert bwt(s).bwt == brute_bwt(s)


def test_histogram_preserved():
    rng = np.random.default_rng(8)
    for _ in range(40):
        n = int(rng.integers(1, 200))
        arr = rng.integers(1, 30, size=n)
        arr = np.concatenate([arr, [0]])
        out = np.asarray(bwt(arr).bwt)
        assert np.array_equal(np.sort(out), np.sort(arr))


def test_stats_banana():
    st = text_stats("BANANA$")
    assert st.sigma == 4
    assert st.n == 7
    assert st.runs == 5
    assert st.avg_run == pytest.approx(1.4)


def test_stats_appends_sentinel_when_missing():
    st = text_stats(b"mississippi")
    assert st.sigma == 4
    assert st.n == 11
    assert st.runs >= 1


def test_stats_unary_text_is_maximally_runny():
    st = text_stats("AAAAAAAA$")
    # one run of As plus the sentinel placement: at most 3 runs
    assert st.runs <= 3
    assert st.avg_run >= st.n / 3


def test_stats_rejects_embedded_zero_without_sentinel():
    with pytest.raises(ValueError):
        text_stats(bytes([5, 0, 7, 9]))
