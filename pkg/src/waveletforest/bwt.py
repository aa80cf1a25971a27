"""Burrows-Wheeler transform construction and text statistics.

The transform is the last column of the lexicographically sorted rotation
matrix of a sentinel-terminated string. We sort suffixes by prefix doubling
over numpy rank arrays, which is comfortably fast at desk scale; with the
sentinel in place, suffix order equals rotation order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._text import normalize_text


def _check_sentinel(codes: np.ndarray) -> int:
    if len(codes) == 0:
        raise ValueError("text must be non-empty")
    last = int(codes[-1])
    if len(codes) > 1:
        rest = codes[:-1]
        if rest.min() <= last:
            raise ValueError("text must end with a unique smallest sentinel symbol")
    return last


def suffix_array(s) -> np.ndarray:
    """Suffix indices (1-based) in lexicographic order; prefix doubling.

    Each round sorts one composite key (rank * (n+1) + shifted rank), which
    fits in int64 up to n around 2^31 and halves the sort work of a two-key
    lexsort.
    """
    codes, _ = normalize_text(s)
    _check_sentinel(codes)
    n = len(codes)
    if n > (1 << 31):
        raise ValueError("input too large for the composite-key suffix sort")
    rank = np.unique(codes, return_inverse=True)[1].astype(np.int64)
    k = 1
    while True:
        comp = rank * np.int64(n + 1)
        comp[:n - k] += rank[k:] + 1  # +1 keeps past-the-end suffixes smallest
        order = np.argsort(comp, kind="stable")
        r = comp[order]
        changed = np.empty(n, dtype=np.int64)
        changed[0] = 0
        if n > 1:
            changed[1:] = r[1:] != r[:-1]
        newrank = np.empty(n, dtype=np.int64)
        newrank[order] = np.cumsum(changed)
        rank = newrank
        if rank[order[-1]] == n - 1:
            return (order + 1).astype(np.int64)
        k *= 2


@dataclass(frozen=True)
class BwtResult:
    bwt: object          # transformed sequence, in the input's own type
    sentinel: object     # the terminating symbol
    runs: int            # maximal equal-symbol runs in the transform


def _runs_of(codes: np.ndarray) -> int:
    if len(codes) == 0:
        return 0
    return int(np.count_nonzero(codes[1:] != codes[:-1])) + 1


def _rewrap(codes: np.ndarray, kind: str):
    if kind == "str":
        return "".join(chr(int(v)) for v in codes)
    if kind == "bytes":
        return codes.astype(np.uint8).tobytes()
    return codes


def bwt(s) -> BwtResult:
    """Transform a sentinel-terminated sequence; also counts its runs."""
    codes, kind = normalize_text(s)
    _check_sentinel(codes)
    sa0 = suffix_array(codes) - 1
    prev = sa0 - 1  # rotation predecessor; position 1 wraps to the end
    prev[prev < 0] = len(codes) - 1
    out = codes[prev]
    return BwtResult(bwt=_rewrap(out, kind),
                     sentinel=_rewrap(codes[-1:], kind)[0] if kind != "int" else int(codes[-1]),
                     runs=_runs_of(out))


@dataclass(frozen=True)
class TextStats:
    sigma: int           # distinct symbols in the input as given
    n: int               # input length as given
    runs: int            # BWT runs (sentinel appended when missing)
    avg_run: float       # n / runs

    @property
    def mib(self) -> float:
        return self.n / 2**20


def text_stats(s, sentinel_value: int = 0) -> TextStats:
    """Alphabet size, length, and mean BWT run length of a text.

    When the input does not already end in a unique smallest symbol, a
    sentinel (byte value 0 by default) is appended for the transform only;
    sigma and n describe the input as given.
    """
    codes, kind = normalize_text(s)
    if len(codes) == 0:
        raise ValueError("text must be non-empty")
    sigma = len(np.unique(codes))
    n = len(codes)
    try:
        _check_sentinel(codes)
        work = codes
    except ValueError:
        if (codes == sentinel_value).any():
            raise ValueError(
                "text has no unique smallest sentinel and already contains the sentinel value"
            ) from None
        work = np.concatenate([codes, np.array([sentinel_value], dtype=np.int64)])
    runs = bwt(work).runs
    return TextStats(sigma=sigma, n=n, runs=runs, avg_run=n / runs)
