"""Scanning oracle: query answers computed directly from the text.

Used by the verifier and the test suite as the independent reference; it
shares no code with the index structures.
"""

from __future__ import annotations

import numpy as np

from ._text import int_to_symbol, normalize_text, symbol_to_int, symbols_to_ints


class ScanningOracle:
    def __init__(self, s):
        codes, kind = normalize_text(s)
        self.codes = codes
        self.kind = kind
        self.n = len(codes)
        self.alphabet = np.unique(codes)
        self._pos = {int(c): np.flatnonzero(codes == c) + 1 for c in self.alphabet}

    def occurring_symbols(self):
        return [int_to_symbol(int(c), self.kind) for c in self.alphabet]

    def count(self, c) -> int:
        p = self._pos.get(symbol_to_int(c))
        return 0 if p is None else len(p)

    def rank(self, i: int, c) -> int:
        p = self._pos.get(symbol_to_int(c))
        if p is None:
            return 0
        return int(np.searchsorted(p, i, side="right"))

    def select(self, r: int, c):
        if r < 1:
            raise ValueError("occurrence index must be >= 1")
        p = self._pos.get(symbol_to_int(c))
        if p is None or r > len(p):
            return None
        return int(p[r - 1])

    def access(self, i: int):
        if not 1 <= i <= self.n:
            raise IndexError(f"position {i} out of range [1, {self.n}]")
        return int_to_symbol(int(self.codes[i - 1]), self.kind)

    # batch forms mirror the structures' conventions (-1 = absent);
    # queries are grouped per symbol so each group is one vectorized lookup
    def rank_many(self, idx, cs):
        idx = np.asarray(idx, dtype=np.int64)
        vals = symbols_to_ints(cs)
        out = np.zeros(len(idx), dtype=np.int64)
        for c in np.unique(vals):
            sel = vals == c
            p = self._pos.get(int(c))
            if p is not None:
                out[sel] = np.searchsorted(p, idx[sel], side="right")
        return out

    def select_many(self, rs, cs):
        rs = np.asarray(rs, dtype=np.int64)
        vals = symbols_to_ints(cs)
        out = np.full(len(rs), -1, dtype=np.int64)
        for c in np.unique(vals):
            sel = vals == c
            p = self._pos.get(int(c))
            if p is None:
                continue
            r = rs[sel]
            valid = (r >= 1) & (r <= len(p))
            res = np.full(len(r), -1, dtype=np.int64)
            res[valid] = p[np.clip(r[valid] - 1, 0, len(p) - 1)]
            out[sel] = res
        return out

    def access_many(self, idx):
        idx = np.asarray(idx, dtype=np.int64)
        return self.codes[idx - 1]
