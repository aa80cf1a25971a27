"""Canonical Huffman codes over small alphabets.

The code shape determines the topology of every per-block wavelet tree, so
construction has to be fully deterministic: merge ties are broken in favour of
the most recently created node, and equal code lengths are ordered by the
position of the symbol in the input frequency map.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field

import numpy as np


def code_lengths(counts: np.ndarray) -> np.ndarray:
    """Optimal prefix-code lengths for positive counts, as an int64 array.

    Ties in the merge queue are broken by (weight asc, newest node first);
    the result depends only on the counts and their order, which keeps
    serialized indexes reproducible byte for byte.
    """
    counts = np.asarray(counts, dtype=np.int64)
    k = len(counts)
    if k == 0:
        raise ValueError("at least one symbol is required")
    if counts.min() <= 0:
        raise ValueError("all counts must be positive")
    if k == 1:
        return np.zeros(1, dtype=np.int64)

    # heap entries: (weight, -seq, node); node ids < k are leaves
    heap = [(int(counts[i]), -i, i) for i in range(k)]
    heapq.heapify(heap)
    left = np.full(2 * k - 1, -1, dtype=np.int64)
    right = np.full(2 * k - 1, -1, dtype=np.int64)
    nxt = k
    while len(heap) > 1:
        w1, _, a = heapq.heappop(heap)
        w2, _, b = heapq.heappop(heap)
        left[nxt], right[nxt] = a, b
        heapq.heappush(heap, (w1 + w2, -nxt, nxt))
        nxt += 1
    root = heap[0][2]

    depth = np.zeros(2 * k - 1, dtype=np.int64)
    stack = [root]
    while stack:
        v = stack.pop()
        if left[v] >= 0:
            depth[left[v]] = depth[v] + 1
            depth[right[v]] = depth[v] + 1
            stack.append(left[v])
            stack.append(right[v])
    return depth[:k].copy()


def canonical_codes_from_lengths(lengths: np.ndarray) -> np.ndarray:
    """Assign canonical codewords (as integers, MSB = root branch) to lengths.

    Codewords increase with (length, input position), so at every tree depth
    the leaves occupy the smallest prefixes and internal nodes the largest.
    """
    lengths = np.asarray(lengths, dtype=np.int64)
    k = len(lengths)
    codes = np.zeros(k, dtype=np.uint64)
    if k <= 1:
        return codes
    if lengths.max() > 63:
        raise ValueError("code lengths above 63 bits are not supported")
    hist = np.bincount(lengths, minlength=int(lengths.max()) + 2)
    first = np.zeros(len(hist) + 1, dtype=np.int64)
    for ln in range(1, len(first)):
        prev = hist[ln - 1] if ln - 1 < len(hist) else 0
        first[ln] = (first[ln - 1] + prev) << 1
    counter = np.zeros(len(first), dtype=np.int64)
    for i in range(k):
        ln = lengths[i]
        codes[i] = np.uint64(first[ln] + counter[ln])
        counter[ln] += 1
    return codes


@dataclass(frozen=True)
class CanonicalHuffmanCode:
    """A canonical prefix code: symbols sorted by (length, input order)."""

    symbols: tuple
    lengths: tuple
    first_code: dict
    height: int
    _codes: dict = field(repr=False)

    def code_of(self, symbol) -> tuple[int, int]:
        """Return (codeword value, length); bit d of the value, MSB first, is
        the branch taken at depth d (0 = left child)."""
        try:
            return self._codes[symbol]
        except KeyError:
            raise KeyError(f"symbol {symbol!r} is not in the code") from None

    def length_of(self, symbol) -> int:
        return self.code_of(symbol)[1]

    def bits_of(self, symbol) -> str:
        code, ln = self.code_of(symbol)
        return format(code, f"0{ln}b") if ln else ""

    @property
    def total_bits(self) -> int:
        return sum(self.lengths)

    def kraft_sum(self) -> float:
        return sum(2.0 ** -ln for ln in self.lengths)


def build_canonical(freqs) -> CanonicalHuffmanCode:
    """Build the canonical Huffman code for a symbol -> count mapping.

    `freqs` may be a mapping or an iterable of (symbol, count) pairs; its
    iteration order is the tie-break order for equal code lengths.
    """
    items = list(freqs.items()) if hasattr(freqs, "items") else list(freqs)
    if not items:
        raise ValueError("frequency map is empty")
    syms = [s for s, _ in items]
    counts = np.array([c for _, c in items], dtype=np.int64)
    if len(set(syms)) != len(syms):
        raise ValueError("duplicate symbols in frequency map")
    lengths = code_lengths(counts)
    codes = canonical_codes_from_lengths(lengths)

    order = sorted(range(len(syms)), key=lambda i: (int(lengths[i]), i))
    first: dict[int, int] = {}
    for i in order:
        ln = int(lengths[i])
        if ln not in first:
            first[ln] = int(codes[i])
    mapping = {syms[i]: (int(codes[i]), int(lengths[i])) for i in range(len(syms))}
    return CanonicalHuffmanCode(
        symbols=tuple(syms[i] for i in order),
        lengths=tuple(int(lengths[i]) for i in order),
        first_code=first,
        height=int(lengths.max()),
        _codes=mapping,
    )


def min_length_for_height(h: int) -> int:
    """Smallest input length able to induce a Huffman tree of height h.

    Equals the Fibonacci number F(h+2) with F(1) = F(2) = 1; consequently any
    block of at most 2^16 symbols yields height <= 22.
    """
    if h < 0:
        raise ValueError("height must be non-negative")
    a, b = 1, 1  # F(1), F(2)
    for _ in range(h):
        a, b = b, a + b
    return b


MAX_BLOCK_HEIGHT = 22
