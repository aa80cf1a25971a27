"""Workload generation, timing, verification, and parameter sweeps.

Query workloads are reproducible from (seed, text): select queries draw the
symbol frequency-proportionally and the occurrence index uniformly from its
valid range, so every query has a defined answer; rank queries draw the
prefix uniformly from [0, n] and the symbol uniformly from the occurring
alphabet. Timing runs one warm-up pass and at least three measured
repetitions and reports the median of the per-repetition means.
"""

from __future__ import annotations

import os
import time
import zlib
from dataclasses import dataclass, field

import numpy as np

from ._text import normalize_text
from .oracle import ScanningOracle
from .serialize import dumps_index

DEFAULT_SEED = 20240601
DEFAULT_COUNT = 100_000
CSV_SCHEMA_VERSION = 1

CSV_FIELDS = ("schema", "axis", "config", "structure", "backend", "input_bytes",
              "index_bytes", "space_pct", "kind", "count", "seed", "reps",
              "mean_us", "checksum")


def env_seed(default: int = DEFAULT_SEED) -> int:
    """Default workload seed, overridable through WF_SEED."""
    raw = os.environ.get("WF_SEED")
    if raw is None:
        return default
    try:
        return int(raw, 0)
    except ValueError:
        raise ValueError(f"WF_SEED must be an integer, got {raw!r}") from None


@dataclass(frozen=True)
class QueryWorkload:
    seed: int
    kind: str                      # "rank" | "select"
    args: np.ndarray               # prefix lengths or occurrence indexes
    syms: np.ndarray               # symbol values, parallel to args
    count: int = field(default=0)

    def __post_init__(self):
        object.__setattr__(self, "count", len(self.args))

    @property
    def queries(self):
        return list(zip(self.args.tolist(), self.syms.tolist()))


def gen_workload(alphabet, totals, n, kind="select", count=DEFAULT_COUNT,
                 seed=DEFAULT_SEED) -> QueryWorkload:
    """Workload from alphabet statistics (identical to generating from the text)."""
    if count < 1:
        raise ValueError("workload size must be >= 1")
    if kind not in ("rank", "select"):
        raise ValueError(f"unknown workload kind {kind!r}")
    alphabet = np.asarray(alphabet, dtype=np.int64)
    totals = np.asarray(totals, dtype=np.int64)
    if len(alphabet) == 0 or totals.sum() == 0:
        raise ValueError("cannot generate a workload for an empty text")
    rng = np.random.default_rng(seed)
    if kind == "select":
        idx = rng.choice(len(alphabet), size=count, p=totals / totals.sum())
        args = rng.integers(1, totals[idx] + 1, dtype=np.int64)
    else:
        idx = rng.integers(0, len(alphabet), size=count)
        args = rng.integers(0, n + 1, size=count, dtype=np.int64)
    return QueryWorkload(seed=seed, kind=kind, args=args, syms=alphabet[idx])


def gen_queries(s, kind="select", count=DEFAULT_COUNT, seed=DEFAULT_SEED) -> QueryWorkload:
    """Workload straight from a text."""
    codes, _ = normalize_text(s)
    if len(codes) == 0:
        raise ValueError("cannot generate a workload for an empty text")
    alphabet, dense = np.unique(codes, return_inverse=True)
    totals = np.bincount(dense, minlength=len(alphabet)).astype(np.int64)
    return gen_workload(alphabet, totals, len(codes), kind, count, seed)


def workload_for_index(index, kind="select", count=DEFAULT_COUNT, seed=DEFAULT_SEED):
    return gen_workload(index.alphabet, index.totals, index.n, kind, count, seed)


def answers_checksum(answers: np.ndarray) -> str:
    return format(zlib.crc32(np.ascontiguousarray(answers, dtype="<i8").tobytes()), "08x")


@dataclass
class BenchReport:
    structure: str
    backend: str
    config: str
    kind: str
    count: int
    seed: int
    reps: int
    mean_us: float          # median over repetitions of (wall time / count)
    index_bytes: int
    input_bytes: int
    checksum: str
    axis: str = ""

    @property
    def space_pct(self) -> float:
        return 100.0 * self.index_bytes / self.input_bytes if self.input_bytes else float("nan")

    def csv_row(self) -> str:
        vals = (CSV_SCHEMA_VERSION, self.axis, self.config, self.structure, self.backend,
                self.input_bytes, self.index_bytes, f"{self.space_pct:.4f}", self.kind,
                self.count, self.seed, self.reps, f"{self.mean_us:.4f}", self.checksum)
        return ",".join(str(v) for v in vals)

    @staticmethod
    def csv_header() -> str:
        return ",".join(CSV_FIELDS)

    def summary(self) -> str:
        return (f"{self.structure}-{self.backend} {self.config or '-'} | "
                f"{self.kind} x{self.count} seed={self.seed} | "
                f"{self.mean_us:.3f} us/query (median of {self.reps}) | "
                f"{self.index_bytes} B = {self.space_pct:.2f}% of input | crc {self.checksum}")


def _run_queries(index, workload: QueryWorkload) -> np.ndarray:
    if workload.kind == "select":
        return index.select_many(workload.args, workload.syms)
    return index.rank_many(workload.args, workload.syms)


def run_bench(index, workload: QueryWorkload, reps: int = 3, input_bytes: int | None = None,
              index_bytes: int | None = None, config: str = "", axis: str = "") -> BenchReport:
    """Time a workload against an index; single-threaded, one warm-up pass."""
    if reps < 1:
        raise ValueError("at least one repetition is required")
    answers = _run_queries(index, workload)  # warm-up (and JIT) pass
    times = []
    for _ in range(reps):
        t0 = time.perf_counter_ns()
        answers = _run_queries(index, workload)
        times.append((time.perf_counter_ns() - t0) / workload.count / 1e3)
    if index_bytes is None:
        index_bytes = len(dumps_index(index))
    return BenchReport(structure=index.structure, backend=index.bits.backend,
                       config=config, kind=workload.kind, count=workload.count,
                       seed=workload.seed, reps=reps, mean_us=float(np.median(times)),
                       index_bytes=index_bytes,
                       input_bytes=input_bytes if input_bytes is not None else index.n,
                       checksum=answers_checksum(answers), axis=axis)


# ---------------------------------------------------------------------------
# verification against the scanning oracle


def verify_index(index, text, exhaustive_limit: int = 10_000,
                 sample: int = DEFAULT_COUNT, seed: int = DEFAULT_SEED):
    """Compare an index against the scanning oracle.

    Exhaustive for texts up to exhaustive_limit symbols (every rank, select,
    and access argument), sampled otherwise. Returns (ok, message); the
    message pinpoints the first failing query.
    """
    oracle = ScanningOracle(text)
    if oracle.n != index.n:
        return False, f"length mismatch: index {index.n}, text {oracle.n}"
    alphabet = oracle.alphabet.astype(np.int64)

    if index.n <= exhaustive_limit:
        n = index.n
        idx = np.tile(np.arange(n + 1, dtype=np.int64), len(alphabet))
        cs = np.repeat(alphabet, n + 1)
        got = index.rank_many(idx, cs)
        want = oracle.rank_many(idx, cs)
        bad = np.flatnonzero(got != want)
        if len(bad):
            q = bad[0]
            return False, f"rank({idx[q]}, {cs[q]}): got {got[q]}, want {want[q]}"
        rs_parts, cs_parts = [], []
        for c in alphabet:
            k = oracle.count(int(c))
            rs_parts.append(np.arange(1, k + 2, dtype=np.int64))  # +1 probes absence
            cs_parts.append(np.full(k + 1, c, dtype=np.int64))
        rs = np.concatenate(rs_parts)
        cs2 = np.concatenate(cs_parts)
        got = index.select_many(rs, cs2)
        want = oracle.select_many(rs, cs2)
        bad = np.flatnonzero(got != want)
        if len(bad):
            q = bad[0]
            return False, f"select({rs[q]}, {cs2[q]}): got {got[q]}, want {want[q]}"
        pos = np.arange(1, n + 1, dtype=np.int64)
        got = np.asarray(index.access_many(pos), dtype=np.int64)
        want = np.asarray(oracle.access_many(pos), dtype=np.int64)
        bad = np.flatnonzero(got != want)
        if len(bad):
            q = bad[0]
            return False, f"access({pos[q]}): got {got[q]}, want {want[q]}"
        return True, None

    for kind in ("rank", "select"):
        w = workload_for_index(index, kind, sample, seed)
        got = _run_queries(index, w)
        if kind == "select":
            want = oracle.select_many(w.args, w.syms)
        else:
            want = oracle.rank_many(w.args, w.syms)
        bad = np.flatnonzero(got != want)
        if len(bad):
            q = bad[0]
            return False, f"{kind}({w.args[q]}, {w.syms[q]}): got {got[q]}, want {want[q]}"
    rng = np.random.default_rng(seed)
    pos = rng.integers(1, index.n + 1, size=min(sample, index.n), dtype=np.int64)
    got = np.asarray(index.access_many(pos), dtype=np.int64)
    want = np.asarray(oracle.access_many(pos), dtype=np.int64)
    bad = np.flatnonzero(got != want)
    if len(bad):
        q = bad[0]
        return False, f"access({pos[q]}): got {got[q]}, want {want[q]}"
    return True, None


# ---------------------------------------------------------------------------
# parameter sweeps


SWEEP_DEFAULTS = {
    "sb": (1 << 16, 1 << 18, 1 << 20, 1 << 22),
    "nav": ("on", "off"),
    "rrr": (15, 31, 63, 127),
}


def sweep(text, axis: str, values=None, *, block=None, backend="plain", rrr_t=63,
          kind="select", count=DEFAULT_COUNT, seed=DEFAULT_SEED, reps=3):
    """Build one forest per configuration and bench the same workload on each.

    Axes: "sb" varies the superblock size, "nav" toggles navigational
    headers, "rrr" varies the RRR block size (forcing the rrr backend).
    Yields (config_label, forest, BenchReport).
    """
    from .forest import ForestParams, build_forest

    if axis not in SWEEP_DEFAULTS:
        raise ValueError(f"unknown sweep axis {axis!r}")
    values = tuple(values) if values is not None else SWEEP_DEFAULTS[axis]
    codes, _ = normalize_text(text)
    input_bytes = len(codes)
    results = []
    for v in values:
        if axis == "sb":
            bs = int(v)
            blk = block if block is not None else min(1 << 13, bs)
            bh = max(1 << 32, bs)
            params = ForestParams(block=blk, superblock=bs, hyperblock=bh,
                                  backend=backend, rrr_t=rrr_t)
            label = f"sb={bs}"
        elif axis == "nav":
            on = str(v).lower() in ("on", "true", "1", "yes")
            params = ForestParams(block=block or 1 << 13, nav_headers=on,
                                  backend=backend, rrr_t=rrr_t)
            label = f"nav={'on' if on else 'off'}"
        else:
            t = int(v)
            params = ForestParams(block=block or 1 << 13, backend="rrr", rrr_t=t)
            label = f"rrr_t={t}"
        forest = build_forest(codes, params)
        workload = workload_for_index(forest, kind, count, seed)
        rep = run_bench(forest, workload, reps=reps, input_bytes=input_bytes,
                        config=label, axis=axis)
        results.append((label, forest, rep))
    return results
