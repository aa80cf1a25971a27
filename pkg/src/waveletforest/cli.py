"""Command-line harness: build, verify, bench, sweep, stats, bwt.

Exit codes: 0 success, 1 usage, 2 I/O, 3 bad index format, 4 verification
mismatch. Select results print the position or "inf" when the occurrence
does not exist.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from . import bench as _bench
from .bwt import bwt as _bwt
from .bwt import text_stats
from .forest import ForestParams, build_forest
from .serialize import IndexFormatError, load_index, save_index
from .wavelet_tree import build_wt

EXIT_USAGE = 1
EXIT_IO = 2
EXIT_FORMAT = 3
EXIT_VERIFY = 4


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _read_text(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as e:
        print(f"cannot read {path}: {e}", file=sys.stderr)
        raise SystemExit(EXIT_IO) from None


def _load(path):
    try:
        return load_index(path)
    except OSError as e:
        print(f"cannot read {path}: {e}", file=sys.stderr)
        raise SystemExit(EXIT_IO) from None
    except IndexFormatError as e:
        print(f"bad index file {path}: {e}", file=sys.stderr)
        raise SystemExit(EXIT_FORMAT) from None


def _cmd_build(args) -> int:
    text = _read_text(args.text)
    if not text:
        print("input text is empty", file=sys.stderr)
        return EXIT_USAGE
    import time
    t0 = time.perf_counter()
    try:
        if args.structure == "wf":
            params = ForestParams(block=args.block, superblock=args.superblock,
                                  hyperblock=args.hyperblock,
                                  nav_headers=not args.no_nav,
                                  backend=args.backend, rrr_t=args.rrr_t)
            index = build_forest(text, params)
        else:
            index = build_wt(text, backend=args.backend, rrr_t=args.rrr_t)
    except ValueError as e:
        print(f"build failed: {e}", file=sys.stderr)
        return EXIT_USAGE
    dt = time.perf_counter() - t0
    try:
        nbytes = save_index(index, args.output)
    except OSError as e:
        print(f"cannot write {args.output}: {e}", file=sys.stderr)
        return EXIT_IO
    pct = 100.0 * nbytes / len(text)
    print(f"built {args.structure}-{args.backend} over {len(text)} bytes in {dt:.2f} s; "
          f"index {nbytes} bytes = {pct:.2f}% of input")
    return 0


def _cmd_verify(args) -> int:
    index = _load(args.index)
    text = _read_text(args.text)
    ok, msg = _bench.verify_index(index, text, seed=_bench.env_seed())
    if ok:
        mode = "exhaustive" if index.n <= 10_000 else "sampled"
        print(f"verify OK ({mode}, n={index.n})")
        return 0
    print(f"verify FAILED: {msg}")
    return EXIT_VERIFY


def _cmd_bench(args) -> int:
    index = _load(args.index)
    if args.count < 1:
        print("--count must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    workload = _bench.workload_for_index(index, args.kind, args.count,
                                         args.seed if args.seed is not None else _bench.env_seed())
    import os
    report = _bench.run_bench(index, workload, reps=args.reps,
                              index_bytes=os.path.getsize(args.index),
                              input_bytes=args.input_bytes or index.n)
    print(report.summary())
    print(report.csv_header())
    print(report.csv_row())
    return 0


def _cmd_sweep(args) -> int:
    text = _read_text(args.text)
    if not text:
        print("input text is empty", file=sys.stderr)
        return EXIT_USAGE
    values = args.values
    if values is not None:
        values = [v for v in values.split(",") if v]
    try:
        rows = _bench.sweep(text, args.axis, values, block=args.block,
                            backend=args.backend, rrr_t=args.rrr_t, kind=args.kind,
                            count=args.count,
                            seed=args.seed if args.seed is not None else _bench.env_seed(),
                            reps=args.reps)
    except ValueError as e:
        print(f"sweep failed: {e}", file=sys.stderr)
        return EXIT_USAGE
    lines = [_bench.BenchReport.csv_header()]
    lines += [rep.csv_row() for _, _, rep in rows]
    out = "\n".join(lines) + "\n"
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(out)
        except OSError as e:
            print(f"cannot write {args.output}: {e}", file=sys.stderr)
            return EXIT_IO
        print(f"wrote {len(rows)} configurations to {args.output}")
    else:
        sys.stdout.write(out)
    return 0


def _cmd_stats(args) -> int:
    text = _read_text(args.text)
    if not text:
        print("input text is empty", file=sys.stderr)
        return EXIT_USAGE
    try:
        st = text_stats(text)
    except ValueError as e:
        print(f"stats failed: {e}", file=sys.stderr)
        return EXIT_USAGE
    print(f"sigma={st.sigma} n={st.n} mib={st.mib:.3f} runs={st.runs} avg_run={st.avg_run:.4f}")
    return 0


def _cmd_bwt(args) -> int:
    text = _read_text(args.text)
    if not text:
        print("input text is empty", file=sys.stderr)
        return EXIT_USAGE
    data = np.frombuffer(text, dtype=np.uint8)
    if len(data) > 1 and (data[:-1].min() <= data[-1] or (data[:-1] == data[-1]).any()):
        if (data == 0).any():
            print("input contains byte 0; cannot append the sentinel", file=sys.stderr)
            return EXIT_USAGE
        data = np.concatenate([data, np.zeros(1, np.uint8)])
        print("appended sentinel byte 0")
    try:
        res = _bwt(data.astype(np.int64))
    except ValueError as e:
        print(f"bwt failed: {e}", file=sys.stderr)
        return EXIT_USAGE
    out = np.asarray(res.bwt, dtype=np.int64).astype(np.uint8).tobytes()
    try:
        with open(args.output, "wb") as fh:
            fh.write(out)
        with open(str(args.output) + ".stats", "w") as fh:
            sigma = len(np.unique(np.frombuffer(out, np.uint8)))
            fh.write(f"sigma={sigma} n={len(out)} runs={res.runs}\n")
    except OSError as e:
        print(f"cannot write {args.output}: {e}", file=sys.stderr)
        return EXIT_IO
    print(f"wrote BWT ({len(out)} bytes, {res.runs} runs) to {args.output}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="wf", description="wavelet forest / wavelet tree benchmark harness")
    sub = p.add_subparsers(dest="cmd", required=True)

    b = sub.add_parser("build", help="build an index file from a raw byte text")
    b.add_argument("text")
    b.add_argument("-o", "--output", required=True)
    b.add_argument("--structure", choices=("wf", "wt"), default="wf")
    b.add_argument("--backend", choices=("plain", "rrr"), default="plain")
    b.add_argument("--rrr-t", type=int, default=63)
    b.add_argument("--block", type=int, default=1 << 13)
    b.add_argument("--superblock", type=int, default=1 << 20)
    b.add_argument("--hyperblock", type=int, default=1 << 32)
    b.add_argument("--no-nav", action="store_true", help="drop navigational block headers")
    b.set_defaults(func=_cmd_build)

    v = sub.add_parser("verify", help="check an index against the scanning oracle")
    v.add_argument("index")
    v.add_argument("text")
    v.set_defaults(func=_cmd_verify)

    be = sub.add_parser("bench", help="time a random workload against an index")
    be.add_argument("index")
    be.add_argument("--kind", choices=("rank", "select"), default="select")
    be.add_argument("--count", type=int, default=_bench.DEFAULT_COUNT)
    be.add_argument("--seed", type=int, default=None)
    be.add_argument("--reps", type=int, default=3)
    be.add_argument("--input-bytes", type=int, default=None,
                    help="original text size for the space percentage")
    be.set_defaults(func=_cmd_bench)

    sw = sub.add_parser("sweep", help="bench a family of forest configurations")
    sw.add_argument("text")
    sw.add_argument("--axis", choices=("sb", "nav", "rrr"), required=True)
    sw.add_argument("--values", default=None, help="comma-separated axis values")
    sw.add_argument("--block", type=int, default=None)
    sw.add_argument("--backend", choices=("plain", "rrr"), default="plain")
    sw.add_argument("--rrr-t", type=int, default=63)
    sw.add_argument("--kind", choices=("rank", "select"), default="select")
    sw.add_argument("--count", type=int, default=_bench.DEFAULT_COUNT)
    sw.add_argument("--seed", type=int, default=None)
    sw.add_argument("--reps", type=int, default=3)
    sw.add_argument("-o", "--output", default=None, help="CSV output path")
    sw.set_defaults(func=_cmd_sweep)

    st = sub.add_parser("stats", help="alphabet size, length, and BWT run statistics")
    st.add_argument("text")
    st.set_defaults(func=_cmd_stats)

    bw = sub.add_parser("bwt", help="write the BWT of a text (byte-0 sentinel)")
    bw.add_argument("text")
    bw.add_argument("-o", "--output", required=True)
    bw.set_defaults(func=_cmd_bwt)
    return p


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
