import os
import subprocess
import sys

import numpy as np
import pytest

from waveletforest import bench as B
from waveletforest.forest import build_forest
from waveletforest.wavelet_tree import build_wt


def test_workload_determinism_and_validity():
    rng = np.random.default_rng(2)
    s = rng.integers(0, 50, size=10_000)
    w1 = B.gen_queries(s, "select", 5000, 123)
    w2 = B.gen_queries(s, "select", 5000, 123)
    assert np.array_equal(w1.args, w2.args) and np.array_equal(w1.syms, w2.syms)
    counts = {int(c): int((s == c).sum()) for c in np.unique(s)}
    for r, c in zip(w1.args, w1.syms):
        assert 1 <= r <= counts[int(c)]
    wr = B.gen_queries(s, "rank", 5000, 123)
    assert wr.args.min() >= 0 and wr.args.max() <= len(s)


def test_workload_unary_text():
    w = B.gen_queries("AAAAA", "select", 100, 1)
    assert set(w.syms.tolist()) == {ord("A")}
    assert w.args.max() <= 5


def test_workload_errors():
    with pytest.raises(ValueError):
        B.gen_queries("ABC", "select", 0, 1)
    with pytest.raises(ValueError):
        B.gen_queries("", "select", 10, 1)
    with pytest.raises(ValueError):
        B.gen_queries("ABC", "median", 10, 1)


def test_cross_structure_checksums_match():
    rng = np.random.default_rng(9)
    s = rng.integers(0, 30, size=20_000)
    f = build_forest(s, block=512, superblock=4096, hyperblock=16384)
    t = build_wt(s, backend="rrr")
    for kind in ("rank", "select"):
        w = B.workload_for_index(f, kind, 4000, 5)
        rf = B.run_bench(f, w, input_bytes=len(s))
        rt = B.run_bench(t, w, input_bytes=len(s))
        assert rf.checksum == rt.checksum
        assert rf.mean_us > 0 and rt.reps == 3


def test_verify_passes_and_catches_corruption():
    rng = np.random.default_rng(3)
    s = rng.integers(0, 40, size=4000)
    f = build_forest(s, block=64, superblock=512, hyperblock=2048)
    ok, msg = B.verify_index(f, s)
    assert ok, msg
    f.bits.words[3] ^= np.uint64(1 << 17)  # flip one stored tree bit
    ok, msg = B.verify_index(f, s)
    assert not ok and msg


def test_env_seed(monkeypatch):
    monkeypatch.setenv("WF_SEED", "0x2A")
    assert B.env_seed() == 42
    monkeypatch.setenv("WF_SEED", "nope")
    with pytest.raises(ValueError):
        B.env_seed()
    monkeypatch.delenv("WF_SEED")
    assert B.env_seed() == B.DEFAULT_SEED


def test_sweep_nav_checksums_equal():
    rng = np.random.default_rng(4)
    s = rng.integers(1, 60, size=30_000).astype(np.int64)
    rows = B.sweep(s, "nav", block=512, count=2000, reps=1)
    assert len(rows) == 2
    assert rows[0][2].checksum == rows[1][2].checksum
    labels = [r[0] for r in rows]
    assert labels == ["nav=on", "nav=off"]


# ---------------------------------------------------------------------------
# command-line interface


def _wf(*args, **kw):
    return subprocess.run([sys.executable, "-m", "waveletforest.cli", *args],
                          capture_output=True, text=True, **kw)


@pytest.fixture(scope="module")
def sample_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "text.bin"
    rng = np.random.default_rng(77)
    path.write_bytes(rng.integers(1, 90, size=60_000, dtype=np.uint8).tobytes())
    return path


def test_cli_full_pipeline(sample_file, tmp_path):
    bwt_path = tmp_path / "text.bwt"
    r = _wf("bwt", str(sample_file), "-o", str(bwt_path))
    assert r.returncode == 0, r.stderr
    assert bwt_path.stat().st_size == sample_file.stat().st_size + 1  # sentinel
    assert (tmp_path / "text.bwt.stats").exists()

    r = _wf("stats", str(sample_file))
    assert r.returncode == 0 and "sigma=89" in r.stdout

    idx = tmp_path / "idx.wf"
    r = _wf("build", str(bwt_path), "-o", str(idx),
            "--block", "512", "--superblock", "4096", "--hyperblock", "16384")
    assert r.returncode == 0, r.stderr

    r = _wf("verify", str(idx), str(bwt_path))
    assert r.returncode == 0 and "verify OK" in r.stdout

    r = _wf("bench", str(idx), "--kind", "select", "--count", "2000", "--seed", "5")
    assert r.returncode == 0
    assert "us/query" in r.stdout
    csv_line = r.stdout.strip().splitlines()[-1]
    assert csv_line.startswith("1,")

    r = _wf("build", str(bwt_path), "-o", str(tmp_path / "idx.wt"),
            "--structure", "wt", "--backend", "rrr", "--rrr-t", "31")
    assert r.returncode == 0
    r = _wf("verify", str(tmp_path / "idx.wt"), str(bwt_path))
    assert r.returncode == 0


def test_cli_bench_count_zero_is_usage_error(sample_file, tmp_path):
    idx = tmp_path / "i.wf"
    assert _wf("build", str(sample_file), "-o", str(idx), "--block", "1024",
               "--superblock", "8192", "--hyperblock", "65536").returncode == 0
    r = _wf("bench", str(idx), "--count", "0")
    assert r.returncode == 1


def test_cli_exit_codes(sample_file, tmp_path):
    r = _wf("frobnicate")
    assert r.returncode == 1
    r = _wf("verify", str(tmp_path / "missing.idx"), str(sample_file))
    assert r.returncode == 2
    junk = tmp_path / "junk.idx"
    junk.write_bytes(b"not an index at all")
    r = _wf("verify", str(junk), str(sample_file))
    assert r.returncode == 3
    r = _wf("build", str(sample_file), "-o", str(tmp_path / "x.wf"), "--block", "3")
    assert r.returncode == 1


def test_cli_verify_detects_mismatch(sample_file, tmp_path):
    other = tmp_path / "other.bin"
    data = bytearray(sample_file.read_bytes())
    data[100] = (data[100] % 89) + 1
    other.write_bytes(bytes(data))
    idx = tmp_path / "i2.wf"
    assert _wf("build", str(sample_file), "-o", str(idx), "--block", "1024",
               "--superblock", "8192", "--hyperblock", "65536").returncode == 0
    r = _wf("verify", str(idx), str(other))
    assert r.returncode == 4
    assert "FAILED" in r.stdout


def test_cli_sweep_nav(sample_file, tmp_path):
    out = tmp_path / "sweep.csv"
    r = _wf("sweep", str(sample_file), "--axis", "nav", "--block", "1024",
            "--count", "1000", "-o", str(out))
    assert r.returncode == 0, r.stderr
    lines = out.read_text().strip().splitlines()
    assert lines[0] == B.BenchReport.csv_header()
    assert len(lines) == 3
    crc_on = lines[1].split(",")[-1]
    crc_off = lines[2].split(",")[-1]
    assert crc_on == crc_off  # navigational headers change timing, not answers
