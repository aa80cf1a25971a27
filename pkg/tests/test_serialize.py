import numpy as np
import pytest

from waveletforest.bench import answers_checksum, gen_queries
from waveletforest.forest import build_forest
from waveletforest.serialize import (
    FOREST_SECTIONS,
    IndexFormatError,
    dumps_index,
    load_index,
    loads_index,
    save_index,
    section_sizes,
)
from waveletforest.wavelet_tree import build_wt


@pytest.fixture(scope="module")
def text():
    rng = np.random.default_rng(55)
    return rng.integers(0, 70, size=25_000)


@pytest.mark.parametrize("structure", ["wf", "wt"])
@pytest.mark.parametrize("backend", ["plain", "rrr"])
def test_roundtrip_identical_answers(text, structure, backend):
    if structure == "wf":
        idx = build_forest(text, block=512, superblock=4096, hyperblock=16384, backend=backend)
    else:
        idx = build_wt(text, backend=backend)
    blob = dumps_index(idx)
    idx2 = loads_index(blob)
    w = gen_queries(text, "select", 5000, 7)
    a = idx.select_many(w.args, w.syms)
    b = idx2.select_many(w.args, w.syms)
    assert answers_checksum(a) == answers_checksum(b)
    wr = gen_queries(text, "rank", 5000, 7)
    assert np.array_equal(idx.rank_many(wr.args, wr.syms), idx2.rank_many(wr.args, wr.syms))
    pos = np.arange(1, 2001)
    assert np.array_equal(np.asarray(idx.access_many(pos)), np.asarray(idx2.access_many(pos)))
    # serialization is a pure function of the structure
    assert dumps_index(idx2) == blob


def test_file_roundtrip(tmp_path, text):
    f = build_forest(text, block=512, superblock=4096, hyperblock=16384)
    path = tmp_path / "idx.wf"
    nbytes = save_index(f, path)
    assert path.stat().st_size == nbytes
    g = load_index(path)
    assert g.n == f.n and g.sigma == f.sigma


def test_section_sizes(text):
    f = build_forest(text, block=512, superblock=4096, hyperblock=16384)
    blob = dumps_index(f)
    sizes = section_sizes(blob)
    assert set(sizes) == set(FOREST_SECTIONS)
    overhead = 6 + 2 + 12 + 24 + 16 + 8 * len(FOREST_SECTIONS)
    assert sum(sizes.values()) + overhead == len(blob)
    # the hyperblock directory is sigma 64-bit entries per hyperblock
    assert sizes["rank_hyper"] == 8 * f.sigma * f.hyperblock_count


def test_kind_preserved():
    f = build_forest("ANNB$AA", block=4, superblock=8, hyperblock=16)
    g = loads_index(dumps_index(f))
    assert g.access(5) == "$"


def test_bad_magic_version_and_truncation(text):
    f = build_forest(text, block=512, superblock=4096, hyperblock=16384)
    blob = bytearray(dumps_index(f))
    bad = bytearray(blob)
    bad[0] ^= 0xFF
    with pytest.raises(IndexFormatError):
        loads_index(bytes(bad))
    bad = bytearray(blob)
    bad[6] = 99  # version byte
    with pytest.raises(IndexFormatError):
        loads_index(bytes(bad))
    with pytest.raises(IndexFormatError):
        loads_index(bytes(blob[: len(blob) // 2]))
