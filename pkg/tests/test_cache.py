import numpy as np
import pytest

from ucov.cache import HEADER, MAGIC, CorruptCache, cache_dir, cache_path, load_or_build, read_table, write_table


def test_roundtrip_and_layout(tmp_path, tables):
    t = tables(3)
    p = write_table(t, tmp_path / "u3_3.ucov1")
    raw = p.read_bytes()
    magic, q, order = HEADER.unpack_from(raw)
    assert (magic, q, order) == (MAGIC, 3, 6048)
    assert len(raw) == HEADER.size + 18 * 6048
    back = read_table(p, 3)
    assert np.array_equal(back.mats, t.mats)
    assert not list(tmp_path.glob("*.tmp"))


def _corrupt(path, how):
    raw = bytearray(path.read_bytes())
    if how == "magic":
        raw[:5] = b"XXXX1"
    elif how == "truncate":
        raw = raw[:-7]
    elif how == "q":
        raw[5] = 4
    elif how == "entry":
        raw[HEADER.size] = 200
    elif how == "noncanonical":
        # swap two matrices: keys stop being increasing
        a = raw[HEADER.size : HEADER.size + 18]
        b = raw[HEADER.size + 18 : HEADER.size + 36]
        raw[HEADER.size : HEADER.size + 36] = b + a
    path.write_bytes(bytes(raw))


@pytest.mark.parametrize("how", ["magic", "truncate", "q", "entry", "noncanonical"])
def test_corruption_detected_and_rebuilt(tmp_path, how):
    t, status = load_or_build(2, tmp_path)
    assert status == "built"
    p = cache_path(2, tmp_path)
    with pytest.raises(CorruptCache):
        _corrupt(p, how)
        read_table(p, 2)
    t2, status = load_or_build(2, tmp_path)
    assert status == "rebuilt" and np.array_equal(t2.mats, t.mats)
    assert load_or_build(2, tmp_path)[1] == "loaded"


def test_wrong_q_rejected(tmp_path, tables):
    p = write_table(tables(2), tmp_path / "x.ucov1")
    with pytest.raises(CorruptCache):
        read_table(p, 3)


def test_cache_dir_resolution(monkeypatch, tmp_path):
    monkeypatch.setenv("UCOV_CACHE_DIR", str(tmp_path / "env"))
    assert cache_dir() == tmp_path / "env"
    assert cache_dir(tmp_path / "x") == tmp_path / "x"
    monkeypatch.delenv("UCOV_CACHE_DIR")
    assert cache_dir().name == "ucov"
