import numpy as np
from numpy.testing import assert_allclose

from src.cp_semigroup import example_tt
from src.dyadic import DyadicTime
from src.inclusion import from_cp
from src.storage import FiberCache, decode_matrix, encode_matrix

T = DyadicTime.of(1, 1)


def test_save_and_load(tmp_path):
    cache = FiberCache(str(tmp_path / "fibers"))
    q = np.array([[1.0 + 2.0j, 0.0], [0.5, -1.0j]])
    cache.save("abc", T, 2, q)
    hit = cache.load("abc", T)
    assert hit["dim"] == 2
    assert_allclose(hit["q"], q)
    assert cache.hits == 1
    assert cache.list_entries() == ["abc_1_1"]


def test_missing_and_corrupted_entries(tmp_path):
    cache = FiberCache(str(tmp_path))
    assert cache.load("missing", T) is None
    (tmp_path / "bad_1_1.json").write_text("{not json")
    assert cache.load("bad", T) is None
    assert cache.misses == 2


def test_clear(tmp_path):
    cache = FiberCache(str(tmp_path))
    cache.save("abc", T, 1, np.eye(1))
    cache.clear()
    assert cache.list_entries() == []


def test_empty_factor_keeps_its_width():
    q = np.zeros((0, 3), dtype=np.complex128)
    assert decode_matrix(encode_matrix(q), 3).shape == (0, 3)


def test_cp_system_reuses_cached_fibers(tmp_path):
    cache = FiberCache(str(tmp_path))
    first = from_cp(example_tt(1.0), cache=cache)
    fiber = first.fiber(T)
    assert cache.misses == 1
    second = from_cp(example_tt(1.0), cache=cache)
    reloaded = second.fiber(T)
    assert cache.hits == 1
    assert reloaded.dim == fiber.dim == 2
    assert_allclose(reloaded.q, fiber.q)
    assert first.digest == second.digest
