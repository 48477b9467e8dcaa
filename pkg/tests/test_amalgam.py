import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from src.amalgam import amalgamate, embed_tensor, recover_contraction, tensor_amalgamation
from src.errors import IsometryError, LinalgError, NotContractiveError
from src.linalg_core import isometry_residual, kron, spectral_norm


def _random_contraction(rng, dim_h, dim_k, scale=0.9):
    d = rng.normal(size=(dim_h, dim_k)) + 1j * rng.normal(size=(dim_h, dim_k))
    return d * (scale / max(spectral_norm(d), 1e-12))


@settings(max_examples=100, deadline=None)
@given(dim_h=st.integers(1, 4), dim_k=st.integers(1, 4), seed=st.integers(0, 2**32 - 1))
def test_recover_contraction_roundtrip_all_shapes(dim_h, dim_k, seed):
    d = _random_contraction(np.random.default_rng(seed), dim_h, dim_k)
    space = amalgamate(dim_h, dim_k, d)
    assert space.dim_g == dim_h + dim_k
    assert isometry_residual(space.embed_left) < 1e-10
    assert isometry_residual(space.embed_right) < 1e-10
    assert_allclose(recover_contraction(space.embed_left, space.embed_right), d, atol=1e-10)


def test_zero_contraction_is_orthogonal_sum():
    space = amalgamate(2, 2, np.zeros((2, 2)))
    assert space.dim_g == 4
    assert_allclose(space.embed_left.conj().T @ space.embed_right, np.zeros((2, 2)), atol=1e-12)


def test_unitary_identifies_the_spaces():
    theta = 0.4
    d = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]) * np.exp(0.3j)
    space = amalgamate(2, 2, d)
    assert space.dim_g == 2
    assert_allclose(space.embed_left @ d, space.embed_right, atol=1e-10)


def test_components_and_lift(rng):
    d = 0.5 * np.array([[1.0, 0.5j], [0.0, 1.0]])
    space = amalgamate(2, 2, d)
    u = rng.normal(size=2) + 1j * rng.normal(size=2)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    left, right = space.components(space.classes(u, v))
    assert_allclose(left, u + d @ v, atol=1e-12)
    assert_allclose(right, d.conj().T @ u + v, atol=1e-12)
    lifted = space.lift(u, v)
    assert_allclose(np.concatenate(space.components(lifted)), np.concatenate([u, v]), atol=1e-10)


def test_amalgamate_rejects_bad_input():
    with pytest.raises(NotContractiveError):
        amalgamate(1, 1, [[2.0]])
    with pytest.raises(LinalgError):
        amalgamate(2, 1, [[0.5, 0.5]])


def test_recover_contraction_needs_isometries():
    with pytest.raises(IsometryError):
        recover_contraction(2 * np.eye(2), np.eye(2))
    with pytest.raises(LinalgError):
        recover_contraction(np.eye(2), np.eye(3))


def test_embed_tensor_is_isometric(rng):
    left = amalgamate(1, 2, [[0.3, 0.4j]])
    right = amalgamate(2, 1, [[0.5], [0.2]])
    source = tensor_amalgamation(left, right)
    i_map = embed_tensor((left, right), source=source)
    assert isometry_residual(i_map) < 1e-10
    u1, u2 = np.array([1.0 + 0.5j]), rng.normal(size=2)
    image = i_map @ source.classes(kron(u1, u2).reshape(-1), np.zeros(2))
    expected = kron(left.embed_left @ u1, right.embed_left @ u2).reshape(-1)
    assert_allclose(image, expected, atol=1e-10)


def test_embed_tensor_zero_contraction_keeps_summands_apart():
    zero = amalgamate(1, 1, [[0.0]])
    source = tensor_amalgamation(zero, zero)
    assert source.dim_g == 2
    i_map = embed_tensor((zero, zero), source=source)
    assert i_map.shape == (4, 2)
    assert isometry_residual(i_map) < 1e-10
    left_image = i_map @ source.classes([1.0], [0.0])
    right_image = i_map @ source.classes([0.0], [1.0])
    assert abs(np.vdot(left_image, right_image)) < 1e-12
    assert_allclose(np.linalg.norm(left_image), 1.0, atol=1e-12)


def test_embed_tensor_unitary_scalar_is_a_phase():
    one = amalgamate(1, 1, [[1.0]])
    assert one.dim_g == 1
    source = tensor_amalgamation(one, one)
    i_map = embed_tensor((one, one), source=source)
    assert i_map.shape == (1, 1)
    assert_allclose(abs(i_map[0, 0]), 1.0, atol=1e-10)
    image = i_map @ source.classes([1.0], [0.0])
    assert_allclose(image, kron(one.embed_left, one.embed_left).reshape(-1), atol=1e-10)


def test_embed_tensor_random_three_by_three(rng):
    left = amalgamate(3, 3, _random_contraction(rng, 3, 3))
    right = amalgamate(3, 3, _random_contraction(rng, 3, 3, scale=0.7))
    i_map = embed_tensor((left, right))
    assert i_map.shape == (36, 18)
    assert isometry_residual(i_map) < 1e-10
