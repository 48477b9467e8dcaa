import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from src.cp_semigroup import (
    CpSemigroup,
    apply,
    block_cp_semigroup,
    choi,
    choi_from_map,
    example_tt,
    gns_beta,
    gns_fiber,
    gns_gram,
    identity_semigroup,
    kraus,
    kraus_apply,
    powers_corner,
    validate_cp,
)
from src.dyadic import DyadicTime
from src.errors import CpValidationError, IntertwiningError, LinalgError, NotContractiveError
from src.linalg_core import isometry_residual


def _transpose_generator(n: int) -> np.ndarray:
    p = np.zeros((n * n, n * n))
    for i in range(n):
        for j in range(n):
            p[j + n * i, i + n * j] = 1.0
    return p


def test_tt_action():
    sg = example_tt(1.0)
    x = np.array([[1.0, 2.0j], [3.0, 4.0]])
    t = 0.75
    expected = math.exp(-t) * np.array([[1.0 + t * 4.0, 2.0j], [3.0, 4.0]])
    assert_allclose(apply(sg, t, x), expected, atol=1e-12)


def test_tt_needs_alpha_at_least_one():
    with pytest.raises(NotContractiveError):
        example_tt(0.5)


def test_tt_gram_matrix():
    t = DyadicTime.of(1, 1)
    ft = float(t)
    expected = math.exp(-ft) * np.array(
        [[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, ft, 0], [1, 0, 0, 1]], dtype=np.complex128
    )
    assert_allclose(gns_gram(example_tt(1.0), t), expected, atol=1e-12)
    assert gns_fiber(example_tt(1.0), t).dim == 2


def test_identity_channel_has_one_dimensional_fibers():
    fiber = gns_fiber(identity_semigroup(3), DyadicTime.of(1))
    assert fiber.dim == 1


def test_kraus_reproduces_the_map():
    sg = example_tt(1.0)
    x = np.array([[0.5, 1.0 - 1.0j], [2.0, -1.0]])
    ops = kraus(choi(sg, 0.5))
    assert len(ops) == 2
    assert_allclose(kraus_apply(ops, x), apply(sg, 0.5, x), atol=1e-12)


def test_validate_cp():
    assert validate_cp(example_tt(1.0)).passed
    report = validate_cp(CpSemigroup(2, _transpose_generator(2), name="transpose"))
    assert not report.passed
    assert report.min_choi_eigenvalue < 0


def test_generator_shape_is_checked():
    with pytest.raises(LinalgError):
        CpSemigroup(2, np.zeros((3, 3)))
    with pytest.raises(ValueError):
        example_tt().propagator(-1.0)


def test_gns_beta_isometric_and_basis_independent():
    sg = example_tt(1.0)
    s, t = DyadicTime.of(1, 2), DyadicTime.of(1, 1)
    beta = gns_beta(sg, s, t)
    assert isometry_residual(beta) < 1e-10
    theta = 0.7
    w = np.array([[np.cos(theta), 1j * np.sin(theta)], [1j * np.sin(theta), np.cos(theta)]])
    assert_allclose(gns_beta(sg, s, t, basis=w), beta, atol=1e-10)


def test_powers_corner_action():
    sg = powers_corner([[0.0]], [[-0.3]], [[0.0]], [[-0.2]])
    assert sg.dim_h == 2
    assert sg.powers is not None
    x = np.array([[1.0, 2.0], [3.0, 4.0]])
    t = 1.0
    decay = math.exp(-0.5 * t)
    assert_allclose(apply(sg, t, x), [[1.0, 2.0 * decay], [3.0 * decay, 4.0]], atol=1e-12)


def test_powers_corner_rejects_growth():
    with pytest.raises(NotContractiveError):
        powers_corner([[0.0]], [[0.5]], [[0.0]], [[-0.2]])


def test_powers_corner_rejects_non_intertwiner():
    with pytest.raises(IntertwiningError):
        powers_corner(np.diag([1.0, -1.0]), np.zeros((2, 2)), [[0.0]], [[0.0]])


def _scalar_block(c: float):
    return block_cp_semigroup(np.zeros((1, 1)), np.zeros((1, 1)), [[-c]], name=f"scalar({c:g})")


DYADIC = st.integers(min_value=1, max_value=8).map(lambda m: DyadicTime.of(m, 2))


@settings(max_examples=30, deadline=None)
@given(s=DYADIC, t=DYADIC)
def test_apply_is_a_semigroup_on_dyadic_times(s, t):
    x = np.array([[0.5, 1.0 - 1.0j], [2.0j, -1.0]])
    for sg in (example_tt(1.0), powers_corner([[0.0]], [[-0.3]], [[0.0]], [[-0.2]]), _scalar_block(0.4)):
        two_steps = apply(sg, float(s), apply(sg, float(t), x))
        assert_allclose(apply(sg, float(s + t), x), two_steps, atol=1e-10)


def test_block_semigroup_rejects_growing_corner():
    with pytest.raises(CpValidationError) as info:
        _scalar_block(-0.5)
    assert info.value.min_eigenvalue < 0


def test_zero_generators_give_the_identity_semigroup():
    sg = block_cp_semigroup(np.zeros((4, 4)), np.zeros((1, 1)), np.zeros((2, 2)))
    assert sg.dim_h == 3
    assert_allclose(sg.propagator(2.0), np.eye(9), atol=1e-14)
    x = np.arange(9, dtype=np.complex128).reshape(3, 3) * (1 - 0.5j)
    assert_allclose(apply(sg, 1.5, x), x, atol=1e-14)


@pytest.mark.parametrize("c", [0.25, 1.0, 3.0])
@pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
def test_scalar_block_choi_spectrum(c, t):
    decay = math.exp(-c * t)
    eigenvalues = np.linalg.eigvalsh(choi(_scalar_block(c), t).entries)
    assert_allclose(np.sort(eigenvalues), [0.0, 0.0, 1.0 - decay, 1.0 + decay], atol=1e-12)


def test_scalar_block_fiber_dimension():
    t = DyadicTime.of(1)
    assert gns_fiber(_scalar_block(0.5), t).dim == 2
    assert gns_fiber(_scalar_block(0.0), t).dim == 1


def test_kraus_of_identity_channel_is_one_unitary():
    ops = kraus(choi(identity_semigroup(3), 1.0))
    assert len(ops) == 1
    phase = ops[0][0, 0]
    assert abs(phase) == pytest.approx(1.0)
    assert_allclose(ops[0], phase * np.eye(3), atol=1e-12)


def test_kraus_of_full_rank_map_has_n_squared_operators():
    rho = np.diag([0.7, 0.3])
    ops = kraus(choi_from_map(lambda x: np.trace(x) * rho, 2))
    assert len(ops) == 4
    x = np.array([[0.5, 1.0 - 1.0j], [2.0, -1.0]])
    assert_allclose(kraus_apply(ops, x), np.trace(x) * rho, atol=1e-12)


def test_gns_beta_random_unitary_basis(rng):
    sg = example_tt(1.0)
    s, t = DyadicTime.of(1, 2), DyadicTime.of(1, 1)
    w, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
    assert_allclose(gns_beta(sg, s, t, basis=w), gns_beta(sg, s, t), atol=1e-10)


def test_gns_beta_rejects_non_orthonormal_basis():
    sg = example_tt(1.0)
    with pytest.raises(LinalgError):
        gns_beta(sg, DyadicTime.of(1, 2), DyadicTime.of(1, 1), basis=[[1.0, 1.0], [0.0, 1.0]])
