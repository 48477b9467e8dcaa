import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from src.errors import LinalgError
from src.index_theory import (
    Automorphism,
    ExpUnit,
    adjoint,
    apply_automorphism,
    centered_spectrum,
    cov_kernel,
    exp_cov,
    exp_kernel,
    fock_generated_index,
    index_estimate,
)
from src.inclusion import example2_unit
from tests.helpers import HALF, ONE, exact_rank

E1 = [1.0, 0.0]
E2 = [0.0, 1.0]


def test_exp_cov_examples():
    assert exp_cov(ExpUnit(q=1, x=E1), ExpUnit(q=2j, x=E1)) == pytest.approx(2 + 2j)
    assert exp_cov(ExpUnit(q=0, x=E1), ExpUnit(q=0, x=E2)) == 0
    assert exp_cov(ExpUnit(q=1j, x=[1j, 0]), ExpUnit(q=0, x=[1j, 0])) == pytest.approx(1 - 1j)
    with pytest.raises(LinalgError):
        exp_cov(ExpUnit(q=0, x=E1), ExpUnit(q=0, x=[1.0]))


@pytest.mark.parametrize(
    "a_set, expected",
    [
        ([[0.0, 0.0]], 0),
        ([[0.0, 0.0], E1], 1),
        ([E1, E2, [1.0, 1.0]], 2),
        ([[0.0, 0.0], E1, [2.0, 0.0]], 1),
    ],
)
def test_fock_generated_index_examples(a_set, expected):
    assert fock_generated_index(a_set) == expected


def test_fock_generated_index_needs_points():
    with pytest.raises(ValueError):
        fock_generated_index([])


POINTS_C5 = st.lists(
    st.lists(st.integers(min_value=-2, max_value=2), min_size=5, max_size=5), min_size=1, max_size=6
)


@settings(max_examples=100, deadline=None)
@given(points=POINTS_C5, shifts=st.lists(st.floats(min_value=-2.0, max_value=2.0), min_size=6, max_size=6))
def test_kernel_index_equals_span_of_differences(points, shifts):
    units = [ExpUnit(q=complex(s, -s / 2), x=p) for p, s in zip(points, shifts)]
    diffs = [[a - b for a, b in zip(p, points[0])] for p in points]
    expected = exact_rank(diffs)
    assert fock_generated_index(points) == expected
    assert index_estimate(exp_kernel(units)) == expected


@settings(max_examples=50, deadline=None)
@given(points=POINTS_C5, data=st.data())
def test_index_does_not_depend_on_the_base_unit(points, data):
    units = [ExpUnit(q=0.1 * i - 0.05j, x=p) for i, p in enumerate(points)]
    kernel = exp_kernel(units)
    expected = exact_rank([[a - b for a, b in zip(p, points[0])] for p in points])
    r = data.draw(st.integers(min_value=0, max_value=len(points) - 1))
    ref = kernel.labels[r]
    assert index_estimate(kernel, ref=ref) == expected
    assert fock_generated_index(points[r:] + points[:r]) == expected
    spectrum = centered_spectrum(kernel, ref)
    assert spectrum[-1] > -1e-9
    assert int(np.count_nonzero(spectrum > 1e-9)) == expected


def test_automorphism_roundtrip_and_covariance():
    theta = 0.3
    u = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]]) * np.exp(0.2j)
    phi = Automorphism(q=0.7, z=[0.5, -1j], u=u)
    a, b = ExpUnit(q=-0.1 + 0.4j, x=[1.0, 2j]), ExpUnit(q=0.3, x=[-0.5, 0.25])
    back = apply_automorphism(adjoint(phi), apply_automorphism(phi, a))
    assert back.q == pytest.approx(a.q)
    assert_allclose(back.x, a.x, atol=1e-12)
    image_cov = exp_cov(apply_automorphism(phi, a), apply_automorphism(phi, b))
    assert image_cov == pytest.approx(exp_cov(a, b))


def test_identity_automorphism_fixes_units():
    a = ExpUnit(q=0.2 - 0.1j, x=[1.0, -1.0])
    image = apply_automorphism(Automorphism.identity(2), a)
    assert image.q == pytest.approx(a.q)
    assert_allclose(image.x, a.x)


def test_automorphism_requires_unitary():
    with pytest.raises(ValueError):
        Automorphism(q=0.0, z=[0.0, 0.0], u=2 * np.eye(2))
    with pytest.raises(ValueError):
        Automorphism(q=0.0, z=[0.0], u=np.eye(2))
    with pytest.raises(LinalgError):
        apply_automorphism(Automorphism.identity(1), ExpUnit(q=0, x=E1))


def test_example2_kernel_agrees_with_exponential_units(ex2, tol):
    pairs = [(-0.2, 0.0), (0.1j, 0.15), (0.0, -0.1j)]
    units = [example2_unit(a, b, ONE, 30, label=f"u{i}") for i, (a, b) in enumerate(pairs)]
    numeric = cov_kernel(ex2, units, [HALF, ONE], tol, max_depth=24, conv_tol=1e-9)
    closed = exp_kernel([ExpUnit(q=a, x=[b]) for a, b in pairs], labels=numeric.labels)
    assert_allclose(numeric.gamma, closed.gamma, atol=1e-6)
    assert index_estimate(numeric, tol) == index_estimate(closed, tol) == 1
