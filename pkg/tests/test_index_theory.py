import numpy as np
import pytest
from numpy.testing import assert_allclose

from src.errors import LinalgError, NotContractiveError, NotPositiveError
from src.index_theory import (
    CovKernel,
    canonical_gauge,
    centered,
    centered_spectrum,
    cov_kernel,
    defect_p,
    gauge_centered,
    index_estimate,
    predicted_amalgam_index,
    validate_kernel,
)
from src.inclusion import embed_unit_left, embed_unit_right, example2_unit, exponential_unit
from src.limits import covariance
from tests.helpers import HALF, ONE, scalar_amalgam

EXAMPLE2_UNITS = [(-0.1, 0.0), (0.2j, 0.1), (0.05, 0.2)]


@pytest.fixture
def example2_kernel(ex2, tol):
    units = [example2_unit(a, b, ONE, 30, label=f"u{i}") for i, (a, b) in enumerate(EXAMPLE2_UNITS)]
    return cov_kernel(ex2, units, [HALF, ONE], tol, max_depth=24, conv_tol=1e-9)


def _amalgam_kernel(lam, mu, tol):
    _, _, g, _, _ = scalar_amalgam(lam, mu, depth=12, tol=tol)
    xs = [exponential_unit(0.0, ONE, 12, label="x1"), exponential_unit(-0.25 + 0.5j, ONE, 12, label="x2")]
    ys = [exponential_unit(0.1, ONE, 12, label="y1"), exponential_unit(-0.4 - 0.2j, ONE, 12, label="y2")]
    units = [embed_unit_left(g, x) for x in xs] + [embed_unit_right(g, y) for y in ys]
    return cov_kernel(g, units, [HALF, ONE], tol, max_depth=8)


def test_example2_kernel_matches_closed_form(example2_kernel):
    expected = np.array([[np.conj(a) + a2 + np.conj(b) * b2 for a2, b2 in EXAMPLE2_UNITS] for a, b in EXAMPLE2_UNITS])
    assert_allclose(example2_kernel.gamma, expected, atol=1e-6)
    assert_allclose(example2_kernel.gamma, example2_kernel.gamma.conj().T, atol=1e-15)
    assert example2_kernel.labels == ["u0", "u1", "u2"]
    assert example2_kernel.accuracy < 1e-6


def test_example2_index_is_one(example2_kernel, tol):
    assert index_estimate(example2_kernel, tol) == 1
    assert index_estimate(example2_kernel, tol, ref="u2") == 1
    spectrum = centered_spectrum(example2_kernel, "u0")
    assert spectrum[0] == pytest.approx(0.01 + 0.04, abs=1e-6)


def test_canonical_gauge_reproduces_centering(example2_kernel, tol):
    gauge = canonical_gauge(example2_kernel, "u1")
    assert_allclose(gauge_centered(example2_kernel, gauge, tol), centered(example2_kernel, "u1"), atol=1e-12)


def test_bad_gauge_is_rejected(tol):
    kernel = CovKernel(labels=["a", "b"], gamma=np.zeros((2, 2)))
    with pytest.raises(NotPositiveError):
        gauge_centered(kernel, [1.0, 1.0], tol)
    with pytest.raises(LinalgError):
        gauge_centered(kernel, [1.0], tol)


def test_validate_kernel(tol):
    with pytest.raises(LinalgError):
        validate_kernel(CovKernel(labels=["a", "b"], gamma=np.array([[0.0, 1.0], [0.0, 0.0]])), tol)
    with pytest.raises(NotPositiveError):
        validate_kernel(CovKernel(labels=["a", "b"], gamma=np.diag([0.0, -1.0])), tol)
    with pytest.raises(LinalgError):
        validate_kernel(CovKernel(labels=["a"], gamma=np.zeros((2, 2))), tol)
    kernel = CovKernel(labels=["a", "b"], gamma=np.array([[0.0, 0.0], [0.0, 1.0]]))
    assert validate_kernel(kernel, tol) is kernel


def test_unknown_label():
    kernel = CovKernel(labels=["a"], gamma=np.zeros((1, 1)))
    with pytest.raises(ValueError, match="Unknown unit label"):
        centered(kernel, "b")
    assert index_estimate(CovKernel(labels=[], gamma=np.zeros((0, 0)))) == 0


def test_defect_p(tol):
    assert defect_p(-0.6, -0.4, tol) == pytest.approx(1.0)
    assert defect_p(0.0, 0.0, tol) == 0.0
    with pytest.raises(NotContractiveError):
        defect_p(0.1, 0.0, tol)
    with pytest.raises(ValueError):
        defect_p(1j, 0.0, tol)


def test_predicted_amalgam_index(tol):
    c = 0.25
    assert predicted_amalgam_index(0, 0, 0.0, tol) == 0
    assert predicted_amalgam_index(0, 0, 2 * c, tol) == 1
    assert predicted_amalgam_index(2, 3, 0.5, tol) == 6
    with pytest.raises(ValueError):
        predicted_amalgam_index(0, 0, -1.0, tol)


@pytest.mark.parametrize("lam, mu, expected", [(0.0, 0.0, 0), (0.3, 0.2, 1)])
def test_scalar_powers_index(lam, mu, expected, tol):
    kernel = _amalgam_kernel(lam, mu, tol)
    assert index_estimate(kernel, tol) == expected
    e, f, _, u0, v0 = scalar_amalgam(lam, mu, depth=12, tol=tol)
    p = defect_p(
        covariance(e, u0, u0, [HALF, ONE], tol, max_depth=8),
        covariance(f, v0, v0, [HALF, ONE], tol, max_depth=8),
        tol,
    )
    assert p == pytest.approx(2 * (lam + mu), abs=1e-9)
    assert predicted_amalgam_index(0, 0, p, tol) == expected


def test_scalar_powers_centered_kernel(tol):
    kernel = _amalgam_kernel(0.3, 0.2, tol)
    lmat = centered(kernel, "[x1;0]", tol)
    expected = np.zeros((4, 4))
    expected[2:, 2:] = 2 * (0.3 + 0.2)
    assert_allclose(lmat, expected, atol=1e-9)
