import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

from mehler.errors import DomainError, QuadratureNonConvergent
from mehler.quadrature import integrate, integrate_2d, oracle_radius, peak_breaks


def test_polynomial_and_exponential():
    assert integrate(lambda x: x**2, 0.0, 3.0).value == pytest.approx(9.0, rel=1e-12)
    assert integrate(np.exp, -1.0, 2.0).value == pytest.approx(math.e**2 - math.exp(-1), rel=1e-12)


def test_endpoint_singularity():
    # tanh-sinh tolerates integrable endpoint singularities
    assert integrate(lambda x: 1 / np.sqrt(x), 0.0, 1.0, rtol=1e-9).value == pytest.approx(2.0, rel=1e-8)


@given(c=st.floats(-3, 3), s=st.floats(0.01, 2.0))
def test_gaussian_against_scipy(c, s):
    R = 8 * max(s, 1.0) + abs(c)

    def f(x):
        return np.exp(-((x - c) ** 2) / (2 * s * s))

    got = integrate(f, -R, R, peak_breaks(c, s, R)).value
    ref = sp_integrate.quad(lambda x: f(np.array(x)), -R, R, points=[c], limit=200, epsabs=0, epsrel=1e-12)[0]
    assert got == pytest.approx(ref, rel=1e-9)
    assert got == pytest.approx(math.sqrt(2 * math.pi) * s, rel=1e-9)


def test_complex_integrand():
    val = integrate(lambda x: np.exp(1j * x), 0.0, math.pi).value
    assert val == pytest.approx(2j, abs=1e-12)


def test_non_convergence():
    with pytest.raises(QuadratureNonConvergent):
        integrate(lambda x: np.sin(400 * x) * np.exp(x), 0.0, 10.0, max_level=4)


def test_empty_interval():
    with pytest.raises(DomainError):
        integrate(np.exp, 1.0, 1.0)


def test_two_dimensional():
    val = integrate_2d(lambda X, Y: np.exp(-(X**2) - 2 * Y**2), ((-8, 8), (-8, 8)), ([0.0], [0.0])).value
    assert val == pytest.approx(math.pi / math.sqrt(2), rel=1e-9)


def test_oracle_radius():
    assert oracle_radius(np.eye(2), 0.1) == 8.0
    assert oracle_radius(np.diag([1.0, 4.0]), 2.0) == pytest.approx(8 * 4.0)


def test_peak_breaks_clipped():
    pts = peak_breaks(0.0, 1.0, 5.0)
    assert all(abs(p) < 5.0 for p in pts) and 4.0 in pts and -4.0 in pts
