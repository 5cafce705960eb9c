import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from oracles import erf_oracle, erfc_scaled_series, faddeeva_series
from solitonprop.complex_special import (
    cauchy_gaussian,
    erf_complex,
    erfc_complex,
    erfc_scaled,
    faddeeva_w,
    integral_I,
)
from solitonprop.errors import DomainError, RangeError

coord = st.floats(-5, 5, allow_nan=False)


def quad_I(a, x):
    f = lambda p: math.exp(-2 * p * p + 4 * p * x) / (p * p + a * a)  # noqa: E731
    half = 12 + 4 * abs(x)
    val, _ = integrate.quad(f, -half, half, points=[x], limit=400, epsabs=0, epsrel=1e-13)
    return val


def quad_cauchy(alpha, x):
    def part(fn):
        # the odd part vanishes identically at x = 0 and quad reports roundoff on it
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            return integrate.quad(fn, -12 - 4 * abs(x), 12 + 4 * abs(x), points=[x, 0.0], limit=400, epsabs=0, epsrel=1e-12)[0]

    # 1/(p + i alpha) = (p - i alpha)/(p^2 + alpha^2)
    g = lambda p: math.exp(-2 * p * p + 4 * p * x) / (p * p + alpha * alpha)  # noqa: E731
    return complex(part(lambda p: p * g(p)), -alpha * part(g))


def test_faddeeva_origin():
    assert faddeeva_w(0) == 1 + 0j


def test_faddeeva_imaginary_axis():
    # the same number by the real-argument continued-fraction route in scipy
    ref = math.exp(1.0) * math.erfc(1.0)
    assert faddeeva_w(1j) == pytest.approx(ref, rel=1e-14)
    assert faddeeva_w(1j) == pytest.approx(faddeeva_series(1j), rel=1e-14)
    assert abs(faddeeva_w(1j) - 0.42758) < 1e-5


def test_faddeeva_asymptotic():
    z = 20 * np.exp(1j * math.pi / 3)
    # two terms of the asymptotic series; the one-term form is off by 1/(2 z^2) ~ 1.25e-3
    approx = 1j / (math.sqrt(math.pi) * z) * (1 + 1 / (2 * z * z))
    assert abs(faddeeva_w(z) - approx) / abs(approx) < 1e-3


def test_faddeeva_lower_half_plane_reflection():
    z = 1.3 - 0.7j
    assert faddeeva_w(z) == pytest.approx(2 * np.exp(-z * z) - faddeeva_w(-z), rel=1e-13)


def test_faddeeva_overflow_is_declared():
    with pytest.raises(RangeError, match="z ="):
        faddeeva_w(-40j)


def test_erf_values():
    assert erf_complex(0) == 0
    assert erf_complex(1.0).real == pytest.approx(0.8427007929497149, rel=1e-14)
    assert erf_complex(1.0) == pytest.approx(erf_oracle(1.0), rel=1e-14)


def test_erf_small_arguments_keep_relative_accuracy():
    for z in (1e-10, 1e-6 + 2e-6j, 0.3j, 0.49 - 0.01j):
        assert abs(erf_complex(z) - erf_oracle(z)) <= 1e-14 * abs(erf_oracle(z))


def test_erfc_scaled_values():
    assert erfc_scaled(0) == 1
    assert erfc_scaled(2.0).real == pytest.approx(math.exp(4) * math.erfc(2.0), rel=1e-14)
    assert abs(erfc_scaled(2.0) - 0.25540) < 1e-5
    for x in (0.5, 1.0, 3.0):
        assert (erfc_scaled(x) * math.exp(-x * x)).real == pytest.approx(math.erfc(x), rel=1e-13)


def test_erfc_scaled_no_overflow_right_half_plane():
    for z in (1e8, 1e8 + 1e8j, 3e7j + 1e-3):
        assert np.isfinite(erfc_scaled(z))


def test_erfc_scaled_overflow_left_half_plane():
    with pytest.raises(RangeError):
        erfc_scaled(-30.0)


def test_erfc_complex_consistency():
    for z in (0.2 + 0.1j, -1.5 + 0.5j, 2.5 - 1j):
        assert erfc_complex(z) == pytest.approx(1 - erf_oracle(z), rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(coord, coord)
def test_erf_odd(re, im):
    z = complex(re, im)
    assert erf_complex(-z) == pytest.approx(-erf_complex(z), rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(coord, coord)
def test_erf_conjugation(re, im):
    z = complex(re, im)
    assert erf_complex(z.conjugate()) == pytest.approx(erf_complex(z).conjugate(), rel=1e-12, abs=1e-300)


@settings(max_examples=100, deadline=None)
@given(coord, st.floats(0, 5))
def test_faddeeva_conjugation(re, im):
    z = complex(re, im)
    assert faddeeva_w(-z.conjugate()) == pytest.approx(faddeeva_w(z).conjugate(), rel=1e-13)


@settings(max_examples=100, deadline=None)
@given(coord, st.floats(-3, 3))
def test_defining_identity(re, im):
    z = complex(re, im)
    lhs = erfc_scaled(z) * np.exp(-z * z) if re >= 0 else 2 - erfc_scaled(-z) * np.exp(-z * z)
    assert abs(lhs - (1 - erf_complex(z))) <= 1e-10 * max(1.0, abs(lhs))


def test_vectorized_matches_scalar():
    zs = np.array([0.1 + 0.2j, -2 + 1j, 3 - 0.5j, 0.0])
    np.testing.assert_array_equal(erf_complex(zs), [erf_complex(z) for z in zs])


def test_integral_I_reference_value():
    expected = math.pi * math.e**2 * math.erfc(math.sqrt(2))
    assert integral_I(1.0, 0.0) == pytest.approx(expected, rel=1e-14)
    assert abs(integral_I(1.0, 0.0) - 1.0562) < 1e-4
    assert integral_I(1.0, 0.0) == pytest.approx(quad_I(1.0, 0.0), rel=1e-9)


def test_integral_I_even_in_x():
    assert integral_I(1.3, 0.7) == pytest.approx(integral_I(1.3, -0.7), rel=1e-14)


@pytest.mark.parametrize("a,x", [(1.3, 0.7), (0.2, 1.5), (3.0, -2.0), (0.05, 0.0)])
def test_integral_I_against_quadrature(a, x):
    assert integral_I(a, x) == pytest.approx(quad_I(a, x), rel=1e-9)


def test_integral_I_matches_real_part_form():
    a, x = 1.3, 0.7
    re_form = math.pi / a * math.exp(2 * a * a) * (np.exp(4j * x * a) * special.erfc(math.sqrt(2) * (a + 1j * x))).real
    assert integral_I(a, x) == pytest.approx(re_form, rel=1e-12)


def test_integral_I_pole():
    with pytest.raises(DomainError):
        integral_I(0.0, 1.0)


def test_cauchy_gaussian_reference_value():
    val = cauchy_gaussian(1.0, 0.0)
    assert val == pytest.approx(-1j * math.pi * math.e**2 * math.erfc(math.sqrt(2)), rel=1e-14)
    assert val == pytest.approx(quad_cauchy(1.0, 0.0), rel=1e-9)


@pytest.mark.parametrize("alpha,x", [(2.0, 1.0), (0.8, 0.3), (-0.8, 0.3), (-1.5, -1.0)])
def test_cauchy_gaussian_against_quadrature(alpha, x):
    assert cauchy_gaussian(alpha, x) == pytest.approx(quad_cauchy(alpha, x), rel=1e-9)


def test_partial_fractions_recover_integral_I():
    alpha, x = 0.8, 0.3
    combo = (cauchy_gaussian(-alpha, x) - cauchy_gaussian(alpha, x)) / (2j * alpha)
    assert combo == pytest.approx(integral_I(alpha, x), rel=1e-13)


def test_cauchy_gaussian_pole_on_contour():
    with pytest.raises(DomainError):
        cauchy_gaussian(1j, 0.0)


def test_series_oracle_against_erfc_scaled():
    for z in (0.1, 4.0 + 1j, 2j, 6.0 - 2.0j):
        assert erfc_scaled(z) == pytest.approx(erfc_scaled_series(z), rel=1e-12)
