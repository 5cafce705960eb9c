import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from oracles import one_soliton_direct, two_soliton_direct
from solitonprop.complex_special import erf_complex
from solitonprop.errors import DomainError, ResolutionError, UnsupportedError
from solitonprop.propagator import (
    KernelSample,
    QuadratureRule,
    TimeParam,
    continuous_part_darboux,
    discrete_part,
    erf_pm,
    evolve,
    free_gaussian_packet,
    free_kernel,
    gaussian_packet,
    kernel_closed,
    kernel_split,
    l2_norm,
    soliton_part,
)
from solitonprop.soliton_core import SolitonParams, bound_state
from solitonprop.verify import reference_evolver, spectral_kernel_oracle

# --- time parameter ---------------------------------------------------------------


@pytest.mark.parametrize("t", [0, 0.5j, 1 + 1e-3j, -1.0, float("nan")])
def test_time_param_rejects(t):
    with pytest.raises(DomainError):
        TimeParam(t)


def test_time_param_branches():
    assert TimeParam(0.5).sqrt_it == pytest.approx(np.exp(1j * math.pi / 4) * math.sqrt(0.5), rel=1e-15)
    assert TimeParam.heat(0.3).t == -0.3j
    assert TimeParam.heat(0.3).sqrt_it == pytest.approx(math.sqrt(0.3), rel=1e-15)
    assert TimeParam.heat(0.3).is_heat and TimeParam(2.0).is_real
    tp = TimeParam(1.5 - 0.5j)
    assert tp.sqrt_it == pytest.approx(np.exp(1j * math.pi / 4) * np.sqrt(1.5 - 0.5j), rel=1e-15)


def test_kernel_sample_must_be_finite():
    with pytest.raises(ValueError):
        KernelSample(0.0, 0.0, TimeParam(1.0), complex("nan"))


# --- free kernel ------------------------------------------------------------------------


def test_free_kernel_diagonal():
    for t in (0.5, 2.0, -0.7j, 1 - 1j):
        assert free_kernel(0.3, 0.3, t) == pytest.approx(1 / np.sqrt(4j * math.pi * t), rel=1e-15)


def test_free_kernel_heat_value():
    val = free_kernel(1.0, 0.0, -0.5j)
    assert val == pytest.approx(math.exp(-0.5) / math.sqrt(2 * math.pi), rel=1e-14)
    assert abs(val - 0.2420) < 1e-4


def test_free_kernel_normalized():
    tau, x = 0.3, 0.2
    half = 12 * math.sqrt(tau)
    val, _ = integrate.quad(lambda y: free_kernel(x, y, -1j * tau).real, x - half, x + half, epsrel=1e-13)
    assert val == pytest.approx(1.0, abs=1e-12)


def test_free_kernel_rejects_zero_time():
    with pytest.raises(DomainError):
        free_kernel(0.0, 1.0, 0)


# --- erf pair ---------------------------------------------------------------------------------


def test_erf_pm_diagonal():
    p, m = erf_pm(1.3, 0.4, 0.4, 0.5)
    assert p == m == erf_complex(1.3 * np.sqrt(0.5j))


def test_erf_pm_swap():
    p, m = erf_pm(1.0, 0.9, -0.3, 0.7)
    q, n = erf_pm(1.0, -0.3, 0.9, 0.7)
    assert (p, m) == (n, q)


def test_erf_pm_explicit_argument():
    a, r, t = 1.0, 0.5, 0.5
    p, m = erf_pm(a, r, 0.0, t)
    shift = 1j * np.sqrt(1j) * r / (2 * math.sqrt(t))
    assert p == pytest.approx(erf_complex(a * np.sqrt(1j * t) + shift), rel=1e-10)
    assert m == pytest.approx(erf_complex(a * np.sqrt(1j * t) - shift), rel=1e-10)


# --- discrete part ---------------------------------------------------------------------------------


def test_discrete_part_one_soliton(one_soliton):
    x, y, t = 0.4, -1.1, 0.8
    ref = 0.5 / (math.cosh(x) * math.cosh(y)) * np.exp(1j * t)
    assert discrete_part(one_soliton, x, y, t) == pytest.approx(ref, rel=1e-14)


def test_discrete_part_equals_bound_state_sum(three_soliton):
    x, y = 0.3, -0.9
    ref = sum(bound_state(three_soliton, n, x) * bound_state(three_soliton, n, y) * np.exp(1j * a * a * 1.2)
              for n, a in zip((1, 2, 3), three_soliton.a))
    assert discrete_part(three_soliton, x, y, 1.2) == pytest.approx(ref, rel=1e-12)


def test_discrete_part_symmetric(four_soliton):
    assert discrete_part(four_soliton, 0.7, -2.3, 0.4) == discrete_part(four_soliton, -2.3, 0.7, 0.4)


# --- closed form ------------------------------------------------------------------------------------------


def test_one_soliton_explicit_form(one_soliton):
    x, y, t = 0.3, -0.2, 0.5
    assert kernel_closed(one_soliton, x, y, t) == pytest.approx(one_soliton_direct(1.0, x, y, t), rel=1e-12)


def test_two_soliton_explicit_form(two_soliton):
    rng = np.random.default_rng(7)
    for x, y, t in zip(rng.uniform(-5, 5, 30), rng.uniform(-5, 5, 30), rng.uniform(0.1, 2, 30)):
        assert kernel_closed(two_soliton, x, y, t) == pytest.approx(two_soliton_direct(1.0, 2.0, x, y, t), rel=1e-12)


def test_zero_solitons_is_free():
    p = SolitonParams()
    for x, y, t in [(0.1, 0.5, 0.3), (2.0, -1.0, -0.2j)]:
        assert kernel_closed(p, x, y, t) == free_kernel(x, y, t)


def test_vectorized_kernel(two_soliton):
    xs = np.linspace(-2, 2, 5)
    grid = kernel_closed(two_soliton, xs[:, None], xs[None, :], 0.6)
    assert grid.shape == (5, 5)
    assert grid[1, 3] == kernel_closed(two_soliton, xs[1], xs[3], 0.6)


@settings(max_examples=60, deadline=None)
@given(st.floats(-6, 6), st.floats(-6, 6), st.floats(0.05, 3), st.floats(0, 2))
def test_symmetry(x, y, tre, tim):
    p = SolitonParams.from_wavenumbers([0.5, 1.0, 1.5, 2.0])
    t = complex(tre, -tim)
    kxy = kernel_closed(p, x, y, t)
    assert abs(kxy - kernel_closed(p, y, x, t)) <= 1e-14 * abs(kxy)


def test_far_field_finite(three_soliton):
    # naive erf would overflow here; products of huge and tiny factors are combined in the exponent
    for x, y in [(60.0, -55.0), (300.0, 299.0), (-400.0, 400.0)]:
        assert np.isfinite(kernel_closed(three_soliton, x, y, 0.3))
        assert np.isfinite(kernel_closed(three_soliton, x, y, -0.3j))


def test_wick_rotation_real_positive(four_soliton):
    xs = np.linspace(-5, 5, 31)
    k = kernel_closed(four_soliton, xs[:, None], xs[None, :], -0.5j)
    assert np.all(k.real > 0)
    assert np.max(np.abs(k.imag) / k.real) < 1e-10


def test_small_time_decay(two_soliton):
    mags = [abs(soliton_part(two_soliton, 0.4, -0.3, t)) for t in (1e-1, 1e-2, 1e-3, 1e-4)]
    assert all(b < a for a, b in zip(mags, mags[1:]))


def test_heat_regime_long_time_ground_state(one_soliton):
    # K(x, y; -i tau) e^{-a^2 tau} -> phi(x) phi(y)
    tau = 60.0
    k = kernel_closed(one_soliton, 0.5, -0.4, -1j * tau) * math.exp(-tau)
    assert k.real == pytest.approx(0.5 / (math.cosh(0.5) * math.cosh(0.4)), rel=1e-3)


# --- split and continuum ------------------------------------------------------------------------------------


def test_split_sums_to_kernel(three_soliton):
    kd, kc = kernel_split(three_soliton, 0.2, 1.4, 0.9)
    assert kd == discrete_part(three_soliton, 0.2, 1.4, 0.9)
    assert kd + kc == pytest.approx(kernel_closed(three_soliton, 0.2, 1.4, 0.9), rel=1e-15)


def test_split_continuum_vs_oracle(one_soliton):
    t = TimeParam.heat(0.4)
    _, info = spectral_kernel_oracle(one_soliton, 0.3, -0.2, t, return_info=True)
    _, kc = kernel_split(one_soliton, 0.3, -0.2, t)
    assert kc == pytest.approx(info.continuum, rel=1e-6)


def test_darboux_continuum_empty_chain():
    assert continuous_part_darboux(SolitonParams(), 0.3, -0.1, -0.4j) == free_kernel(0.3, -0.1, -0.4j)


def test_darboux_continuum_one_soliton(one_soliton):
    x, y, t = 0.3, -0.2, -0.4j
    ref = kernel_closed(one_soliton, x, y, t) - discrete_part(one_soliton, x, y, t)
    assert continuous_part_darboux(one_soliton, x, y, t) == pytest.approx(ref, rel=1e-6)


def test_darboux_continuum_two_soliton_vs_oracle(two_soliton):
    t = TimeParam.heat(0.3)
    _, info = spectral_kernel_oracle(two_soliton, 0.5, 0.1, t, return_info=True)
    assert continuous_part_darboux(two_soliton, 0.5, 0.1, t) == pytest.approx(info.continuum, rel=1e-5)


def test_darboux_continuum_real_time(two_soliton):
    x, y, t = 0.5, -0.6, 0.8
    ref = kernel_closed(two_soliton, x, y, t) - discrete_part(two_soliton, x, y, t)
    assert continuous_part_darboux(two_soliton, x, y, t) == pytest.approx(ref, rel=1e-6)


def test_darboux_continuum_order_limit():
    p = SolitonParams.from_wavenumbers([0.5, 1, 1.5, 2, 2.5])
    with pytest.raises(UnsupportedError):
        continuous_part_darboux(p, 0.0, 0.0, -0.4j)


# --- evolution ------------------------------------------------------------------------------------------------

GRID = np.linspace(-20, 20, 801)


def test_evolve_free_packet():
    psi0 = gaussian_packet(GRID, -3.0, 1.0, 2.0)
    psi = evolve(SolitonParams(), GRID, psi0, 0.5)
    exact = free_gaussian_packet(GRID, 0.5, -3.0, 1.0, 2.0)
    assert l2_norm(GRID, psi - exact) < 1e-6


def test_evolve_trapezoid_rule():
    psi0 = gaussian_packet(GRID, 0.0, 1.0, 1.0)
    psi = evolve(SolitonParams(), GRID, psi0, 0.5, QuadratureRule("trapezoid"))
    assert l2_norm(GRID, psi - free_gaussian_packet(GRID, 0.5, 0.0, 1.0, 1.0)) < 1e-6


def test_evolve_one_soliton_vs_split_step(one_soliton):
    psi0 = gaussian_packet(GRID, -3.0, 1.0, 2.0)
    psi = evolve(one_soliton, GRID, psi0, 0.5)
    ref = reference_evolver(one_soliton, GRID, psi0, 0.5, 2000)
    assert l2_norm(GRID, psi - ref) < 1e-3


def test_evolve_keeps_norm(two_soliton):
    psi0 = gaussian_packet(GRID, -2.0, 1.0, 1.5)
    psi = evolve(two_soliton, GRID, psi0, 0.7)
    assert l2_norm(GRID, psi) == pytest.approx(l2_norm(GRID, psi0), abs=1e-6)


def test_evolve_bound_state_stationary(one_soliton):
    # sech decays like e^{-|x|}: widen the grid so the edges are below 1e-12
    x = np.linspace(-32, 32, 1281)
    psi0 = bound_state(one_soliton, 1, x).astype(complex)
    psi = evolve(one_soliton, x, psi0, 0.5)
    assert l2_norm(x, psi - np.exp(0.5j) * psi0) < 1e-6


def test_evolve_resolution_errors(one_soliton):
    coarse = np.linspace(-20, 20, 101)
    with pytest.raises(ResolutionError, match="need <="):
        evolve(one_soliton, coarse, gaussian_packet(coarse, 0, 1, 0), 0.5)
    short = np.linspace(-4, 4, 201)
    with pytest.raises(ResolutionError):
        evolve(one_soliton, short, gaussian_packet(short, 0, 1, 0), 0.5)
    with pytest.raises(ResolutionError):
        evolve(one_soliton, GRID[::-1], gaussian_packet(GRID, 0, 1, 0), 0.5)


def test_quadrature_rule_validation():
    with pytest.raises(ValueError):
        QuadratureRule("simpson")
    with pytest.raises(ValueError):
        QuadratureRule(order=0)
