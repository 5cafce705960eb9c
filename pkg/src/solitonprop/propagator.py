"""Closed-form propagators for N-soliton potentials.

Units: ``hbar = 1`` and ``2m = 1``, so ``h = -d^2/dx^2 + V`` and the kernel
solves ``i dK/dt = h K``.  The kernel is

    K(x, y; t) = sum_n phi_n(x) phi_n(y) e^{i a_n^2 t}
                 + int dk phi_k(x) conj(phi_k(y)) e^{-i k^2 t}

and in closed form

    K = K_free + sum_n (1/2) phi_n(x) phi_n(y) e^{i a_n^2 t} [erf(z_n+) + erf(z_n-)]

with ``s = sqrt(i t)`` and ``z_n+- = a_n s -+ (x - y) / (2 s)``.

Time lives in the closed lower half-plane (``Im t <= 0``): real ``t > 0`` is
Schroedinger evolution, ``t = -i tau`` the heat (Wick-rotated) regime.
Principal square roots throughout; on this domain ``sqrt(i t)`` equals
``e^{i pi/4} sqrt(t)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special

from . import complex_special as cs
from .errors import DomainError, ResolutionError, UnsupportedError
from .soliton_core import SolitonParams, bound_amplitude, bound_ratio, darboux_coefficients

__all__ = [
    "TimeParam",
    "KernelSample",
    "QuadratureRule",
    "as_time",
    "free_kernel",
    "erf_pm",
    "discrete_part",
    "continuous_part_darboux",
    "kernel_closed",
    "kernel_split",
    "evolve",
    "l2_norm",
    "gaussian_packet",
    "free_gaussian_packet",
]

SQRT_I = cmath.exp(0.25j * math.pi)


@dataclass(frozen=True)
class TimeParam:
    """Propagation time ``t = t' - t''`` with ``Im t <= 0``.

    Zero and the negative real axis are rejected; the latter would put
    ``sqrt(i t)`` on its branch cut.
    """

    t: complex

    def __post_init__(self):
        t = complex(self.t)
        object.__setattr__(self, "t", t)
        if not (math.isfinite(t.real) and math.isfinite(t.imag)):
            raise DomainError(f"time must be finite, got {t!r}")
        if t == 0:
            raise DomainError("t = 0: the propagator is a delta function there")
        if t.imag > 0:
            raise DomainError(f"Im t must be <= 0, got {t!r}")
        if t.imag == 0 and t.real < 0:
            raise DomainError(f"negative real time {t!r} is not supported")

    @classmethod
    def heat(cls, tau: float) -> "TimeParam":
        """Heat-regime time ``t = -i tau``."""
        return cls(complex(0.0, -float(tau)))

    @property
    def sqrt_it(self) -> complex:
        return cmath.sqrt(1j * self.t)

    @property
    def is_heat(self) -> bool:
        return self.t.real == 0.0

    @property
    def is_real(self) -> bool:
        return self.t.imag == 0.0


def as_time(t) -> TimeParam:
    return t if isinstance(t, TimeParam) else TimeParam(t)


@dataclass(frozen=True)
class KernelSample:
    """A propagator value tagged with the route that produced it."""

    x: float
    y: float
    t: TimeParam
    value: complex
    path: Literal["closed-form", "spectral-oracle", "darboux-construction"] = "closed-form"

    def __post_init__(self):
        if not cmath.isfinite(self.value):
            raise ValueError(f"non-finite kernel value at x={self.x}, y={self.y}, t={self.t.t}")


def _out(v):
    return complex(v) if np.ndim(v) == 0 else v


def free_kernel(x, y, t):
    """Free-particle propagator ``(4 pi i t)^{-1/2} exp(i (x-y)^2 / (4t))``."""
    tp = as_time(t)
    r = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    val = np.exp(1j * r * r / (4.0 * tp.t)) / np.sqrt(4.0 * math.pi * 1j * tp.t)
    return _out(val)


def _z_pm(a, r, tp: TimeParam):
    s = tp.sqrt_it
    half = r / (2.0 * s)
    return a * s - half, a * s + half


def erf_pm(a, x, y, t):
    """``(erf(z+), erf(z-))`` for ``z+- = a sqrt(it) -+ (x-y)/(2 sqrt(it))``.

    This is the pair ``erf[a sqrt(it) +- i sqrt(i) (x-y) / (2 sqrt(t))]``
    written without the separate ``sqrt(t)`` branch.
    """
    tp = as_time(t)
    r = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    zp, zm = _z_pm(float(a), r, tp)
    return _out(cs.erf_complex(zp)), _out(cs.erf_complex(zm))


def _scaled_erf_sum(a, r, tp: TimeParam, log_weight, sign):
    """``sign * exp(log_weight) * e^{i a^2 t} [erf(z+) + erf(z-)]`` evaluated stably.

    Each ``erf(z)`` is split as ``+-1 -+ e^{-u^2} erfcx(u)`` with ``u = +-z``
    chosen so that ``Re u >= 0``.  The exponents then combine analytically:
    ``i a^2 t - z+-^2 = +-a (x-y) + i (x-y)^2/(4t)``.  The weight (the
    Wronskian ratio, which decays like the exponential that grows) is folded
    into the same exponent before anything is exponentiated.
    """
    zp, zm = _z_pm(a, r, tp)
    gauss = 1j * r * r / (4.0 * tp.t)
    const = np.zeros(np.shape(zp))
    total = np.zeros(np.shape(zp), dtype=complex)
    for z, shift in ((zp, a * r), (zm, -a * r)):
        flip = np.where(z.real >= 0, 1.0, -1.0)
        const = const + flip
        with np.errstate(over="ignore", under="ignore", invalid="ignore"):
            total = total - flip * np.exp(log_weight + shift + gauss) * special.erfcx(flip * z)
    with np.errstate(under="ignore"):
        total = total + const * np.exp(log_weight + 1j * a * a * tp.t)
    return sign * total


def _mode_weights(params: SolitonParams, x, y):
    """Per mode: log and sign of ``A_n W^{(n)}(x) W^{(n)}(y) / (W(x) W(y))``, i.e. of ``phi_n(x) phi_n(y)``."""
    out = []
    for n in range(1, params.N + 1):
        qx = bound_ratio(params, n, x)
        qy = bound_ratio(params, n, y)
        # group the x and y parts first so the sum is exactly symmetric under x <-> y
        logw = math.log(bound_amplitude(params, n)) + (qx.log() + qy.log())
        out.append((logw, qx.sign * qy.sign))
    return out


def discrete_part(params: SolitonParams, x, y, t):
    """Bound-state contribution ``sum_n phi_n(x) phi_n(y) e^{i a_n^2 t}``."""
    tp = as_time(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    total = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for a, (logw, sgn) in zip(params.a, _mode_weights(params, x, y)):
        with np.errstate(under="ignore"):
            total = total + sgn * np.exp(logw + 1j * a * a * tp.t)
    return _out(total)


def soliton_part(params: SolitonParams, x, y, t):
    """``kernel_closed - free_kernel``: the soliton perturbation of the free propagator."""
    tp = as_time(t)
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    r = x - y
    total = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for a, (logw, sgn) in zip(params.a, _mode_weights(params, x, y)):
        total = total + 0.5 * _scaled_erf_sum(float(a), r, tp, logw, sgn)
    return _out(total)


def kernel_closed(params: SolitonParams, x, y, t):
    """Closed-form N-soliton propagator ``K_N(x, y; t)``; any ``N >= 0``, vectorized over ``x``, ``y``."""
    tp = as_time(t)
    val = free_kernel(x, y, tp)
    if params.N:
        val = val + soliton_part(params, x, y, tp)
    return _out(val)


def kernel_split(params: SolitonParams, x, y, t):
    """``(K_d, K - K_d)``: bound-state part and continuum part of the closed form."""
    tp = as_time(t)
    kd = discrete_part(params, x, y, tp)
    k = kernel_closed(params, x, y, tp)
    return kd, _out(np.asarray(k) - np.asarray(kd))


# --- continuum part from the Crum operator acting on a single integral ---------

_CONTOUR_POINTS = 64
_MAX_DARBOUX_ORDER = 4


def _continuum_integral(params: SolitonParams, tp: TimeParam, r):
    r"""``(1/2pi) \int dk e^{-ikr - ik^2 t} / prod_j (k^2 + a_j^2)`` through ``integral_I``."""
    h = cmath.sqrt(1j * tp.t / 2.0)
    xscale = cmath.sqrt(1j / (8.0 * tp.t))
    alpha = params.factorization_constants
    total = 0.0
    for n, a in enumerate(params.a):
        w = 1.0 / np.prod(np.delete(alpha[n] - alpha, n))
        total = total + w * cs.integral_I(a * h, xscale * r)
    return h * total / (2.0 * math.pi)


def continuous_part_darboux(params: SolitonParams, x: float, y: float, t) -> complex:
    """Continuum part of the kernel as ``L_x L_y`` acting on one Gaussian-Lorentzian integral.

    The integral ``J`` depends on ``x - y`` only, so ``L_x L_y J`` reduces to
    ``sum_{m,l} c_m(x) c_l(y) (-1)^l J^{(m+l)}(x - y)``.  The derivatives are
    taken by the trapezoidal rule on a circle around ``x - y`` (Cauchy's
    formula), which is a spectrally accurate central-difference stencil for
    the entire function ``J``.  Verification path only, ``N <= 4``.
    """
    tp = as_time(t)
    N = params.N
    if N > _MAX_DARBOUX_ORDER:
        raise UnsupportedError(f"continuous_part_darboux supports N <= {_MAX_DARBOUX_ORDER}, got N = {N}")
    if N == 0:
        return complex(free_kernel(x, y, tp))
    r = float(x) - float(y)
    rho = 0.5 * math.sqrt(abs(tp.t))
    omega = np.exp(2j * math.pi * np.arange(_CONTOUR_POINTS) / _CONTOUR_POINTS)
    samples = _continuum_integral(params, tp, r + rho * omega)
    cx = darboux_coefficients(params, float(x))
    cy = darboux_coefficients(params, float(y))
    derivs = [math.factorial(m) / rho**m * np.mean(samples * omega ** (-m)) for m in range(2 * N + 1)]
    total = 0.0
    for m in range(N + 1):
        for l in range(N + 1):
            total += cx[m] * cy[l] * (-1) ** l * derivs[m + l]
    return complex(total)


# --- Cauchy problem ---------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """How ``int K(x, y; t) psi0(y) dy`` is discretized.

    ``gauss-legendre``: composite panels of ``order`` nodes and width ``panel``
    (default ``sqrt|t|/2``) across the grid, with ``psi0`` carried to the nodes
    by band-limited (Fourier) interpolation of the samples.  ``trapezoid``:
    the uniform grid itself, which is spectrally accurate for integrands that
    vanish at the ends.
    """

    kind: Literal["gauss-legendre", "trapezoid"] = "gauss-legendre"
    order: int = 16
    panel: float | None = None

    def __post_init__(self):
        if self.kind not in ("gauss-legendre", "trapezoid"):
            raise ValueError(f"unknown quadrature kind {self.kind!r}")
        if self.order < 1:
            raise ValueError("quadrature order must be >= 1")


EDGE_TOLERANCE = 1e-12
_ROW_CHUNK = 128


def _uniform_spacing(x):
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise ResolutionError("grid must be one-dimensional with at least 3 points")
    dx = (x[-1] - x[0]) / (x.size - 1)
    if dx <= 0 or not np.allclose(np.diff(x), dx, rtol=1e-9, atol=0):
        raise ResolutionError("grid must be uniform and increasing")
    return dx


def fourier_interpolate(x, samples, nodes):
    """Trigonometric interpolant of uniform ``samples`` on ``x`` evaluated at ``nodes``."""
    m = len(x)
    dx = (x[-1] - x[0]) / (m - 1)
    coef = np.fft.fft(samples) / m
    k = 2.0 * math.pi * np.fft.fftfreq(m, d=dx)
    if m % 2 == 0:
        # split the Nyquist term symmetrically so the interpolant stays real-analytic
        nyq = m // 2
        coef = np.append(coef, coef[nyq] / 2.0)
        coef[nyq] /= 2.0
        k = np.append(k, -k[nyq])
    phase = np.exp(1j * np.outer(np.asarray(nodes) - x[0], k))
    return phase @ coef


def _panel_nodes(lo, hi, order, width):
    npanel = max(1, math.ceil((hi - lo) / width))
    g, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(lo, hi, npanel + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * g[None, :]).reshape(-1)
    weights = (half[:, None] * w[None, :]).reshape(-1)
    return nodes, weights


def evolve(params: SolitonParams, x, psi0, t, quadrature: QuadratureRule | None = None):
    """Propagate samples ``psi0`` on the uniform grid ``x`` to time ``t`` with the exact kernel.

    Preconditions are enforced: ``|psi0|`` at both grid ends must be below
    ``1e-12`` of its peak, and the spacing must not exceed ``sqrt|t|/8``.
    """
    tp = as_time(t)
    rule = quadrature or QuadratureRule()
    x = np.asarray(x, dtype=float)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != x.shape:
        raise ValueError("psi0 must be sampled on the grid x")
    dx = _uniform_spacing(x)
    need = math.sqrt(abs(tp.t)) / 8.0
    if dx > need:
        raise ResolutionError(f"grid spacing {dx:.6g} too coarse for t = {tp.t}: need <= {need:.6g}")
    peak = np.max(np.abs(psi0))
    if peak == 0:
        return np.zeros_like(psi0)
    if max(abs(psi0[0]), abs(psi0[-1])) > EDGE_TOLERANCE * peak:
        raise ResolutionError(f"psi0 does not decay below {EDGE_TOLERANCE:g} of its peak at the grid edges")

    if rule.kind == "trapezoid":
        nodes, weights, values = x, np.full(x.size, dx), psi0
    else:
        width = rule.panel or 0.5 * math.sqrt(abs(tp.t))
        nodes, weights = _panel_nodes(x[0], x[-1], rule.order, width)
        values = fourier_interpolate(x, psi0, nodes)
    keep = np.abs(values) > 1e-17 * peak
    nodes, wv = nodes[keep], (weights * values)[keep]
    out = np.empty(x.size, dtype=complex)
    for i in range(0, x.size, _ROW_CHUNK):
        rows = x[i : i + _ROW_CHUNK, None]
        out[i : i + _ROW_CHUNK] = kernel_closed(params, rows, nodes[None, :], tp) @ wv
    return out


def l2_norm(x, psi) -> float:
    """Discrete L2 norm on a uniform grid."""
    x = np.asarray(x, dtype=float)
    dx = (x[-1] - x[0]) / (x.size - 1)
    return float(np.sqrt(np.sum(np.abs(psi) ** 2) * dx))


def gaussian_packet(x, center: float, width: float, momentum: float):
    """Normalized ``(2 pi w^2)^{-1/4} exp(-(x-c)^2/(4 w^2) + i k x)``."""
    x = np.asarray(x, dtype=float)
    return (2.0 * math.pi * width**2) ** -0.25 * np.exp(-((x - center) ** 2) / (4.0 * width**2) + 1j * momentum * x)


def free_gaussian_packet(x, t: float, center: float, width: float, momentum: float):
    """Exact free evolution of :func:`gaussian_packet` under ``i psi_t = -psi_xx``."""
    x = np.asarray(x, dtype=float)
    spread = 1.0 + 1j * t / width**2
    arg = -((x - center - 2.0 * momentum * t) ** 2) / (4.0 * width**2 * spread)
    return (2.0 * math.pi * width**2) ** -0.25 / np.sqrt(spread) * np.exp(arg + 1j * momentum * x - 1j * momentum**2 * t)
