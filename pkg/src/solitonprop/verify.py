"""Independent oracles for the closed-form propagator.

None of these touch the error-function machinery of the closed form:

* :func:`spectral_kernel_oracle` sums bound states and integrates the
  scattering states over ``k`` numerically (heat-shifted times only, where the
  integrand decays).
* :func:`pde_residual` substitutes any kernel into ``i K_t = -K_xx + V K``
  with Richardson-extrapolated five-point stencils.
* :func:`reference_evolver` integrates the time-dependent equation by
  Strang split-step Fourier.

:func:`run_suite` strings every check together into :class:`OracleReport`
records; failures are reported, never raised.
"""

from __future__ import annotations

import json
import math
import warnings
from collections.abc import Callable, Mapping, Sequence
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import integrate

from .errors import DomainError, ResolutionError, SolitonError
from .propagator import (
    TimeParam,
    as_time,
    continuous_part_darboux,
    discrete_part,
    free_kernel,
    kernel_closed,
    soliton_part,
)
from .soliton_core import (
    SolitonParams,
    bound_state,
    continuum_state,
    darboux_coefficients,
    potential,
    wronskian,
)

__all__ = [
    "OracleReport",
    "spectral_kernel_oracle",
    "SpectralOracleInfo",
    "pde_residual",
    "reference_evolver",
    "corrupted_kernel",
    "run_suite",
    "reports_to_jsonl",
]

Kernel = Callable[[object, object, object], object]


def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


@dataclass
class OracleReport:
    """One comparison of a computed quantity against its oracle.

    ``passed`` is ``error <= tolerance`` where ``error`` is the relative or
    absolute error according to ``metric``.
    """

    quantity: str
    closed_form: float | complex | None
    oracle: float | complex | None
    abs_error: float
    rel_error: float
    tolerance: float
    metric: str = "rel"
    passed: bool = field(init=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        err = self.rel_error if self.metric == "rel" else self.abs_error
        self.passed = bool(err <= self.tolerance)

    @classmethod
    def compare(cls, quantity, value, reference, tolerance, metric="rel", **meta):
        value = complex(value) if np.iscomplexobj(value) else float(value)
        reference = complex(reference) if np.iscomplexobj(reference) else float(reference)
        abs_err = float(abs(value - reference))
        rel_err = abs_err / abs(reference) if reference != 0 else (0.0 if abs_err == 0 else math.inf)
        return cls(quantity, value, reference, abs_err, rel_err, tolerance, metric, meta=meta)

    @classmethod
    def bound(cls, quantity, error, tolerance, **meta):
        """Report for a quantity that should vanish: ``error`` is already the residual."""
        error = float(error)
        return cls(quantity, error, 0.0, error, error, tolerance, "abs", meta=meta)

    @classmethod
    def failure(cls, quantity, message):
        return cls(quantity, None, None, math.inf, math.inf, 0.0, "abs", meta={"error": message})

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def reports_to_jsonl(reports: Sequence[OracleReport]) -> str:
    return "".join(r.to_json() + "\n" for r in reports)


# --- spectral oracle -----------------------------------------------------------


@dataclass(frozen=True)
class SpectralOracleInfo:
    k_max: float
    tail_bound: float
    quad_error: float
    continuum: complex
    discrete: complex


def spectral_kernel_oracle(params: SolitonParams, x: float, y: float, t, *, return_info: bool = False):
    """Eigenfunction expansion of the kernel with the ``k`` integral done by adaptive quadrature.

    Requires ``Im t < 0``.  The integral is truncated at
    ``k_max = 10 / sqrt|Im t|``; the neglected tail is bounded using the
    asymptotic size of the scattering states and returned in the info record.
    """
    tp = as_time(t)
    s = -tp.t.imag
    if s <= 0:
        raise DomainError("spectral oracle needs Im t < 0; the real-time k integral does not converge")
    x = float(x)
    y = float(y)
    N = params.N
    a2 = params.a**2
    cx = darboux_coefficients(params, x)
    cy = darboux_coefficients(params, y)
    r = x - y

    def integrand(k):
        px = sum(cx[m] * (-1j * k) ** m for m in range(N + 1))
        py = sum(cy[m] * (1j * k) ** m for m in range(N + 1))
        return np.exp(-1j * k * r - 1j * k * k * tp.t) * px * py / (2.0 * math.pi * np.prod(k * k + a2))

    k_max = 10.0 / math.sqrt(s)
    opts = dict(limit=500, epsabs=1e-15, epsrel=1e-13)
    with warnings.catch_warnings():
        # quad flags roundoff once it reaches the double-precision floor; that is the intent
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re, e_re = integrate.quad(lambda k: integrand(k).real, -k_max, k_max, **opts)
        im, e_im = integrate.quad(lambda k: integrand(k).imag, -k_max, k_max, **opts)
    continuum = complex(re, im)
    # |integrand| <= ratio(k) exp(-s k^2)/(2 pi), ratio decreasing to 1 for k >= k_max
    ratio = np.sum(np.abs(cx) * k_max ** np.arange(N + 1)) * np.sum(np.abs(cy) * k_max ** np.arange(N + 1))
    ratio /= np.prod(k_max**2 + a2) if N else 1.0
    tail = float(ratio * math.erfc(math.sqrt(s) * k_max) / (2.0 * math.sqrt(math.pi * s)))
    discrete = complex(
        sum(bound_state(params, n, x) * bound_state(params, n, y) * np.exp(1j * a2[n - 1] * tp.t) for n in range(1, N + 1))
    )
    value = discrete + continuum
    if return_info:
        return value, SpectralOracleInfo(k_max, tail, math.hypot(e_re, e_im), continuum, discrete)
    return value


# --- PDE residual -----------------------------------------------------------------

X_STEP = 1e-3
T_STEP = 1e-4


def _d2(f, h):
    return (-f(2 * h) + 16 * f(h) - 30 * f(0.0) + 16 * f(-h) - f(-2 * h)) / (12 * h * h)


def _d1(f, h):
    return (-f(2 * h) + 8 * f(h) - 8 * f(-h) + f(-2 * h)) / (12 * h)


def _richardson(stencil, f, h):
    # both stencils are fourth order: combine h and h/2
    return (16 * stencil(f, h / 2) - stencil(f, h)) / 15


def pde_residual(kernel: Kernel, params: SolitonParams, x: float, y: float, t, *, hx: float = X_STEP, ht: float = T_STEP) -> float:
    """``|(i d_t + d_x^2 - V_N(x)) K| / (|K| + 1e-30)`` at one point."""
    tp = as_time(t)
    if abs(tp.t) < 0.05:
        raise DomainError(f"pde_residual needs |t| >= 0.05, got {tp.t}")
    k0 = complex(kernel(x, y, tp))
    kxx = _richardson(_d2, lambda d: complex(kernel(x + d, y, tp)) if d else k0, hx)
    kt = _richardson(_d1, lambda d: complex(kernel(x, y, TimeParam(tp.t + d))), ht)
    res = 1j * kt + kxx - potential(params, x) * k0
    return abs(res) / (abs(k0) + 1e-30)


def corrupted_kernel(params: SolitonParams, scale: float) -> Kernel:
    """Closed form with the soliton term multiplied by ``scale`` (harness sensitivity checks)."""

    def kernel(x, y, t):
        val = free_kernel(x, y, t)
        if params.N:
            val = val + scale * soliton_part(params, x, y, t)
        return val

    return kernel


# --- reference time integrator -------------------------------------------------------

MAX_STEP_PHASE = math.pi
REFERENCE_EDGE_TOLERANCE = 1e-10


def reference_evolver(params: SolitonParams, x, psi0, t_final: float, steps: int):
    """Strang split-step Fourier solution of ``i psi_t = -psi_xx + V_N psi`` (periodic grid).

    The step must keep the per-step phase ``dt (k_max^2 + max|V|)`` at or
    below pi, and ``psi0`` must vanish (``1e-10`` of its peak) at the edges.
    """
    x = np.asarray(x, dtype=float)
    psi = np.array(psi0, dtype=complex)
    if steps < 1:
        raise ValueError("steps must be >= 1")
    n = x.size
    dx = (x[-1] - x[0]) / (n - 1)
    dt = float(t_final) / steps
    k = 2.0 * math.pi * np.fft.fftfreq(n, d=dx)
    v = potential(params, x)
    phase = abs(dt) * (np.max(k * k) + np.max(np.abs(v)))
    if phase > MAX_STEP_PHASE:
        need = math.ceil(steps * phase / MAX_STEP_PHASE)
        raise ResolutionError(f"time step too large: phase per step {phase:.3g} > pi; use >= {need} steps")
    peak = np.max(np.abs(psi))
    if peak and max(abs(psi[0]), abs(psi[-1])) > REFERENCE_EDGE_TOLERANCE * peak:
        raise ResolutionError("psi0 must vanish at the periodic grid edges")
    half_v = np.exp(-0.5j * dt * v)
    kin = np.exp(-1j * dt * k * k)
    for _ in range(steps):
        psi = half_v * np.fft.ifft(kin * np.fft.fft(half_v * psi))
    return psi


# --- the suite ---------------------------------------------------------------------------


def _sample_points(rng, count, half):
    return rng.uniform(-half, half, size=(count, 2))


def _check_wronskian(params):
    half = 50.0 / params.a[0]
    xs = np.linspace(-half, half, 4001)
    w = wronskian(params, xs)
    bad = int(np.sum(w.mantissa <= 0))
    return OracleReport.bound("wronskian_positive", bad, 0.0, samples=xs.size, window=half)


def _check_potential(params, rng):
    worst = 0.0
    h = 1e-2
    for x in rng.uniform(-3.0, 3.0, size=5):
        logw = lambda d: float(wronskian(params, x + d).log())  # noqa: E731
        fd = -2.0 * _richardson(_d2, logw, h)
        worst = max(worst, abs(potential(params, x) - fd))
    return OracleReport.bound("potential_vs_log_wronskian_fd", worst, 1e-8, step=h)


def _check_gram(params):
    half = 40.0 / params.a[0]
    N = params.N
    worst = 0.0
    for n in range(1, N + 1):
        for m in range(n, N + 1):
            val, _ = integrate.quad(
                lambda s: bound_state(params, n, s) * bound_state(params, m, s),
                -half, half, points=[0.0], limit=400, epsabs=1e-13, epsrel=1e-12,
            )
            worst = max(worst, abs(val - (1.0 if n == m else 0.0)))
    return OracleReport.bound("bound_state_gram_identity", worst, 1e-8, window=half)


def _bound_residual(params, n, x, h=1e-3):
    a = params.a[n - 1]
    f = lambda d: bound_state(params, n, x + d)  # noqa: E731
    return abs(-_richardson(_d2, f, h) + (potential(params, x) + a * a) * f(0.0))


def _continuum_residual(params, k, x, h=1e-3):
    f = lambda d: continuum_state(params, k, x + d)  # noqa: E731
    return abs(-_richardson(_d2, f, h) + (potential(params, x) - k * k) * f(0.0))


def _check_eigen(params, rng):
    worst_b = max((_bound_residual(params, n, x) for n in range(1, params.N + 1) for x in (-1.0, 0.0, 2.0)), default=0.0)
    worst_c = max(_continuum_residual(params, k, x) for k, x in zip(rng.uniform(0.0, 3.0, 4), rng.uniform(-3.0, 3.0, 4)))
    return [
        OracleReport.bound("bound_state_eigen_residual", worst_b, 1e-6, step=1e-3),
        OracleReport.bound("continuum_state_eigen_residual", worst_c, 1e-6, step=1e-3),
    ]


def _check_transmission(params):
    worst = 0.0
    for k in (0.3, 1.7, 4.0):
        for x in (-30.0, 30.0):
            worst = max(worst, abs(abs(continuum_state(params, k, x)) * math.sqrt(2.0 * math.pi) - 1.0))
    return OracleReport.bound("reflectionless_transmission", worst, 1e-8, x=30.0)


def _check_oracle(params, kernel, rng, count=5):
    t = TimeParam.heat(0.4)
    out = []
    for x, y in _sample_points(rng, count, 3.0):
        ref, info = spectral_kernel_oracle(params, x, y, t, return_info=True)
        out.append(
            OracleReport.compare(
                "kernel_vs_spectral_oracle", kernel(x, y, t), ref, 1e-6,
                x=x, y=y, t=t.t, k_max=info.k_max, tail_bound=info.tail_bound,
            )
        )
    return out


def _check_pde(params, kernel, rng, count=3):
    out = []
    for (x, y), t in zip(_sample_points(rng, count, 3.0), rng.uniform(0.1, 2.0, count)):
        res = pde_residual(kernel, params, x, y, TimeParam(t))
        out.append(OracleReport.bound("pde_residual", res, 1e-5, x=x, y=y, t=t, hx=X_STEP, ht=T_STEP))
    return out


def _check_symmetry(params, kernel, rng):
    worst = 0.0
    for (x, y), t in zip(_sample_points(rng, 5, 5.0), rng.uniform(0.1, 2.0, 5)):
        kxy = kernel(x, y, t)
        worst = max(worst, abs(kxy - kernel(y, x, t)) / abs(kxy))
    return OracleReport.bound("kernel_symmetry", worst, 1e-14)


def _check_wick(params, kernel):
    xs = np.linspace(-4.0, 4.0, 41)
    k = kernel(xs[:, None], xs[None, :], TimeParam.heat(0.5))
    ratio = float(np.max(np.abs(k.imag) / np.abs(k.real)))
    positive = bool(np.all(k.real > 0))
    rep = OracleReport.bound("heat_kernel_real", ratio, 1e-10, tau=0.5)
    pos = OracleReport.bound("heat_kernel_positive", 0.0 if positive else 1.0, 0.0, tau=0.5)
    return [rep, pos]


def _window(params):
    return 40.0 / params.a[0] if params.N else 40.0


def _check_semigroup(params, kernel, rng, tau1=0.3, tau2=0.5):
    half = _window(params)
    x, y = rng.uniform(-2.0, 2.0, size=2)
    t1, t2 = TimeParam.heat(tau1), TimeParam.heat(tau2)
    f = lambda z: (kernel(x, z, t1) * kernel(z, y, t2)).real  # noqa: E731
    val, _ = integrate.quad(f, -half, half, points=sorted({x, y}), limit=500, epsabs=1e-14, epsrel=1e-12)
    ref = kernel(x, y, TimeParam.heat(tau1 + tau2)).real
    return OracleReport.compare("heat_semigroup", val, ref, 1e-6, x=x, y=y, tau1=tau1, tau2=tau2, window=half)


def _check_darboux_continuum(params, kernel, rng):
    if params.N > 4:
        return []
    t = TimeParam.heat(0.4)
    out = []
    for x, y in _sample_points(rng, 2, 2.0):
        closed = kernel(x, y, t) - discrete_part(params, x, y, t)
        out.append(OracleReport.compare("continuum_part_crum_vs_closed", continuous_part_darboux(params, x, y, t), closed, 1e-5, x=x, y=y, t=t.t))
    return out


def _check_small_time(params, kernel, free=free_kernel):
    x, y = 0.4, -0.3
    mags = [abs(kernel(x, y, t) - free(x, y, t)) for t in (1e-1, 1e-2, 1e-3, 1e-4)]
    monotone = all(b < a for a, b in zip(mags, mags[1:]))
    return OracleReport.bound("small_time_soliton_decay", 0.0 if monotone else 1.0, 0.0, magnitudes=mags)


def run_suite(params: SolitonParams | Sequence[Mapping], seed: int = 0, *, corrupt: float = 1.0) -> list[OracleReport]:
    """Run every invariant at seeded random points.

    ``params`` may be raw mode specs ``[{"a": .., "b": ..}, ...]``; a
    constructor rejection becomes a single failed report.  ``corrupt`` scales
    the soliton term of the kernel under test, so ``corrupt=1.01`` must make
    the kernel checks fail.
    """
    if not isinstance(params, SolitonParams):
        try:
            params = SolitonParams.from_wavenumbers([m["a"] for m in params], [m.get("b", 0.0) for m in params])
        except (SolitonError, KeyError, TypeError, ValueError) as exc:
            return [OracleReport.failure("params", f"{type(exc).__name__}: {exc}")]
    rng = np.random.default_rng(seed)
    kernel = (lambda x, y, t: kernel_closed(params, x, y, t)) if corrupt == 1.0 else corrupted_kernel(params, corrupt)
    reports: list[OracleReport] = []
    steps = [
        lambda: _check_oracle(params, kernel, rng),
        lambda: _check_pde(params, kernel, rng),
        lambda: [_check_symmetry(params, kernel, rng)],
        lambda: _check_wick(params, kernel),
        lambda: [_check_semigroup(params, kernel, rng)],
        lambda: _check_darboux_continuum(params, kernel, rng),
    ]
    if params.N:
        steps = [
            lambda: [_check_wronskian(params)],
            lambda: [_check_potential(params, rng)],
            lambda: [_check_gram(params)],
            lambda: _check_eigen(params, rng),
            lambda: [_check_transmission(params)],
            *steps,
            lambda: [_check_small_time(params, kernel)],
        ]
    for step in steps:
        try:
            reports.extend(step())
        except SolitonError as exc:
            reports.append(OracleReport.failure("suite_step", f"{type(exc).__name__}: {exc}"))
    return reports
