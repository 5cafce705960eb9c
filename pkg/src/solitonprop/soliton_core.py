"""Reflectionless N-soliton potentials built from the zero potential.

The transformation functions are alternately ``cosh(a_j x + b_j)`` and
``sinh(a_j x + b_j)`` with strictly increasing wave numbers ``a_j``.  Every
determinant below is a *generalized Wronskian*

    det[ d^{k_i} u_j / dx^{k_i} ]   (rows i: derivative orders, cols j: modes)

evaluated with each column scaled by ``exp(-|a_j x + b_j|)`` and each row by
an exact power of two before partial-pivoting elimination, so results come
back as :class:`~solitonprop.scaled.ScaledReal` and never overflow.

Mode indices in the public API are 1-based (``n = 1..N``).  ``x`` may be a
scalar or an array; batched points are eliminated together.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .errors import InvalidParams
from .scaled import ScaledReal

__all__ = [
    "Mode",
    "SolitonParams",
    "SpectralPoint",
    "DarbouxOperator",
    "mode_derivative",
    "generalized_wronskian",
    "wronskian",
    "reduced_wronskian",
    "potential",
    "bound_amplitude",
    "bound_state",
    "bound_state_norm",
    "darboux_coefficients",
    "darboux_apply",
    "continuum_state",
]

EVEN = "even"
ODD = "odd"


@dataclass(frozen=True)
class Mode:
    """One transformation function: ``cosh`` (even) or ``sinh`` (odd) of ``a x + b``."""

    a: float
    b: float = 0.0
    parity: str = EVEN


@dataclass(frozen=True)
class SolitonParams:
    """Transformation data of an N-soliton potential.

    Validated on construction: ``0 < a_1 < a_2 < ... < a_N`` and parities
    alternate starting with even.  Together these make the Wronskian nodeless
    for every choice of shifts ``b_j``.  ``N = 0`` is the free particle.
    """

    modes: tuple[Mode, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        prev = 0.0
        for j, m in enumerate(self.modes):
            if not (math.isfinite(m.a) and math.isfinite(m.b)):
                raise InvalidParams(f"mode {j + 1}: non-finite parameters a={m.a!r}, b={m.b!r}")
            if m.a <= prev:
                if j == 0:
                    raise InvalidParams(f"mode 1: a must be > 0, got {m.a!r}")
                raise InvalidParams(
                    f"mode {j + 1}: wave numbers must increase strictly, got a={m.a!r} after {prev!r}"
                )
            expected = EVEN if j % 2 == 0 else ODD
            if m.parity != expected:
                raise InvalidParams(f"mode {j + 1}: parity must be {expected!r}, got {m.parity!r}")
            prev = m.a

    @classmethod
    def from_wavenumbers(cls, a: Sequence[float], b: Sequence[float] | None = None) -> "SolitonParams":
        """Parameters with parities assigned cosh, sinh, cosh, ... and ``b`` defaulting to 0."""
        a = [float(v) for v in a]
        if b is None:
            b = [0.0] * len(a)
        if len(b) != len(a):
            raise InvalidParams(f"got {len(a)} wave numbers but {len(b)} shifts")
        return cls(tuple(Mode(aj, float(bj), EVEN if j % 2 == 0 else ODD) for j, (aj, bj) in enumerate(zip(a, b))))

    @property
    def N(self) -> int:
        return len(self.modes)

    @property
    def a(self) -> np.ndarray:
        return np.array([m.a for m in self.modes], dtype=float)

    @property
    def b(self) -> np.ndarray:
        return np.array([m.b for m in self.modes], dtype=float)

    @property
    def odd(self) -> np.ndarray:
        return np.array([m.parity == ODD for m in self.modes], dtype=np.int64)

    @property
    def factorization_constants(self) -> np.ndarray:
        return -self.a**2

    @property
    def bound_energies(self) -> np.ndarray:
        return -self.a**2


@dataclass(frozen=True)
class SpectralPoint:
    """A point of the spectrum of ``h_N``: continuum ``E = k^2`` or bound ``E = -a_n^2``."""

    k: float
    E: float
    bound: bool = False

    @classmethod
    def continuum(cls, k: float) -> "SpectralPoint":
        return cls(k=float(k), E=float(k) ** 2, bound=False)

    @classmethod
    def bound_level(cls, params: SolitonParams, n: int) -> "SpectralPoint":
        a = params.modes[_check_index(params, n)].a
        return cls(k=1j * a, E=-(a**2), bound=True)


def _check_index(params: SolitonParams, n: int) -> int:
    if not 1 <= n <= params.N:
        raise IndexError(f"mode index {n} out of range 1..{params.N}")
    return n - 1


def _scaled_hyperbolic(theta, kind):
    """``exp(-|theta|) * (cosh if kind == 0 else sinh)(theta)``."""
    t = np.abs(theta)
    e = np.exp(-2.0 * t)
    return np.where(kind == 0, 0.5 * (1.0 + e), np.sign(theta) * (-0.5 * np.expm1(-2.0 * t)))


def mode_derivative(params: SolitonParams, j: int, m: int, x) -> ScaledReal:
    """``d^m u_j / dx^m`` at ``x``: ``a_j^m`` times cosh or sinh of ``a_j x + b_j``."""
    idx = _check_index(params, j)
    if m < 0:
        raise ValueError(f"derivative order must be >= 0, got {m}")
    mode = params.modes[idx]
    theta = mode.a * np.asarray(x, dtype=float) + mode.b
    kind = (int(mode.parity == ODD) + m) % 2
    scale = ScaledReal.from_log(np.abs(theta) + m * math.log(mode.a))
    return scale * ScaledReal(_scaled_hyperbolic(theta, kind))


def _batched_det(mat):
    """Determinant of a stack of square matrices as (mantissa, exponent) arrays."""
    a = np.array(mat, dtype=float)
    p, n, _ = a.shape
    rows = np.arange(p)
    mant = np.ones(p)
    expo = np.zeros(p, dtype=np.int64)
    for k in range(n):
        piv = k + np.argmax(np.abs(a[:, k:, k]), axis=1)
        swap = piv != k
        if np.any(swap):
            top = a[rows, k, :].copy()
            a[rows, k, :] = a[rows, piv, :]
            a[rows, piv, :] = top
            mant = np.where(swap, -mant, mant)
        pivot = a[:, k, k]
        mant, e = np.frexp(mant * pivot)
        expo = expo + e
        if k + 1 < n:
            safe = np.where(pivot == 0.0, 1.0, pivot)
            factors = a[:, k + 1 :, k] / safe[:, None]
            a[:, k + 1 :, k:] -= factors[:, :, None] * a[:, k, k:][:, None, :]
    return mant, expo


def generalized_wronskian(params: SolitonParams, orders: Sequence[int], x, modes: Sequence[int] | None = None) -> ScaledReal:
    """``det[u_j^{(orders[i])}(x)]`` over the chosen 0-based ``modes`` (default: all).

    The empty determinant is 1.
    """
    x = np.asarray(x, dtype=float)
    modes = list(range(params.N)) if modes is None else list(modes)
    orders = list(orders)
    if len(orders) != len(modes):
        raise ValueError(f"{len(orders)} derivative orders for {len(modes)} modes")
    n = len(modes)
    if n == 0:
        return ScaledReal(np.ones_like(x))
    a = params.a[modes]
    b = params.b[modes]
    odd = params.odd[modes]
    flat = x.reshape(-1)
    theta = flat[:, None] * a[None, :] + b[None, :]  # (P, n)
    d = np.asarray(orders, dtype=np.int64)
    kind = (odd[None, :] + d[:, None]) % 2  # (n rows, n cols)
    powers = a[None, :] ** d[:, None]
    mat = powers[None, :, :] * _scaled_hyperbolic(theta[:, None, :], kind[None, :, :])
    # exact power-of-two row equilibration
    rowmax = np.max(np.abs(mat), axis=2)
    _, rexp = np.frexp(np.where(rowmax == 0.0, 1.0, rowmax))
    mat = np.ldexp(mat, -rexp[:, :, None])
    mant, expo = _batched_det(mat)
    det = ScaledReal(mant, expo + rexp.sum(axis=1))
    total = det * ScaledReal.from_log(np.abs(theta).sum(axis=1))
    return ScaledReal(total.mantissa.reshape(x.shape), total.exponent.reshape(x.shape))


def wronskian(params: SolitonParams, x) -> ScaledReal:
    """``W(u_1, ..., u_N)(x)``; positive for every valid parameter set."""
    return generalized_wronskian(params, range(params.N), x)


def reduced_wronskian(params: SolitonParams, n: int, x) -> ScaledReal:
    """Order ``N-1`` Wronskian with ``u_n`` dropped (1 when ``N = 1``)."""
    idx = _check_index(params, n)
    modes = [j for j in range(params.N) if j != idx]
    return generalized_wronskian(params, range(params.N - 1), x, modes)


def _differentiate(terms: dict[tuple[int, ...], float]) -> dict[tuple[int, ...], float]:
    # d/dx of a Wronskian-type determinant: sum over rows, one row differentiated at a time
    out: dict[tuple[int, ...], float] = {}
    for orders, coeff in terms.items():
        for i in range(len(orders)):
            new = list(orders)
            new[i] += 1
            if new[i] in orders:
                continue
            key = tuple(new)
            out[key] = out.get(key, 0.0) + coeff
    return {k: v for k, v in out.items() if v != 0.0}


def _log_derivatives(params: SolitonParams, x):
    """``W'/W`` and ``W''/W`` from the exact row-derivative expansion."""
    base = tuple(range(params.N))
    w = wronskian(params, x)
    first = _differentiate({base: 1.0})
    second = _differentiate(first)

    def ratio(terms):
        return sum(c * (generalized_wronskian(params, k, x) / w).to_float() for k, c in terms.items())

    return ratio(first), ratio(second)


def potential(params: SolitonParams, x):
    """``V_N(x) = -2 (log W)''``; identically zero for ``N = 0``."""
    x = np.asarray(x, dtype=float)
    if params.N == 0:
        v = np.zeros_like(x)
    else:
        r1, r2 = _log_derivatives(params, x)
        v = -2.0 * (r2 - r1 * r1)
    return float(v) if np.ndim(v) == 0 else v


def bound_amplitude(params: SolitonParams, n: int) -> float:
    """Squared normalization ``a_n/2 * prod_{j != n} |a_n^2 - a_j^2|`` of the n-th bound state."""
    idx = _check_index(params, n)
    a = params.a
    others = np.delete(a, idx)
    return float(a[idx] / 2.0 * np.prod(np.abs(a[idx] ** 2 - others**2)))


def bound_ratio(params: SolitonParams, n: int, x) -> ScaledReal:
    """``W^{(n)}(x) / W(x)`` kept in scaled form."""
    return reduced_wronskian(params, n, x) / wronskian(params, x)


def bound_state(params: SolitonParams, n: int, x):
    """Normalized bound state with energy ``-a_n^2``."""
    val = math.sqrt(bound_amplitude(params, n)) * bound_ratio(params, n, x).to_float()
    return float(val) if np.ndim(val) == 0 else val


def bound_state_norm(params: SolitonParams, n: int) -> float:
    """``int phi_n^2 dx`` by adaptive quadrature over ``|x| <= 40/a_1``."""
    half = 40.0 / params.a[0]
    val, _ = integrate.quad(lambda s: bound_state(params, n, s) ** 2, -half, half, points=[0.0], limit=400, epsabs=1e-13, epsrel=1e-12)
    return val


@dataclass(frozen=True)
class DarbouxOperator:
    """Order-N differential operator ``f -> W(u_1..u_N, f) / W(u_1..u_N)``."""

    params: SolitonParams

    @property
    def order(self) -> int:
        return self.params.N

    def coefficients(self, x):
        return darboux_coefficients(self.params, x)

    def __call__(self, derivs, x):
        return darboux_apply(self, derivs, x)


def darboux_coefficients(params: SolitonParams, x):
    """Coefficients ``c_m(x)`` with ``L f = sum_m c_m f^{(m)}``, shape ``x.shape + (N+1,)``.

    ``c_m`` is the cofactor of ``f^{(m)}`` in the bordered ``(N+1) x (N+1)``
    Wronskian divided by ``W``; the leading one ``c_N`` is exactly 1.
    """
    x = np.asarray(x, dtype=float)
    N = params.N
    w = wronskian(params, x)
    out = np.empty(x.shape + (N + 1,))
    for m in range(N + 1):
        orders = [k for k in range(N + 1) if k != m]
        sign = -1.0 if (m + N) % 2 else 1.0
        out[..., m] = sign * (generalized_wronskian(params, orders, x) / w).to_float()
    return out


def darboux_apply(op: DarbouxOperator | SolitonParams, derivs, x):
    """Apply the Crum operator to ``f`` given its exact derivatives at ``x``.

    ``derivs`` is either a sequence ``[f(x), f'(x), ..., f^{(N)}(x)]`` (each
    entry broadcastable against ``x``) or a callable ``derivs(x, m)``.
    """
    params = op.params if isinstance(op, DarbouxOperator) else op
    x = np.asarray(x, dtype=float)
    N = params.N
    if callable(derivs):
        f = [derivs(x, m) for m in range(N + 1)]
    else:
        f = list(derivs)
        if len(f) != N + 1:
            raise ValueError(f"need {N + 1} derivatives, got {len(f)}")
    c = darboux_coefficients(params, x)
    val = sum(c[..., m] * np.asarray(f[m], dtype=complex) for m in range(N + 1))
    return complex(val) if np.ndim(val) == 0 else val


def continuum_state(params: SolitonParams, k, x):
    """Scattering state ``L[e^{-ikx}/sqrt(2 pi)] / prod_j sqrt(k^2 + a_j^2)`` with energy ``k^2``."""
    x = np.asarray(x, dtype=float)
    k = np.asarray(k, dtype=float)
    c = darboux_coefficients(params, x)
    mik = -1j * k
    poly = sum(c[..., m] * mik**m for m in range(params.N + 1))
    norm = np.sqrt(np.prod(k[..., None] ** 2 + params.a**2, axis=-1)) if params.N else 1.0
    val = poly * np.exp(-1j * k * x) / (math.sqrt(2.0 * math.pi) * norm)
    return complex(val) if np.ndim(val) == 0 else val


def bound_states(params: SolitonParams, x) -> np.ndarray:
    """All bound states sampled at ``x``, shape ``(N,) + x.shape``."""
    return np.array([bound_state(params, n, x) for n in range(1, params.N + 1)])


def superpotential(params: SolitonParams, x):
    """``(log W)'``; for ``N = 1`` this is ``(log u)' = a tanh(a x + b)``."""
    if params.N == 0:
        return np.zeros_like(np.asarray(x, dtype=float))
    return _log_derivatives(params, x)[0]

