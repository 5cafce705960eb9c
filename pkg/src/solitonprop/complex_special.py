"""Complex error functions and the Gaussian-Cauchy integrals.

All functions accept scalars or numpy arrays and return ``complex`` (or
complex arrays).  The Faddeeva function is the single primitive; every other
quantity is assembled from it with the exponential prefactors combined
analytically, so nothing here exponentiates a number that is only going to be
cancelled later.

Conventions::

    w(z)             = exp(-z**2) * erfc(-1j*z)
    erfc_scaled(z)   = exp(z**2) * erfc(z)          (= w(1j*z))
    integral_I(a, x) = int dp exp(-2p**2 + 4px) / (p**2 + a**2)
    cauchy_gaussian(alpha, x) = int dp exp(-2p**2 + 4px) / (p + 1j*alpha)
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .errors import DomainError, RangeError

__all__ = [
    "faddeeva_w",
    "erfc_scaled",
    "erf_complex",
    "erfc_complex",
    "integral_I",
    "cauchy_gaussian",
]

_SQRT2 = math.sqrt(2.0)
_TWO_OVER_SQRTPI = 2.0 / math.sqrt(math.pi)

# Below this modulus erf is summed from its Maclaurin series; 1 - erfc(z)
# would cancel away the leading digits.
_SERIES_RADIUS = 0.5
_SERIES_TERMS = 18


def _as_complex(z):
    arr = np.asarray(z, dtype=complex)
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"non-finite argument: {z!r}")
    return arr


def _out(arr):
    return complex(arr) if arr.ndim == 0 else arr


def _check_finite(result, z, what):
    bad = ~np.isfinite(result)
    if np.any(bad):
        first = np.asarray(z).reshape(-1)[np.argmax(bad.reshape(-1))]
        raise RangeError(f"{what} overflows at z = {complex(first)!r}")
    return result


def faddeeva_w(z):
    """Faddeeva function ``w(z) = exp(-z^2) erfc(-iz)``.

    Bounded in the closed upper half-plane.  In the lower half-plane it grows
    like ``2 exp(-z^2)``; a :class:`RangeError` names the offending argument
    once that is no longer representable.
    """
    z = _as_complex(z)
    with np.errstate(over="ignore", invalid="ignore"):
        w = special.wofz(z)
    return _out(_check_finite(w, z, "faddeeva_w"))


def erfc_scaled(z):
    """Scaled complementary error function ``exp(z^2) erfc(z)``.

    Never overflows for ``Re z >= 0``; for ``Re z < 0`` it behaves like
    ``2 exp(z^2)`` and raises :class:`RangeError` when that overflows.
    """
    z = _as_complex(z)
    with np.errstate(over="ignore", invalid="ignore"):
        r = special.erfcx(z)
    return _out(_check_finite(r, z, "erfc_scaled"))


def _erf_series(z):
    z2 = z * z
    term = z.copy()
    total = z.copy()
    for n in range(1, _SERIES_TERMS):
        term = term * (-z2) / n
        total = total + term / (2 * n + 1)
    return _TWO_OVER_SQRTPI * total


def erf_complex(z):
    """Error function for complex arguments.

    Small arguments use the Maclaurin series.  Elsewhere
    ``erf(z) = 1 - exp(-z^2) erfc_scaled(z)`` on ``Re z >= 0`` and the odd
    reflection on ``Re z < 0``, so erfc_scaled is only ever called in the
    half-plane where it is bounded.
    """
    z = _as_complex(z)
    out = np.empty_like(z)
    small = np.abs(z) < _SERIES_RADIUS
    if np.any(small):
        out[small] = _erf_series(z[small])
    big = ~small
    if np.any(big):
        zb = z[big]
        sgn = np.where(zb.real >= 0, 1.0, -1.0)
        u = sgn * zb
        with np.errstate(over="ignore", invalid="ignore"):
            val = sgn * (1.0 - np.exp(-u * u) * special.erfcx(u))
        out[big] = _check_finite(val, zb, "erf_complex")
    return _out(out)


def erfc_complex(z):
    """Complementary error function, ``1 - erf(z)`` without the cancellation."""
    z = _as_complex(z)
    with np.errstate(over="ignore", invalid="ignore"):
        pos = z.real >= 0
        u = np.where(pos, z, -z)
        tail = np.exp(-u * u) * special.erfcx(u)
        val = np.where(pos, tail, 2.0 - tail)
    return _out(_check_finite(val, z, "erfc_complex"))


def integral_I(a, x):
    """Gaussian-Lorentzian integral ``int dp exp(-2p^2+4px)/(p^2+a^2)``.

    Evaluated as ``(pi/2a) exp(2x^2) [erfcx(sqrt2 (a+ix)) + erfcx(sqrt2 (a-ix))]``.
    For real ``a > 0`` and real ``x`` this is the integral itself (and equals
    ``(pi/a) e^{2a^2} Re[e^{4iax} erfc(sqrt2 (a+ix))]``); for complex
    arguments it is the analytic continuation used by the continuum kernel.
    """
    a = np.asarray(a, dtype=complex)
    x = np.asarray(x, dtype=complex)
    if np.any(a == 0):
        raise DomainError("integral_I: a = 0 puts a double pole on the contour")
    _as_complex(a)
    _as_complex(x)
    with np.errstate(over="ignore", invalid="ignore"):
        val = (math.pi / (2.0 * a)) * np.exp(2.0 * x * x) * (
            special.erfcx(_SQRT2 * (a + 1j * x)) + special.erfcx(_SQRT2 * (a - 1j * x))
        )
    return _out(_check_finite(val, a + x, "integral_I"))


def cauchy_gaussian(alpha, x):
    """Gaussian-Cauchy integral ``int dp exp(-2p^2+4px)/(p + i alpha)``.

    For ``Re alpha > 0`` (pole below the real axis) this is
    ``-i pi exp(2 alpha (alpha - 2ix)) erfc(sqrt2 (alpha - ix))``.  For
    ``Re alpha < 0`` the pole sits above the axis and the integral picks up
    the residue, which folds into ``i pi exp(2x^2) erfcx(-sqrt2 (alpha - ix))``.
    ``Re alpha = 0`` puts the pole on the contour.
    """
    alpha = _as_complex(alpha)
    x = _as_complex(x)
    if np.any(alpha.real == 0):
        raise DomainError("cauchy_gaussian: Re(alpha) = 0 puts the pole on the contour")
    sgn = np.where(alpha.real > 0, 1.0, -1.0)
    with np.errstate(over="ignore", invalid="ignore"):
        val = -1j * math.pi * sgn * np.exp(2.0 * x * x) * special.erfcx(sgn * _SQRT2 * (alpha - 1j * x))
    return _out(_check_finite(val, alpha + x, "cauchy_gaussian"))
