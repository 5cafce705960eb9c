"""Overflow-safe signed magnitudes ``mantissa * 2**exponent``.

Wronskians of hyperbolic functions grow like ``exp(sum(a_j) |x|)``; storing
them as a mantissa in ``[1, 2)`` (with sign) and an integer binary exponent
keeps ratios such as ``W_n(x) W_n(y) / (W(x) W(y))`` exact to rounding long
after ``float`` itself would overflow.  Instances wrap numpy arrays (0-d for
scalars) so the same type serves pointwise and batched evaluation.
"""

from __future__ import annotations

import math

import numpy as np

_LN2 = math.log(2.0)


def _normalize(mant, exp):
    m, e = np.frexp(mant)
    # frexp gives |m| in [0.5, 1); shift to [1, 2)
    nz = m != 0
    m = np.where(nz, m * 2.0, 0.0)
    e = np.where(nz, e - 1 + exp, 0).astype(np.int64)
    return m, e


class ScaledReal:
    """Signed real ``mantissa * 2**exponent`` with ``|mantissa|`` in ``[1, 2)`` or zero."""

    __slots__ = ("mantissa", "exponent")

    def __init__(self, mantissa, exponent=0):
        mant = np.asarray(mantissa, dtype=float)
        exp = np.broadcast_to(np.asarray(exponent, dtype=np.int64), mant.shape)
        self.mantissa, self.exponent = _normalize(mant, exp)

    @classmethod
    def from_log(cls, logabs, sign=1.0):
        """Build ``sign * exp(logabs)`` without forming ``exp(logabs)``."""
        logabs = np.asarray(logabs, dtype=float)
        k = np.floor(logabs / _LN2)
        frac = np.exp(logabs - k * _LN2)
        return cls(np.asarray(sign, dtype=float) * frac, k.astype(np.int64))

    @property
    def shape(self):
        return self.mantissa.shape

    @property
    def sign(self):
        return np.sign(self.mantissa)

    def log(self):
        """Natural log of the magnitude (``-inf`` for zero)."""
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.mantissa)) + self.exponent * _LN2

    def to_float(self):
        with np.errstate(over="ignore", under="ignore"):
            val = np.ldexp(self.mantissa, self.exponent)
        return float(val) if val.ndim == 0 else val

    def __float__(self):
        return float(np.ldexp(self.mantissa, self.exponent))

    def __mul__(self, other):
        if not isinstance(other, ScaledReal):
            other = ScaledReal(other)
        return ScaledReal(self.mantissa * other.mantissa, self.exponent + other.exponent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, ScaledReal):
            other = ScaledReal(other)
        if np.any(other.mantissa == 0):
            raise ZeroDivisionError("division by a zero ScaledReal")
        return ScaledReal(self.mantissa / other.mantissa, self.exponent - other.exponent)

    def __neg__(self):
        return ScaledReal(-self.mantissa, self.exponent)

    def __getitem__(self, idx):
        return ScaledReal(self.mantissa[idx], self.exponent[idx])

    def __repr__(self):
        if self.mantissa.ndim == 0:
            return f"ScaledReal({float(self.mantissa)!r} * 2**{int(self.exponent)})"
        return f"ScaledReal(shape={self.shape})"
