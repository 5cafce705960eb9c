"""Exception types raised by solitonprop."""


class SolitonError(Exception):
    """Base class for all library errors."""


class InvalidParams(SolitonError, ValueError):
    """Soliton parameters violate ordering, parity or positivity constraints."""


class DomainError(SolitonError, ValueError):
    """Argument lies outside the domain of an operation (pole, t = 0, ...)."""


class RangeError(SolitonError, OverflowError):
    """Result is not representable in double precision."""


class UnsupportedError(SolitonError, NotImplementedError):
    """Operation is deliberately not provided for these inputs."""


class ResolutionError(SolitonError, ValueError):
    """A sampling grid is too coarse or too short for the requested operation."""
