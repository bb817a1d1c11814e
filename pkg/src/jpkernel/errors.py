"""Exception types shared across the package."""

from __future__ import annotations


class JPKError(Exception):
    """Base class for numerical failures in this package."""


class UnsupportedOrderError(JPKError, ValueError):
    """A derivative order outside the supported range was requested."""


class TruncationError(JPKError):
    """A series could not be truncated below tolerance within the term cap."""


class SlowConvergenceError(JPKError):
    """The F4 double series is too close to its convergence boundary."""


class QuadratureError(JPKError):
    """A quadrature did not converge; the message names the sub-integral."""


class TailError(JPKError):
    """A t-integral tail could not be closed below tolerance."""
