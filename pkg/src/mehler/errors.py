"""Exception types shared by every module of the package."""

from __future__ import annotations


class MehlerError(Exception):
    """Base class for all errors raised by this package."""


class NonCommuting(MehlerError, ValueError):
    """The coefficient matrices do not commute within tolerance."""


class NotPositiveDefinite(MehlerError, ValueError):
    """The diffusion matrix is not symmetric positive definite."""


class DomainError(MehlerError, ValueError):
    """An argument lies outside the domain of the requested function."""


class OutOfRange(MehlerError, ValueError):
    """A path parameter lies outside the closed interval [0, t]."""


class SingularTime(MehlerError):
    """The time hits (or is within the guard of) a conjugate time k*pi/sqrt(-lambda).

    Attributes
    ----------
    t : float
        The offending time.
    index : int or None
        Index of the negative eigenvalue responsible, when known.
    k : int or None
        Multiple of pi/sqrt(-lambda) closest to ``t``.
    """

    def __init__(self, t, index=None, k=None, message=None):
        self.t = float(t)
        self.index = index
        self.k = k
        if message is None:
            message = f"t={self.t!r} is a singular time"
            if index is not None:
                message += f" (eigenvalue index {index}, k={k})"
        super().__init__(message)


class SingularD(MehlerError):
    """D has a (numerically) zero eigenvalue where its inverse is required."""


class SingularCos(MehlerError):
    """A cosine factor of the closed-form Fourier transform vanishes."""


class SingularShooting(MehlerError):
    """The shooting end-point map is numerically singular."""


class StepUnstable(MehlerError):
    """An explicit time stepper produced non-finite or exploding values."""


class QuadratureNonConvergent(MehlerError):
    """Level escalation of the quadrature rule did not converge."""
