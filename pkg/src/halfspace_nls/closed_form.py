"""Exact one-dimensional objects for -w'' + w = w^p.

The homoclinic orbit

    w0(t) = c_p * cosh((p - 1) t / 2) ** (-2 / (p - 1)),
    c_p   = ((p + 1) / 2) ** (1 / (p - 1)),

and its translates give every positive decaying solution on the half-line
with boundary value c <= c_p.  The first integral

    w'^2 = w^2 - 2 w^(p+1) / (p + 1)

forces the squared boundary slope I(c) = c^2 - 2 c^(p+1) / (p + 1), whose
sign decides between two, one or zero profiles.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ThresholdError

# |I(c)| <= THRESHOLD_RTOL * c**2 counts as the threshold case c = c_p.
THRESHOLD_RTOL = 1e-12


class Trichotomy(enum.Enum):
    TWO_SOLUTIONS = 2
    ONE_SOLUTION = 1
    NO_SOLUTION = 0


def _check_p(p):
    if not (np.isfinite(p) and p > 1):
        raise ParameterError(f"exponent p must be a finite number > 1, got {p!r}")


def _check_c(c):
    if not (np.isfinite(c) and c > 0):
        raise ParameterError(f"boundary value c must be a finite number > 0, got {c!r}")


@dataclass(frozen=True)
class Params:
    """Validated problem parameters."""

    p: float
    c: float

    def __post_init__(self):
        _check_p(self.p)
        _check_c(self.c)

    @property
    def c_p(self):
        return critical_threshold(self.p)

    @property
    def subthreshold(self):
        return first_integral_criterion(self.c, self.p)[1] is Trichotomy.TWO_SOLUTIONS


def critical_threshold(p):
    """Return c_p = ((p+1)/2)^(1/(p-1)), the peak of the homoclinic orbit."""
    _check_p(p)
    return ((p + 1) / 2) ** (1 / (p - 1))


def homoclinic(t, p):
    """Evaluate w0 and w0' at ``t`` (scalar or array).

    Uses w0(t) = c_p 2^(2/(p-1)) e^-|t| (1 + e^-(p-1)|t|)^(-2/(p-1)), which
    never overflows and underflows gracefully for large |t|.
    """
    _check_p(p)
    cp = critical_threshold(p)
    t = np.asarray(t, dtype=float)
    at = np.abs(t)
    expo = 2.0 / (p - 1)
    value = cp * 2.0**expo * np.exp(-at) * (1.0 + np.exp(-(p - 1) * at)) ** (-expo)
    deriv = -value * np.tanh(0.5 * (p - 1) * t)
    if value.ndim == 0:
        return float(value), float(deriv)
    return value, deriv


def first_integral(c, p):
    """I(c) = c^2 - 2 c^(p+1) / (p+1)."""
    return c * c - 2.0 / (p + 1) * c ** (p + 1)


def first_integral_criterion(c, p):
    """Classify the 1D problem with boundary value ``c``.

    Returns ``(I, flag)`` where ``flag`` is a :class:`Trichotomy`.
    NO_SOLUTION is a classification, not an error.
    """
    _check_p(p)
    _check_c(c)
    value = first_integral(c, p)
    if abs(value) <= THRESHOLD_RTOL * c * c:
        return value, Trichotomy.ONE_SOLUTION
    if value > 0:
        return value, Trichotomy.TWO_SOLUTIONS
    return value, Trichotomy.NO_SOLUTION


def boundary_shift(c, p):
    """Shift t_{c,p} >= 0 with w0(t_{c,p}) = c.

    Raises :class:`ThresholdError` when c > c_p.
    """
    _, flag = first_integral_criterion(c, p)
    if flag is Trichotomy.NO_SOLUTION:
        raise ThresholdError(c, p, critical_threshold(p))
    if flag is Trichotomy.ONE_SOLUTION:
        return 0.0
    a = (p + 1) / (2 * c ** (p - 1))
    return 2.0 / (p - 1) * math.log(math.sqrt(a) + math.sqrt(max(a - 1.0, 0.0)))


@dataclass(frozen=True)
class ClosedForm1D:
    """Boundary-layer profiles u_c(s) = w0(s + t), u~_c(s) = w0(s - t)."""

    p: float
    c: float
    c_p: float = field(init=False)
    t_shift: float = field(init=False)
    m1: float = field(init=False)
    m2: float = field(init=False)

    def __post_init__(self):
        _check_c(self.c)
        t = boundary_shift(self.c, self.p)
        cp = critical_threshold(self.p)
        object.__setattr__(self, "c_p", cp)
        object.__setattr__(self, "t_shift", t)
        object.__setattr__(self, "m1", cp * math.exp(-t))
        object.__setattr__(self, "m2", cp * 2.0 ** (2 / (self.p - 1)) * math.exp(-t))

    def u_c(self, s):
        return homoclinic(np.asarray(s, dtype=float) + self.t_shift, self.p)[0]

    def u_c_prime(self, s):
        return homoclinic(np.asarray(s, dtype=float) + self.t_shift, self.p)[1]

    def u_c_tilde(self, s):
        return homoclinic(np.asarray(s, dtype=float) - self.t_shift, self.p)[0]

    def potential(self, s):
        """V_c(s) = 1 - p u_c(s)^(p-1)."""
        return 1.0 - self.p * np.asarray(self.u_c(s)) ** (self.p - 1)


def profiles(c, p):
    """Build the :class:`ClosedForm1D` for ``(c, p)``; requires c <= c_p."""
    _check_p(p)
    return ClosedForm1D(p=float(p), c=float(c))
