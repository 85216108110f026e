"""Closed-form dynamics for aligned dots (equal levels, equal widths).

Amplitudes here are expressed in the frame rotating with the common dot
level ``E``: the dark state ``(1, -1)/sqrt(2)`` is stationary, and the bright
state ``(1, 1)/sqrt(2)`` is multiplied by the scalar ``a(t)``.  The lab-frame
amplitudes differ by the global phase ``exp(-i E t)``, which drops out of
every occupation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericBreakdown, ParameterError
from .model import DotAmplitudes, MeasurementProtocol, PhysParams, require_aligned
from .trace import UNDERFLOW, ConditionalTrace

__all__ = [
    "RootPair",
    "TransferMatrix2",
    "roots",
    "a_of_t",
    "u_of_t",
    "measured_amplitudes_analytic",
    "measured_trace_analytic",
    "a_bar_scaling",
    "p1_conditional",
    "scaling_trace",
    "DEGENERATE_REL_TOL",
]

#: switch to the confluent form when |A+ - A-| < DEGENERATE_REL_TOL * |Lambda - iE|
DEGENERATE_REL_TOL = 1e-6
#: below this x the scaling exponent is replaced by its x -> 0 limit
SCALING_X_FLOOR = 1e-8


@dataclass(frozen=True)
class RootPair:
    """Roots of ``A**2 - (Lambda - iE) A + Gamma*Lambda = 0``."""

    a_plus: complex
    a_minus: complex

    @property
    def gap(self) -> complex:
        return self.a_plus - self.a_minus


def roots(E: float, Gamma: float, Lambda: float) -> RootPair:
    """Decay exponents of the bright amplitude.

    The smaller-magnitude root is obtained from the product of roots, which
    avoids cancellation when ``Gamma << Lambda``.  ``a_plus`` is the root
    with the larger real part (larger imaginary part on a tie).
    """
    if not Gamma >= 0:
        raise ParameterError(f"width must be nonnegative, got {Gamma}")
    if not Lambda > 0:
        raise ParameterError(f"bandwidth must be positive, got {Lambda}")
    s = complex(Lambda, -E)
    p = Gamma * Lambda
    d = cmath.sqrt(s * s - 4 * p)
    # pick the sign that adds magnitudes
    big = (s + d) / 2 if abs(s + d) >= abs(s - d) else (s - d) / 2
    small = p / big if big != 0 else 0j
    r1, r2 = sorted((big, small), key=lambda z: (z.real, z.imag), reverse=True)
    return RootPair(r1, r2)


def a_of_t(t, E: float, Gamma: float, Lambda: float):
    """Bright-state amplitude ``a(t)`` without intermediate measurements.

    Accepts a scalar or an array of times ``t >= 0``.
    """
    r = roots(E, Gamma, Lambda)
    tt = np.asarray(t, dtype=float)
    if np.any(tt < 0):
        raise ParameterError("a(t) is defined for t >= 0")
    if abs(r.gap) < DEGENERATE_REL_TOL * abs(complex(Lambda, -E)):
        A = complex(Lambda, -E) / 2
        out = (1 + A * tt) * np.exp(-A * tt)
    else:
        ap, am = r.a_plus, r.a_minus
        out = (ap * np.exp(-am * tt) - am * np.exp(-ap * tt)) / (ap - am)
    return complex(out) if np.ndim(out) == 0 else out


class TransferMatrix2:
    """The symmetric 2x2 matrix ``((a+1, a-1), (a-1, a+1)) / 2``.

    Its eigenvalues are ``a`` on ``(1, 1)/sqrt(2)`` and ``1`` on ``(1, -1)/sqrt(2)``.
    """

    __slots__ = ("a",)

    def __init__(self, a: complex):
        self.a = complex(a)

    def __repr__(self) -> str:
        return f"TransferMatrix2(a={self.a!r})"

    @property
    def matrix(self) -> np.ndarray:
        a = self.a
        return 0.5 * np.array([[a + 1, a - 1], [a - 1, a + 1]])

    def __matmul__(self, other):
        if isinstance(other, TransferMatrix2):
            return TransferMatrix2(self.a * other.a)
        if isinstance(other, DotAmplitudes):
            return DotAmplitudes.from_array(self.matrix @ other.as_array())
        return self.matrix @ np.asarray(other)

    def __pow__(self, n: int) -> "TransferMatrix2":
        return TransferMatrix2(_iterated_power(self.a, n)[-1])


def _iterated_power(a: complex, n: int) -> np.ndarray:
    """``[a**0, a**1, ..., a**n]`` by repeated multiplication (no branch cuts)."""
    if n < 0:
        raise ParameterError("power must be nonnegative")
    seq = np.full(n + 1, a, dtype=complex)
    seq[0] = 1.0
    return np.cumprod(seq)


def u_of_t(t: float, params: PhysParams) -> TransferMatrix2:
    """Unmeasured dot propagator ``U(t)`` for aligned parameters."""
    require_aligned(params)
    return TransferMatrix2(a_of_t(t, params.e1, params.gamma1, params.bandwidth))


def _measured_powers(protocol: MeasurementProtocol, params: PhysParams) -> np.ndarray:
    require_aligned(params)
    if protocol.n == 0:
        return np.array([1.0, a_of_t(protocol.t_total, params.e1, params.gamma1,
                                     params.bandwidth)], dtype=complex)
    a_tau = a_of_t(protocol.tau, params.e1, params.gamma1, params.bandwidth)
    return _iterated_power(a_tau, protocol.n)


def measured_amplitudes_analytic(protocol: MeasurementProtocol, params: PhysParams,
                                 initial: DotAmplitudes) -> DotAmplitudes:
    """Unnormalized amplitudes ``U(tau)**n @ initial`` after the full protocol."""
    return TransferMatrix2(_measured_powers(protocol, params)[-1]) @ initial


def measured_trace_analytic(protocol: MeasurementProtocol, params: PhysParams,
                            initial: DotAmplitudes) -> ConditionalTrace:
    """Conditional trace at every measurement instant from the closed form."""
    an = _measured_powers(protocol, params)
    b = initial.as_array()
    # (a^k + 1)/2 and (a^k - 1)/2 applied to (b1, b2)
    plus, minus = (an + 1) / 2, (an - 1) / 2
    b1 = plus * b[0] + minus * b[1]
    b2 = minus * b[0] + plus * b[1]
    return ConditionalTrace.from_amplitudes(
        protocol.times, b1, b2, "analytic-stepwise",
        {"n": protocol.n, "tau": protocol.tau, "x": protocol.x})


def a_bar_scaling(t, Gamma: float, x: float, c: float = 0.0):
    """Bright amplitude under continuous null-result monitoring at fixed ``x``.

    ``exp(Gamma t (1 - exp(-kappa x)) / (kappa**2 x) - Gamma t / kappa)`` with
    ``kappa = 1 - i c``.  ``x = inf`` gives the unmonitored ``exp(-Gamma t / kappa)``
    and ``x -> 0`` gives 1.
    """
    if not x > 0:
        raise ParameterError(f"x must be positive, got {x}")
    tt = np.asarray(t, dtype=float)
    kappa = complex(1.0, -c)
    if x < SCALING_X_FLOOR:
        out = np.ones_like(tt, dtype=complex)
    elif math.isinf(x):
        out = np.exp(-Gamma * tt / kappa)
    else:
        # (1 - e^{-kx})/(kx) - 1 without cancellation for small kx
        kx = kappa * x
        g = -np.expm1(-kx) / kx - 1 if abs(kx) > 1e-3 else -kx / 2 + kx**2 / 6 - kx**3 / 24
        out = np.exp(Gamma * tt * g / kappa)
    return complex(out) if np.ndim(out) == 0 else out


def p1_conditional(a_bar, initial: DotAmplitudes):
    """Occupation of dot 1 after applying ``TransferMatrix2(a_bar)`` to ``initial``.

    Vectorized over ``a_bar``.
    """
    a = np.asarray(a_bar, dtype=complex)
    b = initial.as_array()
    b1 = (a + 1) / 2 * b[0] + (a - 1) / 2 * b[1]
    b2 = (a - 1) / 2 * b[0] + (a + 1) / 2 * b[1]
    w1, w2 = np.abs(b1) ** 2, np.abs(b2) ** 2
    norm = w1 + w2
    if np.any(norm < UNDERFLOW):
        raise NumericBreakdown("conditional norm vanishes: the null record is impossible")
    out = w1 / norm
    return float(out) if out.ndim == 0 else out


def scaling_trace(params: PhysParams, x: float, times, initial: DotAmplitudes,
                  c: float | None = None) -> ConditionalTrace:
    """Conditional trace from the scaling formula on an arbitrary time grid."""
    require_aligned(params)
    c = params.band_offset if c is None else c
    t = np.asarray(times, dtype=float)
    a = np.atleast_1d(a_bar_scaling(t, params.gamma1, x, c))
    b = initial.as_array()
    b1 = (a + 1) / 2 * b[0] + (a - 1) / 2 * b[1]
    b2 = (a - 1) / 2 * b[0] + (a + 1) / 2 * b[1]
    return ConditionalTrace.from_amplitudes(t, b1, b2, "scaling", {"x": x, "c": c})
