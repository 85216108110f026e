"""Short-time expansion of repeated null-result measurements.

Expanding the evolution to second order in the interval ``tau``, each
null-result projection multiplies the bright component by ``1 - C tau**2``
with ``C = (1/2) sum_k (g_1k**2 + g_2k**2)``, while the dark component is an
exact eigenstate and is untouched.  Keeping ``t = n tau`` fixed and letting
``tau -> 0`` freezes the state.  ``C`` saturates for a Lorentzian band but
grows without bound for a flat band, where the expansion is meaningless.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import NumericBreakdown, ParameterError
from .model import DotAmplitudes, MeasurementProtocol, PhysParams, mixing_angle
from .oracle import DiscretizedReservoir, discretize
from .trace import ConditionalTrace

__all__ = [
    "ZenoCoefficient",
    "ExpansionWarning",
    "CScan",
    "compute_c",
    "psi_n_perturbative",
    "perturbative_trace",
    "c_divergence_scan",
    "VALIDITY_THRESHOLD",
]

#: n * C * tau**2 above which the truncated normalization is flagged
VALIDITY_THRESHOLD = 0.1


class ExpansionWarning(UserWarning):
    """The product ``n C tau**2`` is not small; the expansion is unreliable."""


@dataclass(frozen=True)
class ZenoCoefficient:
    c_value: float
    provenance: dict


def compute_c(res: DiscretizedReservoir) -> ZenoCoefficient:
    """Half the summed squared couplings of both dots."""
    sums = res.coupling_sums()
    return ZenoCoefficient(
        0.5 * float(sums.sum()),
        {"band": res.band, "n_modes": res.n_modes, "e_max": res.e_max,
         "gamma1": res.params.gamma1, "gamma2": res.params.gamma2,
         "bandwidth": res.params.bandwidth})


def psi_n_perturbative(alpha1: complex, alpha2: complex, C: ZenoCoefficient | float,
                       tau: float, n: int) -> tuple[complex, complex]:
    """State after ``n`` projections, as (dark, bright) coefficients.

    Uses the truncated normalization ``sqrt(1 - 2 n |alpha2|**2 C tau**2)``.

    Raises
    ------
    NumericBreakdown
        If the truncated normalization is not positive.
    """
    c = C.c_value if isinstance(C, ZenoCoefficient) else float(C)
    if abs(abs(alpha1) ** 2 + abs(alpha2) ** 2 - 1) > 1e-9:
        raise ParameterError("(alpha1, alpha2) must be normalized")
    if n < 0 or tau < 0:
        raise ParameterError("n and tau must be nonnegative")
    eps = n * c * tau**2
    if eps > VALIDITY_THRESHOLD:
        warnings.warn(f"n*C*tau^2 = {eps:.3g} exceeds {VALIDITY_THRESHOLD}",
                      ExpansionWarning, stacklevel=2)
    norm2 = 1 - 2 * eps * abs(alpha2) ** 2
    if norm2 <= 0:
        raise NumericBreakdown(f"expansion breakdown: normalization^2 = {norm2:.3g} <= 0")
    s = 1 / math.sqrt(norm2)
    return complex(alpha1) * s, complex(alpha2) * (1 - c * tau**2) ** n * s


def perturbative_trace(params: PhysParams, protocol: MeasurementProtocol,
                       initial: DotAmplitudes, C: ZenoCoefficient | None = None,
                       **discretize_kw) -> ConditionalTrace:
    """Dot occupations predicted by the short-time expansion at every measurement."""
    if params.e1 != params.e2:
        raise ParameterError("the expansion needs a dark state: e1 must equal e2")
    if protocol.n == 0:
        raise ParameterError("the expansion needs at least one measurement")
    if C is None:
        C = compute_c(discretize(params, **discretize_kw))
    ang = mixing_angle(params.coupling_ratio)
    init = initial.normalized()
    a1, a2 = ang.to_rotated(init)
    b = np.empty((protocol.n + 1, 2), dtype=complex)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ExpansionWarning)
        for k in range(protocol.n + 1):
            try:
                d, br = psi_n_perturbative(a1, a2, C, protocol.tau, k)
            except NumericBreakdown as exc:
                raise NumericBreakdown(f"{exc} at measurement {k}; {k} valid samples") from exc
            b[k] = d * ang.dark + br * ang.bright
    eps = protocol.n * C.c_value * protocol.tau**2
    if eps > VALIDITY_THRESHOLD:
        warnings.warn(f"n*C*tau^2 = {eps:.3g} exceeds {VALIDITY_THRESHOLD}",
                      ExpansionWarning, stacklevel=2)
    return ConditionalTrace.from_amplitudes(
        protocol.times, b[:, 0], b[:, 1], "perturbative",
        {"C": C.c_value, "n": protocol.n, "tau": protocol.tau, "x": protocol.x},
        null_prob=1 - 2 * np.arange(protocol.n + 1) * C.c_value * protocol.tau**2 * abs(a2) ** 2)


@dataclass(frozen=True)
class CScan:
    e_max: np.ndarray
    c_values: np.ndarray
    band: str
    slope: float | None  # linear-fit slope, flat band only


def c_divergence_scan(gamma1: float, gamma2: float, e_max_list, band: str = "lorentzian",
                      bandwidth: float | None = None,
                      spacing: float | None = None) -> CScan:
    """``C`` as a function of the energy cutoff at fixed grid spacing.

    ``bandwidth`` is required for the Lorentzian band.  The grid spacing
    defaults to ``bandwidth / 40`` (Lorentzian) or ``0.05`` (flat).
    """
    e = np.asarray(e_max_list, dtype=float)
    if e.ndim != 1 or e.size == 0 or np.any(np.diff(e) <= 0):
        raise ParameterError("e_max_list must be non-empty and strictly ascending")
    if band == "lorentzian":
        if bandwidth is None:
            raise ParameterError("a Lorentzian band needs a bandwidth")
        lam = bandwidth
        spacing = lam / 40 if spacing is None else spacing
    elif band == "flat":
        lam = bandwidth if bandwidth is not None else 1.0
        spacing = 0.05 if spacing is None else spacing
    else:
        raise ParameterError(f"unknown band {band!r}")
    params = PhysParams(0.0, 0.0, gamma1, gamma2, lam)
    cs = []
    for em in e:
        n = 2 * max(1, round(em / spacing)) + 1
        cs.append(compute_c(discretize(params, n, em, band)).c_value)
    cs = np.array(cs)
    slope = float(np.polyfit(e, cs, 1)[0]) if band == "flat" and e.size > 1 else None
    return CScan(e, cs, band, slope)
