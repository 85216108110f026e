"""Parameters, amplitude containers and the static structure of the two-dot model.

Energies and rates are measured in units of the decay width (hbar = 1).  The
two dots couple to a common reservoir whose density of states is a Lorentzian
of half-width ``bandwidth`` centred at zero energy.  When both dots sit at the
same energy and the coupling ratio is energy independent, one superposition
of the dot states (the dark state) decouples from the reservoir entirely.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import TYPE_CHECKING

import numpy as np

from .errors import ParameterError

if TYPE_CHECKING:
    from .oracle import DiscretizedReservoir

__all__ = [
    "PhysParams",
    "DotAmplitudes",
    "MixingAngle",
    "MeasurementProtocol",
    "validate_params",
    "require_aligned",
    "mixing_angle",
    "dark_state_residual",
    "asymptotic_conditional_occupation",
]


@dataclass(frozen=True)
class PhysParams:
    """Full model parameterization.

    Parameters
    ----------
    e1, e2 : float
        Dot levels.
    gamma1, gamma2 : float
        Markovian decay widths ``2*pi*Omega_j**2*rho0`` of each dot.
    bandwidth : float
        Lorentzian half-width of the reservoir density of states.
    c : float, optional
        Band-offset ratio ``E / bandwidth`` for the aligned scaling formula.
        When omitted it is inferred from ``e1 / bandwidth``.
    """

    e1: float = 0.0
    e2: float = 0.0
    gamma1: float = 1.0
    gamma2: float = 1.0
    bandwidth: float = 3.0
    c: float | None = None

    def __post_init__(self) -> None:
        validate_params(self)

    @classmethod
    def aligned(cls, energy: float = 0.0, width: float = 1.0,
                bandwidth: float = 3.0) -> "PhysParams":
        return cls(energy, energy, width, width, bandwidth)

    @property
    def is_aligned(self) -> bool:
        return self.e1 == self.e2 and self.gamma1 == self.gamma2

    @property
    def coupling_ratio(self) -> float:
        """``Omega_1 / Omega_2 = sqrt(gamma1 / gamma2)``; ``inf`` if dot 2 is decoupled."""
        if self.gamma2 == 0.0:
            return math.inf if self.gamma1 > 0 else 0.0
        return math.sqrt(self.gamma1 / self.gamma2)

    @property
    def band_offset(self) -> float:
        return self.c if self.c is not None else self.e1 / self.bandwidth

    def with_(self, **changes) -> "PhysParams":
        return replace(self, **changes)


def validate_params(p: PhysParams) -> PhysParams:
    """Check the parameter bounds and return ``p`` unchanged.

    Raises
    ------
    ParameterError
        Naming the offending field and the violated bound.
    """
    for name in ("e1", "e2", "gamma1", "gamma2", "bandwidth"):
        if not math.isfinite(getattr(p, name)):
            raise ParameterError(f"{name}: value must be finite, got {getattr(p, name)!r}")
    if p.c is not None and not math.isfinite(p.c):
        raise ParameterError(f"c: value must be finite, got {p.c!r}")
    if not p.bandwidth > 0:
        raise ParameterError(f"bandwidth: bandwidth must be positive, got {p.bandwidth}")
    for name in ("gamma1", "gamma2"):
        if getattr(p, name) < 0:
            raise ParameterError(f"{name}: width must be nonnegative, got {getattr(p, name)}")
    return p


def require_aligned(p: PhysParams) -> None:
    if p.e1 != p.e2:
        raise ParameterError(f"aligned levels required, got e1={p.e1}, e2={p.e2}")
    if p.gamma1 != p.gamma2:
        raise ParameterError(
            f"equal widths required, got gamma1={p.gamma1}, gamma2={p.gamma2}")


@dataclass(frozen=True)
class DotAmplitudes:
    """Complex amplitudes on the two dots, possibly unnormalized."""

    b1: complex
    b2: complex

    def __post_init__(self) -> None:
        object.__setattr__(self, "b1", complex(self.b1))
        object.__setattr__(self, "b2", complex(self.b2))

    @classmethod
    def from_array(cls, v) -> "DotAmplitudes":
        return cls(complex(v[0]), complex(v[1]))

    def as_array(self) -> np.ndarray:
        return np.array([self.b1, self.b2], dtype=complex)

    @property
    def norm2(self) -> float:
        return abs(self.b1) ** 2 + abs(self.b2) ** 2

    def normalized(self) -> "DotAmplitudes":
        n2 = self.norm2
        if n2 == 0.0:
            raise ParameterError("cannot normalize the zero state")
        s = 1.0 / math.sqrt(n2)
        return DotAmplitudes(self.b1 * s, self.b2 * s)

    @property
    def occupations(self) -> tuple[float, float]:
        """Conditional occupations ``(P1, P2)`` within the dot subspace."""
        n2 = self.norm2
        if n2 == 0.0:
            raise ParameterError("conditional occupation undefined for the zero state")
        p1 = abs(self.b1) ** 2 / n2
        return p1, abs(self.b2) ** 2 / n2


@dataclass(frozen=True)
class MixingAngle:
    """Rotation between the dot basis and the dark/bright basis.

    The dark state is ``cos_beta |1> - sin_beta |2>`` and the bright state
    ``sin_beta |1> + cos_beta |2>``.
    """

    cos_beta: float
    sin_beta: float

    @property
    def dark(self) -> np.ndarray:
        return np.array([self.cos_beta, -self.sin_beta])

    @property
    def bright(self) -> np.ndarray:
        return np.array([self.sin_beta, self.cos_beta])

    def to_rotated(self, amps: DotAmplitudes) -> tuple[complex, complex]:
        """Coefficients ``(alpha1, alpha2)`` on (dark, bright)."""
        v = amps.as_array()
        return complex(self.dark @ v), complex(self.bright @ v)

    def from_rotated(self, alpha1: complex, alpha2: complex) -> DotAmplitudes:
        return DotAmplitudes.from_array(alpha1 * self.dark + alpha2 * self.bright)


def mixing_angle(gamma: float) -> MixingAngle:
    """Mixing angle for coupling ratio ``gamma = Omega_1 / Omega_2``.

    ``gamma = inf`` (dot 2 decoupled) gives ``(0, 1)``.
    """
    if not gamma >= 0:
        raise ParameterError(f"coupling ratio must be nonnegative, got {gamma}")
    if math.isinf(gamma):
        return MixingAngle(0.0, 1.0)
    r = math.hypot(1.0, gamma)
    return MixingAngle(1.0 / r, gamma / r)


@dataclass(frozen=True)
class MeasurementProtocol:
    """A sequence of ``n`` equally spaced null-result measurements over ``t_total``.

    ``n = 0`` means no intermediate measurement at all; the interval is then
    infinite and so is ``x``.
    """

    n: int
    t_total: float
    bandwidth: float
    tau: float = field(init=False)
    x: float = field(init=False)

    def __post_init__(self) -> None:
        if int(self.n) != self.n or self.n < 0:
            raise ParameterError(f"n: measurement count must be a nonnegative integer, got {self.n}")
        if not (self.t_total > 0 and math.isfinite(self.t_total)):
            raise ParameterError(f"t_total: must be positive and finite, got {self.t_total}")
        if not self.bandwidth > 0:
            raise ParameterError(f"bandwidth: bandwidth must be positive, got {self.bandwidth}")
        object.__setattr__(self, "n", int(self.n))
        tau = self.t_total / self.n if self.n else math.inf
        object.__setattr__(self, "tau", tau)
        object.__setattr__(self, "x", self.bandwidth * tau)

    @classmethod
    def from_x(cls, x: float, t_total: float, bandwidth: float) -> "MeasurementProtocol":
        """Derive ``n = round(t_total*bandwidth/x)`` and land exactly on ``t_total``."""
        if not x > 0:
            raise ParameterError(f"x: x must be positive, got {x}")
        n = max(1, round(t_total * bandwidth / x))
        return cls(n, t_total, bandwidth)

    @classmethod
    def from_tau(cls, tau: float, t_total: float, bandwidth: float) -> "MeasurementProtocol":
        if not tau > 0:
            raise ParameterError(f"tau: tau must be positive, got {tau}")
        n = max(1, round(t_total / tau))
        return cls(n, t_total, bandwidth)

    @property
    def nu(self) -> float:
        return 1.0 / self.tau

    @property
    def times(self) -> np.ndarray:
        """Measurement instants including ``t = 0``."""
        if self.n == 0:
            return np.array([0.0, self.t_total])
        return np.arange(self.n + 1) * self.tau


def dark_state_residual(modes: "DiscretizedReservoir", gamma: float) -> float:
    """Return ``||(H - e1)|dark>||`` over the full discretized Hilbert space.

    Raises
    ------
    ParameterError
        If ``gamma`` does not match the coupling ratio the reservoir was built with.
    """
    g1, g2 = modes.couplings
    denom = float(g2 @ g2)
    fitted = math.inf if denom == 0.0 else float(g1 @ g2) / denom
    if math.isinf(fitted) or math.isinf(gamma):
        if not (math.isinf(fitted) and math.isinf(gamma)):
            raise ParameterError(f"gamma={gamma} does not match the coupling ratio {fitted}")
    elif abs(fitted - gamma) > 1e-2 * max(1.0, gamma):
        raise ParameterError(f"gamma={gamma} does not match the coupling ratio {fitted:.6g}")
    ang = mixing_angle(gamma)
    psi = np.zeros(modes.n_modes + 2)
    psi[:2] = ang.dark
    h = modes.hamiltonian()
    return float(np.linalg.norm(h @ psi - modes.params.e1 * psi))


def asymptotic_conditional_occupation(gamma: float,
                                      initial: DotAmplitudes) -> tuple[float, float]:
    """Long-time occupations of the dots, conditioned on an empty reservoir.

    Only the dark-state component of ``initial`` survives, so the result is
    ``(cos^2 beta, sin^2 beta)`` whenever that component is nonzero.
    """
    ang = mixing_angle(gamma)
    overlap, _ = ang.to_rotated(initial)
    if abs(overlap) < 1e-14 * math.sqrt(max(initial.norm2, 1e-300)):
        raise ParameterError(
            "initial state has no dark-state component; the conditional state "
            "at t -> inf is undefined")
    return ang.from_rotated(overlap, 0.0).occupations
