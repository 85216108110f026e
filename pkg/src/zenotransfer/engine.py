"""Stepwise null-result protocol on the exact pseudomode reduction.

A Lorentzian reservoir of half-width ``bandwidth`` enters the dot equations
only through the self-energy ``sqrt(G_j G_j') bandwidth / (2 (w + i bandwidth))``,
which has a single pole.  One damped auxiliary mode with energy ``-i*bandwidth``
and couplings ``g_j = sqrt(G_j * bandwidth / 2)`` reproduces it exactly, so the
dot + reservoir problem collapses to a 3x3 non-Hermitian generator.  A
null-result measurement removes every reservoir amplitude, which in the
reduced picture is zeroing the auxiliary amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import NumericBreakdown, ParameterError
from .model import DotAmplitudes, MeasurementProtocol, PhysParams
from .trace import UNDERFLOW, ConditionalTrace

__all__ = [
    "PseudomodeGenerator",
    "PseudomodeState",
    "lorentzian_self_energy",
    "build_pseudomode",
    "evolve_interval",
    "project_null",
    "run_protocol",
    "run_unmeasured",
]


def lorentzian_self_energy(params: PhysParams, omega: complex) -> np.ndarray:
    """Reservoir self-energy matrix ``F_jj'(omega)`` of the Lorentzian band."""
    lam = params.bandwidth
    sg = np.sqrt([params.gamma1, params.gamma2])
    return lam * np.outer(sg, sg) / (2 * (omega + 1j * lam))


@dataclass(frozen=True, eq=False)
class PseudomodeGenerator:
    """Effective Hamiltonian on (dot 1, dot 2, pseudomode)."""

    matrix: np.ndarray
    params: PhysParams

    @property
    def couplings(self) -> np.ndarray:
        return self.matrix[:2, 2].real.copy()

    def self_energy(self, omega: complex) -> np.ndarray:
        """Dot self-energy obtained by eliminating the pseudomode at frequency ``omega``."""
        g = self.matrix[:2, 2]
        return np.outer(g, g) / (omega - self.matrix[2, 2])

    def propagator(self, tau: float) -> np.ndarray:
        """``exp(-i H tau)`` by scaling and squaring (robust at exceptional points)."""
        return scipy.linalg.expm(-1j * tau * self.matrix)


@dataclass(frozen=True)
class PseudomodeState:
    b1: complex
    b2: complex
    bp: complex = 0j

    @classmethod
    def from_dots(cls, amps: DotAmplitudes) -> "PseudomodeState":
        return cls(amps.b1, amps.b2, 0j)

    @classmethod
    def from_array(cls, v) -> "PseudomodeState":
        return cls(complex(v[0]), complex(v[1]), complex(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.b1, self.b2, self.bp], dtype=complex)

    @property
    def dots(self) -> DotAmplitudes:
        return DotAmplitudes(self.b1, self.b2)

    @property
    def norm2(self) -> float:
        return abs(self.b1) ** 2 + abs(self.b2) ** 2 + abs(self.bp) ** 2


def build_pseudomode(params: PhysParams) -> PseudomodeGenerator:
    lam = params.bandwidth
    g1 = math.sqrt(params.gamma1 * lam / 2)
    g2 = math.sqrt(params.gamma2 * lam / 2)
    h = np.array([[params.e1, 0, g1],
                  [0, params.e2, g2],
                  [g1, g2, -1j * lam]], dtype=complex)
    h.setflags(write=False)
    return PseudomodeGenerator(h, params)


def evolve_interval(state: PseudomodeState, gen: PseudomodeGenerator,
                    tau: float) -> PseudomodeState:
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    return PseudomodeState.from_array(gen.propagator(tau) @ state.as_array())


def project_null(state: PseudomodeState) -> PseudomodeState:
    """Condition on an empty reservoir; the result is left unnormalized."""
    return PseudomodeState(state.b1, state.b2, 0j)


def run_protocol(params: PhysParams, protocol: MeasurementProtocol,
                 initial: DotAmplitudes, *, renormalize: str = "end",
                 samples_per_interval: int = 1) -> ConditionalTrace:
    """Alternate free evolution over ``tau`` with null-result projections.

    Parameters
    ----------
    renormalize : {"end", "step"}
        ``"end"`` keeps the unnormalized state and divides once per sample;
        ``"step"`` renormalizes after every projection and accumulates the
        null-record probability in log space.  Both give the same occupations.
    samples_per_interval : int
        Extra samples inside each interval (before the projection) for smooth
        plots; 1 records only at the projection instants.
    """
    if renormalize not in ("end", "step"):
        raise ParameterError(f"renormalize must be 'end' or 'step', got {renormalize!r}")
    if samples_per_interval < 1:
        raise ParameterError("samples_per_interval must be >= 1")
    gen = build_pseudomode(params)
    if protocol.n == 0:
        return run_unmeasured(params, [0.0, protocol.t_total], initial)

    m = samples_per_interval
    sub = gen.propagator(protocol.tau / m)
    step = np.linalg.matrix_power(sub, m) if m > 1 else sub
    s = PseudomodeState.from_dots(initial).as_array()
    total = protocol.n * m + 1
    b = np.empty((total, 2), dtype=complex)
    log_null = np.zeros(total)
    b[0] = s[:2]
    acc = 0.0
    k = 1
    for i in range(protocol.n):
        if m > 1:
            inner = s
            for _ in range(m - 1):
                inner = sub @ inner
                b[k] = inner[:2]
                log_null[k] = acc
                k += 1
        s = step @ s
        s[2] = 0.0
        if renormalize == "step":
            w = float(np.vdot(s, s).real)
            if w < UNDERFLOW:
                raise NumericBreakdown(
                    f"null-record probability underflow after {i + 1} measurements")
            acc += math.log(w)
            s /= math.sqrt(w)
        b[k] = s[:2]
        log_null[k] = acc
        k += 1

    times = np.linspace(0.0, protocol.t_total, total)
    times[::m] = protocol.times
    meta = {"n": protocol.n, "tau": protocol.tau, "x": protocol.x, "renormalize": renormalize}
    if renormalize == "end":
        return ConditionalTrace.from_amplitudes(times, b[:, 0], b[:, 1], "pseudomode", meta)
    w = np.abs(b[:, 0]) ** 2 + np.abs(b[:, 1]) ** 2
    return ConditionalTrace.from_amplitudes(times, b[:, 0], b[:, 1], "pseudomode", meta,
                                            null_prob=w * np.exp(log_null))


def run_unmeasured(params: PhysParams, t_grid, initial: DotAmplitudes) -> ConditionalTrace:
    """Single uninterrupted evolution sampled on ``t_grid``.

    ``null_prob`` here is the dot-subspace weight at each time; it is not
    monotone when reservoir amplitude flows back (bandwidth < 4 * width).
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or np.any(np.diff(t) < 0) or np.any(t < 0):
        raise ParameterError("t_grid must be ascending and nonnegative")
    gen = build_pseudomode(params)
    s0 = PseudomodeState.from_dots(initial).as_array()
    out = np.empty((t.size, 2), dtype=complex)
    for i, ti in enumerate(t):
        out[i] = s0[:2] if ti == 0.0 else (gen.propagator(ti) @ s0)[:2]
    return ConditionalTrace.from_amplitudes(t, out[:, 0], out[:, 1], "unmeasured")
