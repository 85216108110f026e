"""Brute-force reference: the reservoir as N explicit modes.

The Lorentzian density of states is folded into the couplings on a uniform
energy grid ``[-e_max, e_max]`` so that ``sum_k g_jk**2`` approximates
``G_j * bandwidth / 2``.  The resulting real-symmetric ``(2 + N)`` Hamiltonian
is diagonalized once and reused for every step of a protocol.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import NumericBreakdown, ParameterError
from .model import DotAmplitudes, MeasurementProtocol, PhysParams
from .trace import UNDERFLOW, ConditionalTrace

__all__ = [
    "DiscretizedReservoir",
    "FullState",
    "discretize",
    "evolve_full",
    "project_null_full",
    "run_protocol_oracle",
    "run_unmeasured_oracle",
    "DEFAULT_N_MODES",
    "DEFAULT_E_MAX_OVER_LAMBDA",
]

DEFAULT_N_MODES = 4001
DEFAULT_E_MAX_OVER_LAMBDA = 50.0


@dataclass(frozen=True)
class Spectrum:
    energies: np.ndarray
    vectors: np.ndarray  # columns are eigenvectors


@dataclass(frozen=True, eq=False)
class DiscretizedReservoir:
    """Reservoir modes and their couplings to the two dots.

    Attributes
    ----------
    mode_energies : ndarray, shape (N,)
    couplings : ndarray, shape (2, N)
        Real couplings ``g_jk`` of dot ``j`` to mode ``k``.
    spacing : float
        Grid step ``2 * e_max / (N - 1)``.
    band : str
        ``"lorentzian"`` or ``"flat"``.
    """

    params: PhysParams
    mode_energies: np.ndarray
    couplings: np.ndarray
    e_max: float
    spacing: float
    band: str = "lorentzian"
    meta: dict = field(default_factory=dict)

    @property
    def n_modes(self) -> int:
        return self.mode_energies.size

    @property
    def recurrence_time(self) -> float:
        return 2 * math.pi / self.spacing

    def coupling_sums(self) -> np.ndarray:
        """``sum_k g_jk**2`` for each dot."""
        return np.sum(self.couplings**2, axis=1)

    def sum_rule_target(self) -> np.ndarray:
        """Grid-free value of :meth:`coupling_sums` for the same cutoff."""
        g = np.array([self.params.gamma1, self.params.gamma2])
        if self.band == "flat":
            return g * 2 * self.e_max / (2 * math.pi)
        lam = self.params.bandwidth
        return g * lam / math.pi * math.atan(self.e_max / lam)

    def sum_rule_deficit(self) -> float:
        """Relative shortfall of the coupling sum against the infinite band ``G*bandwidth/2``."""
        g = self.params.gamma1 + self.params.gamma2
        if g == 0 or self.band == "flat":
            return 0.0
        return 1.0 - float(self.coupling_sums().sum()) / (g * self.params.bandwidth / 2)

    def hamiltonian(self) -> np.ndarray:
        n = self.n_modes
        h = np.zeros((n + 2, n + 2))
        h[0, 0], h[1, 1] = self.params.e1, self.params.e2
        h[2:, 2:][np.diag_indices(n)] = self.mode_energies
        h[:2, 2:] = self.couplings
        h[2:, :2] = self.couplings.T
        return h

    @cached_property
    def spectrum(self) -> Spectrum:
        h = self.hamiltonian()
        try:
            w, v = np.linalg.eigh(h)
        except np.linalg.LinAlgError as exc:
            raise NumericBreakdown(
                f"eigensolver failed for {h.shape[0]}x{h.shape[0]} Hamiltonian "
                f"(norm {np.linalg.norm(h):.3e}): {exc}") from exc
        return Spectrum(w, v)

    def dot_block(self, tau: float) -> np.ndarray:
        """Dot-dot block of ``exp(-i H tau)``: evolution followed by a null projection."""
        sp = self.spectrum
        vd = sp.vectors[:2]
        return (vd * np.exp(-1j * sp.energies * tau)) @ vd.T


@functools.lru_cache(maxsize=4)
def discretize(params: PhysParams, n_modes: int = DEFAULT_N_MODES,
               e_max: float | None = None, band: str = "lorentzian") -> DiscretizedReservoir:
    """Uniform-grid discretization of the reservoir.

    ``n_modes`` must be odd so that zero energy lies on the grid.  Results are
    cached, so repeated calls with equal arguments share one eigendecomposition.
    """
    lam = params.bandwidth
    e_max = DEFAULT_E_MAX_OVER_LAMBDA * lam if e_max is None else float(e_max)
    if int(n_modes) != n_modes or n_modes < 3 or n_modes % 2 == 0:
        raise ParameterError(f"n_modes must be an odd integer >= 3, got {n_modes}")
    if band not in ("lorentzian", "flat"):
        raise ParameterError(f"unknown band {band!r}")
    if band == "lorentzian" and e_max < lam:
        raise ParameterError(f"e_max must be at least the bandwidth ({lam}), got {e_max}")
    if not e_max > 0:
        raise ParameterError(f"e_max must be positive, got {e_max}")
    n_modes = int(n_modes)
    energies = np.linspace(-e_max, e_max, n_modes)
    de = 2 * e_max / (n_modes - 1)
    shape = lam**2 / (energies**2 + lam**2) if band == "lorentzian" else np.ones(n_modes)
    widths = np.array([params.gamma1, params.gamma2])
    couplings = np.sqrt(widths[:, None] / (2 * math.pi) * shape[None, :] * de)
    for arr in (energies, couplings):
        arr.setflags(write=False)
    return DiscretizedReservoir(params, energies, couplings, e_max, de, band)


@dataclass(frozen=True)
class FullState:
    b1: complex
    b2: complex
    reservoir: np.ndarray

    @classmethod
    def from_dots(cls, amps: DotAmplitudes, n_modes: int) -> "FullState":
        return cls(amps.b1, amps.b2, np.zeros(n_modes, dtype=complex))

    @classmethod
    def from_array(cls, v) -> "FullState":
        return cls(complex(v[0]), complex(v[1]), np.asarray(v[2:], dtype=complex))

    def as_array(self) -> np.ndarray:
        return np.concatenate([[self.b1, self.b2], self.reservoir]).astype(complex)

    @property
    def norm2(self) -> float:
        return abs(self.b1) ** 2 + abs(self.b2) ** 2 + float(np.sum(np.abs(self.reservoir) ** 2))


def evolve_full(state: FullState, res: DiscretizedReservoir, tau: float) -> FullState:
    """Exact unitary evolution over ``tau`` in the eigenbasis of the full Hamiltonian."""
    if not tau > 0:
        raise ParameterError(f"tau must be positive, got {tau}")
    sp = res.spectrum
    coeff = sp.vectors.T @ state.as_array()
    return FullState.from_array(sp.vectors @ (np.exp(-1j * sp.energies * tau) * coeff))


def project_null_full(state: FullState) -> FullState:
    return FullState(state.b1, state.b2, np.zeros_like(state.reservoir))


def _oracle_meta(res: DiscretizedReservoir) -> dict:
    return {"n_modes": res.n_modes, "e_max": res.e_max,
            "sum_rule_deficit": res.sum_rule_deficit(),
            "recurrence_time": res.recurrence_time}


def _check_horizon(res: DiscretizedReservoir, t_total: float) -> None:
    if t_total >= res.recurrence_time:
        raise ParameterError(
            f"t_total={t_total:.6g} reaches the recurrence time {res.recurrence_time:.6g} "
            f"of the {res.n_modes}-mode grid; increase n_modes")


def run_protocol_oracle(params: PhysParams, protocol: MeasurementProtocol,
                        initial: DotAmplitudes, n_modes: int = DEFAULT_N_MODES,
                        e_max: float | None = None, *,
                        full_state: bool = False) -> ConditionalTrace:
    """Null-result protocol on the discretized reservoir.

    After each projection the state lies in the dot subspace, so one
    evolve-and-project step acts as the dot block of ``exp(-i H tau)``.  With
    ``full_state=True`` the reservoir amplitudes are carried explicitly
    instead (O(N^2) per step, for cross-checking).
    """
    res = discretize(params, n_modes, e_max)
    _check_horizon(res, protocol.t_total)
    meta = _oracle_meta(res) | {"n": protocol.n, "tau": protocol.tau, "x": protocol.x}
    if protocol.n == 0:
        tr = run_unmeasured_oracle(params, [0.0, protocol.t_total], initial, n_modes, e_max)
        return ConditionalTrace(tr.times, tr.p1, tr.p2, tr.null_prob, "oracle", meta)

    b = np.empty((protocol.n + 1, 2), dtype=complex)
    b[0] = initial.as_array()
    if full_state:
        s = FullState.from_dots(initial, res.n_modes)
        for k in range(1, protocol.n + 1):
            s = project_null_full(evolve_full(s, res, protocol.tau))
            b[k] = s.b1, s.b2
    else:
        m = res.dot_block(protocol.tau)
        v = b[0]
        for k in range(1, protocol.n + 1):
            v = m @ v
            b[k] = v
            if abs(v[0]) ** 2 + abs(v[1]) ** 2 < UNDERFLOW:
                raise NumericBreakdown(f"null-record probability underflow after {k} measurements")
    return ConditionalTrace.from_amplitudes(protocol.times, b[:, 0], b[:, 1], "oracle", meta)


def run_unmeasured_oracle(params: PhysParams, t_grid, initial: DotAmplitudes,
                          n_modes: int = DEFAULT_N_MODES,
                          e_max: float | None = None) -> ConditionalTrace:
    res = discretize(params, n_modes, e_max)
    t = np.asarray(t_grid, dtype=float)
    _check_horizon(res, float(t[-1]))
    sp = res.spectrum
    vd = sp.vectors[:2]
    coeff = vd.T @ initial.as_array()
    amps = (vd[:, None, :] * np.exp(-1j * np.outer(t, sp.energies))[None]) @ coeff
    return ConditionalTrace.from_amplitudes(t, amps[0], amps[1], "oracle", _oracle_meta(res))
