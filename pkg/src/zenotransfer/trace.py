"""Conditional occupation traces shared by every computation path."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import NumericBreakdown

__all__ = ["ConditionalTrace", "UNDERFLOW"]

# null-record probabilities below this are treated as an impossible record
UNDERFLOW = 1e-300


@dataclass(frozen=True)
class ConditionalTrace:
    """Conditional dot occupations sampled in time.

    Attributes
    ----------
    times : ndarray
        Ascending sample instants.
    p1, p2 : ndarray
        Occupations of dot 1 and dot 2 conditioned on the null record.
    null_prob : ndarray
        Unnormalized dot-subspace weight, i.e. the probability of the null
        record accumulated up to each sample.
    method : str
        Tag of the computation path that produced the trace.
    meta : dict
        Free-form metadata (discretization details, protocol, ...).
    """

    times: np.ndarray
    p1: np.ndarray
    p2: np.ndarray
    null_prob: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        t = np.asarray(self.times, dtype=float)
        if t.ndim != 1 or np.any(np.diff(t) < 0):
            raise ValueError("times must be a one-dimensional ascending sequence")
        for name in ("p1", "p2", "null_prob"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != t.shape:
                raise ValueError(f"{name} has shape {arr.shape}, expected {t.shape}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        t.setflags(write=False)
        object.__setattr__(self, "times", t)

    @classmethod
    def from_amplitudes(cls, times, b1, b2, method: str, meta: dict | None = None,
                        null_prob=None) -> "ConditionalTrace":
        """Build a trace from (possibly unnormalized) dot amplitudes.

        ``null_prob`` defaults to ``|b1|^2 + |b2|^2``; pass it explicitly when
        the amplitudes were renormalized along the way.
        """
        w1 = np.abs(np.asarray(b1)) ** 2
        w2 = np.abs(np.asarray(b2)) ** 2
        norm = w1 + w2
        bad = np.flatnonzero(norm < UNDERFLOW)
        if bad.size:
            raise NumericBreakdown(
                f"null-record probability underflow at sample {bad[0]} "
                f"(t={np.asarray(times)[bad[0]]:.6g}); {bad[0]} valid samples")
        return cls(times, w1 / norm, w2 / norm,
                   norm if null_prob is None else null_prob, method, dict(meta or {}))

    def __len__(self) -> int:
        return self.times.size

    def resample(self, times) -> np.ndarray:
        """P1 interpolated onto ``times`` with a cubic spline."""
        return CubicSpline(self.times, self.p1)(np.asarray(times, dtype=float))

    def max_abs_diff(self, other: "ConditionalTrace") -> float:
        """Max ``|dP1|`` against ``other``, resampled onto this trace's times if needed."""
        if other.times.shape == self.times.shape and np.allclose(other.times, self.times,
                                                                 rtol=1e-12, atol=1e-14):
            return float(np.max(np.abs(self.p1 - other.p1)))
        lo, hi = other.times[0], other.times[-1]
        mask = (self.times >= lo) & (self.times <= hi)
        return float(np.max(np.abs(self.p1[mask] - other.resample(self.times[mask]))))
