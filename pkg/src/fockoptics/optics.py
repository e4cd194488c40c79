"""Beam splitters, phase shifters and vacuum/one-particle probe sources."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fock import ModeRegistry, ModeUnitary, StateVector, create, vacuum

# One convention everywhere: transmitted amplitude 1/sqrt(2), reflected i/sqrt(2).
BS_MATRIX = np.array([[1, 1j], [1j, 1]], dtype=complex) / math.sqrt(2)
BS_MATRIX.setflags(write=False)

PROBE_NORM_TOL = 1e-12


@dataclass(frozen=True)
class ProbeSpec:
    """A local probe beta|0> + alpha|1>."""

    alpha: complex
    beta: complex

    def __post_init__(self):
        a, b = complex(self.alpha), complex(self.beta)
        if not (np.isfinite(a) and np.isfinite(b)):
            raise ValueError("probe amplitudes must be finite")
        if abs(abs(a) ** 2 + abs(b) ** 2 - 1) > PROBE_NORM_TOL:
            raise ValueError(f"|alpha|^2 + |beta|^2 = {abs(a) ** 2 + abs(b) ** 2!r}, expected 1")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_alpha(cls, alpha: complex) -> ProbeSpec:
        """Probe with the given one-particle amplitude and beta = +sqrt(1 - |alpha|^2)."""
        alpha = complex(alpha)
        if abs(alpha) > 1:
            raise ValueError(f"|alpha| = {abs(alpha)} exceeds 1")
        return cls(alpha, math.sqrt(max(0.0, 1 - abs(alpha) ** 2)))

    @property
    def is_canonical(self) -> bool:
        """True when alpha is real in [0, 1] and beta is the derived positive root."""
        a = self.alpha
        return (a.imag == 0 and 0 <= a.real <= 1
                and self.beta == complex(math.sqrt(max(0.0, 1 - a.real ** 2))))


def beamsplitter_matrix(mode1: str, mode2: str, matrix: np.ndarray | None = None) -> ModeUnitary:
    """50:50 splitter rewriting (mode1, mode2) in place.

    A particle entering ``mode1`` leaves as (|mode1> + i|mode2>)/sqrt(2).
    ``matrix`` overrides the default and exists for fault-injection checks.
    """
    if mode1 == mode2:
        raise ValueError(f"beam splitter needs two distinct modes, got {mode1!r} twice")
    return ModeUnitary(BS_MATRIX if matrix is None else matrix, (mode1, mode2))


def phase_matrix(phi: float, mode: str) -> ModeUnitary:
    phi = float(phi)
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi}")
    return ModeUnitary(np.array([[np.exp(1j * phi)]]), (mode,))


def swap_matrix(mode1: str, mode2: str) -> ModeUnitary:
    return ModeUnitary(np.array([[0, 1], [1, 0]], dtype=complex), (mode1, mode2))


def apply_probe(state: StateVector, spec: ProbeSpec, mode: str) -> StateVector:
    """Act with (beta + alpha c^dagger_mode) on ``state``."""
    return state.scaled(spec.beta) + create(state, mode).scaled(spec.alpha)


def probe_state(spec: ProbeSpec, mode: str, registry: ModeRegistry) -> StateVector:
    return apply_probe(vacuum(registry), spec, mode)
