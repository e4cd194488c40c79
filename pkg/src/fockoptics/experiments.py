"""Prebuilt interferometers, event classes, phase sweeps and shot sampling.

Mode layout
-----------
Both builders declare Alice's modes before Bob's, ``(a, c, b, d)``, followed by
the probe modes ``(q1, q2)``.  Splitters rewrite their modes in place, so the
named outputs live in these slots:

    e1 -> b, e2 -> a            (Eve's splitter on a, b)
    v1 -> c, w1 -> q1           (merge of c with probe q1)
    v2 -> d, w2 -> q2           (merge of d with probe q2)

With this order the occupation-basis amplitudes of the two-source state read
exactly like the source-ordered product kets |x>_A |y>_B.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .circuit import (
    BeamSplitter,
    Block,
    Circuit,
    DetectionPattern,
    Detector,
    Phase,
    Source,
    circuit_distribution,
)
from .fock import ModeRegistry, StateVector, basis
from .optics import ProbeSpec

DEFAULT_ALPHA = 0.1
DEFAULT_PROBE = ProbeSpec.from_alpha(DEFAULT_ALPHA)
DEFAULT_STEPS = 64

EVE_LABELS = ("E1", "E2")
MODE_ALIASES = {"e1": "b", "e2": "a", "v1": "c", "w1": "q1", "v2": "d", "w2": "q2"}


class EventClass(enum.Enum):
    NS_COINCIDENCE = "ns_coincidence"
    BOTH_SOUTH = "both_south"
    BOTH_NORTH = "both_north"
    DOUBLE_V1V2 = "double_v1v2"
    SINGLE_VICTOR = "single_victor"
    VACUUM = "vacuum"
    OTHER = "other"


def default_grid(steps: int = DEFAULT_STEPS, start: float = 0.0, end: float = 2 * math.pi) -> np.ndarray:
    """``steps`` uniform points on [start, end)."""
    if steps < 1:
        raise ValueError("need at least one grid point")
    return start + (end - start) * np.arange(steps) / steps


def build_fig1(phi: float) -> Circuit:
    """Two single-fermion sources split toward Eve (South) and Victor (North)."""
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi}")
    return Circuit(
        modes=("a", "c", "b", "d"),
        elements=(
            Source("a"),
            Source("b"),
            BeamSplitter("a", "c"),
            BeamSplitter("b", "d"),
            Phase("b", float(phi)),
            BeamSplitter("a", "b"),
            Detector("b", "E1"),
            Detector("a", "E2"),
            Detector("c", "C"),
            Detector("d", "D"),
        ),
    )


def build_fig2(phi: float, probe: ProbeSpec = DEFAULT_PROBE) -> Circuit:
    """The two-source interferometer with each northern branch merged with a local probe."""
    if not math.isfinite(phi):
        raise ValueError(f"phase must be finite, got {phi}")
    return Circuit(
        modes=("a", "c", "b", "d", "q1", "q2"),
        elements=(
            Source("a"),
            Source("b"),
            Source("q1", probe),
            Source("q2", probe),
            BeamSplitter("a", "c"),
            BeamSplitter("b", "d"),
            Phase("b", float(phi)),
            BeamSplitter("a", "b"),
            BeamSplitter("c", "q1"),
            BeamSplitter("d", "q2"),
            Detector("b", "E1"),
            Detector("a", "E2"),
            Detector("c", "V1"),
            Detector("d", "V2"),
        ),
    )


def eve_splitter_index(circuit: Circuit) -> int:
    """Index of Eve's splitter (the one mixing a and b) in a builtin circuit."""
    for i, el in enumerate(circuit.elements):
        if isinstance(el, BeamSplitter) and {el.mode1, el.mode2} == {"a", "b"}:
            return i
    raise ValueError("circuit has no splitter on modes a, b")


def heralded_branch_state(phi: float, registry: ModeRegistry, e1: str = "b") -> StateVector:
    """(|e1, d> - i e^{i phi} |c, e1>)/sqrt(2) in occupation-basis amplitudes."""
    r = 1 / math.sqrt(2)
    return basis(registry, [e1, "d"], r) + basis(registry, ["c", e1], -1j * np.exp(1j * phi) * r)


def experiment_kind(circuit: Circuit) -> str:
    return "fig2" if circuit.has_probes else "fig1"


def classify(pattern: DetectionPattern, which_experiment: str = "fig1") -> EventClass:
    """Sort a complete detection pattern into exactly one EventClass.

    Labels E1/E2 are Eve's (South); every other label is Victor's (North).
    """
    south = sum(c for lab, c in zip(pattern.labels, pattern.clicks) if lab in EVE_LABELS)
    north = sum(c for lab, c in zip(pattern.labels, pattern.clicks) if lab not in EVE_LABELS)
    if south == 0 and north == 0:
        return EventClass.VACUUM
    if which_experiment == "fig2":
        if south == 1 and north == 2 and {"V1", "V2"} <= set(pattern.labels) \
                and pattern["V1"] == 1 and pattern["V2"] == 1:
            return EventClass.DOUBLE_V1V2
        if south == 1 and north == 1:
            return EventClass.SINGLE_VICTOR
    elif which_experiment == "fig1":
        if south == 1 and north == 1:
            return EventClass.NS_COINCIDENCE
    else:
        raise ValueError(f"unknown experiment {which_experiment!r}")
    if south == 2 and north == 0:
        return EventClass.BOTH_SOUTH
    if south == 0 and north == 2:
        return EventClass.BOTH_NORTH
    return EventClass.OTHER


def _heralded(pattern: DetectionPattern, condition: str) -> bool:
    return all(pattern[lab] == (1 if lab == condition else 0)
               for lab in EVE_LABELS if lab in pattern.labels)


def classify_conditioned(pattern: DetectionPattern, which_experiment: str, condition: str | None) -> EventClass:
    """Like classify, but patterns where ``condition`` is not the lone Eve click count as OTHER."""
    if condition is not None and not _heralded(pattern, condition):
        return EventClass.OTHER
    return classify(pattern, which_experiment)


def class_probabilities(circuit: Circuit, condition: str | None = None,
                        which_experiment: str | None = None,
                        state: StateVector | None = None) -> dict[EventClass, float]:
    """Probability of every EventClass; all classes present, summing to 1."""
    kind = which_experiment or experiment_kind(circuit)
    if condition is not None and condition not in circuit.detectors:
        raise ValueError(f"condition detector {condition!r} not in circuit")
    out = {cls: 0.0 for cls in EventClass}
    for pattern, p in circuit_distribution(circuit, state).items():
        out[classify_conditioned(pattern, kind, condition)] += p
    return out


def class_probability(circuit: Circuit, event_class: EventClass, **kwargs) -> float:
    return class_probabilities(circuit, **kwargs)[event_class]


def sample_events(circuit: Circuit, shots: int, seed: int, condition: str | None = None,
                  which_experiment: str | None = None) -> dict[EventClass, int]:
    """Draw ``shots`` detection patterns from the exact distribution and count classes.

    Uses ``numpy.random.default_rng(seed)``; patterns are indexed in sorted
    click order, so equal seeds give equal counts.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    kind = which_experiment or experiment_kind(circuit)
    dist = circuit_distribution(circuit)
    patterns = list(dist)
    probs = np.array([dist[p] for p in patterns])
    probs = probs / probs.sum()
    rng = np.random.default_rng(seed)
    draws = np.bincount(rng.choice(len(patterns), size=shots, p=probs), minlength=len(patterns))
    counts = {cls: 0 for cls in EventClass}
    for pattern, k in zip(patterns, draws):
        counts[classify_conditioned(pattern, kind, condition)] += int(k)
    return counts


def row_seed(seed: int, row: int) -> int:
    """Independent per-row seed so rows can be sampled in any order."""
    return int(np.random.SeedSequence([seed, row]).generate_state(1)[0])


@dataclass
class SweepRow:
    phi: float
    probabilities: dict[EventClass, float]
    counts: dict[EventClass, int] | None = None
    shots: int = 0
    seed: int = 0


@dataclass
class SweepResult:
    rows: list[SweepRow] = field(default_factory=list)
    condition: str | None = None

    @property
    def phis(self) -> np.ndarray:
        return np.array([r.phi for r in self.rows])

    def column(self, event_class: EventClass) -> np.ndarray:
        return np.array([r.probabilities[event_class] for r in self.rows])


def sweep(make_circuit: Callable[[float], Circuit], phi_grid: Iterable[float],
          condition: str | None = "E1", shots: int | None = None, seed: int = 0,
          which_experiment: str | None = None) -> SweepResult:
    rows = []
    for i, phi in enumerate(phi_grid):
        circ = make_circuit(float(phi))
        probs = class_probabilities(circ, condition, which_experiment)
        row = SweepRow(float(phi), probs)
        if shots:
            row.shots, row.seed = shots, row_seed(seed, i)
            row.counts = sample_events(circ, shots, row.seed, condition, which_experiment)
        rows.append(row)
    return SweepResult(rows, condition)


def coincidence_curve(probe: ProbeSpec, phi_grid: Sequence[float], condition: str = "E1",
                      shots: int | None = None, seed: int = 0, branch: str = "none") -> SweepResult:
    """Exact class probabilities of the probed interferometer, heralded by ``condition``, per phase."""
    if len(phi_grid) == 0:
        raise ValueError("phase grid is empty")
    if condition not in EVE_LABELS:
        raise ValueError(f"condition must be one of {EVE_LABELS}, got {condition!r}")
    return sweep(lambda phi: blocked_variant(build_fig2(phi, probe), branch),
                 phi_grid, condition, shots, seed, "fig2")


_BRANCHES = {"none": (), "c": ("c",), "d": ("d",), "both": ("c", "d")}


def blocked_variant(circuit: Circuit, branch: str) -> Circuit:
    """Insert Block elements on the northern branch(es) ahead of Victor's merge splitters.

    The block lands right before the splitter that merges the branch with a
    probe mode, or before the first detector when there is no such splitter.
    """
    if branch not in _BRANCHES:
        raise ValueError(f"branch must be one of {sorted(_BRANCHES)}, got {branch!r}")
    modes = _BRANCHES[branch]
    if not modes:
        return circuit
    for m in modes:
        if m not in circuit.modes:
            raise ValueError(f"circuit has no mode {m!r}")
    probe_modes = {el.mode for el in circuit.elements if isinstance(el, Source) and el.probe is not None}
    elements = list(circuit.elements)
    for m in modes:
        at = next((i for i, el in enumerate(elements) if isinstance(el, Detector)), len(elements))
        for i, el in enumerate(elements):
            if isinstance(el, BeamSplitter) and m in (el.mode1, el.mode2) \
                    and ({el.mode1, el.mode2} - {m}) & probe_modes:
                at = i
                break
        elements.insert(at, Block(m))
    return circuit.with_elements(elements)
