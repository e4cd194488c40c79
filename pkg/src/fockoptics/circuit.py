"""Circuit description, validation, exact simulation and detection statistics."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Union

from .fock import (
    ModeRegistry,
    RegistryMismatchError,
    StateVector,
    ZeroStateError,
    apply_mode_unitary,
    create,
    vacuum,
)
from .optics import ProbeSpec, apply_probe, beamsplitter_matrix, phase_matrix, swap_matrix

LOSS_SUFFIX = "~lost"


@dataclass(frozen=True)
class Source:
    """A single fermion (``probe is None``) or a vacuum/one-particle probe on ``mode``."""

    mode: str
    probe: ProbeSpec | None = None


@dataclass(frozen=True)
class BeamSplitter:
    mode1: str
    mode2: str


@dataclass(frozen=True)
class Phase:
    mode: str
    phi: float


@dataclass(frozen=True)
class Block:
    """Reroute everything in ``mode`` to a fresh, never-monitored loss mode."""

    mode: str


@dataclass(frozen=True)
class Detector:
    mode: str
    label: str


CircuitElement = Union[Source, BeamSplitter, Phase, Block, Detector]

_STAGE = {Source: 0, BeamSplitter: 1, Phase: 1, Block: 1, Detector: 2}
_STAGE_NAME = {0: "source", 1: "optical element", 2: "detector"}


def _element_modes(el) -> tuple[str, ...]:
    if isinstance(el, BeamSplitter):
        return (el.mode1, el.mode2)
    return (el.mode,)


class InvalidCircuitError(ValueError):
    def __init__(self, violations: list[str]):
        self.violations = list(violations)
        super().__init__("invalid circuit:\n  " + "\n  ".join(self.violations))


class ImpossibleOutcomeError(ValueError):
    """The requested detection outcome has probability zero."""


@dataclass(frozen=True)
class Circuit:
    modes: tuple[str, ...]
    elements: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        object.__setattr__(self, "elements", tuple(self.elements))

    def loss_modes(self) -> dict[int, str]:
        """Element index of every Block mapped to the loss mode it feeds."""
        out = {}
        used = set(self.modes)
        for i, el in enumerate(self.elements):
            if isinstance(el, Block):
                name, k = el.mode + LOSS_SUFFIX, 1
                while name in used:
                    k += 1
                    name = f"{el.mode}{LOSS_SUFFIX}{k}"
                used.add(name)
                out[i] = name
        return out

    @property
    def registry(self) -> ModeRegistry:
        return ModeRegistry(self.modes + tuple(self.loss_modes().values()))

    @property
    def detectors(self) -> dict[str, str]:
        """Detector label -> monitored mode, in circuit order."""
        return {el.label: el.mode for el in self.elements if isinstance(el, Detector)}

    @property
    def has_probes(self) -> bool:
        return any(isinstance(el, Source) and el.probe is not None for el in self.elements)

    def with_elements(self, elements: Iterable) -> Circuit:
        return Circuit(self.modes, tuple(elements))


def validate(circuit: Circuit) -> list[str]:
    """Every violation found in ``circuit``; an empty list means it is valid."""
    problems = []
    seen = set()
    for m in circuit.modes:
        if m in seen:
            problems.append(f"mode {m!r} declared more than once")
        seen.add(m)
    known = set(circuit.modes)
    sourced, labels, watched = set(), set(), set()
    stage = 0
    for i, el in enumerate(circuit.elements):
        kind = type(el).__name__
        if type(el) not in _STAGE:
            problems.append(f"element {i}: unsupported element type {kind}")
            continue
        for m in _element_modes(el):
            if m not in known:
                problems.append(f"element {i} ({kind}): unknown mode {m!r}")
        s = _STAGE[type(el)]
        if s < stage:
            problems.append(f"element {i} ({kind} on {'/'.join(_element_modes(el))}): "
                            f"{_STAGE_NAME[s]} placed after a {_STAGE_NAME[stage]}")
        stage = max(stage, s)
        if isinstance(el, Source):
            if el.mode in sourced:
                problems.append(f"element {i}: second source on mode {el.mode!r}")
            sourced.add(el.mode)
            if el.probe is not None and not isinstance(el.probe, ProbeSpec):
                problems.append(f"element {i}: probe must be a ProbeSpec")
        elif isinstance(el, BeamSplitter) and el.mode1 == el.mode2:
            problems.append(f"element {i}: beam splitter uses mode {el.mode1!r} twice")
        elif isinstance(el, Detector):
            if el.label in labels:
                problems.append(f"element {i}: duplicate detector label {el.label!r}")
            if el.mode in watched:
                problems.append(f"element {i}: mode {el.mode!r} already has a detector")
            labels.add(el.label)
            watched.add(el.mode)
    return problems


def simulate(circuit: Circuit, upto: int | None = None) -> StateVector:
    """Final state of ``circuit``, or the state after its first ``upto`` elements."""
    problems = validate(circuit)
    if problems:
        raise InvalidCircuitError(problems)
    registry = circuit.registry
    losses = circuit.loss_modes()
    state = vacuum(registry)
    elements = circuit.elements if upto is None else circuit.elements[:upto]
    for i, el in enumerate(elements):
        if isinstance(el, Source):
            state = create(state, el.mode) if el.probe is None else apply_probe(state, el.probe, el.mode)
        elif isinstance(el, BeamSplitter):
            state = apply_mode_unitary(state, beamsplitter_matrix(el.mode1, el.mode2))
        elif isinstance(el, Phase):
            state = apply_mode_unitary(state, phase_matrix(el.phi, el.mode))
        elif isinstance(el, Block):
            state = apply_mode_unitary(state, swap_matrix(el.mode, losses[i]))
    return state


@dataclass(frozen=True)
class DetectionPattern:
    """Click (1) or no click (0) for each detector label."""

    labels: tuple[str, ...]
    clicks: tuple[int, ...]

    @classmethod
    def from_dict(cls, d: Mapping[str, int]) -> DetectionPattern:
        return cls(tuple(d), tuple(int(v) for v in d.values()))

    def __getitem__(self, label: str) -> int:
        return self.clicks[self.labels.index(label)]

    def as_dict(self) -> dict[str, int]:
        return dict(zip(self.labels, self.clicks))

    def __str__(self) -> str:
        return " ".join(f"{lab}={c}" for lab, c in zip(self.labels, self.clicks))


def _mode_indices(state: StateVector, modes: Iterable[str]) -> list[int]:
    return [state.registry.index(m) for m in modes]


def outcome_distribution(state: StateVector, detectors: Mapping[str, str]) -> dict[DetectionPattern, float]:
    """Born-rule distribution over ideal number-resolving detectors.

    ``detectors`` maps label -> mode; unmonitored modes are traced out.
    """
    labels = tuple(detectors)
    idx = _mode_indices(state, detectors.values())
    total = sum(abs(a) ** 2 for _, a in state.items())
    if total == 0:
        raise ZeroStateError("outcome distribution of the zero vector")
    dist: dict[tuple, float] = {}
    for key, amp in state.items():
        clicks = tuple(key[j] for j in idx)
        dist[clicks] = dist.get(clicks, 0.0) + abs(amp) ** 2 / total
    return {DetectionPattern(labels, c): p for c, p in sorted(dist.items())}


def circuit_distribution(circuit: Circuit, state: StateVector | None = None,
                         labels: Iterable[str] | None = None) -> dict[DetectionPattern, float]:
    dets = circuit.detectors
    if labels is not None:
        unknown = [lab for lab in labels if lab not in dets]
        if unknown:
            raise RegistryMismatchError(f"unknown detector labels {unknown}")
        dets = {lab: dets[lab] for lab in labels}
    if state is None:
        state = simulate(circuit)
    return outcome_distribution(state, dets)


def conditional_collapse(state: StateVector, partial_pattern: Mapping[str, int],
                         detectors: Mapping[str, str] | None = None) -> tuple[float, StateVector]:
    """Project onto the outcomes matching ``partial_pattern`` and renormalize.

    Pattern keys are mode names, or detector labels when ``detectors`` is given.
    Raises ImpossibleOutcomeError when the outcome has probability zero.
    """
    if detectors is not None:
        missing = [lab for lab in partial_pattern if lab not in detectors]
        if missing:
            raise RegistryMismatchError(f"unknown detector labels {missing}")
        partial_pattern = {detectors[lab]: v for lab, v in partial_pattern.items()}
    constraints = [(state.registry.index(m), int(v)) for m, v in partial_pattern.items()]
    total = sum(abs(a) ** 2 for _, a in state.items())
    if total == 0:
        raise ZeroStateError("cannot condition the zero vector")
    kept = {k: a for k, a in state.items() if all(k[j] == v for j, v in constraints)}
    weight = sum(abs(a) ** 2 for a in kept.values())
    prob = weight / total
    if weight == 0:
        raise ImpossibleOutcomeError(f"outcome {dict(partial_pattern)} has probability 0")
    return prob, StateVector._trusted(state.registry, kept).normalized()
