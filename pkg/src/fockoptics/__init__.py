"""Exact second-quantized simulation of few-fermion linear-optics experiments."""

from .circuit import (
    BeamSplitter,
    Block,
    Circuit,
    DetectionPattern,
    Detector,
    ImpossibleOutcomeError,
    InvalidCircuitError,
    Phase,
    Source,
    conditional_collapse,
    outcome_distribution,
    simulate,
    validate,
)
from .circuitfile import CircuitParseError, parse, serialize
from .experiments import (
    EventClass,
    blocked_variant,
    build_fig1,
    build_fig2,
    class_probabilities,
    class_probability,
    classify,
    coincidence_curve,
    sample_events,
)
from .fock import (
    ModeRegistry,
    ModeUnitary,
    StateVector,
    annihilate,
    apply_mode_unitary,
    create,
    equal_up_to_global_phase,
    inner_product,
    vacuum,
)
from .optics import ProbeSpec, beamsplitter_matrix, phase_matrix, probe_state

__version__ = "0.1.0"
