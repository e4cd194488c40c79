"""Randomized invariant suite: algebra, unitarity, oracle equivalence and null tests."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .circuit import BeamSplitter, Block, Circuit, Detector, Phase, Source, simulate
from .experiments import (
    EventClass,
    build_fig1,
    build_fig2,
    class_probabilities,
    coincidence_curve,
    default_grid,
)
from .fock import (
    ModeRegistry,
    ModeUnitary,
    StateVector,
    annihilate,
    apply_mode_unitary,
    create,
    inner_product,
)
from .optics import BS_MATRIX, ProbeSpec
from .oracle import simulate_dense


def random_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Gaussian matrix."""
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(registry: ModeRegistry, rng: np.random.Generator, n_terms: int = 6,
                 particles: int | None = None) -> StateVector:
    n = len(registry)
    terms = {}
    for _ in range(n_terms):
        if particles is None:
            key = tuple(int(b) for b in rng.integers(0, 2, n))
        else:
            occ = np.zeros(n, dtype=int)
            occ[rng.choice(n, size=particles, replace=False)] = 1
            key = tuple(int(b) for b in occ)
        terms[key] = complex(rng.standard_normal(), rng.standard_normal())
    return StateVector(registry, terms).normalized()


def random_registry(n: int) -> ModeRegistry:
    return ModeRegistry([f"m{i}" for i in range(n)])


def random_circuit(rng: np.random.Generator, max_modes: int = 10) -> Circuit:
    """A valid random circuit whose registry, loss modes included, has at most ``max_modes`` modes."""
    n = int(rng.integers(2, max_modes - 1))
    n_blocks = int(rng.integers(0, min(2, max_modes - n) + 1))
    modes = tuple(f"m{i}" for i in range(n))
    elements = []
    for m in modes:
        r = rng.random()
        if r < 0.35:
            elements.append(Source(m))
        elif r < 0.6:
            elements.append(Source(m, ProbeSpec.from_alpha(float(rng.random()))))
    body = []
    for _ in range(int(rng.integers(3, 12))):
        kind = rng.random()
        if kind < 0.6:
            i, j = rng.choice(n, size=2, replace=False)
            body.append(BeamSplitter(modes[i], modes[j]))
        else:
            body.append(Phase(modes[int(rng.integers(n))], float(rng.uniform(-math.pi, math.pi))))
    for _ in range(n_blocks):
        body.insert(int(rng.integers(0, len(body) + 1)), Block(modes[int(rng.integers(n))]))
    watched = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
    dets = [Detector(modes[i], f"D{i}") for i in sorted(watched)]
    return Circuit(modes, tuple(elements + body + dets))


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def _anticommutation(rng, cases):
    worst = 0
    for _ in range(cases):
        reg = random_registry(int(rng.integers(2, 9)))
        s = random_state(reg, rng)
        i, j = rng.choice(len(reg), size=2, replace=False)
        mi, mj = reg.labels[i], reg.labels[j]
        lhs = create(create(s, mi), mj)
        rhs = create(create(s, mj), mi).scaled(-1)
        if lhs.terms != rhs.terms:
            worst += 1
    return worst == 0, f"{cases} cases, {worst} mismatches"


def _exclusion(rng, cases):
    bad = 0
    for _ in range(cases):
        reg = random_registry(int(rng.integers(1, 9)))
        s = random_state(reg, rng)
        m = reg.labels[int(rng.integers(len(reg)))]
        if not create(create(s, m), m).is_zero() or not annihilate(annihilate(s, m), m).is_zero():
            bad += 1
    return bad == 0, f"{cases} cases, {bad} nonzero"


def _adjointness(rng, cases):
    worst = 0.0
    for _ in range(cases):
        reg = random_registry(int(rng.integers(2, 9)))
        s, t = random_state(reg, rng), random_state(reg, rng)
        m = reg.labels[int(rng.integers(len(reg)))]
        worst = max(worst, abs(inner_product(create(s, m), t) - inner_product(s, annihilate(t, m))))
    return worst < 1e-12, f"{cases} cases, max deviation {worst:.2e}"


def _bs_unitarity(perturb: float):
    mat = BS_MATRIX + perturb * np.array([[1, 0], [0, 0]])
    dev = float(np.max(np.abs(mat.conj().T @ mat - np.eye(2))))
    return dev <= 1e-15, f"max |B^dag B - I| = {dev:.2e}"


def _norm_preservation(rng, cases):
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(2, 9))
        reg = random_registry(n)
        d = int(rng.integers(1, min(n, 4) + 1))
        targets = tuple(reg.labels[k] for k in rng.choice(n, size=d, replace=False))
        u = ModeUnitary(random_unitary(d, rng), targets)
        s = random_state(reg, rng)
        out = apply_mode_unitary(s, u)
        worst = max(worst, abs(out.norm() - s.norm()))
        if any(sum(k) not in s.particle_numbers() for k, _ in out.items()):
            return False, "particle number changed"
    return worst < 1e-12, f"{cases} cases, max |norm change| {worst:.2e}"


def _functoriality(rng, cases):
    worst = 0.0
    for _ in range(cases):
        n = int(rng.integers(4, 9))
        reg = random_registry(n)
        d = int(rng.integers(2, 5))
        targets = tuple(reg.labels[k] for k in rng.choice(n, size=d, replace=False))
        u = ModeUnitary(random_unitary(d, rng), targets)
        v = ModeUnitary(random_unitary(d, rng), targets)
        s = random_state(reg, rng)
        two_step = apply_mode_unitary(apply_mode_unitary(s, u), v)
        one_step = apply_mode_unitary(s, v.compose_after(u))
        worst = max(worst, float(np.max(np.abs(two_step.to_dense() - one_step.to_dense()))))
    return worst < 1e-10, f"{cases} cases, max deviation {worst:.2e}"


def oracle_deviation(circuit: Circuit) -> float:
    return float(np.max(np.abs(simulate(circuit).to_dense() - simulate_dense(circuit))))


def _oracle(rng, cases):
    circuits = [build_fig1(0.7)] + [build_fig2(0.7, ProbeSpec.from_alpha(a)) for a in (0.0, 0.1, 0.3)]
    circuits += [random_circuit(rng) for _ in range(cases)]
    worst = max(oracle_deviation(c) for c in circuits)
    return worst < 1e-10, f"{len(circuits)} circuits, max amplitude deviation {worst:.2e}"


def _null_tests():
    grid = default_grid(16)
    spans = {}
    for branch in ("c", "d", "both"):
        col = coincidence_curve(ProbeSpec.from_alpha(0.1), grid, "E1", branch=branch).column(EventClass.DOUBLE_V1V2)
        spans[f"block {branch}"] = float(col.max() - col.min())
    single = [class_probabilities(build_fig2(phi))[EventClass.SINGLE_VICTOR] for phi in grid]
    spans["single victor"] = float(max(single) - min(single))
    ns = [class_probabilities(build_fig1(phi))[EventClass.NS_COINCIDENCE] for phi in grid]
    spans["fig1 ns"] = float(max(ns) - min(ns))
    worst = max(spans.values())
    return worst < 1e-12, ", ".join(f"{k}: {v:.1e}" for k, v in spans.items())


def run_checks(seed: int = 2024, cases: int = 200, oracle_cases: int = 20,
               perturb_bs: float = 0.0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    suite: list[tuple[str, Callable]] = [
        ("anticommutation", lambda: _anticommutation(rng, cases)),
        ("pauli exclusion", lambda: _exclusion(rng, cases)),
        ("adjointness", lambda: _adjointness(rng, cases)),
        ("beam splitter unitarity", lambda: _bs_unitarity(perturb_bs)),
        ("norm and number preservation", lambda: _norm_preservation(rng, cases)),
        ("functoriality", lambda: _functoriality(rng, cases)),
        ("oracle equivalence", lambda: _oracle(rng, oracle_cases)),
        ("phase-independence null tests", _null_tests),
    ]
    results = []
    for name, fn in suite:
        t0 = time.perf_counter()
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(CheckResult(name, bool(ok), detail, time.perf_counter() - t0))
    return results
