"""Sparse fermionic Fock space.

Basis kets follow the Jordan-Wigner convention of the owning registry:

    |n> = prod_{j occupied, ascending} c_j^dagger |0>

so acting with c_j^dagger (or c_j) on |n> picks up (-1)**(number of occupied
modes with index < j).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

PRUNE_TOL = 1e-14
UNITARY_TOL = 1e-12

FockBasisState = tuple  # tuple[int, ...] of 0/1, one entry per registry mode


class RegistryMismatchError(KeyError):
    """A mode name is unknown to the registry, or two registries differ."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class NonUnitaryError(ValueError):
    pass


class ZeroStateError(ValueError):
    pass


class ModeRegistry:
    """Ordered, immutable set of named fermionic modes."""

    __slots__ = ("_labels", "_index")

    def __init__(self, labels: Iterable[str]):
        labels = tuple(labels)
        if len(set(labels)) != len(labels):
            dupes = sorted({m for m in labels if labels.count(m) > 1})
            raise ValueError(f"duplicate mode names: {dupes}")
        self._labels = labels
        self._index = {m: i for i, m in enumerate(labels)}

    @property
    def labels(self) -> tuple[str, ...]:
        return self._labels

    def index(self, mode: str) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise RegistryMismatchError(f"mode {mode!r} is not in registry {list(self._labels)}") from None

    def __contains__(self, mode) -> bool:
        return mode in self._index

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __eq__(self, other) -> bool:
        return isinstance(other, ModeRegistry) and self._labels == other._labels

    def __hash__(self) -> int:
        return hash(self._labels)

    def __repr__(self) -> str:
        return f"ModeRegistry({list(self._labels)!r})"

    def basis_state(self, occupied: Iterable[str]) -> FockBasisState:
        occ = [0] * len(self)
        for m in occupied:
            occ[self.index(m)] = 1
        return tuple(occ)

    def occupied_modes(self, key: FockBasisState) -> tuple[str, ...]:
        return tuple(m for m, n in zip(self._labels, key) if n)


class StateVector:
    """Immutable sparse superposition of Fock basis states."""

    __slots__ = ("registry", "_terms")

    def __init__(self, registry: ModeRegistry, terms: Mapping[FockBasisState, complex] | None = None):
        self.registry = registry
        clean = {}
        n = len(registry)
        for key, amp in (terms or {}).items():
            key = tuple(int(x) for x in key)
            if len(key) != n or any(x not in (0, 1) for x in key):
                raise ValueError(f"basis state {key} does not fit a {n}-mode fermionic registry")
            amp = complex(amp)
            if abs(amp) >= PRUNE_TOL:
                clean[key] = amp
        self._terms = clean

    @classmethod
    def _trusted(cls, registry, terms):
        # skips validation; caller guarantees keys are well formed
        obj = cls.__new__(cls)
        obj.registry = registry
        obj._terms = {k: a for k, a in terms.items() if abs(a) >= PRUNE_TOL}
        return obj

    @property
    def terms(self) -> dict[FockBasisState, complex]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def amplitude(self, key: FockBasisState) -> complex:
        return self._terms.get(tuple(key), 0j)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(a) ** 2 for a in self._terms.values())))

    def scaled(self, factor: complex) -> StateVector:
        return StateVector._trusted(self.registry, {k: factor * a for k, a in self._terms.items()})

    def normalized(self) -> StateVector:
        nrm = self.norm()
        if nrm == 0:
            raise ZeroStateError("cannot normalize the zero vector")
        return self.scaled(1 / nrm)

    def __add__(self, other: StateVector) -> StateVector:
        _check_same_registry(self, other)
        out = dict(self._terms)
        for k, a in other._terms.items():
            out[k] = out.get(k, 0j) + a
        return StateVector._trusted(self.registry, out)

    def __sub__(self, other: StateVector) -> StateVector:
        return self + other.scaled(-1)

    def __mul__(self, factor: complex) -> StateVector:
        return self.scaled(factor)

    __rmul__ = __mul__

    def particle_numbers(self) -> set[int]:
        return {sum(k) for k in self._terms}

    def to_dense(self) -> np.ndarray:
        """Amplitudes on the 2**n basis, mode 0 as the most significant bit."""
        n = len(self.registry)
        vec = np.zeros(2**n, dtype=complex)
        for key, amp in self._terms.items():
            vec[_dense_index(key)] = amp
        return vec

    def __repr__(self) -> str:
        parts = []
        for key, amp in sorted(self._terms.items()):
            label = ",".join(self.registry.occupied_modes(key)) or "0"
            parts.append(f"{amp:.6g}|{label}>")
        return "StateVector(" + (" + ".join(parts) or "0") + ")"


def _dense_index(key: Sequence[int]) -> int:
    idx = 0
    for bit in key:
        idx = (idx << 1) | bit
    return idx


def _check_same_registry(s1: StateVector, s2: StateVector):
    if s1.registry != s2.registry:
        raise RegistryMismatchError(f"registry mismatch: {s1.registry!r} vs {s2.registry!r}")


def vacuum(registry: ModeRegistry) -> StateVector:
    if len(registry) == 0:
        raise ValueError("registry is empty")
    return StateVector._trusted(registry, {(0,) * len(registry): 1 + 0j})


def basis(registry: ModeRegistry, occupied: Iterable[str], amplitude: complex = 1) -> StateVector:
    """Occupation-basis ket with the named modes filled."""
    return StateVector._trusted(registry, {registry.basis_state(occupied): complex(amplitude)})


def _ladder(state: StateVector, j: int, target: int) -> dict:
    out = {}
    for key, amp in state.items():
        if key[j] == target:
            continue
        sign = -1 if sum(key[:j]) % 2 else 1
        new = key[:j] + (target,) + key[j + 1:]
        out[new] = out.get(new, 0j) + sign * amp
    return out


def create(state: StateVector, mode: str) -> StateVector:
    j = state.registry.index(mode)
    return StateVector._trusted(state.registry, _ladder(state, j, 1))


def annihilate(state: StateVector, mode: str) -> StateVector:
    j = state.registry.index(mode)
    return StateVector._trusted(state.registry, _ladder(state, j, 0))


def inner_product(s1: StateVector, s2: StateVector) -> complex:
    """<s1|s2>, conjugate-linear in ``s1``."""
    _check_same_registry(s1, s2)
    small, big = (s1, s2) if len(s1) <= len(s2) else (s2, s1)
    total = 0j
    for key, _ in small.items():
        if key in big._terms:
            total += s1._terms[key].conjugate() * s2._terms[key]
    return total


def equal_up_to_global_phase(s1: StateVector, s2: StateVector, tol: float = 1e-10) -> bool:
    n1, n2 = s1.norm(), s2.norm()
    if n1 == 0 or n2 == 0:
        raise ZeroStateError("global-phase comparison needs two nonzero states")
    return abs(inner_product(s1, s2)) >= (1 - tol) * n1 * n2


@dataclass(frozen=True)
class ModeUnitary:
    """A d x d single-particle unitary acting on ``target_modes``.

    Column ``i`` describes where a particle entering ``target_modes[i]`` goes:
    c_i^dagger -> sum_j matrix[j, i] c_j^dagger.
    """

    matrix: np.ndarray
    target_modes: tuple[str, ...]

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=complex)
        if mat.ndim == 1 and mat.size == 1:
            mat = mat.reshape(1, 1)
        targets = tuple(self.target_modes)
        d = len(targets)
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} does not match {d} target modes")
        if len(set(targets)) != d:
            raise ValueError(f"target modes must be distinct, got {list(targets)}")
        if not np.all(np.isfinite(mat)):
            raise NonUnitaryError("matrix has non-finite entries")
        dev = np.max(np.abs(mat.conj().T @ mat - np.eye(d))) if d else 0.0
        if dev > UNITARY_TOL:
            raise NonUnitaryError(f"matrix is not unitary (max |U^dag U - I| = {dev:.3e})")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "target_modes", targets)

    def compose_after(self, first: ModeUnitary) -> ModeUnitary:
        """The unitary equivalent to applying ``first`` and then ``self``."""
        if first.target_modes != self.target_modes:
            raise ValueError("composition needs identical target modes")
        return ModeUnitary(self.matrix @ first.matrix, self.target_modes)


def apply_mode_unitary(state: StateVector, u: ModeUnitary) -> StateVector:
    """Lift ``u`` to the many-body space and apply it term by term.

    Each basis ket is rebuilt from its creation string, right to left, with
    every target creator replaced by its image under ``u``.
    """
    reg = state.registry
    tidx = [reg.index(m) for m in u.target_modes]
    pos = {j: i for i, j in enumerate(tidx)}
    mat = u.matrix
    n = len(reg)
    out: dict = {}
    for key, amp in state.items():
        # start from vacuum (as an occupation tuple) and re-create in reverse registry order
        partial = {(0,) * n: amp}
        for j in reversed(range(n)):
            if not key[j]:
                continue
            if j in pos:
                col = mat[:, pos[j]]
                images = [(tidx[r], col[r]) for r in range(len(tidx)) if col[r] != 0]
            else:
                images = [(j, 1.0)]
            nxt: dict = {}
            for occ, a in partial.items():
                for k, coeff in images:
                    if occ[k]:
                        continue
                    sign = -1 if sum(occ[:k]) % 2 else 1
                    new = occ[:k] + (1,) + occ[k + 1:]
                    nxt[new] = nxt.get(new, 0j) + sign * coeff * a
            partial = nxt
        for occ, a in partial.items():
            out[occ] = out.get(occ, 0j) + a
    return StateVector._trusted(reg, out)


def embed(state: StateVector, registry: ModeRegistry) -> StateVector:
    """Re-express ``state`` in a larger registry that lists the same modes first, in the same order."""
    old = state.registry.labels
    if registry.labels[: len(old)] != old:
        raise RegistryMismatchError("target registry must extend the source registry as a prefix")
    pad = (0,) * (len(registry) - len(old))
    return StateVector._trusted(registry, {k + pad: a for k, a in state.items()})
