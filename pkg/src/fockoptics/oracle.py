"""Brute-force reference engine on the full 2**n occupation space.

Shares nothing with the sparse engine except the element matrices: creators
are Jordan-Wigner Kronecker products, and a mode unitary U is lifted as
exp(sum_ij log(U)_ij c_i^dag c_j) instead of by re-expanding creation strings.
Intended for n <= 10 modes.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .circuit import Block, BeamSplitter, Circuit, Phase, Source, validate, InvalidCircuitError
from .optics import BS_MATRIX

MAX_MODES = 12

_Z = sp.csr_matrix(np.diag([1.0, -1.0]).astype(complex))
_I = sp.identity(2, dtype=complex, format="csr")
_RAISE = sp.csr_matrix(np.array([[0, 0], [1, 0]], dtype=complex))


@lru_cache(maxsize=None)
def creators(n: int) -> tuple:
    """c_j^dagger for j < n, mode 0 as the most significant tensor factor."""
    if n > MAX_MODES:
        raise ValueError(f"dense oracle limited to {MAX_MODES} modes, got {n}")
    ops = []
    for j in range(n):
        factors = [_Z] * j + [_RAISE] + [_I] * (n - j - 1)
        op = factors[0]
        for f in factors[1:]:
            op = sp.kron(op, f, format="csr")
        ops.append(op)
    return tuple(ops)


def one_body_generator(n: int, matrix: np.ndarray, targets: list[int]) -> sp.csr_matrix:
    log_u = sla.logm(np.asarray(matrix, dtype=complex))
    c = creators(n)
    gen = sp.csr_matrix((2**n, 2**n), dtype=complex)
    for a, i in enumerate(targets):
        for b, j in enumerate(targets):
            if abs(log_u[a, b]) > 0:
                gen = gen + log_u[a, b] * (c[i] @ c[j].conj().T)
    return gen


def apply_lifted(psi: np.ndarray, n: int, matrix: np.ndarray, targets: list[int]) -> np.ndarray:
    return expm_multiply(one_body_generator(n, matrix, targets), psi)


def dense_lifted_unitary(n: int, matrix: np.ndarray, targets: list[int]) -> np.ndarray:
    """Full 2**n x 2**n lift of a mode unitary."""
    return sla.expm(one_body_generator(n, matrix, targets).toarray())


def simulate_dense(circuit: Circuit, upto: int | None = None, bs_matrix: np.ndarray = BS_MATRIX) -> np.ndarray:
    problems = validate(circuit)
    if problems:
        raise InvalidCircuitError(problems)
    names = list(circuit.registry.labels)
    n = len(names)
    idx = {m: i for i, m in enumerate(names)}
    losses = circuit.loss_modes()
    c = creators(n)
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    elements = circuit.elements if upto is None else circuit.elements[:upto]
    for k, el in enumerate(elements):
        if isinstance(el, Source):
            raised = c[idx[el.mode]] @ psi
            psi = raised if el.probe is None else el.probe.beta * psi + el.probe.alpha * raised
        elif isinstance(el, BeamSplitter):
            psi = apply_lifted(psi, n, bs_matrix, [idx[el.mode1], idx[el.mode2]])
        elif isinstance(el, Phase):
            psi = apply_lifted(psi, n, np.array([[np.exp(1j * el.phi)]]), [idx[el.mode]])
        elif isinstance(el, Block):
            psi = apply_lifted(psi, n, np.array([[0, 1], [1, 0]], dtype=complex),
                               [idx[el.mode], idx[losses[k]]])
    return psi


def dense_distribution(psi: np.ndarray, n: int, monitored: list[int]) -> dict[tuple, float]:
    """Marginal click distribution on the monitored mode indices."""
    probs = np.abs(psi) ** 2
    probs = probs / probs.sum()
    out: dict[tuple, float] = {}
    for i in np.flatnonzero(probs):
        clicks = tuple((int(i) >> (n - 1 - j)) & 1 for j in monitored)
        out[clicks] = out.get(clicks, 0.0) + float(probs[i])
    return out
