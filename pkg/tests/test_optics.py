import math

import numpy as np
import pytest

from fockoptics.fock import ModeRegistry, apply_mode_unitary, basis, vacuum
from fockoptics.optics import (
    BS_MATRIX,
    ProbeSpec,
    apply_probe,
    beamsplitter_matrix,
    phase_matrix,
    probe_state,
)


def test_splitter_convention():
    u = beamsplitter_matrix("a", "c")
    assert u.target_modes == ("a", "c")
    np.testing.assert_allclose(u.matrix, np.array([[1, 1j], [1j, 1]]) / math.sqrt(2))
    assert np.max(np.abs(u.matrix.conj().T @ u.matrix - np.eye(2))) <= 1e-15


def test_splitter_squared_is_phased_swap():
    np.testing.assert_allclose(BS_MATRIX @ BS_MATRIX, [[0, 1j], [1j, 0]], atol=1e-15)


def test_splitter_rejects_duplicate_modes():
    with pytest.raises(ValueError):
        beamsplitter_matrix("a", "a")


def test_splitter_on_single_particle_and_vacuum():
    reg = ModeRegistry(["a", "c"])
    out = apply_mode_unitary(basis(reg, ["a"]), beamsplitter_matrix("a", "c"))
    assert out.amplitude((1, 0)) == pytest.approx(1 / math.sqrt(2))
    assert out.amplitude((0, 1)) == pytest.approx(1j / math.sqrt(2))
    assert apply_mode_unitary(vacuum(reg), beamsplitter_matrix("a", "c")).terms == {(0, 0): 1}


def test_phase_matrix():
    np.testing.assert_allclose(phase_matrix(0, "b").matrix, [[1]])
    np.testing.assert_allclose(phase_matrix(math.pi, "b").matrix, [[-1]], atol=1e-15)
    reg = ModeRegistry(["b"])
    out = apply_mode_unitary(basis(reg, ["b"]), phase_matrix(math.pi / 2, "b"))
    assert out.amplitude((1,)) == pytest.approx(1j)
    for phi in np.linspace(-7, 7, 11):
        assert abs(phase_matrix(phi, "b").matrix[0, 0]) == pytest.approx(1)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_phase_rejects_nonfinite(bad):
    with pytest.raises(ValueError):
        phase_matrix(bad, "b")


def test_probe_spec_validation():
    with pytest.raises(ValueError):
        ProbeSpec(0.5, 0.5)
    with pytest.raises(ValueError):
        ProbeSpec.from_alpha(1.5)
    spec = ProbeSpec.from_alpha(0.1)
    assert spec.beta == pytest.approx(math.sqrt(0.99))
    assert spec.is_canonical
    assert not ProbeSpec(0.6j, 0.8).is_canonical


@pytest.mark.parametrize("alpha", [0, 0.1, 0.3, 0.5, 1, 0.3 + 0.4j, -0.2])
def test_probe_state_norm(alpha):
    reg = ModeRegistry(["q"])
    assert probe_state(ProbeSpec.from_alpha(alpha), "q", reg).norm() == pytest.approx(1, abs=1e-12)


def test_probe_extremes():
    reg = ModeRegistry(["q"])
    assert probe_state(ProbeSpec.from_alpha(0), "q", reg).terms == {(0,): 1}
    assert probe_state(ProbeSpec.from_alpha(1), "q", reg).terms == {(1,): 1}


def test_two_probe_product_keeps_second_order_term():
    alpha = 0.1
    spec = ProbeSpec.from_alpha(alpha)
    reg = ModeRegistry(["q1", "q2"])
    both = apply_probe(probe_state(spec, "q1", reg), spec, "q2")
    beta = spec.beta
    assert both.amplitude((0, 0)) == pytest.approx(beta**2)
    assert both.amplitude((1, 0)) == pytest.approx(alpha * beta)
    assert both.amplitude((0, 1)) == pytest.approx(alpha * beta)
    # c_q2^dag c_q1^dag |0> = -|q1 q2> in registry order
    assert both.amplitude((1, 1)) == pytest.approx(-alpha**2)
    assert abs(both.amplitude((1, 1))) == pytest.approx(0.01)
    assert both.norm() == pytest.approx(1, abs=1e-12)


def test_probe_on_unknown_mode():
    with pytest.raises(KeyError):
        probe_state(ProbeSpec.from_alpha(0.1), "zz", ModeRegistry(["q"]))
