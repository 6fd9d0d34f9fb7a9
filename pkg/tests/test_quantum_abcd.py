import math

import numpy as np
import pytest

from optics.errors import DomainError, NonNormalizableError
from optics.fock_engine import fidelity, interior_residual, interior_size, vacuum
from optics.fresnel_operator import fresnel_normal_order
from optics.matrix_optics import compose, free_space, magnifier, random_ray_matrix
from optics.models import DampedOscillatorParams, QParam, RayMatrix, SqueezedVacuumDescriptor
from optics.quantum_abcd import (abcd_law_apply, abcd_law_bar_check, damped_evolution,
                                 damped_matrices, damped_q_pair, damped_state_closed_form,
                                 descriptor_from_matrix, effective_hamiltonian_residual,
                                 heisenberg_transform_check, q_parameter,
                                 squeezed_vacuum_from_q, u_inverse, u_operator, vacuum_output,
                                 vacuum_through)

DIM = 128


def test_q_parameter_examples():
    assert q_parameter(RayMatrix.identity()).q == pytest.approx(1j)
    assert q_parameter(free_space(0.5)).q == pytest.approx(-0.5 + 1j)
    m = RayMatrix(a=2.0, b=1.0, c=1.0, d=1.0)
    assert q_parameter(m).q.imag == pytest.approx(1 / (m.c ** 2 + m.d ** 2))


def test_vacuum_output_of_magnifier_is_squeezed_vacuum():
    sigma = 0.3
    state = vacuum_output(magnifier(math.exp(sigma)), 64)
    expected = np.zeros(64)
    for n in range(32):
        expected[2 * n] = (math.cosh(sigma) ** -0.5 * (math.tanh(sigma) / 2) ** n
                           * math.sqrt(math.factorial(2 * n)) / math.factorial(n))
    assert np.allclose(state.amplitudes, expected, rtol=1e-12, atol=1e-15)
    assert state.norm == pytest.approx(1.0, abs=1e-10)


def test_descriptor_state_matches_operator_column(mild_matrix):
    for _ in range(3):
        m = mild_matrix()
        from_q = squeezed_vacuum_from_q(descriptor_from_matrix(m, DIM))
        assert np.allclose(from_q.amplitudes, vacuum_output(m, DIM).amplitudes, atol=1e-12)
        assert np.allclose(from_q.amplitudes[1::2], 0.0)


def test_abcd_law_three_routes_agree(mild_matrix):
    for _ in range(5):
        m1, m2 = mild_matrix(), mild_matrix()
        direct = fresnel_normal_order(m2, DIM) @ (fresnel_normal_order(m1, DIM) @ vacuum(DIM))
        descriptor = abcd_law_apply(m2, descriptor_from_matrix(m1, DIM))
        law = squeezed_vacuum_from_q(descriptor)
        composed = vacuum_output(compose(m2, m1), DIM)
        assert descriptor.q.q == pytest.approx(q_parameter(compose(m2, m1)).q, rel=1e-12)
        assert np.allclose(law.amplitudes, composed.amplitudes, atol=1e-10)
        assert 1.0 - fidelity(direct, law) < 1e-9


def test_abcd_law_identity_keeps_descriptor():
    m = RayMatrix(a=2.0, b=1.0, c=1.0, d=1.0)
    d = descriptor_from_matrix(m, 16)
    out = abcd_law_apply(RayMatrix.identity(), d)
    assert out.q.q == pytest.approx(d.q.q, rel=1e-14)
    assert out.prefactor == pytest.approx(d.prefactor, rel=1e-14)


def test_bar_form_agrees(mild_matrix):
    m1, m2 = mild_matrix(), mild_matrix()
    q2, deviation = abcd_law_bar_check(m2, m1)
    assert deviation < 1e-12
    law = abcd_law_apply(m2, descriptor_from_matrix(m1, 8))
    assert q2 == pytest.approx(law.q.q, rel=1e-12)


def test_non_normalizable_descriptor():
    with pytest.raises(NonNormalizableError):
        SqueezedVacuumDescriptor(q=QParam(q=1.0 + 0.0j), prefactor=1.0, dim=4)


def test_bar_form_detects_wrong_composition():
    """q̄ 形式与 m1·m2（顺序颠倒）的 q 不一致"""
    m1 = RayMatrix(a=2.0, b=1.0, c=1.0, d=1.0)
    m2 = free_space(1.0)
    q2, deviation = abcd_law_bar_check(m2, m1)
    assert deviation < 1e-12
    assert abs(q2 - q_parameter(compose(m1, m2)).q) > 0.1
    q2_lens, _ = abcd_law_bar_check(RayMatrix(a=0.0, b=-1.0, c=1.0, d=0.0), m1)
    assert q2_lens.imag > 0


def test_damped_parameters_must_be_underdamped():
    with pytest.raises(DomainError):
        DampedOscillatorParams(gamma=1.0, omega0=1.0)


def test_damped_q_values():
    p = DampedOscillatorParams(gamma=0.3, omega0=1.0, t=0.5)
    q1, q2 = damped_q_pair(p)
    assert q1.q == pytest.approx(1 / (0.3 - 1j), abs=1e-12)
    assert q2.q == pytest.approx(math.exp(-0.3) / (0.3 - 1j), abs=1e-12)
    lens, shrink = damped_matrices(p)
    assert lens.c == pytest.approx(-0.3)
    assert shrink.a == pytest.approx(math.exp(-0.15))


@pytest.mark.parametrize("gamma, t", [(0.1, 0.25), (0.3, 1.0)])
def test_damped_closed_form_matches_operator_route(gamma, t):
    p = DampedOscillatorParams(gamma=gamma, omega0=1.0, t=t)
    closed = damped_state_closed_form(p, DIM)
    operator_route = u_inverse(p, DIM) @ vacuum(DIM)
    lens, shrink = damped_matrices(p)
    law_route = squeezed_vacuum_from_q(abcd_law_apply(shrink, descriptor_from_matrix(lens, DIM)))
    assert 1.0 - fidelity(closed, operator_route) < 1e-9
    assert 1.0 - fidelity(closed, law_route) < 1e-12


def test_u_and_inverse_cancel():
    p = DampedOscillatorParams(gamma=0.3, omega0=1.0, t=0.5)
    product = u_operator(p, 64).entries @ u_inverse(p, 64).entries
    assert interior_residual(product - np.eye(64), interior_size(64)) < 1e-10


def test_heisenberg_transform():
    residual_x, residual_p = heisenberg_transform_check(
        DampedOscillatorParams(gamma=0.3, omega0=1.0, t=0.5), DIM)
    assert residual_x < 1e-7
    assert residual_p < 1e-7


def test_effective_hamiltonian_is_time_independent():
    residuals = [effective_hamiltonian_residual(
        DampedOscillatorParams(gamma=0.2, omega0=1.0, t=t), DIM) for t in (0.3, 0.6)]
    assert max(residuals) < 1e-6


def test_effective_hamiltonian_without_damping():
    assert effective_hamiltonian_residual(
        DampedOscillatorParams(gamma=0.0, omega0=1.0, t=0.7), 32) < 1e-10


def test_damped_evolution_rows():
    rows = damped_evolution(DampedOscillatorParams(gamma=0.3, omega0=1.0), 1.0, 4, 64)
    assert len(rows) == 5
    assert [row[0] for row in rows] == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    for t, re_q2, im_q2, magnitude, fid in rows:
        expected = math.exp(-0.6 * t) / (0.3 - 1j)
        assert complex(re_q2, im_q2) == pytest.approx(expected, abs=1e-12)
        assert 0.0 <= magnitude < 0.5
        assert fid > 1.0 - 1e-9
    with pytest.raises(DomainError):
        damped_evolution(DampedOscillatorParams(gamma=0.3), 1.0, 0, 16)


def test_abcd_law_three_routes_full_range(rng):
    """元素不超过 2 的矩阵对，直接路径在 8 倍维数上相乘"""
    for _ in range(5):
        m1 = random_ray_matrix(rng, max_entry=2.0)
        m2 = random_ray_matrix(rng, max_entry=2.0)
        direct = vacuum_through([m1, m2], DIM, padding=8)
        law = squeezed_vacuum_from_q(abcd_law_apply(m2, descriptor_from_matrix(m1, DIM)))
        composed = vacuum_output(compose(m2, m1), DIM)
        assert direct.dim == DIM
        assert 1.0 - fidelity(direct, law) < 1e-7
        assert 1.0 - fidelity(law, composed) < 1e-7
        assert 1.0 - fidelity(direct, composed) < 1e-7


def test_vacuum_through_single_element():
    m = RayMatrix(a=2.0, b=1.0, c=1.0, d=1.0)
    assert np.allclose(vacuum_through([m], 32, padding=4).amplitudes,
                       vacuum_output(m, 32).amplitudes, atol=1e-14)
    assert np.allclose(vacuum_through([], 8).amplitudes, vacuum(8).amplitudes)
