import math

import numpy as np
import pytest
from scipy.integrate import trapezoid

from optics.errors import DomainError, NonHermitianError, RangeError, SingularExponentError
from optics.fock_engine import (coherent_state, exp_general, exp_hermitian,
                                exp_quadrature_square, expectation, fidelity, hermite_function,
                                hermite_functions, interior_residual, interior_size,
                                ladder_matrices, nilpotency_index, normal_ordered_gaussian,
                                number_operator, phase_space_state, quadrature_eigensystem,
                                quadrature_function, quadrature_matrices, quadrature_squares,
                                square_exponents, vacuum)
from optics.models import FockOperator, GaussianExponents


def test_ladder_matrices_two_levels():
    a, adag = ladder_matrices(2)
    assert np.array_equal(a.entries, np.array([[0, 1], [0, 0]], dtype=complex))
    assert np.array_equal(adag.entries, a.entries.T)


def test_dimension_must_be_at_least_two():
    with pytest.raises(DomainError):
        ladder_matrices(1)


def test_commutator_defect_sits_in_the_corner():
    a, adag = ladder_matrices(6)
    commutator = a.entries @ adag.entries - adag.entries @ a.entries
    assert np.allclose(np.diag(commutator), [1, 1, 1, 1, 1, -5])
    assert np.allclose(commutator - np.diag(np.diag(commutator)), 0.0)


def test_quadratures_are_hermitian():
    x, p = quadrature_matrices(8)
    assert np.allclose(x.entries, x.entries.conj().T)
    assert np.allclose(p.entries, p.entries.conj().T)
    assert x.entries[0, 1] == pytest.approx(1 / math.sqrt(2))


def test_quadrature_squares_diagonal():
    """⟨n|X²+P²|n⟩ = 2n+1 对所有 n 成立（精确截断）"""
    x2, p2 = quadrature_squares(10)
    assert np.allclose(np.diag(x2.entries + p2.entries), 2 * np.arange(10) + 1)
    x, _ = quadrature_matrices(10)
    assert np.allclose((x.entries @ x.entries)[:9, :9], x2.entries[:9, :9])


def test_hermite_functions_values_and_norm():
    assert hermite_function(0, 0.0) == pytest.approx(np.pi ** -0.25)
    assert hermite_function(1, 0.0) == pytest.approx(0.0)
    x = np.linspace(-15.0, 15.0, 3001)
    psi = hermite_functions(40, x)
    gram = trapezoid(psi[:, None, :] * psi[None, :, :], x, axis=2)
    assert np.allclose(gram, np.eye(41), atol=1e-8)
    with pytest.raises(DomainError):
        hermite_functions(-1, x)


def test_quadrature_eigensystem_reproduces_x_and_p():
    nodes, vectors = quadrature_eigensystem(16)
    assert np.allclose(vectors.T @ vectors, np.eye(16), atol=1e-12)
    x, p = quadrature_matrices(16)
    assert np.allclose(quadrature_function("X", lambda v: v, 16).entries, x.entries, atol=1e-12)
    assert np.allclose(quadrature_function("P", lambda v: v, 16).entries, p.entries, atol=1e-12)
    with pytest.raises(DomainError):
        quadrature_function("Y", lambda v: v, 16)


def _relative_interior_gap(kind, lam, dim):
    """e^{λX²} 的矩阵元随 n 增长，残差按内部块最大元素归一"""
    size = interior_size(dim)
    direct = exp_quadrature_square(kind, lam, dim).entries
    ordered = normal_ordered_gaussian(square_exponents(kind, lam), dim).entries
    return interior_residual(direct - ordered, size) / max(1.0, interior_residual(ordered, size))


@pytest.mark.parametrize("kind", ["X", "P"])
@pytest.mark.parametrize("lam", [0.1, 0.3, 0.5 + 0.2j])
def test_exp_quadrature_square_normal_order(kind, lam):
    assert _relative_interior_gap(kind, lam, 128) < 1e-8


def test_exp_quadrature_square_small_entries_are_absolute():
    dim = 64
    direct = exp_quadrature_square("X", 0.1, dim).entries
    ordered = normal_ordered_gaussian(square_exponents("X", 0.1), dim).entries
    assert np.allclose(direct[:8, :8], ordered[:8, :8], atol=1e-12)


def test_square_exponents_values():
    ge = square_exponents("P", 0.3)
    assert ge.prefactor == pytest.approx(0.7 ** -0.5)
    assert ge.f == pytest.approx(-0.3 / 1.4)
    assert ge.h == pytest.approx(-0.3 / 1.4)
    assert ge.g == pytest.approx(0.3 / 0.7)
    vacuum_element = exp_quadrature_square("X", 0.5 + 0.2j, 16).entries[0, 0]
    assert vacuum_element == pytest.approx((0.5 - 0.2j) ** -0.5, rel=1e-12)


def test_exp_quadrature_square_domain():
    for lam in (1.0, 1.5 + 0.3j):
        with pytest.raises(DomainError):
            exp_quadrature_square("X", lam, 8)
        with pytest.raises(DomainError):
            square_exponents("P", lam)
    with pytest.raises(DomainError):
        square_exponents("Y", 0.1)


def test_quadrature_function_unitary_pair():
    forward = quadrature_function("X", lambda x: np.exp(0.4j * x ** 2), 32).entries
    backward = quadrature_function("X", lambda x: np.exp(-0.4j * x ** 2), 32).entries
    assert np.allclose(forward @ backward, np.eye(32), atol=1e-12)


def test_normal_ordered_gaussian_special_cases():
    assert np.allclose(normal_ordered_gaussian(GaussianExponents(), 8).entries, np.eye(8))
    diag = normal_ordered_gaussian(GaussianExponents(g=0.5), 8).entries
    assert np.allclose(diag, np.diag(1.5 ** np.arange(8)))
    with pytest.raises(SingularExponentError):
        GaussianExponents(g=-1.0)


def test_creation_series_column():
    """exp(f a†²)|0⟩ 的偶数分量为 fⁿ√((2n)!)/n!，奇数分量为零"""
    f = 0.2
    column = normal_ordered_gaussian(GaussianExponents(f=f), 9).entries[:, 0]
    expected = np.zeros(9)
    for n in range(5):
        expected[2 * n] = f ** n * math.sqrt(math.factorial(2 * n)) / math.factorial(n)
    assert np.allclose(column, expected, atol=1e-15)


def test_exp_general_agrees_with_normal_order():
    dim, f = 32, 0.2
    a, _ = ladder_matrices(dim)
    a2 = a.entries @ a.entries
    pade = exp_general(FockOperator(entries=f * a2.T)).entries
    series = normal_ordered_gaussian(GaussianExponents(f=f), dim).entries
    assert interior_residual(pade - series, interior_size(dim)) < 1e-8


def test_exp_general_overflow():
    with pytest.raises(RangeError):
        exp_general(FockOperator(entries=1000.0 * np.eye(4)))


def test_exp_hermitian_parity():
    parity = exp_hermitian(number_operator(6), 1j * np.pi).entries
    assert np.allclose(parity, np.diag((-1.0) ** np.arange(6)), atol=1e-12)
    with pytest.raises(NonHermitianError):
        exp_hermitian(FockOperator(entries=[[0, 1], [0, 0]]), 1j)


def test_coherent_state_is_eigenvector():
    z = 0.6 - 0.8j
    state = coherent_state(z, 64)
    assert state.norm == pytest.approx(1.0, abs=1e-12)
    a, _ = ladder_matrices(64)
    shifted = a.entries @ state.amplitudes
    assert np.allclose(shifted[:-1], z * state.amplitudes[:-1], atol=1e-12)
    assert fidelity(coherent_state(0.0, 8), vacuum(8)) == pytest.approx(1.0)


def test_phase_space_state_expectations():
    state = phase_space_state(0.5, -0.3, 64)
    x, p = quadrature_matrices(64)
    assert expectation(x, state) == pytest.approx(0.5, abs=1e-10)
    assert expectation(p, state) == pytest.approx(-0.3, abs=1e-10)


def test_interior_helpers():
    assert interior_size(128) == 32
    assert interior_size(2) == 1
    block = np.zeros((8, 8))
    block[5, 5] = 3.0
    block[1, 0] = -0.5
    assert interior_residual(block, 2) == 0.5


def test_normal_ordered_gaussian_low_entries():
    """⟨2|·|0⟩ = √2·P·f, ⟨1|·|1⟩ = P·t, ⟨2|·|2⟩ = P(t² + 2fh)"""
    ge = GaussianExponents(prefactor=0.9 - 0.1j, f=0.2 + 0.1j, g=-0.3 + 0.2j, h=-0.15j)
    entries = normal_ordered_gaussian(ge, 6).entries
    t = 1.0 + ge.g
    assert entries[2, 0] == pytest.approx(math.sqrt(2) * ge.prefactor * ge.f)
    assert entries[0, 2] == pytest.approx(math.sqrt(2) * ge.prefactor * ge.h)
    assert entries[1, 1] == pytest.approx(ge.prefactor * t)
    assert entries[2, 2] == pytest.approx(ge.prefactor * (t ** 2 + 2 * ge.f * ge.h))
    assert entries[3, 1] == pytest.approx(math.sqrt(6) * ge.prefactor * ge.f * t)
    assert np.allclose(entries[1::2, 0::2], 0.0)
    assert np.allclose(entries[0::2, 1::2], 0.0)


def test_nilpotency_index():
    assert nilpotency_index(128) == 64
    assert nilpotency_index(7) == 4
    a, _ = ladder_matrices(9)
    raising = (a.entries @ a.entries).T
    k = nilpotency_index(9)
    assert not np.linalg.matrix_power(raising, k).any()
    assert np.linalg.matrix_power(raising, k - 1).any()
