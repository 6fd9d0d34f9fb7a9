"""
量子光学 ABCD 定律

F(A,B,C)|0⟩ 是由 q = -(A+iB)/(C+iD) 刻画的压缩真空态；后接系统
(A′,B′,C′,D′) 后仍是同类态，q 按复合矩阵变换。含时质量阻尼振子的
演化是该定律的一个实例。
"""
from typing import List, Sequence, Tuple

import numpy as np
from loguru import logger

from .errors import DomainError, NonNormalizableError, PoleError
from .fock_engine import (exp_hermitian, fidelity, interior_residual, interior_size,
                          quadrature_matrices, quadrature_squares, squeeze_generator, vacuum)
from .fresnel_operator import fresnel_normal_order, padded_normal_order, quadratic_phase
from .matrix_optics import POLE_THRESHOLD, compose
from .models import (DampedOscillatorParams, FockOperator, FockState, QParam, RayMatrix,
                     SqueezedVacuumDescriptor)

# 默认套件中 γt 的上限，更大的值使振幅越出截断
MAX_DAMPING_EXPONENT = 2.0


def q_parameter(m: RayMatrix) -> QParam:
    """q₁ = -(A+iB)/(C+iD)，Im q = 1/(C²+D²) > 0"""
    return QParam(q=-complex(m.a, m.b) / complex(m.c, m.d))


def descriptor_from_matrix(m: RayMatrix, dim: int) -> SqueezedVacuumDescriptor:
    """F(m)|0⟩ 的描述：q 与前因子 (2/(A+D+i(B-C)))^{1/2}"""
    den = complex(m.a + m.d, m.b - m.c)
    return SqueezedVacuumDescriptor(q=q_parameter(m), prefactor=np.sqrt(2.0 / den), dim=dim)


def squeezed_vacuum_from_q(d: SqueezedVacuumDescriptor) -> FockState:
    """c_{2n} = prefactor·μⁿ·√((2n)!)/n!，奇数振幅为零"""
    if not d.q.in_upper_half_plane:
        raise NonNormalizableError("Im q <= 0")
    mu = d.mu
    amplitudes = np.zeros(d.dim, dtype=complex)
    amplitudes[0] = d.prefactor
    for n in range(1, (d.dim + 1) // 2):
        amplitudes[2 * n] = amplitudes[2 * n - 2] * mu * np.sqrt(2 * n * (2 * n - 1)) / n
    return FockState(amplitudes=amplitudes)


def vacuum_output(m: RayMatrix, dim: int) -> FockState:
    """F(m)|0⟩"""
    return fresnel_normal_order(m, dim) @ vacuum(dim)


def vacuum_through(matrices: Sequence[RayMatrix], dim: int, padding: int = 1) -> FockState:
    """依次作用 F(m₁)、F(m₂)… 于真空，在 padding·N 维上相乘后截回 N 维"""
    state = vacuum(dim * padding)
    for m in matrices:
        state = padded_normal_order(m, dim, padding) @ state
    return FockState(amplitudes=state.amplitudes[:dim])


def _column(d: SqueezedVacuumDescriptor) -> Tuple[complex, complex]:
    """由描述恢复 (A+iB, C+iD)

    prefactor² = -2/(C+iD)/(q+i)，q = -(A+iB)/(C+iD)
    """
    cd = -2.0 / (d.prefactor ** 2 * (d.q.q + 1j))
    return -d.q.q * cd, cd


def abcd_law_apply(m2: RayMatrix, d: SqueezedVacuumDescriptor) -> SqueezedVacuumDescriptor:
    """输入态经 m2 后的描述

    q₂ = -(A″+iB″)/(C″+iD″)，前因子 √(-2/(C″+iD″)/(q₂+i))
    """
    ab, cd = _column(d)
    ab2 = m2.a * ab + m2.b * cd
    cd2 = m2.c * ab + m2.d * cd
    if abs(cd2) < POLE_THRESHOLD:
        raise PoleError(f"C′q₁ - D′ 为零，C″+iD″ = {cd2:.3e}")
    q2 = -ab2 / cd2
    prefactor = np.sqrt(-2.0 / cd2 / (q2 + 1j))
    logger.debug(f"ABCD 定律 q₁={d.q.q:.6f} → q₂={q2:.6f}")
    return SqueezedVacuumDescriptor(q=QParam(q=q2), prefactor=prefactor, dim=d.dim)


def abcd_law_bar_check(m2: RayMatrix, m1: RayMatrix) -> Tuple[complex, float]:
    """q̄ 形式与复合矩阵形式的 q₂ 是否一致

    q̄ 形式只用 q₁ = q(m1)：q̄₂ = (A′q̄₁+B′)/(C′q̄₁+D′)，q̄ = -q。
    复合矩阵形式先算 m2·m1，再取 q₂ = -(A″+iB″)/(C″+iD″)。
    Im q₁ > 0 时 C′q̄₁ + D′ 不会为零。

    Returns:
        (由 q̄ 形式得到的 q₂, 与复合矩阵形式的相对偏差)
    """
    bar1 = -q_parameter(m1).q
    q2_bar_route = -(m2.a * bar1 + m2.b) / (m2.c * bar1 + m2.d)
    q2_matrix_route = q_parameter(compose(m2, m1)).q
    deviation = abs(q2_bar_route - q2_matrix_route) / max(1.0, abs(q2_matrix_route))
    return q2_bar_route, deviation


def state_phase(reference: FockState, candidate: FockState) -> complex:
    overlap = np.vdot(reference.amplitudes, candidate.amplitudes)
    return complex(overlap / abs(overlap))


def damped_matrices(p: DampedOscillatorParams) -> Tuple[RayMatrix, RayMatrix]:
    """(1,0;-γ,1) 与 diag(e^{-γt}, e^{γt})"""
    lens = RayMatrix(a=1.0, b=0.0, c=-p.gamma, d=1.0)
    shrink = np.exp(-p.gamma * p.t)
    magnifier = RayMatrix(a=shrink, b=0.0, c=0.0, d=1.0 / shrink)
    return lens, magnifier


def damped_state_closed_form(p: DampedOscillatorParams, dim: int) -> FockState:
    """√(2e^{-γt}/(e^{-2γt}+iγ+1))·exp[(e^{-2γt}-1-iγ)/(2(e^{-2γt}+1+iγ)) a†²]|0⟩"""
    e2 = np.exp(-2.0 * p.gamma * p.t)
    den = e2 + 1.0 + 1j * p.gamma
    prefactor = np.sqrt(2.0 * np.exp(-p.gamma * p.t) / den)
    mu = (e2 - 1.0 - 1j * p.gamma) / (2.0 * den)
    amplitudes = np.zeros(dim, dtype=complex)
    amplitudes[0] = prefactor
    for n in range(1, (dim + 1) // 2):
        amplitudes[2 * n] = amplitudes[2 * n - 2] * mu * np.sqrt(2 * n * (2 * n - 1)) / n
    return FockState(amplitudes=amplitudes)


def u_operator(p: DampedOscillatorParams, dim: int) -> FockOperator:
    """u(t) = e^{iγX²/2}·e^{-iγt(XP+PX)/2}"""
    return quadratic_phase(p.gamma, dim) @ exp_hermitian(squeeze_generator(dim), -1j * p.gamma * p.t)


def u_inverse(p: DampedOscillatorParams, dim: int) -> FockOperator:
    """u⁻¹(t) = e^{iγt(XP+PX)/2}·e^{-iγX²/2}"""
    return exp_hermitian(squeeze_generator(dim), 1j * p.gamma * p.t) @ quadratic_phase(-p.gamma, dim)


def heisenberg_transform_check(p: DampedOscillatorParams, dim: int) -> Tuple[float, float]:
    """uXu⁻¹ = e^{-γt}X, uPu⁻¹ = e^{γt}P - γe^{γt}X 的内部块残差"""
    u = u_operator(p, dim).entries
    u_inv = u_inverse(p, dim).entries
    x, p_op = quadrature_matrices(dim)
    growth = np.exp(p.gamma * p.t)
    size = interior_size(dim)
    residual_x = interior_residual(u @ x.entries @ u_inv - x.entries / growth, size)
    expected_p = growth * p_op.entries - p.gamma * growth * x.entries
    residual_p = interior_residual(u @ p_op.entries @ u_inv - expected_p, size)
    return residual_x, residual_p


def effective_hamiltonian_residual(p: DampedOscillatorParams, dim: int) -> float:
    """uHu⁻¹ - iu∂ₜu⁻¹ 与 ½P² + ½(ω₀²-γ²)X² 的内部块偏差

    ∂ₜu⁻¹ = iγ·(XP+PX)/2·u⁻¹
    """
    x2, p2 = quadrature_squares(dim)
    generator = squeeze_generator(dim).entries
    u = u_operator(p, dim).entries
    u_inv = u_inverse(p, dim).entries
    hamiltonian = (0.5 * np.exp(-2.0 * p.gamma * p.t) * p2.entries
                   + 0.5 * p.omega0 ** 2 * np.exp(2.0 * p.gamma * p.t) * x2.entries)
    d_u_inv = 1j * p.gamma * generator @ u_inv
    effective = u @ hamiltonian @ u_inv - 1j * u @ d_u_inv
    target = 0.5 * p2.entries + 0.5 * p.omega_squared * x2.entries
    return interior_residual(effective - target, interior_size(dim))


def damped_q_pair(p: DampedOscillatorParams) -> Tuple[QParam, QParam]:
    """(q₁, q₂)：γ 透镜给出 q₁ = 1/(γ-i)，放大器后 q₂ = e^{-2γt}/(γ-i)"""
    lens, magnifier = damped_matrices(p)
    q1 = q_parameter(lens)
    descriptor = abcd_law_apply(magnifier, descriptor_from_matrix(lens, 2))
    return q1, descriptor.q


def damped_evolution(p: DampedOscillatorParams, t_max: float, steps: int,
                     dim: int) -> List[List[float]]:
    """t ∈ [0, t_max] 上 steps+1 个等距时刻的 q₂、压缩幅度与两条路径的保真度

    Returns:
        行列表 [t, re_q2, im_q2, squeeze_magnitude, fidelity_vs_operator_route]
    """
    if steps < 1:
        raise DomainError(f"steps 必须 >= 1，得到 {steps}")
    if p.gamma * t_max > MAX_DAMPING_EXPONENT:
        logger.warning(f"γt = {p.gamma * t_max:.2f} > {MAX_DAMPING_EXPONENT}，压缩超出截断可信范围")
    rows = []
    origin = vacuum(dim)
    for t in np.linspace(0.0, t_max, steps + 1):
        at = p.at(float(t))
        _, q2 = damped_q_pair(at)
        mu = SqueezedVacuumDescriptor(q=q2, prefactor=1.0, dim=dim).mu
        closed = damped_state_closed_form(at, dim)
        operator_route = u_inverse(at, dim) @ origin
        rows.append([float(t), q2.q.real, q2.q.imag, abs(mu), fidelity(closed, operator_route)])
    logger.info(f"阻尼振子演化 γ={p.gamma}, ω₀={p.omega0}, {steps + 1} 个时刻")
    return rows
