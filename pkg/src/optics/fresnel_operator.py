"""
Fresnel 算符

两条独立路径构造 F(A,B,C)：正规乘积形式与正则算符 (X, P) 分解形式；
特例（二次相位、自由传播、压缩）、乘法规则验证，以及与经典 Fresnel
积分核的对应。所有复平方根取主值分支，算符恒等式只在全局 ±1 相位内成立，
相位总是计算并报告出来。
"""
from typing import Tuple

import numpy as np
from loguru import logger
from scipy.integrate import trapezoid

from .errors import AliasingError, DecompositionDomainError, DeltaKernelError, DomainError
from .fock_engine import (exp_hermitian, hermite_functions, interior_residual,
                          interior_size, normal_ordered_gaussian, quadrature_function,
                          squeeze_generator)
from .matrix_optics import compose, decompose
from .models import (FockOperator, FockState, FresnelBuild, GaussianExponents,
                     RayMatrix, Route, SRPair)

DELTA_KERNEL_THRESHOLD = 1e-12
# 压缩算符先在 padding·N 维空间上求指数再截断
SQUEEZE_PADDING = 4


def fresnel_exponents(m: RayMatrix) -> GaussianExponents:
    den = complex(m.a + m.d, m.b - m.c)
    num_plus = complex(m.a - m.d, m.b + m.c)
    num_minus = complex(m.a - m.d, -(m.b + m.c))
    return GaussianExponents(
        prefactor=np.sqrt(2.0 / den),
        f=num_plus / (2.0 * den),
        g=2.0 / den - 1.0,
        h=-num_minus / (2.0 * den),
    )


def fresnel_normal_order(m: RayMatrix, dim: int) -> FockOperator:
    """正规乘积形式的 F(A,B,C)，矩阵元是真实算符的精确截断"""
    return normal_ordered_gaussian(fresnel_exponents(m), dim)


def fresnel_from_sr(p: SRPair, dim: int) -> FockOperator:
    """(s, r) 形式的 U(r,s) = (1/s*)^{1/2} :exp[-r/(2s*) a†² + (1/s*-1) a†a + r*/(2s*) a²]:"""
    sc = p.s.conjugate()
    ge = GaussianExponents(
        prefactor=np.sqrt(1.0 / sc),
        f=-p.r / (2.0 * sc),
        g=1.0 / sc - 1.0,
        h=p.r.conjugate() / (2.0 * sc),
    )
    return normal_ordered_gaussian(ge, dim)


def quadratic_phase(c: float, dim: int) -> FockOperator:
    """exp(i(c/2)X²)，在截断 X 的本征系统上求值，因而 quadratic_phase(-c) 是精确逆"""
    return quadrature_function("X", lambda x: np.exp(0.5j * c * x ** 2), dim)


def free_propagator(b: float, dim: int) -> FockOperator:
    """exp(-i(b/2)P²)"""
    return quadrature_function("P", lambda x: np.exp(-0.5j * b * x ** 2), dim)


def squeeze_operator(a: float, dim: int, padding: int = SQUEEZE_PADDING) -> FockOperator:
    """exp(-(i/2)(XP+PX) ln A)

    截断生成元的指数在靠近截断边界的列上偏离真实算符；在扩大的空间上
    求指数后取左上 N×N 块，内部块即为真实算符的截断。
    """
    if a <= 0:
        raise DomainError(f"压缩参数 A 必须 > 0，得到 {a}")
    if padding < 1:
        raise DomainError(f"padding 必须 >= 1，得到 {padding}")
    padded = exp_hermitian(squeeze_generator(dim * padding), -1j * np.log(a))
    return FockOperator(entries=padded.entries[:dim, :dim])


def fresnel_canonical(m: RayMatrix, dim: int) -> FockOperator:
    """exp(iC/(2A) X²)·exp(-(i/2)(XP+PX) ln A)·exp(-iB/(2A) P²)"""
    try:
        lens_param, magnification, propagator_param = decompose(m)
    except DecompositionDomainError as e:
        raise DecompositionDomainError(f"{e}；A <= 0 时请使用 fresnel_normal_order") from e
    return (quadratic_phase(lens_param, dim)
            @ squeeze_operator(magnification, dim)
            @ free_propagator(propagator_param, dim))


def build_fresnel(m: RayMatrix, dim: int, route: Route = Route.NORMAL_ORDER) -> FresnelBuild:
    if route == Route.CANONICAL:
        op = fresnel_canonical(m, dim)
    else:
        op = fresnel_normal_order(m, dim)
    return FresnelBuild(matrix=m, route=route, op=op)


def unitarity_residual(op: FockOperator, size: int = None) -> float:
    """‖F†F - I‖ 在前 size 个基矢上，默认内部块

    op 在扩大的空间上构造而 size 取原维数的内部块时，强压缩列也完整落在截断内。
    """
    size = interior_size(op.dim) if size is None else size
    if not 1 <= size <= op.dim:
        raise DomainError(f"比较块大小 {size} 不在 [1, {op.dim}] 内")
    columns = op.entries[:, :size]
    return interior_residual(columns.conj().T @ columns - np.eye(size), size)


def padded_normal_order(m: RayMatrix, dim: int, padding: int = 1) -> FockOperator:
    """在 padding·N 维上构造的正规乘积 F(m)；各矩阵元与 N 维构造逐项相同"""
    if padding < 1:
        raise DomainError(f"padding 必须 >= 1，得到 {padding}")
    return fresnel_normal_order(m, dim * padding)


def global_phase(reference: np.ndarray, candidate: np.ndarray) -> complex:
    """candidate ≈ phase·reference 的单位模相位

    取参考矩阵（块）中模最大的元素；真空元非零时优先用真空元。
    """
    reference = np.asarray(reference)
    candidate = np.asarray(candidate)
    flat_index = 0 if abs(reference.flat[0]) > 1e-3 else int(np.argmax(np.abs(reference)))
    ratio = candidate.flat[flat_index] / reference.flat[flat_index]
    return complex(ratio / abs(ratio))


def phase_residual(reference: FockOperator, candidate: FockOperator) -> Tuple[float, complex]:
    """内部块上 ‖candidate - phase·reference‖ 与 phase"""
    size = interior_size(reference.dim)
    ref = reference.interior(size)
    cand = candidate.interior(size)
    phase = global_phase(ref, cand)
    return interior_residual(cand - phase * ref, size), phase


def multiplication_check(m2: RayMatrix, m1: RayMatrix, dim: int,
                         padding: int = 1) -> Tuple[float, complex]:
    """F(m2)F(m1) 与 F(m2·m1) 在 N 维内部块上的比较

    乘积中间求和取到 padding·N，使强压缩算符的列不被截断。

    Returns:
        (内部块残差, 相位)，相位由 ⟨0|F₁₂†F₂F₁|0⟩ 在内部块上归一得到
    """
    size = interior_size(dim)
    f1 = padded_normal_order(m1, dim, padding).entries[:, :size]
    f2 = padded_normal_order(m2, dim, padding).entries[:size, :]
    f12 = fresnel_normal_order(compose(m2, m1), dim).interior(size)
    product = f2 @ f1
    overlap = np.vdot(f12[:, 0], product[:, 0])
    phase = complex(overlap / abs(overlap))
    residual = interior_residual(product - phase * f12, size)
    logger.debug(f"乘法规则残差 {residual:.3e}, 相位 {phase:.6f}")
    return residual, phase


def kernel_analytic(m: RayMatrix, x2, x1):
    """(2πiB)^{-1/2} exp{i/(2B)(A x1² - 2 x2 x1 + D x2²)}"""
    if abs(m.b) < DELTA_KERNEL_THRESHOLD:
        raise DeltaKernelError("B = 0 时核为 delta 函数，不在范围内")
    x2 = np.asarray(x2, dtype=float)
    x1 = np.asarray(x1, dtype=float)
    phase = 1j / (2.0 * m.b) * (m.a * x1 ** 2 - 2.0 * x2 * x1 + m.d * x2 ** 2)
    value = np.exp(phase) / np.sqrt(2j * np.pi * m.b)
    return complex(value) if value.ndim == 0 else value


def kernel_from_fock(op: FockOperator, x2, x1, n_max: int = None):
    """Σ_{m,n<nMax} ψ_m(x2) op[m,n] ψ_n(x1)"""
    n_max = op.dim if n_max is None else n_max
    if not 1 <= n_max <= op.dim:
        raise DomainError(f"nMax = {n_max} 不在 [1, {op.dim}] 内")
    scalar = np.ndim(x2) == 0 and np.ndim(x1) == 0
    psi2 = hermite_functions(n_max - 1, np.atleast_1d(x2))
    psi1 = hermite_functions(n_max - 1, np.atleast_1d(x1))
    block = op.entries[:n_max, :n_max]
    values = np.einsum("mi,mn,ni->i", psi2, block, psi1)
    return complex(values[0]) if scalar else values


def kernel_grid(extent: float, points: int) -> Tuple[np.ndarray, np.ndarray]:
    """[-extent, extent]² 上的均匀网格，返回展平的 (x1, x2)"""
    axis = np.linspace(-extent, extent, points)
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    return x1.ravel(), x2.ravel()


def kernel_comparison(m: RayMatrix, dim: int, extent: float = 2.0,
                      points: int = 41) -> Tuple[np.ndarray, complex, float]:
    """网格上解析核与 Fock 重建核的对比

    Returns:
        (行数组 x1, x2, analytic, fock, abs_err；拟合的全局相位；最大偏差)
    """
    x1, x2 = kernel_grid(extent, points)
    analytic = kernel_analytic(m, x2, x1)
    fock = kernel_from_fock(fresnel_normal_order(m, dim), x2, x1)
    overlap = np.vdot(analytic, fock)
    phase = complex(overlap / abs(overlap)) if abs(overlap) > 0 else 1.0 + 0j
    error = np.abs(fock - phase * analytic)
    rows = np.column_stack([x1, x2, analytic.real, analytic.imag, fock.real, fock.imag, error])
    return rows, phase, float(error.max())


def wavefunction_from_fock(state: FockState, x):
    """Σₙ cₙ ψₙ(x)"""
    psi = hermite_functions(state.dim - 1, np.atleast_1d(x))
    values = state.amplitudes @ psi
    return complex(values[0]) if np.ndim(x) == 0 else values


def fresnel_transform_numeric(m: RayMatrix, x: np.ndarray, field: np.ndarray,
                              x_out: np.ndarray = None) -> np.ndarray:
    """g(x2) = ∫K(x2, x1) f(x1) dx1，梯形求积

    输出默认取输入网格；要求啁啾相位每个采样点前进不超过 π。
    """
    if abs(m.b) < DELTA_KERNEL_THRESHOLD:
        raise DeltaKernelError("B = 0 时核为 delta 函数，不在范围内")
    x = np.asarray(x, dtype=float)
    field = np.asarray(field, dtype=complex)
    if x.shape != field.shape or x.ndim != 1 or x.size < 2:
        raise DomainError("采样网格与场必须是等长一维数组")
    x_out = x if x_out is None else np.asarray(x_out, dtype=float)
    spacing = float(np.max(np.diff(x)))
    # ∂phase/∂x1 = (A x1 - x2)/B，在网格端点取极值
    slope = max(abs(m.a * x1 - x2) for x1 in (x[0], x[-1]) for x2 in (x_out.min(), x_out.max()))
    slope /= abs(m.b)
    if spacing * slope >= np.pi:
        required = int(np.ceil((x[-1] - x[0]) * slope / np.pi)) + 1
        raise AliasingError(
            f"网格间距 {spacing:.3e} 下啁啾相位每点前进 {spacing * slope:.3f} rad >= π，"
            f"至少需要 {required} 个采样点")
    kernel = kernel_analytic(m, x_out[:, None], x[None, :])
    return trapezoid(kernel * field[None, :], x, axis=1)

