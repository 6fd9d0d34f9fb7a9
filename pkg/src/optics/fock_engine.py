"""
截断 Fock 空间数值计算

升降算符、正交分量、Hermite 函数、矩阵指数以及正规乘积高斯算符
:exp(f a†² + g a†a + h a²): 的精确截断。
"""
import math
from typing import Callable, Tuple

import numpy as np
from loguru import logger
from scipy import linalg
from scipy.special import roots_hermite

from .errors import DomainError, NonHermitianError, RangeError
from .models import FockOperator, FockState, GaussianExponents

DEFAULT_DIM = 128
HERMITIAN_TOLERANCE = 1e-10


def interior_size(dim: int, fraction: float = 0.25) -> int:
    """内部块大小：前 N/4 个基矢"""
    return max(1, int(dim * fraction))


def interior_residual(matrix: np.ndarray, size: int) -> float:
    """内部块上的最大绝对值"""
    block = np.asarray(matrix)
    block = block[:size, :size] if block.ndim == 2 else block[:size]
    return float(np.max(np.abs(block))) if block.size else 0.0


def _check_dim(dim: int):
    if dim < 2:
        raise DomainError(f"截断维数必须 >= 2，得到 {dim}")


def ladder_matrices(dim: int) -> Tuple[FockOperator, FockOperator]:
    """a|n⟩ = √n|n-1⟩, a†|n⟩ = √(n+1)|n+1⟩"""
    _check_dim(dim)
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    return FockOperator(entries=a), FockOperator(entries=a.T)


def number_operator(dim: int) -> FockOperator:
    _check_dim(dim)
    return FockOperator(entries=np.diag(np.arange(dim, dtype=float)))


def quadrature_matrices(dim: int) -> Tuple[FockOperator, FockOperator]:
    """X = (a+a†)/√2, P = (a-a†)/(√2 i)"""
    a, adag = ladder_matrices(dim)
    x = (a.entries + adag.entries) / np.sqrt(2.0)
    p = (a.entries - adag.entries) / (np.sqrt(2.0) * 1j)
    return FockOperator(entries=x), FockOperator(entries=p)


def quadrature_squares(dim: int) -> Tuple[FockOperator, FockOperator]:
    """X² 与 P² 的精确截断（由 a², a†², a†a 组合，不经过截断矩阵乘法）"""
    a, adag = ladder_matrices(dim)
    a2 = a.entries @ a.entries
    ad2 = a2.T
    n = np.diag(np.arange(dim, dtype=float))
    eye = np.eye(dim)
    x2 = 0.5 * (a2 + ad2 + 2.0 * n + eye)
    p2 = -0.5 * (a2 + ad2 - 2.0 * n - eye)
    return FockOperator(entries=x2), FockOperator(entries=p2)


def squeeze_generator(dim: int) -> FockOperator:
    """(XP+PX)/2 = i(a†² - a²)/2 的精确截断，厄米"""
    a, _ = ladder_matrices(dim)
    a2 = a.entries @ a.entries
    return FockOperator(entries=0.5j * (a2.T - a2))


def _hermite_recurrence(n_max: int, x: np.ndarray, start: np.ndarray) -> np.ndarray:
    """φ_{n+1} = √(2/(n+1)) x φₙ - √(n/(n+1)) φ_{n-1}，φ₀ = start"""
    values = np.empty((n_max + 1, x.size), dtype=np.result_type(x, start))
    values[0] = start
    if n_max >= 1:
        values[1] = np.sqrt(2.0) * x * values[0]
    for n in range(1, n_max):
        values[n + 1] = np.sqrt(2.0 / (n + 1)) * x * values[n] - np.sqrt(n / (n + 1)) * values[n - 1]
    return values


def hermite_functions(n_max: int, x) -> np.ndarray:
    """ψ₀…ψ_{n_max}，形状 (n_max+1, len(x))"""
    if n_max < 0:
        raise DomainError(f"n 必须 >= 0，得到 {n_max}")
    x = np.atleast_1d(np.asarray(x, dtype=float))
    return _hermite_recurrence(n_max, x, np.pi ** -0.25 * np.exp(-0.5 * x ** 2))


def hermite_function(n: int, x):
    """位置表象波函数 ⟨x|n⟩"""
    values = hermite_functions(n, x)[n]
    return float(values[0]) if np.ndim(x) == 0 else values


def quadrature_eigensystem(dim: int) -> Tuple[np.ndarray, np.ndarray]:
    """截断 X 的本征系统

    本征值是 H_N 的零点；本征矢由 Hermite 递推在零点处求值后归一，
    因而小分量也保持相对精度（直接 eigh 只有绝对精度）。
    """
    _check_dim(dim)
    nodes, _ = roots_hermite(dim)
    psi = hermite_functions(dim - 1, nodes)
    vectors = psi / np.linalg.norm(psi, axis=0, keepdims=True)
    return nodes, vectors


def quadrature_function(kind: str, fn: Callable[[np.ndarray], np.ndarray],
                        dim: int) -> FockOperator:
    """fn(X) 或 fn(P)

    截断 P 与截断 X 由 diag(iⁿ) 幺正相似，两者共用同一本征系统。
    """
    phases = _quadrature_phases(kind, dim)
    nodes, vectors = quadrature_eigensystem(dim)
    basis = phases[:, None] * vectors
    values = np.asarray(fn(nodes), dtype=complex)
    return FockOperator(entries=(basis * values[None, :]) @ basis.conj().T)


def _quadrature_phases(kind: str, dim: int) -> np.ndarray:
    """X 表象到 P 表象的对角相位 iⁿ"""
    if kind == "X":
        return np.ones(dim, dtype=complex)
    if kind == "P":
        return np.array([1.0, 1j, -1.0, -1j])[np.arange(dim) % 4]
    raise DomainError(f"正交分量只能是 X 或 P，得到 {kind!r}")


def exp_quadrature_square(kind: str, coefficient: complex, dim: int) -> FockOperator:
    """exp(λX²) 或 exp(λP²) 的精确截断

    ⟨m|e^{λX²}|n⟩ = ∫ψₘψₙe^{λx²}dx。代换 x = y/√(1-λ) 后被积函数是多项式乘以
    e^{-y²}，N 点 Gauss–Hermite 求积对全部 m, n < N 精确。要求 Re(1-λ) > 0。
    """
    phases = _quadrature_phases(kind, dim)
    _check_dim(dim)
    lam = complex(coefficient)
    if (1.0 - lam).real <= 0:
        raise DomainError(f"e^{{λX²}} 要求 Re(1-λ) > 0，得到 λ = {lam}")
    root = np.sqrt(1.0 - lam)
    nodes, weights = roots_hermite(dim)
    # √w 并入起始值，递推全程保持量级
    scaled = _hermite_recurrence(dim - 1, nodes / root,
                                 np.pi ** -0.25 * np.sqrt(weights).astype(complex))
    entries = scaled @ scaled.T / root
    return FockOperator(entries=phases[:, None] * entries * phases.conj()[None, :])


def square_exponents(kind: str, coefficient: complex) -> GaussianExponents:
    """e^{λX²} = (1-λ)^{-1/2} :exp[λ/(2(1-λ))(a†² + a²) + λ/(1-λ) a†a]:，P² 时 a†²、a² 项反号"""
    if kind not in ("X", "P"):
        raise DomainError(f"正交分量只能是 X 或 P，得到 {kind!r}")
    lam = complex(coefficient)
    if (1.0 - lam).real <= 0:
        raise DomainError(f"e^{{λX²}} 要求 Re(1-λ) > 0，得到 λ = {lam}")
    sign = 1.0 if kind == "X" else -1.0
    pair = sign * lam / (2.0 * (1.0 - lam))
    return GaussianExponents(prefactor=np.sqrt(1.0 - lam) ** -1, f=pair,
                             g=lam / (1.0 - lam), h=pair)


def exp_hermitian(h: FockOperator, scale: complex) -> FockOperator:
    """exp(scale·H)，经 H 的本征分解；scale 为纯虚数时结果幺正"""
    m = h.entries
    deviation = float(np.max(np.abs(m - m.conj().T)))
    if deviation > HERMITIAN_TOLERANCE:
        raise NonHermitianError(f"矩阵偏离厄米 {deviation:.3e}")
    w, v = linalg.eigh(0.5 * (m + m.conj().T))
    return FockOperator(entries=(v * np.exp(scale * w)[None, :]) @ v.conj().T)


def exp_general(g: FockOperator) -> FockOperator:
    """一般矩阵指数（scaling-and-squaring Padé）"""
    with np.errstate(over="ignore", invalid="ignore"):
        result = linalg.expm(g.entries)
    if not np.isfinite(result).all():
        raise RangeError(f"矩阵指数溢出，‖G‖₁ = {np.linalg.norm(g.entries, 1):.3e}")
    return FockOperator(entries=result)


def nilpotency_index(dim: int) -> int:
    """(a†²)^k = 0 的最小 k，即终止级数的项数上限 ⌈N/2⌉"""
    _check_dim(dim)
    return math.ceil(dim / 2)


def _lower_triangle(prefactor: complex, two_f: complex, t: complex, two_h: complex,
                    dim: int) -> np.ndarray:
    """m >= n 的矩阵元

    非对角：m·Fₘₙ 由 2f·F_{m-2,n} 与 t·F_{m-1,n-1} 给出，系数 √((m-1)/m)、√(n/m) 不超过 1；
    对角：F_{nn} = t·F_{n-1,n-1} + 2h·√((n-1)/n)·F_{n,n-2}。
    """
    lower = np.zeros((dim, dim), dtype=complex)
    lower[0, 0] = prefactor
    for m in range(1, dim):
        n = np.arange(m % 2, m - 1, 2)
        if n.size:
            row = two_f * np.sqrt((m - 1) / m) * lower[m - 2, n]
            inner = n > 0
            row[inner] += t * np.sqrt(n[inner] / m) * lower[m - 1, n[inner] - 1]
            lower[m, n] = row
        diagonal = t * lower[m - 1, m - 1]
        if m >= 2:
            diagonal += two_h * np.sqrt((m - 1) / m) * lower[m, m - 2]
        lower[m, m] = diagonal
    return lower


def normal_ordered_gaussian(ge: GaussianExponents, dim: int) -> FockOperator:
    """prefactor·exp(f a†²)·(1+g)^N̂·exp(h a²) 的精确截断

    正规乘积内三个因子对易，分解是精确的。矩阵元即 Bargmann 生成函数
    prefactor·exp(f z̄² + (1+g) z̄w + h w²) 的系数，按递推逐项求出，
    不做截断矩阵乘法，也不出现大项相消。上三角由交换 f、h 后的下三角转置得到。
    """
    _check_dim(dim)
    t = 1.0 + ge.g
    lower = _lower_triangle(ge.prefactor, 2.0 * ge.f, t, 2.0 * ge.h, dim)
    upper = _lower_triangle(ge.prefactor, 2.0 * ge.h, t, 2.0 * ge.f, dim).T
    logger.debug(f"正规乘积高斯算符 N={dim}, 级数项数上限={nilpotency_index(dim)}")
    return FockOperator(entries=lower + np.triu(upper, 1))


def vacuum(dim: int) -> FockState:
    _check_dim(dim)
    amplitudes = np.zeros(dim, dtype=complex)
    amplitudes[0] = 1.0
    return FockState(amplitudes=amplitudes)


def coherent_state(z: complex, dim: int) -> FockState:
    """|z⟩ = exp(-|z|²/2 + z a†)|0⟩"""
    _check_dim(dim)
    if abs(z) ** 2 > dim / 4:
        logger.warning(f"|z|² = {abs(z) ** 2:.2f} > N/4 = {dim / 4:.1f}，截断误差可能显著")
    amplitudes = np.empty(dim, dtype=complex)
    amplitudes[0] = np.exp(-0.5 * abs(z) ** 2)
    for n in range(1, dim):
        amplitudes[n] = amplitudes[n - 1] * z / np.sqrt(n)
    return FockState(amplitudes=amplitudes)


def phase_space_state(x: float, p: float, dim: int) -> FockState:
    """相空间点 (x, p) 标记的相干态，z = (x + ip)/√2"""
    return coherent_state(complex(x, p) / np.sqrt(2.0), dim)


def expectation(op: FockOperator, state: FockState) -> complex:
    psi = state.amplitudes
    return complex(np.vdot(psi, op.entries @ psi) / np.vdot(psi, psi))


def fidelity(psi_a: FockState, psi_b: FockState) -> float:
    """|⟨ψa|ψb⟩|/(‖ψa‖‖ψb‖)"""
    overlap = np.vdot(psi_a.amplitudes, psi_b.amplitudes)
    return float(abs(overlap) / (psi_a.norm * psi_b.norm))
