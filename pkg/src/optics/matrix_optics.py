"""
经典 ABCD 矩阵光学

光线追迹、波前曲率与复光束参数的 Möbius 传播、元件构造、
矩阵复合、(s, r) 参数化以及透镜-放大器-传播器分解。
所有长度取无量纲单位。
"""
from typing import List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from .errors import (DecompositionDomainError, DomainError, InconsistentPairError,
                     NumericalDegradationError, PoleError)
from .models import QParam, Ray, RayMatrix, SRPair

# 复合后允许的行列式漂移
COMPOSITION_DET_TOLERANCE = 1e-9
# Möbius 分母的极点阈值
POLE_THRESHOLD = 1e-14
# (s, r) 还原为实矩阵时允许的虚部残差
REAL_RESIDUAL_TOLERANCE = 1e-10
# 拒绝抽样的次数上限
MAX_DRAWS = 1000


def compose(m2: RayMatrix, m1: RayMatrix) -> RayMatrix:
    """返回 m2·m1（m1 先作用）"""
    product = m2.as_array() @ m1.as_array()
    det = float(np.linalg.det(product))
    if abs(det - 1.0) > COMPOSITION_DET_TOLERANCE:
        raise NumericalDegradationError(f"复合后行列式漂移到 {det!r}")
    # 在构造容差内重新归一化
    a, b, c, d = product.ravel()
    if abs(a) >= abs(d) and a != 0.0:
        d = (1.0 + b * c) / a
    elif d != 0.0:
        a = (1.0 + b * c) / d
    else:
        c = (a * d - 1.0) / b
    return RayMatrix(a=float(a), b=float(b), c=float(c), d=float(d))


def compose_chain(elements: Sequence[RayMatrix]) -> RayMatrix:
    """按光束经过的顺序给出元件，返回 Mₙ…M₂M₁"""
    total = RayMatrix.identity()
    for element in elements:
        total = compose(element, total)
    return total


def trace_ray(m: RayMatrix, ray: Ray) -> Ray:
    out = m.as_array() @ np.array([ray.height, ray.direction])
    return Ray(height=float(out[0]), direction=float(out[1]))


def trace_system(elements: Sequence[RayMatrix], ray: Ray) -> List[Ray]:
    """逐个元件追迹，返回每个元件之后的光线"""
    rays = []
    current = ray
    for element in elements:
        current = trace_ray(element, current)
        rays.append(current)
    return rays


def ray_curvature(ray: Ray) -> float:
    """R = r/α"""
    if abs(ray.direction) < POLE_THRESHOLD:
        raise PoleError("方向余弦为零，曲率半径无穷大")
    return ray.height / ray.direction


def propagate_curvature(m: RayMatrix, r1: float) -> float:
    """R₂ = (A R₁ + B)/(C R₁ + D)"""
    denominator = m.c * r1 + m.d
    if abs(denominator) < POLE_THRESHOLD:
        raise PoleError(f"CR₁ + D = {denominator:.3e}，波前聚焦成一点")
    return (m.a * r1 + m.b) / denominator


def propagate_q(m: RayMatrix, q1: QParam) -> QParam:
    """q₂ = (A q₁ + B)/(C q₁ + D)"""
    denominator = m.c * q1.q + m.d
    if abs(denominator) < POLE_THRESHOLD:
        raise PoleError(f"|Cq₁ + D| = {abs(denominator):.3e} 低于阈值")
    return QParam(q=(m.a * q1.q + m.b) / denominator)


def abcd_to_sr(m: RayMatrix) -> SRPair:
    s = 0.5 * complex(m.a + m.d, -(m.b - m.c))
    r = -0.5 * complex(m.a - m.d, m.b + m.c)
    return SRPair(s=s, r=r)


def sr_to_abcd(p: SRPair) -> RayMatrix:
    """abcd_to_sr 的逆映射"""
    s, r = p.s, p.r
    sc, rc = s.conjugate(), r.conjugate()
    # A+D = s+s*, A-D = -(r+r*), B-C = i(s-s*), B+C = i(r-r*)
    a = 0.5 * ((s + sc) - (r + rc))
    d = 0.5 * ((s + sc) + (r + rc))
    b = 0.5 * (1j * (s - sc) + 1j * (r - rc))
    c = 0.5 * (1j * (r - rc) - 1j * (s - sc))
    residual = max(abs(z.imag) for z in (a, b, c, d))
    if residual > REAL_RESIDUAL_TOLERANCE:
        raise InconsistentPairError(f"还原矩阵虚部残差 {residual:.3e}")
    try:
        return RayMatrix(a=a.real, b=b.real, c=c.real, d=d.real)
    except DomainError as e:
        raise InconsistentPairError(f"(s, r) 还原失败: {e}") from e


def sr_compose(p: SRPair, p2: SRPair) -> SRPair:
    """s″ = ss′ + rr′*, r″ = rs′* + r′s"""
    s = p.s * p2.s + p.r * p2.r.conjugate()
    r = p.r * p2.s.conjugate() + p2.r * p.s
    return SRPair(s=s, r=r)


def decompose(m: RayMatrix) -> Tuple[float, float, float]:
    """(A,B;C,D) = (1,0;C/A,1)·diag(A,1/A)·(1,B/A;0,1)

    Returns:
        (透镜参数 C/A, 放大率 A, 传播参数 B/A)
    """
    if m.a <= 0.0:
        raise DecompositionDomainError(f"A = {m.a} <= 0，请改用正规乘积构造")
    return m.c / m.a, m.a, m.b / m.a


def free_space(d: float) -> RayMatrix:
    return RayMatrix(a=1.0, b=float(d), c=0.0, d=1.0)


def thin_lens(f: float) -> RayMatrix:
    if f == 0:
        raise DomainError("薄透镜焦距不能为 0")
    return RayMatrix(a=1.0, b=0.0, c=-1.0 / f, d=1.0)


def lens_part(c: float) -> RayMatrix:
    """(1,0;c,1)，二次相位元件"""
    return RayMatrix(a=1.0, b=0.0, c=float(c), d=1.0)


def magnifier(a: float) -> RayMatrix:
    if a == 0:
        raise DomainError("放大率不能为 0")
    return RayMatrix(a=float(a), b=0.0, c=0.0, d=1.0 / a)


def random_ray_matrix(rng: np.random.Generator,
                      lens_range: Tuple[float, float] = (-2.0, 2.0),
                      magnifier_range: Tuple[float, float] = (0.5, 2.0),
                      propagator_range: Tuple[float, float] = (-2.0, 2.0),
                      max_entry: Optional[float] = None) -> RayMatrix:
    """lens(c)·magnifier(a)·propagator(b)，行列式严格为 1 且 A > 0

    给定 max_entry 时拒绝任一元素绝对值超过它的抽样。
    """
    for _ in range(MAX_DRAWS):
        c = rng.uniform(*lens_range)
        a = rng.uniform(*magnifier_range)
        b = rng.uniform(*propagator_range)
        m = compose(lens_part(c), compose(magnifier(a), free_space(b)))
        if max_entry is None or np.max(np.abs(m.as_array())) <= max_entry:
            logger.debug(f"随机矩阵 c={c:.4f} a={a:.4f} b={b:.4f}")
            return m
    raise DomainError(f"{MAX_DRAWS} 次抽样未得到元素不超过 {max_entry} 的矩阵")
