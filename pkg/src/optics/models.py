"""
数据模型定义
"""
from enum import Enum
from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import (BaseModel, ConfigDict, Field, computed_field,
                      field_serializer, field_validator, model_validator)

from .errors import (DomainError, NonNormalizableError, NonUnimodularError,
                     SingularExponentError)

# 构造时行列式容差
DET_TOLERANCE = 1e-12
# (s, r) 幺模容差
UNIMODULAR_TOLERANCE = 1e-10


def _to_complex(value) -> complex:
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(value[0], value[1])
    return complex(value)


class RayMatrix(BaseModel):
    """光线传输矩阵 (A, B; C, D)，AD - BC = 1"""
    model_config = ConfigDict(frozen=True)

    a: float = Field(..., description="A 元素")
    b: float = Field(..., description="B 元素")
    c: float = Field(..., description="C 元素")
    d: float = Field(..., description="D 元素")

    @model_validator(mode="after")
    def _check_det(self):
        values = (self.a, self.b, self.c, self.d)
        if not all(np.isfinite(values)):
            raise DomainError(f"矩阵元素必须有限: {values}")
        if abs(self.det - 1.0) > DET_TOLERANCE:
            raise NonUnimodularError(f"行列式 {self.det!r} 偏离 1 超过 {DET_TOLERANCE}")
        return self

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    @classmethod
    def identity(cls) -> "RayMatrix":
        return cls(a=1.0, b=0.0, c=0.0, d=1.0)


class Ray(BaseModel):
    """光线：离轴高度与方向余弦"""
    model_config = ConfigDict(frozen=True)

    height: float = Field(..., description="离光轴高度 r")
    direction: float = Field(..., description="光学方向余弦 α")

    @model_validator(mode="after")
    def _check_finite(self):
        if not np.isfinite([self.height, self.direction]).all():
            raise DomainError("光线参数必须有限")
        return self


class SRPair(BaseModel):
    """辛变换的复参数 (s, r)，|s|² - |r|² = 1"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    s: complex = Field(..., description="s 参数")
    r: complex = Field(..., description="r 参数")

    coerce_complex = field_validator("s", "r", mode="before")(lambda cls, v: _to_complex(v))

    @model_validator(mode="after")
    def _check_unimodular(self):
        gap = abs(self.s) ** 2 - abs(self.r) ** 2 - 1.0
        if abs(gap) > UNIMODULAR_TOLERANCE:
            raise NonUnimodularError(f"|s|²-|r|² 偏离 1: {gap:.3e}")
        return self


class QParam(BaseModel):
    """复光束参数 q"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    q: complex = Field(..., description="复曲率参数")

    coerce_complex = field_validator("q", mode="before")(lambda cls, v: _to_complex(v))

    @property
    def in_upper_half_plane(self) -> bool:
        return self.q.imag > 0


class FockOperator(BaseModel):
    """截断 Fock 空间上的稠密算符，行列下标即占据数"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray = Field(..., description="N×N 复矩阵")

    @field_validator("entries", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        m = np.array(value, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"算符必须是方阵，得到形状 {m.shape}")
        if m.shape[0] < 2:
            raise DomainError("Fock 截断维数必须 >= 2")
        if not np.isfinite(m).all():
            raise DomainError("算符含有非有限元素")
        m.setflags(write=False)
        return m

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def interior(self, size: int) -> np.ndarray:
        return self.entries[:size, :size]

    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            return FockOperator(entries=self.entries @ other.entries)
        if isinstance(other, FockState):
            return FockState(amplitudes=self.entries @ other.amplitudes)
        return NotImplemented


class FockState(BaseModel):
    """截断 Fock 空间中的态矢量"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    amplitudes: np.ndarray = Field(..., description="N 维复振幅")

    @field_validator("amplitudes", mode="before")
    @classmethod
    def _as_vector(cls, value):
        v = np.array(value, dtype=complex)
        if v.ndim != 1 or v.shape[0] < 2:
            raise DomainError(f"态矢量必须是长度 >= 2 的一维数组，得到形状 {v.shape}")
        if not np.isfinite(v).all():
            raise DomainError("态矢量含有非有限元素")
        v.setflags(write=False)
        return v

    @property
    def dim(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))


class GaussianExponents(BaseModel):
    """正规乘积 :exp(f a†² + g a†a + h a²): 的系数"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    prefactor: complex = Field(1.0, description="整体前因子")
    f: complex = Field(0.0, description="a†² 系数")
    g: complex = Field(0.0, description="a†a 系数")
    h: complex = Field(0.0, description="a² 系数")

    coerce_complex = field_validator("prefactor", "f", "g", "h", mode="before")(
        lambda cls, v: _to_complex(v))

    @model_validator(mode="after")
    def _check_base(self):
        if abs(1.0 + self.g) == 0.0:
            raise SingularExponentError("1 + g = 0，(1+g)^N 无定义")
        return self


class Route(str, Enum):
    """Fresnel 算符的构造路径"""
    NORMAL_ORDER = "normal-order"
    CANONICAL = "canonical"


class FresnelBuild(BaseModel):
    """一次 Fresnel 算符构造的结果"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: RayMatrix
    route: Route
    op: FockOperator

    @property
    def dim(self) -> int:
        return self.op.dim


class SqueezedVacuumDescriptor(BaseModel):
    """由 q 参数描述的压缩真空态"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    q: QParam
    prefactor: complex = Field(..., description="态的前因子")
    dim: int = Field(..., ge=2, description="截断维数")

    coerce_complex = field_validator("prefactor", mode="before")(lambda cls, v: _to_complex(v))

    @model_validator(mode="after")
    def _check_half_plane(self):
        if not self.q.in_upper_half_plane:
            raise NonNormalizableError(f"Im q = {self.q.q.imag} <= 0，态不可归一")
        return self

    @property
    def mu(self) -> complex:
        """a†² 的指数系数 (q-i)/(2(q+i))"""
        q = self.q.q
        return (q - 1j) / (2.0 * (q + 1j))


class DampedOscillatorParams(BaseModel):
    """含时质量阻尼振子参数（ħ = 1，初始质量 1）"""
    model_config = ConfigDict(frozen=True)

    gamma: float = Field(..., ge=0.0, description="阻尼 γ")
    omega0: float = Field(1.0, gt=0.0, description="固有频率 ω₀")
    t: float = Field(0.0, ge=0.0, description="时间")

    @model_validator(mode="after")
    def _check_underdamped(self):
        if self.omega0 <= self.gamma:
            raise DomainError(f"仅支持欠阻尼 ω₀ > γ，得到 ω₀={self.omega0}, γ={self.gamma}")
        return self

    @property
    def omega_squared(self) -> float:
        return self.omega0 ** 2 - self.gamma ** 2

    def at(self, t: float) -> "DampedOscillatorParams":
        return DampedOscillatorParams(gamma=self.gamma, omega0=self.omega0, t=t)


class SystemElement(BaseModel):
    """系统描述文件中的一个光学元件"""
    kind: Literal["free", "lens", "magnifier", "matrix"] = Field(..., description="元件类型")
    params: List[float] = Field(default_factory=list, description="元件参数")
    line: Optional[int] = Field(None, exclude=True, description="元件在文件中的起始行号")

    @model_validator(mode="after")
    def _check_arity(self):
        expected = 4 if self.kind == "matrix" else 1
        if len(self.params) != expected:
            raise ValueError(f"{self.kind} 需要 {expected} 个参数，得到 {len(self.params)} 个")
        return self


class VerificationCase(BaseModel):
    """单个验证用例"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    suite: str = Field(..., description="所属套件")
    name: str = Field(..., description="用例名称")
    residual: float = Field(..., description="残差")
    tolerance: float = Field(..., description="容差")
    phase: Optional[complex] = Field(None, description="提取的全局相位")

    @field_validator("phase", mode="before")
    @classmethod
    def _coerce_phase(cls, value):
        return None if value is None else _to_complex(value)

    @computed_field(alias="pass")
    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.residual) and self.residual <= self.tolerance)

    @field_serializer("phase")
    def _serialize_phase(self, phase: Optional[complex]):
        if phase is None:
            return None
        return [phase.real, phase.imag]


class VerificationReport(BaseModel):
    """验证报告"""
    suite_name: str = Field(..., description="套件选择器")
    dim: int = Field(..., description="截断维数")
    seed: int = Field(..., description="随机种子")
    cases: List[VerificationCase] = Field(default_factory=list, description="用例列表")

    def add_cases(self, cases: List[VerificationCase]):
        self.cases.extend(cases)

    @computed_field
    @property
    def total(self) -> int:
        return len(self.cases)

    @computed_field
    @property
    def failed(self) -> int:
        return sum(1 for case in self.cases if not case.passed)

    @property
    def all_passed(self) -> bool:
        return self.failed == 0

    def filter_by_suite(self, suite: str) -> List[VerificationCase]:
        return [case for case in self.cases if case.suite == suite]


class VerificationSettings(BaseModel):
    """验证套件配置"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    group_trials: int = Field(100, ge=1, description="乘法规则随机矩阵对数")
    abcd_trials: int = Field(50, ge=1, description="ABCD 定律随机矩阵对数")
    classical_trials: int = Field(1000, ge=1, description="经典层随机试验次数")
    kernel_matrices: int = Field(5, ge=1, description="积分核对比的随机矩阵数")
    kernel_dim: int = Field(256, ge=2, description="积分核对比的截断维数")
    kernel_extent: float = Field(2.0, gt=0.0, description="积分核网格半宽")
    kernel_points: int = Field(41, ge=2, description="积分核网格每维点数")
    kernel_b_range: Tuple[float, float] = Field((0.5, 2.0), description="积分核用例 |B| 范围")
    lens_range: Tuple[float, float] = Field((-2.0, 2.0), description="随机透镜参数范围")
    magnifier_range: Tuple[float, float] = Field((0.5, 2.0), description="随机放大率范围")
    propagator_range: Tuple[float, float] = Field((-2.0, 2.0), description="随机传播参数范围")
    max_entry: Optional[float] = Field(2.0, gt=0.0, description="随机矩阵元素绝对值上限")
    product_padding: int = Field(8, ge=1, description="算符乘积与幺正性在 padding·N 维上计算")
    route_matrices: List[Tuple[float, float, float, float]] = Field(
        [(2.0, 1.0, 1.0, 1.0), (1.0, 0.5, -0.4, 0.8), (0.8, -0.3, 0.5, 1.0625)],
        description="两条构造路径对比用的 (A, B, C, D)")
    identity_lambdas: List[complex] = Field([0.1, 0.3, 0.5 + 0.2j],
                                            description="e^{λX²} 恒等式的 λ")
    damped_gammas: List[float] = Field([0.1, 0.3], description="阻尼振子 γ 取值")
    damped_times: List[float] = Field([0.25, 1.0], description="阻尼振子时刻")
    omega0: float = Field(1.0, gt=0.0, description="阻尼振子固有频率")

    # 各检查的容差
    group_tolerance: float = 1e-6
    unitarity_tolerance: float = 1e-7
    abcd_tolerance: float = 1e-7
    identity_tolerance: float = 1e-8
    kernel_tolerance: float = 1e-3
    transform_tolerance: float = 1e-6
    wavefunction_tolerance: float = 1e-5
    damped_tolerance: float = 1e-7
    hamiltonian_tolerance: float = 1e-6
    classical_tolerance: float = 1e-9
    exact_tolerance: float = 1e-12

    @field_validator("kernel_b_range", "lens_range", "magnifier_range", "propagator_range")
    @classmethod
    def _check_range(cls, value):
        low, high = value
        if low > high:
            raise ValueError(f"范围下限 {low} 大于上限 {high}")
        return value

    @field_validator("identity_lambdas", mode="before")
    @classmethod
    def _as_complex_list(cls, value):
        return [_to_complex(v) for v in value]
