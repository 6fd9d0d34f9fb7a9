"""
异常定义

每个异常类携带命令行退出码，命令行入口据此退出。
"""


class FresnelError(Exception):
    """所有数值与输入错误的基类"""
    exit_code = 4


class SystemFileError(FresnelError):
    """系统描述文件格式错误"""
    exit_code = 2

    def __init__(self, message: str, line: int = None):
        self.line = line
        if line is not None:
            message = f"第 {line} 行: {message}"
        super().__init__(message)


class PoleError(FresnelError):
    """Möbius 变换分母为零（波前聚焦成一点）"""
    exit_code = 3


class DomainError(FresnelError):
    """参数超出定义域"""


class NonUnimodularError(DomainError):
    """AD - BC 偏离 1"""


class InconsistentPairError(DomainError):
    """(s, r) 无法还原为实 ABCD 矩阵"""


class DecompositionDomainError(DomainError):
    """A <= 0 时不存在实的放大器分解"""


class SingularExponentError(DomainError):
    """1 + g = 0，(1+g)^N 无定义"""


class DeltaKernelError(DomainError):
    """B = 0 时核退化为 delta 函数"""


class NonNormalizableError(DomainError):
    """Im q <= 0，压缩真空态不可归一"""


class NonHermitianError(DomainError):
    """输入矩阵不是厄米矩阵"""


class ConfigError(DomainError):
    """配置文件错误"""


class NumericalDegradationError(FresnelError):
    """复合后行列式漂移超出容差"""


class AliasingError(FresnelError):
    """网格过粗，啁啾相位每个采样点超过 π"""


class RangeError(FresnelError):
    """矩阵指数溢出"""


class VerificationFailure(FresnelError):
    """验证套件存在未通过的用例"""
    exit_code = 5
