"""
配置加载
"""
import os
from pathlib import Path
from typing import Optional, Union

import yaml
from loguru import logger
from pydantic import BaseModel, Field, ValidationError

from optics.errors import ConfigError
from optics.models import VerificationSettings

DIM_ENV_VAR = "FRESNEL_DIM"
DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent.parent / "config.yaml"


class FockSettings(BaseModel):
    """截断 Fock 空间配置"""
    default_dim: int = Field(128, ge=2, description="默认截断维数 N")
    seed: int = Field(0, ge=0, description="默认随机种子")


class OutputSettings(BaseModel):
    """输出配置"""
    output_dir: str = Field("output", description="输出目录")
    report_json: str = Field("verification_report.json", description="JSON 报告文件名")
    report_html: Optional[str] = Field("verification_report.html", description="HTML 报告文件名")


class LoggingSettings(BaseModel):
    """日志配置"""
    level: str = Field("INFO", description="日志级别")
    log_file: Optional[str] = Field(None, description="日志文件")
    console: bool = Field(True, description="是否输出到控制台（stderr）")
    rotation: str = Field("10 MB", description="日志文件轮转大小")


class AppConfig(BaseModel):
    """应用配置"""
    fock: FockSettings = Field(default_factory=FockSettings)
    verification: VerificationSettings = Field(default_factory=VerificationSettings)
    output: OutputSettings = Field(default_factory=OutputSettings)
    logging: LoggingSettings = Field(default_factory=LoggingSettings)


def load_config(path: Union[str, Path, None] = None) -> AppConfig:
    """读取 YAML 配置；环境变量 FRESNEL_DIM 覆盖 fock.default_dim

    Args:
        path: 配置文件路径，为 None 时使用仓库根目录的 config.yaml，文件不存在则取默认值
    """
    explicit = path is not None
    path = Path(path) if explicit else DEFAULT_CONFIG_PATH
    data = {}
    if path.exists():
        try:
            with open(path, "r", encoding="utf-8") as f:
                data = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise ConfigError(f"配置文件 {path} 无法解析: {e}") from e
        if not isinstance(data, dict):
            raise ConfigError(f"配置文件 {path} 顶层必须是映射")
    elif explicit:
        raise ConfigError(f"配置文件不存在: {path}")

    env_dim = os.getenv(DIM_ENV_VAR)
    if env_dim:
        try:
            dim = int(env_dim)
        except ValueError as e:
            raise ConfigError(f"{DIM_ENV_VAR}={env_dim!r} 不是整数") from e
        data.setdefault("fock", {})
        data["fock"] = {**(data["fock"] or {}), "default_dim": dim}
        logger.debug(f"{DIM_ENV_VAR} 覆盖默认维数: {dim}")

    try:
        return AppConfig(**data)
    except ValidationError as e:
        raise ConfigError(f"配置无效: {e}") from e
