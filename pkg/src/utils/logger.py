"""
日志配置
"""
import sys
from pathlib import Path

from loguru import logger

from .config import LoggingSettings


def setup_logger(settings: LoggingSettings, verbose: bool = False):
    """按配置重设 loguru 的输出

    控制台日志写到 stderr，stdout 留给 CSV 与报告输出。
    """
    logger.remove()
    level = "DEBUG" if verbose else settings.level
    if settings.console:
        logger.add(sys.stderr, level=level,
                   format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {message}")
    if settings.log_file:
        Path(settings.log_file).parent.mkdir(parents=True, exist_ok=True)
        logger.add(settings.log_file, level="DEBUG", rotation=settings.rotation,
                   encoding="utf-8")
    logger.debug(f"日志级别 {level}")
