"""
测试公共配置：与命令行入口一样把 src 目录加入 Python 路径
"""
import sys
from pathlib import Path

import numpy as np
import pytest

project_root = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(project_root / "src"))
sys.path.insert(0, str(project_root))

from optics.matrix_optics import random_ray_matrix  # noqa: E402

# 温和的随机矩阵范围：压缩弱，N=128 时内部块的截断误差可忽略
MILD_LENS = (-0.3, 0.3)
MILD_MAGNIFIER = (0.9, 1.1)
MILD_PROPAGATOR = (-0.3, 0.3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def mild_matrix(rng):
    """返回一个生成温和随机矩阵的函数"""
    def draw():
        return random_ray_matrix(rng, MILD_LENS, MILD_MAGNIFIER, MILD_PROPAGATOR)
    return draw


@pytest.fixture(autouse=True)
def _no_dim_override(monkeypatch):
    monkeypatch.delenv("FRESNEL_DIM", raising=False)
