"""共享 fixture"""

import logging
import math

import numpy as np
import pytest

from rabi_esd.core.model import ModelParams, TruncationPolicy


@pytest.fixture(autouse=True)
def reset_package_logger():
    """CLI 会在包 logger 上装 handler 并关闭传播，caplog 需要恢复"""
    yield
    logger = logging.getLogger("rabi_esd")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
    logger.setLevel(logging.NOTSET)
    logger.propagate = True


@pytest.fixture
def resonant():
    """ω = Δ = 1 的参数工厂"""
    def make(g: float, alpha: float = math.pi / 4) -> ModelParams:
        return ModelParams(omega=1.0, delta_atom=1.0, g=g, alpha=alpha)
    return make


@pytest.fixture
def short_times() -> np.ndarray:
    return np.linspace(0.0, 10.0, 201)


@pytest.fixture
def quick_policy() -> TruncationPolicy:
    """探针网格缩短的截断策略，单元测试用"""
    return TruncationPolicy(probe_t_max=10.0, probe_steps=101)
