# tests/conftest.py

import numpy as np
import pytest
from loguru import logger

from src.benchmarks.quadratics import RankDeficientQuadratic, TwoQuadratics
from src.benchmarks.toy_mlp import toy_mlp_build
from src.benchmarks.zdt2 import Zdt2Variant


@pytest.fixture(autouse=True)
def quiet_logs():
    """Logs limités aux warnings pendant les tests"""
    logger.remove()
    logger.add(lambda message: None, level='WARNING')
    yield
    logger.remove()


@pytest.fixture
def log_messages():
    """Messages loguru de niveau >= WARNING émis pendant le test"""
    messages = []
    handler = logger.add(lambda message: messages.append(message.record['message']), level='WARNING')
    yield messages
    try:
        logger.remove(handler)
    except ValueError:
        pass


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def zdt2():
    return Zdt2Variant()


@pytest.fixture
def two_quadratics():
    return TwoQuadratics(a=(0.0, 0.0), b=(1.0, 0.0))


@pytest.fixture
def rank_deficient():
    return RankDeficientQuadratic()


@pytest.fixture(scope='module')
def toy_mlp():
    return toy_mlp_build(seed=0)


@pytest.fixture
def tiny_mlp():
    return toy_mlp_build(seed=1, widths=[2, 3, 2])

