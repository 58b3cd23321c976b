import logging
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from commands.thp.models import Constellation, ExperimentConfig  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def qam4():
    return Constellation.from_order(4)


@pytest.fixture
def small_config():
    return ExperimentConfig(n_T=4, K=4, M=4, trials=40, seed=7, snr_grid=(0.0, 20.0, 40.0),
                            bits_grid=(4, 8), workers=1)


@pytest.fixture
def package_log(caplog):
    """caplog that also sees the package loggers, which do not propagate to root"""
    logger = logging.getLogger('commands')
    logger.addHandler(caplog.handler)
    caplog.set_level(logging.INFO, logger='commands')
    yield caplog
    logger.removeHandler(caplog.handler)
