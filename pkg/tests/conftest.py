import numpy as np
import pytest
from sample_path_causality.core.ground_truth import example1_params, figure1_params
from sample_path_causality.models.process import ProcessParams, RegimeCoefficients

# 闭式例子的三个数值
EXAMPLE1_C_Y1 = 0.36345
EXAMPLE1_C_Y0 = 0.018707
EXAMPLE1_EXPECTED = 0.087656


@pytest.fixture
def example1():
    return example1_params(n=10_000)


@pytest.fixture
def figure1():
    return figure1_params(n=2000)


@pytest.fixture
def independent():
    """两个独立的公平硬币过程"""
    return ProcessParams(regime1=RegimeCoefficients(), n=10_000)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def out_dir(tmp_path):
    return str(tmp_path / "out")
