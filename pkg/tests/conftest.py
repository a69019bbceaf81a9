import numpy as np
import pytest

from config import TestConfig
from polarlens import create_cli
from polarlens.models.optics import ConvMode


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def cli():
    return create_cli(TestConfig)


@pytest.fixture(params=[ConvMode.CIRCULAR, ConvMode.PAD_CROP], ids=['circular', 'pad-crop'])
def conv_mode(request):
    return request.param
