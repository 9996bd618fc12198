import numpy as np
import pytest

from bilab.config import WorkbenchConfig


@pytest.fixture
def cfg() -> WorkbenchConfig:
    return WorkbenchConfig().validate()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(42)
