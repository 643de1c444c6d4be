import numpy as np
import pytest

from lastmile.datasets import generate_synthetic_dataset
from lastmile.mlp import MLPModel, train_mlp
from lastmile.satisfaction import EconParams

DATA_SEED = 11
TRAIN_SEED = 5


@pytest.fixture(scope="session")
def params():
    return EconParams()


@pytest.fixture(scope="session")
def train_result():
    # one shared training run; model quality itself is asserted in the
    # acceptance tests, unit tests only need a realistic scorer
    dataset = generate_synthetic_dataset(5000, seed=DATA_SEED)
    return train_mlp(dataset, seed=TRAIN_SEED)


@pytest.fixture(scope="session")
def full_model(train_result):
    return MLPModel(train_result.weights)


@pytest.fixture()
def rng():
    return np.random.default_rng(12345)
