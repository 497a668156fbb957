import numpy as np
import pytest

from thincouple.grids import make_grids
from thincouple.kernels import KernelSpec
from thincouple.operators import ModelKind, ModelType

J_1D = KernelSpec.default("cosine_half_1d")
J_2D = KernelSpec.default("cosine_product_2d")
G_2D = KernelSpec.default("cosine_product_2d")


@pytest.fixture
def grids():
    return make_grids()


@pytest.fixture
def kernels():
    return (J_1D, G_2D)


@pytest.fixture(params=[ModelType.LIMIT_SOURCE, ModelType.LIMIT_BOUNDARY], ids=["source", "boundary"])
def limit_model(request):
    return ModelKind(request.param, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20201015)


def pytest_terminal_summary(terminalreporter):
    from .test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
