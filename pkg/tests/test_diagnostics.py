import numpy as np
import pytest

from thincouple.diagnostics import (
    MassLedger,
    distance_to_steady,
    mean_steady_value,
    node_average,
    steady_denominator,
    total_mass,
)
from thincouple.errors import ModelKindError
from thincouple.grids import CoupledState, EpsState
from thincouple.operators import ModelKind

SRC = ModelKind("limit_source", 1.0)


def preset_state(grids, f_u, f_v):
    X, Y = grids.rect.mesh()
    z = grids.seg.z
    return CoupledState(np.asarray(f_u(X, Y), float) * np.ones_like(X), np.asarray(f_v(z), float) * np.ones_like(z))


def test_mass_examples(grids):
    s = preset_state(grids, lambda x, y: 0.0, lambda z: 1.0)
    assert total_mass(s, SRC, grids) == pytest.approx(2.2, abs=1e-12)
    s = preset_state(grids, lambda x, y: x**2 + y**2, lambda z: 9 - z**2)
    assert total_mass(s, SRC, grids) == pytest.approx(13.992, abs=1e-9)


@pytest.mark.parametrize(
    "fu, fv, k",
    [
        (lambda x, y: 0.0 * x, lambda z: 1.0 + 0 * z, 0.3125),
        (lambda x, y: np.cos(np.pi * x / 2) * np.cos(np.pi * y / 2), lambda z: 1.0 + 0 * z, 0.538996921528758),
        (lambda x, y: np.cos(np.pi * x / 2) * np.cos(np.pi * y / 2), lambda z: 9 - z**2, 1.663996921528758),
        (lambda x, y: x**2 + y**2, lambda z: 9 - z**2, 1.9875),
        (lambda x, y: x**2 + y**2, lambda z: z**2, 1.925),
    ],
)
def test_frozen_steady_values(grids, fu, fv, k):
    assert mean_steady_value(preset_state(grids, fu, fv), SRC, grids) == pytest.approx(k, abs=1e-12)


def test_denominator(grids):
    assert steady_denominator(SRC, grids) == pytest.approx(0.04 * 121 + 0.2 * 11, abs=1e-12)
    assert steady_denominator(ModelKind("limit_source", 2.0), grids) == pytest.approx(4.84 + 4.4, abs=1e-12)


def test_distance_examples(grids):
    s = preset_state(grids, lambda x, y: 0.0, lambda z: 1.0)
    assert distance_to_steady(s, SRC, grids) == pytest.approx(1.2298373876248845, abs=1e-12)
    k = 0.7
    steady = CoupledState(np.full((11, 11), k), np.full(11, 2.0 * k))
    assert distance_to_steady(steady, ModelKind("limit_source", 2.0), grids) < 1e-14


def test_eps_mass_and_distance(grids):
    m = ModelKind("eps_source", 1.0, 0.5)
    s = EpsState(np.zeros((11, 11)), np.ones((11, 8)), 0.0, 0.5)
    assert total_mass(s, m, grids) == pytest.approx(2.2, abs=1e-12)
    assert distance_to_steady(EpsState(np.full((11, 11), 0.4), np.full((11, 8), 0.4), 0.0, 0.5), m, grids) < 1e-14
    with pytest.raises(ModelKindError):
        total_mass(CoupledState(np.zeros((11, 11)), np.zeros(11)), m, grids)


def test_node_average_and_ledger(grids):
    s = preset_state(grids, lambda x, y: 0.0, lambda z: 1.0)
    assert node_average(s) == pytest.approx(11 / 132)
    assert MassLedger(2.0, 2.0 + 1e-12).drift == pytest.approx(5e-13)
    assert MassLedger(0.0, 0.0).drift == 0.0
