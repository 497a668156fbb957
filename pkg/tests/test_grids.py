import numpy as np
import pytest

from thincouple.errors import ConfigError, ShapeError
from thincouple.grids import BoxGrid, CoupledState, EpsState, NodeClass, RectGrid, SegmentGrid, make_grids


def test_default_grid():
    g = make_grids()
    rect = g.rect
    assert rect.h == pytest.approx(0.2, abs=1e-15)
    counts = rect.class_counts()
    assert counts[NodeClass.INTERIOR] == 81
    assert counts[NodeClass.EDGE] == 36
    assert counts[NodeClass.CORNER] == 4
    assert rect.x[0] == -1.0 and rect.x[-1] == 1.0 and rect.y[0] == -1.0 and rect.y[-1] == 1.0
    np.testing.assert_allclose(np.diff(rect.x), 0.2, atol=1e-15)


def test_segment_nodes():
    seg = make_grids().seg
    np.testing.assert_allclose(seg.z, [1.0 + 0.2 * k for k in range(11)], atol=1e-15)
    assert seg.z[0] == 1.0 and seg.z[-1] == 3.0


def test_smallest_grid():
    g = RectGrid(0.0, 1.0, 0.0, 1.0, 3, 3)
    mask = g.interior_mask()
    assert mask.sum() == 1
    X, Y = g.mesh()
    assert (X[mask][0], Y[mask][0]) == (0.5, 0.5)


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(omega_bounds=(-1, 1, -1, 2)),
        dict(m=2, n=2),
        dict(m2=1),
        dict(gamma_side="diagonal"),
    ],
)
def test_invalid(kwargs):
    with pytest.raises(ConfigError):
        make_grids(**kwargs)


def test_class_counts_general():
    g = RectGrid(0.0, 6.0, 0.0, 4.0, 7, 5)
    counts = g.class_counts()
    assert counts[NodeClass.CORNER] == 4
    assert counts[NodeClass.EDGE] == 2 * (7 - 2) + 2 * (5 - 2)
    assert counts[NodeClass.INTERIOR] == (7 - 2) * (5 - 2)


@pytest.mark.parametrize("side", ["top", "bottom", "left", "right"])
def test_gamma_is_one_side(side):
    g = make_grids(gamma_side=side).rect
    cls = g.node_class.ravel()[g.gamma_nodes]
    assert np.all(cls != NodeClass.INTERIOR)
    assert np.count_nonzero(cls == NodeClass.CORNER) == 2
    x, y = g.gamma_coords()
    fixed = {"top": (y, 1.0), "bottom": (y, -1.0), "left": (x, -1.0), "right": (x, 1.0)}[side]
    assert np.all(fixed[0] == fixed[1])


def test_gamma_defaults_to_top_row():
    g = make_grids().rect
    np.testing.assert_array_equal(g.gamma_nodes, np.arange(110, 121))


def test_rebuild_bit_identical():
    a, b = make_grids(), make_grids()
    for attr in ("x", "y"):
        assert getattr(a.rect, attr).tobytes() == getattr(b.rect, attr).tobytes()
    assert a.seg.z.tobytes() == b.seg.z.tobytes()
    assert a.box.s.tobytes() == b.box.s.tobytes()


def test_box_grid():
    seg = SegmentGrid(1.0, 3.0, 11)
    box = BoxGrid(seg, 0.0, 1.0, 8)
    assert box.h2 == 0.125 and box.shape == (11, 8)
    np.testing.assert_array_equal(box.s, np.arange(8) * 0.125)


def test_state_validation():
    g = make_grids()
    CoupledState(np.zeros((11, 11)), np.zeros(11)).validate(g)
    with pytest.raises(ShapeError):
        CoupledState(np.zeros((11, 10)), np.zeros(11)).validate(g)
    with pytest.raises(ShapeError):
        CoupledState(np.full((11, 11), np.nan), np.zeros(11)).validate(g)
    with pytest.raises(ShapeError):
        EpsState(np.zeros((11, 11)), np.zeros((11, 7)), eps=0.5).validate(g)
    with pytest.raises(ConfigError):
        EpsState(np.zeros((11, 11)), np.zeros((11, 8)), eps=0.0).validate(g)


def test_flatten_roundtrip(rng):
    g = make_grids()
    s = CoupledState(rng.normal(size=(11, 11)), rng.normal(size=11))
    back = CoupledState.from_flat(s.flatten(), g)
    np.testing.assert_array_equal(back.u, s.u)
    np.testing.assert_array_equal(back.V, s.V)
    # row-major, j outer: second entry is (i=1, j=0)
    assert s.flatten()[1] == s.u[0, 1]
