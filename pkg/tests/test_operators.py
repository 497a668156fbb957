import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from thincouple.errors import KernelKindError, ModelKindError, ShapeError
from thincouple.grids import CoupledState, EpsState, make_grids
from thincouple.kernels import KernelSpec
from thincouple.operators import (
    CoupledSystem,
    ModelKind,
    ModelType,
    assemble_generator,
    coupling_boundary,
    coupling_source,
    gershgorin_bound,
    laplacian_neumann,
    nonlocal_diffusion,
    rhs,
)

from .conftest import G_2D, J_1D, J_2D


# --- loop oracles written straight from the discrete schemes -----------------


def _J1(d):
    return 0.5 * math.cos(d) if abs(d) <= math.pi / 2 else 0.0


def _G(d1, d2):
    if abs(d1) > math.pi / 2 or abs(d2) > math.pi / 2:
        return 0.0
    return 0.25 * math.cos(d1) * math.cos(d2)


def _lap(u, i, j, h):
    N, M = u.shape
    acc = 0.0
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        ii, jj = i + di, j + dj
        if 0 <= ii < M and 0 <= jj < N:
            acc += u[jj, ii] - u[j, i]
    return acc / h**2


def oracle_limit(u, V, g, source, R=1.0):
    rect, seg = g.rect, g.seg
    h, hr = rect.h, seg.h
    N, M = u.shape
    du = np.zeros_like(u)
    dV = np.zeros_like(V)
    gamma = set(int(q) for q in rect.gamma_nodes)
    for j in range(N):
        for i in range(M):
            du[j, i] = _lap(u, i, j, h)
            interior = 0 < i < M - 1 and 0 < j < N - 1
            on_gamma = j * M + i in gamma
            if (source and interior) or (not source and on_gamma):
                for k in range(seg.M):
                    flux = _G(rect.x[i] - seg.z[k], rect.y[j]) * (V[k] - R * u[j, i])
                    du[j, i] += (hr if source else hr / h) * flux
                    dV[k] -= (h**2 if source else h) * flux
    for k in range(seg.M):
        for p in range(seg.M):
            dV[k] += R * hr * _J1(seg.z[k] - seg.z[p]) * (V[p] - V[k])
    return du, dV


def oracle_eps(u, v, g, eps, source):
    rect, seg, box = g.rect, g.seg, g.box
    h, hr, h2 = rect.h, seg.h, box.h2
    N, M = u.shape
    du = np.zeros_like(u)
    dv = np.zeros_like(v)
    gamma = set(int(q) for q in rect.gamma_nodes)
    for j in range(N):
        for i in range(M):
            du[j, i] = _lap(u, i, j, h)
            interior = 0 < i < M - 1 and 0 < j < N - 1
            if not ((source and interior) or (not source and j * M + i in gamma)):
                continue
            x, y = rect.x[i], rect.y[j]
            for k in range(seg.M):
                for m in range(box.M2):
                    s = box.s[m]
                    du[j, i] += (1.0 if source else 1.0 / h) * hr * h2 * _G(x - seg.z[k], y - eps * s) * (v[k, m] - u[j, i])
                    dv[k, m] -= (h**2 if source else h) * _G(seg.z[k] - x, eps * s - y) * (v[k, m] - u[j, i])
    for k in range(seg.M):
        for m in range(box.M2):
            for p in range(seg.M):
                for n in range(box.M2):
                    Jv = _G(seg.z[k] - seg.z[p], eps * (box.s[m] - box.s[n]))
                    dv[k, m] += hr * h2 * Jv * (v[p, n] - v[k, m])
    return du, dv


# --- tests ------------------------------------------------------------------------


def test_laplacian_constant_and_single_spike():
    assert np.all(laplacian_neumann(np.full((5, 5), 3.0), 0.5) == 0)
    u = np.zeros((5, 5))
    u[2, 2] = 1.0
    L = laplacian_neumann(u, 1.0)
    assert L[2, 2] == -4 and L[1, 2] == L[3, 2] == L[2, 1] == L[2, 3] == 1
    u = np.zeros((5, 5))
    u[0, 0] = 1.0
    assert laplacian_neumann(u, 1.0)[0, 0] == -2
    u = np.zeros((5, 5))
    u[0, 2] = 1.0
    assert laplacian_neumann(u, 1.0)[0, 2] == -3


def test_laplacian_sums_to_zero(rng):
    L = laplacian_neumann(rng.normal(size=(7, 9)), 0.3)
    assert abs(L.sum()) < 1e-10


def test_frozen_coupling_example(grids):
    # u = 0, V = 1: node (0.8, 0) receives h_r * sum_k G*(0.8 - z_k, 0)
    loc, _ = coupling_source(np.zeros((11, 11)), np.ones(11), G_2D, 1.0, grids)
    assert loc[5, 9] == pytest.approx(0.22478985496730122, abs=1e-14)
    assert loc[5, 9] * 0.005 == pytest.approx(0.0011239492748365062, abs=1e-14)
    assert np.all(loc[0, :] == 0) and np.all(loc[:, -1] == 0)


def test_coupling_exchange_balances(grids, rng):
    u, V = rng.normal(size=(11, 11)), rng.normal(size=11)
    h, hr = grids.rect.h, grids.seg.h
    loc, nl = coupling_source(u, V, G_2D, 1.0, grids)
    assert h**2 * loc.sum() + hr * nl.sum() == pytest.approx(0.0, abs=1e-12)
    loc, nl = coupling_boundary(u, V, G_2D, 1.0, grids)
    assert h**2 * loc.sum() + hr * nl.sum() == pytest.approx(0.0, abs=1e-12)


def test_nonlocal_constant_and_mass(grids, rng):
    assert np.allclose(nonlocal_diffusion(np.full(11, 2.0), J_1D, 1.0, grids.seg), 0.0)
    assert abs(nonlocal_diffusion(rng.normal(size=11), J_1D, 1.0, grids.seg).sum()) < 1e-12
    with pytest.raises(ShapeError):
        nonlocal_diffusion(np.zeros(10), J_1D, 1.0, grids.seg)


@pytest.mark.parametrize("side", ["top", "right"])
@pytest.mark.parametrize("source", [True, False])
@pytest.mark.parametrize("R", [1.0, 2.5])
def test_limit_rhs_matches_loop_oracle(side, source, R, rng):
    g = make_grids(gamma_side=side)
    u, V = rng.normal(size=(11, 11)), rng.normal(size=11)
    mtype = ModelType.LIMIT_SOURCE if source else ModelType.LIMIT_BOUNDARY
    out = rhs(CoupledState(u, V), ModelKind(mtype, R), (J_1D, G_2D), g)
    du, dV = oracle_limit(u, V, g, source, R)
    np.testing.assert_allclose(out.u, du, atol=1e-11)
    np.testing.assert_allclose(out.V, dV, atol=1e-11)


@pytest.mark.parametrize("source", [True, False])
def test_eps_rhs_matches_loop_oracle(source, rng):
    g = make_grids(m=5, n=5, m2=3, gamma_side="right")
    eps = 0.3
    u, v = rng.normal(size=(5, 5)), rng.normal(size=(5, 3))
    mtype = ModelType.EPS_SOURCE if source else ModelType.EPS_BOUNDARY
    out = rhs(EpsState(u, v, 0.0, eps), ModelKind(mtype, 1.0, eps), (J_2D, G_2D), g)
    du, dv = oracle_eps(u, v, g, eps, source)
    np.testing.assert_allclose(out.u, du, atol=1e-11)
    np.testing.assert_allclose(out.v, dv, atol=1e-11)


def test_state_type_mismatch(grids):
    sysl = CoupledSystem(ModelKind("limit_source", 1.0), (J_1D, G_2D), grids)
    with pytest.raises(ModelKindError):
        sysl.rhs(EpsState(np.zeros((11, 11)), np.zeros((11, 8)), 0.0, 0.5))
    syse = CoupledSystem(ModelKind("eps_source", 1.0, 0.5), (J_2D, G_2D), grids)
    with pytest.raises(ModelKindError):
        syse.rhs(CoupledState(np.zeros((11, 11)), np.zeros(11)))
    with pytest.raises(ModelKindError):
        syse.rhs(EpsState(np.zeros((11, 11)), np.zeros((11, 8)), 0.0, 0.4))
    with pytest.raises(KernelKindError):
        CoupledSystem(ModelKind("eps_source", 1.0, 0.5), (J_1D, G_2D), grids)
    with pytest.raises(ModelKindError):
        assemble_generator(ModelKind("eps_source", 1.0, 0.5), (J_2D, G_2D), grids)


def test_generator_matches_rhs(limit_model, grids, rng):
    gen = assemble_generator(limit_model, (J_1D, G_2D), grids)
    s = CoupledState(rng.normal(size=(11, 11)), rng.normal(size=11))
    out = rhs(s, limit_model, (J_1D, G_2D), grids)
    np.testing.assert_allclose(gen.matrix @ s.flatten(), out.flatten(), atol=1e-11)


@pytest.mark.parametrize("R", [1.0, 0.4, 3.0])
def test_generator_structure(limit_model, grids, R):
    model = ModelKind(limit_model.type, R)
    gen = assemble_generator(model, (J_1D, G_2D), grids)
    A, w = gen.matrix, gen.weights
    assert np.abs(A @ gen.steady_vector()).max() <= 1e-10
    WA = w[:, None] * A
    assert np.abs(WA - WA.T).max() <= 1e-10
    ev = np.linalg.eigvalsh(0.5 * (WA + WA.T) / np.sqrt(w)[:, None] / np.sqrt(w)[None, :])
    assert ev.max() <= 1e-10
    # conserved mass is w . x with weights (h^2, h_r), i.e. R-free
    mass = np.concatenate([np.full(gen.n_omega, grids.rect.h**2), np.full(11, grids.seg.h)])
    assert np.abs(mass @ A).max() <= 1e-10


def test_laplacian_off_keeps_coupling(limit_model, grids):
    full = assemble_generator(limit_model, (J_1D, G_2D), grids)
    part = assemble_generator(limit_model, (J_1D, G_2D), grids, include_laplacian=False)
    assert np.abs(full.matrix[121:] - part.matrix[121:]).max() == 0
    assert np.abs(part.matrix @ part.steady_vector()).max() <= 1e-10


def test_gershgorin(limit_model, grids):
    gen = assemble_generator(limit_model, (J_1D, G_2D), grids)
    bound = gershgorin_bound(gen)
    assert 0.005 < bound
    S = np.sqrt(gen.weights)[:, None] * gen.matrix / np.sqrt(gen.weights)[None, :]
    ev = np.linalg.eigvalsh(0.5 * (S + S.T))
    assert bound <= 2.0 / abs(ev.min()) + 1e-12


@settings(max_examples=25, deadline=None)
@given(
    arrays(float, (11, 11), elements=st.floats(-5, 5)),
    arrays(float, (11,), elements=st.floats(-5, 5)),
    st.sampled_from([ModelType.LIMIT_SOURCE, ModelType.LIMIT_BOUNDARY]),
)
def test_rhs_conserves_mass_property(u, V, mtype):
    g = make_grids()
    out = rhs(CoupledState(u, V), ModelKind(mtype, 1.0), (J_1D, G_2D), g)
    assert abs(g.rect.h**2 * out.u.sum() + g.seg.h * out.V.sum()) <= 1e-9


@settings(max_examples=15, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 4.0), st.sampled_from(list(ModelType)))
def test_rhs_vanishes_on_steady_pair(c, R, mtype):
    g = make_grids(m=5, n=5, m2=3)
    if mtype.is_eps:
        model, kern = ModelKind(mtype, 1.0, 0.5), (J_2D, G_2D)
        out = rhs(EpsState(np.full((5, 5), c), np.full((5, 3), c), 0.0, 0.5), model, kern, g)
        assert np.abs(out.u).max() <= 1e-12 and np.abs(out.v).max() <= 1e-12
    else:
        model, kern = ModelKind(mtype, R), (J_1D, G_2D)
        out = rhs(CoupledState(np.full((5, 5), c), np.full(5, R * c)), model, kern, g)
        assert np.abs(out.u).max() <= 1e-11 and np.abs(out.V).max() <= 1e-11
