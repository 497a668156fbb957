"""Conserved mass, the steady value it selects, and distance to that steady state."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ModelKindError
from .grids import CoupledState, EpsState, GridSet
from .operators import ModelKind

_FLOOR = 1e-300


@dataclass(frozen=True)
class MassLedger:
    q0: float
    q_t: float

    @property
    def drift(self) -> float:
        return abs(self.q_t - self.q0) / max(abs(self.q0), _FLOOR)


def _check_kind(state, model: ModelKind) -> None:
    expected = EpsState if model.type.is_eps else CoupledState
    if not isinstance(state, expected):
        raise ModelKindError(f"{model.type.value} needs a {expected.__name__}")


def total_mass(state, model: ModelKind, grids: GridSet) -> float:
    """``h^2 sum u + h sum V`` (limit) or ``h^2 sum u + h h2 sum v`` (epsilon)."""
    _check_kind(state, model)
    q_u = grids.rect.h**2 * float(np.sum(state.u))
    if model.type.is_eps:
        return q_u + grids.seg.h * grids.box.h2 * float(np.sum(state.v))
    return q_u + grids.seg.h * float(np.sum(state.V))


def steady_denominator(model: ModelKind, grids: GridSet) -> float:
    """Mass carried by the steady pair with ``k = 1``."""
    return grids.rect.h**2 * grids.rect.size + grids.seg.h * grids.seg.M * model.r2_measure


def mean_steady_value(state0, model: ModelKind, grids: GridSet) -> float:
    """Constant ``k`` such that ``u = k, V = |R2| k`` carries the mass of ``state0``.

    For epsilon models the steady pair is ``u = k, v = k``, whose section
    average is again ``|R2| k``.
    """
    return total_mass(state0, model, grids) / steady_denominator(model, grids)


def distance_to_steady(state, model: ModelKind, grids: GridSet, k: float | None = None) -> float:
    """Weighted L2 distance to the steady pair.

    Limit models use ``|R2| h^2 sum (u-k)^2 + h sum (V - |R2| k)^2``; epsilon
    models use ``h^2 sum (u-k)^2 + h h2 sum (v-k)^2``. When ``k`` is omitted
    it is taken from the mass of ``state`` itself, which equals the initial
    value along any trajectory.
    """
    if k is None:
        k = mean_steady_value(state, model, grids)
    rect, seg = grids.rect, grids.seg
    if model.type.is_eps:
        sq = rect.h**2 * np.sum((state.u - k) ** 2) + seg.h * grids.box.h2 * np.sum((state.v - k) ** 2)
    else:
        r2 = model.r2_measure
        sq = r2 * rect.h**2 * np.sum((state.u - k) ** 2) + seg.h * np.sum((state.V - r2 * k) ** 2)
    return float(np.sqrt(sq))


def node_average(state) -> float:
    """Plain average over all nodes, ignoring quadrature weights."""
    second = state.v if isinstance(state, EpsState) else state.V
    return float((np.sum(state.u) + np.sum(second)) / (state.u.size + second.size))
