"""Pre-limit thin-domain runs and their convergence to the limit problem as eps -> 0."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig, initial_state
from .errors import ConfigError, KernelPairingError, ShapeError
from .grids import BoxGrid, GridSet
from .operators import CoupledSystem, ModelType
from .stepper import StepPlan, TimeSeries, run


@dataclass
class SweepResult:
    eps_values: list[float] = field(default_factory=list)
    distances: list[float] = field(default_factory=list)
    u_distances: list[float] = field(default_factory=list)
    t_compare: float = 0.0
    model_pair: tuple[ModelType, ModelType] = (ModelType.EPS_SOURCE, ModelType.LIMIT_SOURCE)

    def to_csv(self) -> str:
        rows = ["eps,distance,u_distance"]
        rows += [f"{e!r},{d!r},{du!r}" for e, d, du in zip(self.eps_values, self.distances, self.u_distances)]
        return "\n".join(rows) + "\n"


def average_over_r2(v: np.ndarray, box: BoxGrid) -> np.ndarray:
    """Section average ``V(z) = h2 * sum_m v(z, s_m)``."""
    v = np.asarray(v, dtype=float)
    if v.shape != box.shape:
        raise ShapeError(f"v has shape {v.shape}, expected {box.shape}")
    return box.h2 * v.sum(axis=1)


def eps_config(config: RunConfig, eps: float) -> RunConfig:
    """Copy of ``config`` switched to the epsilon model paired with it."""
    return config.replace(model=config.model.eps_partner, eps=eps)


def run_eps_problem(config: RunConfig, eps: float, t_final: float | None = None) -> tuple[TimeSeries, object]:
    """Evolve the epsilon problem; returns ``(series, final_state)``."""
    cfg = eps_config(config, eps)
    if t_final is not None:
        cfg = cfg.replace(t_final=t_final)
    grids = cfg.grids()
    system = CoupledSystem(cfg.model_kind(), cfg.kernels(), grids)
    series, final, _ = run(initial_state(cfg, grids), system, cfg.plan())
    return series, final


def _limit_run(config: RunConfig, t_compare: float):
    cfg = config.replace(model=config.model.limit, eps=None, t_final=t_compare)
    grids = cfg.grids()
    system = CoupledSystem(cfg.model_kind(), cfg.kernels(), grids)
    _, final, _ = run(initial_state(cfg, grids), system, cfg.plan())
    return final, grids


def sweep_and_compare(config: RunConfig, eps_list, t_compare: float) -> SweepResult:
    """Distance between the section average of each epsilon run and the limit run at ``t_compare``.

    ``D(eps) = sqrt(h * sum_k (V^eps_k - V*_k)^2)``. The limit run uses the
    zero slice of the same 2D kernel ``J``, so both sides share one limit.
    """
    eps_list = [float(e) for e in eps_list]
    result = SweepResult(t_compare=t_compare, model_pair=(config.model.eps_partner, config.model.limit))
    if any(not (0.0 < e <= 1.0) for e in eps_list):
        raise ConfigError("every eps must lie in (0, 1]", key="eps")
    if any(a <= b for a, b in zip(eps_list, eps_list[1:])):
        raise ConfigError("eps list must be strictly descending", key="eps")
    if config.kernel_j.dim != 2:
        raise KernelPairingError(
            "the sweep needs a 2D kernel_j so the limit run can use its zero slice", key="kernel_j"
        )
    if not eps_list:
        return result
    limit_state, grids = _limit_run(config, t_compare)
    h = grids.seg.h
    for eps in eps_list:
        _, state = run_eps_problem(config, eps, t_final=t_compare)
        V_eps = average_over_r2(state.v, grids.box)
        result.eps_values.append(eps)
        result.distances.append(float(np.sqrt(h * np.sum((V_eps - limit_state.V) ** 2))))
        result.u_distances.append(float(np.max(np.abs(state.u - limit_state.u))))
    return result
