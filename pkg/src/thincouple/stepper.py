"""Explicit Euler time integration and diagnostics recording."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .diagnostics import distance_to_steady, mean_steady_value, total_mass
from .errors import CFLViolation, ConfigError, DivergenceError
from .grids import CoupledState, EpsState
from .operators import CoupledSystem, assemble_generator, gershgorin_bound
from .spectral import system_energy

log = logging.getLogger(__name__)

CFL_SLACK = 1e-15


@dataclass(frozen=True)
class StepPlan:
    dt: float
    t_final: float
    record_every: int = 20

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt!r}", key="dt")
        if self.t_final < 0:
            raise ConfigError(f"t_final must be nonnegative, got {self.t_final!r}", key="t_final")
        if self.record_every < 1:
            raise ConfigError("record_every must be >= 1", key="record_every")

    @property
    def n_steps(self) -> int:
        n = round(self.t_final / self.dt)
        if abs(n * self.dt - self.t_final) > 1e-9 * max(self.t_final, self.dt):
            raise ConfigError(f"t_final={self.t_final!r} is not a multiple of dt={self.dt!r}", key="t_final")
        return int(n)


@dataclass
class TimeSeries:
    t: list[float] = field(default_factory=list)
    mass: list[float] = field(default_factory=list)
    distance: list[float] = field(default_factory=list)
    energy: list[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.t)

    def append(self, t: float, mass: float, distance: float, energy: float) -> None:
        self.t.append(t)
        self.mass.append(mass)
        self.distance.append(distance)
        self.energy.append(energy)

    def mass_drift(self) -> float:
        q = np.asarray(self.mass)
        return float(np.max(np.abs(q - q[0])) / max(abs(q[0]), 1e-300))


def check_cfl(dt: float, h: float) -> None:
    """Raise :class:`CFLViolation` unless ``dt <= h^2/4``."""
    if not (dt > 0 and h > 0):
        raise ConfigError("dt and h must be positive", key="dt")
    bound = h * h / 4.0
    if dt > bound + CFL_SLACK:
        raise CFLViolation(dt, bound)


def check_cfl_strict(system: CoupledSystem, dt: float) -> None:
    """Gershgorin stability check including the coupling terms (limit models only)."""
    bound = gershgorin_bound(assemble_generator(system.model, (system.kernel_j, system.kernel_g), system.grids))
    if dt > bound:
        raise CFLViolation(dt, bound)


def _fields(state):
    return (state.u, state.v) if isinstance(state, EpsState) else (state.u, state.V)


def _first_bad(state) -> str | None:
    u, other = _fields(state)
    name = "v" if isinstance(state, EpsState) else "V"
    for label, arr in (("u", u), (name, other)):
        bad = np.argwhere(~np.isfinite(arr))
        if len(bad):
            return f"{label}{tuple(int(i) for i in bad[0])}"
    return None


def euler_step(state, system: CoupledSystem, dt: float, t: float | None = None):
    """One explicit Euler step. ``t`` overrides the new time (used to avoid accumulation)."""
    new_t = state.t + dt if t is None else t
    # overflow is reported below as a DivergenceError
    with np.errstate(over="ignore", invalid="ignore"):
        d = system.rhs(state)
        if isinstance(state, EpsState):
            out = EpsState(state.u + dt * d.u, state.v + dt * d.v, new_t, state.eps)
        else:
            out = CoupledState(state.u + dt * d.u, state.V + dt * d.V, new_t)
    node = _first_bad(out)
    if node is not None:
        raise DivergenceError(f"non-finite value at node {node}", node=node)
    return out


def run(state0, system: CoupledSystem, plan: StepPlan, snapshot_steps=(), callback=None):
    """Integrate to ``plan.t_final``.

    Diagnostics are recorded before the first step, every ``record_every``
    steps and after the last step. Returns ``(series, final_state, snapshots)``
    where ``snapshots`` maps step index to state.
    """
    grids, model = system.grids, system.model
    state0 = state0.copy().validate(grids)
    check_cfl(plan.dt, grids.rect.h)
    n_steps = plan.n_steps
    k = mean_steady_value(state0, model, grids)
    t0 = state0.t
    wanted = set(int(s) for s in snapshot_steps)
    snapshots = {}
    series = TimeSeries()

    def record(state):
        with np.errstate(over="ignore", invalid="ignore"):
            series.append(
                state.t,
                total_mass(state, model, grids),
                distance_to_steady(state, model, grids, k),
                system_energy(system, state),
            )

    state = state0
    record(state)
    if 0 in wanted:
        snapshots[0] = state.copy()
    for step in range(1, n_steps + 1):
        try:
            state = euler_step(state, system, plan.dt, t=t0 + step * plan.dt)
        except DivergenceError as exc:
            raise DivergenceError(f"step {step}: {exc}", step=step, node=exc.node) from None
        if step % plan.record_every == 0 or step == n_steps:
            record(state)
        if step in wanted:
            snapshots[step] = state.copy()
        if callback is not None:
            callback(step, state)
    log.debug("finished %d steps, mass drift %.3e", n_steps, series.mass_drift())
    return series, state, snapshots
