"""Energies, Rayleigh quotients, the spectral gap and decay-rate fitting for the limit models.

Conventions: ``lambda1`` is the smallest nonzero eigenvalue of ``-A`` in the
weighted inner product, i.e. the asymptotic exponential decay rate of the
distance to the steady state. Because the energy is half the dissipation,
``energy / weighted_norm`` has infimum ``lambda1 / 2`` over mass-free states.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DisconnectedCouplingError, MassConstraintError, ModelKindError
from .grids import CoupledState, EpsState, GridSet
from .kernels import KernelSpec
from .operators import CoupledSystem, Generator, ModelKind, ModelType

NEAR_ZERO = 1e-10


@dataclass
class SpectralReport:
    lambda1: float
    kernel_residual: float
    eigenvalues: np.ndarray = field(repr=False)
    n_near_zero: int = 1
    fitted_rate: float | None = None
    fit_window: tuple[float, float] | None = None

    @property
    def energy_quotient_min(self) -> float:
        """Infimum of ``energy / weighted_norm`` over mass-free states."""
        return 0.5 * self.lambda1

    def as_text(self) -> str:
        lines = [
            f"lambda1={self.lambda1!r}",
            f"energy_quotient_min={self.energy_quotient_min!r}",
            f"kernel_residual={self.kernel_residual!r}",
            f"n_near_zero={self.n_near_zero}",
            f"n_eigenvalues={len(self.eigenvalues)}",
        ]
        if self.fitted_rate is not None:
            lines.append(f"fitted_rate={self.fitted_rate!r}")
            lines.append(f"fit_window={self.fit_window[0]!r},{self.fit_window[1]!r}")
        return "\n".join(lines) + "\n"


# --- energies -------------------------------------------------------------


def _limit_energy(system: CoupledSystem, u: np.ndarray, V: np.ndarray) -> float:
    grids, r2 = system.grids, system.model.r2_measure
    rect, seg = grids.rect, grids.seg
    # forward differences on every neighbour edge; h^2 |grad_h u|^2 = (du)^2
    grad_sq = np.sum(np.diff(u, axis=1) ** 2) + np.sum(np.diff(u, axis=0) ** 2)
    e_local = 0.5 * r2 * grad_sq
    dV = V[None, :] - V[:, None]
    e_nonlocal = 0.25 * r2 * seg.h**2 * np.sum(system.Jmat * dV**2)
    if system.model.type is ModelType.LIMIT_SOURCE:
        uc = u[rect.interior_mask()]
        cell = rect.h**2 * seg.h
    else:
        uc = u.ravel()[rect.gamma_nodes]
        cell = rect.h * seg.h
    e_coupling = 0.5 * cell * np.sum(system.Gmat * (V[None, :] - r2 * uc[:, None]) ** 2)
    return float(e_local + e_nonlocal + e_coupling)


def system_energy(system: CoupledSystem, state) -> float:
    """Energy of ``state``; epsilon models use ``-1/2 <w, A w>`` in their own weights."""
    if system.model.type.is_eps:
        if not isinstance(state, EpsState):
            raise ModelKindError("epsilon models need an EpsState")
        d = system.rhs(state)
        wu, wv = system.weights()
        return float(-0.5 * (np.sum(wu * state.u * d.u) + np.sum(wv * state.v * d.v)))
    if not isinstance(state, CoupledState):
        raise ModelKindError("limit models need a CoupledState")
    return _limit_energy(system, state.u, state.V)


def energy(state, model: ModelKind, kernels: tuple[KernelSpec, KernelSpec], grids: GridSet) -> float:
    """Discrete energy whose weighted gradient flow is the limit scheme."""
    if model.type.is_eps:
        raise ModelKindError("energy is defined for limit models")
    return system_energy(CoupledSystem(model, kernels, grids), state)


def weighted_norm(state: CoupledState, r2_measure: float, grids: GridSet) -> float:
    """Squared norm ``|R2| h^2 sum u^2 + h sum V^2``."""
    return float(r2_measure * grids.rect.h**2 * np.sum(state.u**2) + grids.seg.h * np.sum(state.V**2))


def rayleigh_quotient(state: CoupledState, model: ModelKind, kernels, grids: GridSet) -> float:
    """``energy / weighted_norm`` for a state carrying no conserved mass."""
    norm = weighted_norm(state, model.r2_measure, grids)
    if norm == 0.0:
        raise MassConstraintError("zero state has no Rayleigh quotient")
    mass = grids.rect.h**2 * np.sum(state.u) + grids.seg.h * np.sum(state.V)
    total_weight = grids.rect.h**2 * grids.rect.size / model.r2_measure + grids.seg.h * grids.seg.M
    if abs(mass) > 1e-10 * np.sqrt(norm * total_weight):
        raise MassConstraintError(f"state carries mass {mass!r}; project it out first")
    return energy(state, model, kernels, grids) / norm


def remove_mass(state: CoupledState, model: ModelKind, grids: GridSet) -> CoupledState:
    """Subtract the steady pair carrying the same mass, leaving a mass-free state."""
    from .diagnostics import mean_steady_value

    k = mean_steady_value(state, model, grids)
    return CoupledState(state.u - k, state.V - model.r2_measure * k, state.t)


# --- spectrum ----------------------------------------------------------------


def _symmetrized(gen: Generator) -> tuple[np.ndarray, np.ndarray]:
    root = np.sqrt(gen.weights)
    S = root[:, None] * gen.matrix / root[None, :]
    return 0.5 * (S + S.T), root


def weighted_symmetry_defect(gen: Generator) -> float:
    """``max|WA - (WA)^T| / max|WA|``."""
    WA = gen.weights[:, None] * gen.matrix
    return float(np.max(np.abs(WA - WA.T)) / np.max(np.abs(WA)))


def weighted_spectrum(gen: Generator) -> np.ndarray:
    """Eigenvalues of ``-A`` in the weighted inner product, ascending."""
    S, _ = _symmetrized(gen)
    return np.sort(-np.linalg.eigvalsh(S))


def smallest_nonzero_eigenvalue(gen: Generator) -> SpectralReport:
    ev = weighted_spectrum(gen)
    scale = np.max(np.abs(ev))
    near_zero = np.abs(ev) <= NEAR_ZERO * scale
    n0 = int(np.count_nonzero(near_zero))
    if n0 > 1:
        raise DisconnectedCouplingError(
            f"{n0} near-zero eigenvalues: kernel supports do not connect the domains"
        )
    if n0 == 0:
        raise DisconnectedCouplingError("no near-zero eigenvalue: operator does not conserve mass")
    rest = ev[~near_zero]
    residual = float(np.max(np.abs(gen.matrix @ gen.steady_vector())))
    return SpectralReport(float(np.min(np.abs(rest))), residual, ev, n0)


def slowest_mode(gen: Generator) -> tuple[float, np.ndarray]:
    """``(lambda1, w)`` with ``-A w = lambda1 w``, ``w`` normalized in the weighted norm."""
    S, root = _symmetrized(gen)
    vals, vecs = np.linalg.eigh(S)
    vals = -vals
    order = np.argsort(vals)
    i = order[1]
    w = vecs[:, i] / root
    return float(vals[i]), w


def exact_evolution(gen: Generator, state0, t: float):
    """``exp(t A) state0`` via the symmetric eigendecomposition.

    Accepts a flat vector or a :class:`CoupledState` and returns the same kind.
    """
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t!r}")
    if isinstance(state0, CoupledState):
        w0 = state0.flatten()
    else:
        w0 = np.asarray(state0, dtype=float)
    if t == 0:
        w = w0.copy()
    else:
        S, root = _symmetrized(gen)
        vals, vecs = np.linalg.eigh(S)
        # eigenvalues of S are <= 0 up to roundoff; clip positive noise so t -> inf stays bounded
        vals = np.minimum(vals, 0.0)
        w = (vecs @ (np.exp(t * vals) * (vecs.T @ (root * w0)))) / root
    if isinstance(state0, CoupledState):
        n_u = state0.u.size
        return CoupledState(w[:n_u].reshape(state0.u.shape), w[n_u:], state0.t + t)
    return w


def decay_rate_fit(series, window: tuple[float, float] | None = None) -> float:
    """Negated least-squares slope of ``log(distance)`` against time.

    ``window`` defaults to the last half of the series.
    """
    t = np.asarray(series.t, dtype=float)
    d = np.asarray(series.distance, dtype=float)
    if window is None:
        window = (t[0] + 0.5 * (t[-1] - t[0]), t[-1])
    lo, hi = window
    sel = (t >= lo) & (t <= hi)
    if np.count_nonzero(sel) < 3:
        raise ValueError(f"need at least 3 samples in window {window}, got {np.count_nonzero(sel)}")
    if np.any(d[sel] <= 0):
        raise ValueError("distance must be strictly positive inside the fit window")
    slope, _ = np.polyfit(t[sel], np.log(d[sel]), 1)
    return float(-slope)
