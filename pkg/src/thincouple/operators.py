"""Spatial operators for the coupled local/nonlocal systems.

Four models are supported:

* ``limit_source``: heat equation on the rectangle coupled to a nonlocal
  equation on the segment through source terms at interior nodes.
* ``limit_boundary``: same, but the exchange acts through the flux on the
  coupling side Gamma.
* ``eps_source`` / ``eps_boundary``: the pre-limit problems on the thin box
  ``R1 x R2`` written in rescaled coordinates.

All integrals are plain Riemann sums. Rates are returned without the time
step, i.e. ``du/dt`` and ``dV/dt``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, KernelKindError, ModelKindError, ShapeError
from .grids import CoupledState, EpsState, GridSet, RectGrid, SegmentGrid
from .kernels import KernelSpec, ScaledMode, eval_line, eval_scaled, limit_slice

ORDERING = "omega nodes row-major (j outer, i inner), then R1 nodes"


class ModelType(enum.Enum):
    LIMIT_SOURCE = "limit_source"
    LIMIT_BOUNDARY = "limit_boundary"
    EPS_SOURCE = "eps_source"
    EPS_BOUNDARY = "eps_boundary"

    @property
    def is_eps(self) -> bool:
        return self in (ModelType.EPS_SOURCE, ModelType.EPS_BOUNDARY)

    @property
    def is_source(self) -> bool:
        return self in (ModelType.LIMIT_SOURCE, ModelType.EPS_SOURCE)

    @property
    def limit(self) -> "ModelType":
        """The limit model this one converges to (identity for limit models)."""
        return ModelType.LIMIT_SOURCE if self.is_source else ModelType.LIMIT_BOUNDARY

    @property
    def eps_partner(self) -> "ModelType":
        return ModelType.EPS_SOURCE if self.is_source else ModelType.EPS_BOUNDARY


@dataclass(frozen=True)
class ModelKind:
    type: ModelType
    r2_measure: float
    eps: float | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "type", ModelType(self.type))
        if not self.r2_measure > 0:
            raise ConfigError(f"|R2| must be positive, got {self.r2_measure!r}", key="r2_measure")
        if self.type.is_eps:
            if self.eps is None:
                raise ConfigError("epsilon models need eps", key="eps")
            if not (0.0 < self.eps <= 1.0):
                raise ConfigError(f"eps must lie in (0, 1], got {self.eps!r}", key="eps")
        elif self.eps is not None:
            raise ConfigError("eps is only meaningful for epsilon models", key="eps")


@dataclass(frozen=True, eq=False)
class Generator:
    """Dense matrix ``A`` with ``dw/dt = A w`` and the weights of its inner product."""

    matrix: np.ndarray
    weights: np.ndarray
    n_omega: int
    r2_measure: float
    ordering: str = ORDERING

    @property
    def size(self) -> int:
        return self.matrix.shape[0]

    def steady_vector(self) -> np.ndarray:
        """The constant pair ``(1, |R2|)`` spanning the kernel."""
        w = np.ones(self.size)
        w[self.n_omega :] = self.r2_measure
        return w


# --- elementary operators -------------------------------------------------


def laplacian_neumann(u: np.ndarray, h: float) -> np.ndarray:
    """Five-point Laplacian with the one-sided Neumann stencils on edges and corners.

    Each node sums ``u_neighbour - u_node`` over the neighbours that exist,
    so edges use three neighbours and corners two.
    """
    u = np.asarray(u, dtype=float)
    if u.ndim != 2 or min(u.shape) < 2:
        raise ShapeError(f"expected a 2D field, got shape {u.shape}")
    out = np.zeros_like(u)
    dx = u[:, 1:] - u[:, :-1]
    dy = u[1:, :] - u[:-1, :]
    out[:, :-1] += dx
    out[:, 1:] -= dx
    out[:-1, :] += dy
    out[1:, :] -= dy
    return out / (h * h)


def line_kernel_matrix(kernel: KernelSpec, seg: SegmentGrid) -> np.ndarray:
    z = seg.z
    return np.asarray(eval_line(kernel, z[:, None] - z[None, :]), dtype=float)


def _apply_nonlocal(Jmat: np.ndarray, V: np.ndarray, weight: float) -> np.ndarray:
    return weight * (Jmat @ V - Jmat.sum(axis=1) * V)


def nonlocal_diffusion(V: np.ndarray, kernel: KernelSpec, r2_measure: float, seg: SegmentGrid) -> np.ndarray:
    """``|R2| h sum_p J(z_k - z_p) (V_p - V_k)`` at every segment node."""
    V = np.asarray(V, dtype=float)
    if V.shape != (seg.M,):
        raise ShapeError(f"V has shape {V.shape}, expected {(seg.M,)}")
    return _apply_nonlocal(line_kernel_matrix(kernel, seg), V, r2_measure * seg.h)


def _require_2d(kernel: KernelSpec, name: str) -> None:
    if kernel.dim != 2:
        raise KernelKindError(f"{name} must be a 2D kernel, got {kernel.kind.value}")


def source_kernel_matrix(kernel_g: KernelSpec, grids: GridSet) -> np.ndarray:
    """``G*(x_i - z_k, y_j)`` for interior nodes (rows, row-major order) and segment nodes."""
    _require_2d(kernel_g, "kernel_g")
    X, Y = grids.rect.mesh()
    mask = grids.rect.interior_mask()
    xs, ys = X[mask], Y[mask]
    return np.asarray(limit_slice(kernel_g, xs[:, None] - grids.seg.z[None, :], ys[:, None]), dtype=float)


def boundary_kernel_matrix(kernel_g: KernelSpec, grids: GridSet) -> np.ndarray:
    """``G*(x_g - z_k, y_g)`` for Gamma nodes (rows) and segment nodes."""
    _require_2d(kernel_g, "kernel_g")
    xg, yg = grids.rect.gamma_coords()
    return np.asarray(limit_slice(kernel_g, xg[:, None] - grids.seg.z[None, :], yg[:, None]), dtype=float)


def _check_pair(u, V, grids: GridSet) -> tuple[np.ndarray, np.ndarray]:
    u = np.asarray(u, dtype=float)
    V = np.asarray(V, dtype=float)
    if u.shape != grids.rect.shape:
        raise ShapeError(f"u has shape {u.shape}, expected {grids.rect.shape}")
    if V.shape != (grids.seg.M,):
        raise ShapeError(f"V has shape {V.shape}, expected {(grids.seg.M,)}")
    return u, V


def _source_exchange(Gmat, u, V, r2_measure, grids):
    rect = grids.rect
    mask = rect.interior_mask()
    GD = Gmat * (V[None, :] - r2_measure * u[mask][:, None])
    local = np.zeros(rect.shape)
    local[mask] = grids.seg.h * GD.sum(axis=1)
    return local, -rect.h**2 * GD.sum(axis=0)


def _boundary_exchange(Gmat, u, V, r2_measure, grids):
    rect = grids.rect
    gamma = rect.gamma_nodes
    GD = Gmat * (V[None, :] - r2_measure * u.ravel()[gamma][:, None])
    local = np.zeros(rect.size)
    # Riemann sum over R1 divided by the boundary cell width
    local[gamma] = (grids.seg.h / rect.h) * GD.sum(axis=1)
    return local.reshape(rect.shape), -rect.h * GD.sum(axis=0)


def coupling_source(u, V, kernel_g: KernelSpec, r2_measure: float, grids: GridSet):
    """Source-term exchange between interior rectangle nodes and the segment.

    Returns ``(local, nonlocal)`` rates. The local part vanishes on edge and
    corner nodes.
    """
    u, V = _check_pair(u, V, grids)
    return _source_exchange(source_kernel_matrix(kernel_g, grids), u, V, r2_measure, grids)


def coupling_boundary(u, V, kernel_g: KernelSpec, r2_measure: float, grids: GridSet):
    """Flux exchange between the Gamma nodes and the segment. Returns ``(local, nonlocal)``."""
    u, V = _check_pair(u, V, grids)
    return _boundary_exchange(boundary_kernel_matrix(kernel_g, grids), u, V, r2_measure, grids)


# --- full systems -----------------------------------------------------------


class CoupledSystem:
    """A model bound to kernels and grids, with all kernel matrices precomputed.

    ``rhs`` is the fast path used by the time stepper; the module-level
    :func:`rhs` builds a throwaway system.
    """

    def __init__(self, model: ModelKind, kernels: tuple[KernelSpec, KernelSpec], grids: GridSet):
        self.model = model
        self.kernel_j, self.kernel_g = kernels
        self.grids = grids
        _require_2d(self.kernel_g, "kernel_g")
        rect, seg = grids.rect, grids.seg
        mtype = model.type
        if mtype.is_eps:
            if grids.box is None:
                raise ConfigError("epsilon models need the thin box grid", key="m2")
            _require_2d(self.kernel_j, "kernel_j")
            self._build_eps()
        else:
            self.Jmat = line_kernel_matrix(self.kernel_j, seg)
            if mtype is ModelType.LIMIT_SOURCE:
                self.Gmat = source_kernel_matrix(self.kernel_g, grids)
            else:
                self.Gmat = boundary_kernel_matrix(self.kernel_g, grids)
        self._interior = rect.interior_mask()

    def _build_eps(self) -> None:
        grids, eps = self.grids, self.model.eps
        rect, seg, box = grids.rect, grids.seg, grids.box
        # rescaled box nodes, flattened with k outer and m inner
        zk = np.repeat(seg.z, box.M2)
        sm = np.tile(box.s, seg.M)
        self.Jeps = np.asarray(
            eval_scaled(self.kernel_j, zk[:, None] - zk[None, :], sm[:, None], sm[None, :], ScaledMode.J_EPS, eps),
            dtype=float,
        )
        X, Y = rect.mesh()
        if self.model.type is ModelType.EPS_SOURCE:
            mask = rect.interior_mask()
            xs, ys = X[mask], Y[mask]
            mode_u = ScaledMode.G_EPS_SOURCE_U
        else:
            xs, ys = rect.gamma_coords()
            mode_u = ScaledMode.G_EPS_BOUNDARY
        g = self.kernel_g
        self.Gu = np.asarray(
            eval_scaled(g, xs[:, None] - zk[None, :], ys[:, None], sm[None, :], mode_u, eps), dtype=float
        )
        self.Gv = np.asarray(
            eval_scaled(g, zk[:, None] - xs[None, :], sm[:, None], ys[None, :], ScaledMode.G_EPS_SOURCE_V, eps),
            dtype=float,
        )

    # limit models

    def _rhs_limit(self, u: np.ndarray, V: np.ndarray):
        grids, r2 = self.grids, self.model.r2_measure
        du = laplacian_neumann(u, grids.rect.h)
        dV = _apply_nonlocal(self.Jmat, V, r2 * grids.seg.h)
        if self.model.type is ModelType.LIMIT_SOURCE:
            loc, nl = _source_exchange(self.Gmat, u, V, r2, grids)
        else:
            loc, nl = _boundary_exchange(self.Gmat, u, V, r2, grids)
        return du + loc, dV + nl

    def _rhs_eps(self, u: np.ndarray, v: np.ndarray):
        rect, seg, box = self.grids.rect, self.grids.seg, self.grids.box
        vf = v.ravel()
        w_box = seg.h * box.h2
        du = laplacian_neumann(u, rect.h)
        dv = _apply_nonlocal(self.Jeps, vf, w_box)
        if self.model.type is ModelType.EPS_SOURCE:
            uc = u[self._interior]
            du[self._interior] += w_box * (self.Gu * (vf[None, :] - uc[:, None])).sum(axis=1)
            dv -= rect.h**2 * (self.Gv * (vf[:, None] - uc[None, :])).sum(axis=1)
        else:
            gamma = rect.gamma_nodes
            uc = u.ravel()[gamma]
            flat = du.reshape(-1)
            flat[gamma] += (w_box / rect.h) * (self.Gu * (vf[None, :] - uc[:, None])).sum(axis=1)
            dv -= rect.h * (self.Gv * (vf[:, None] - uc[None, :])).sum(axis=1)
        return du, dv.reshape(box.shape)

    def rhs(self, state):
        if self.model.type.is_eps:
            if not isinstance(state, EpsState):
                raise ModelKindError(f"{self.model.type.value} needs an EpsState")
            if state.eps != self.model.eps:
                raise ModelKindError(f"state eps {state.eps!r} differs from model eps {self.model.eps!r}")
            du, dv = self._rhs_eps(state.u, state.v)
            return EpsState(du, dv, state.t, state.eps)
        if not isinstance(state, CoupledState):
            raise ModelKindError(f"{self.model.type.value} needs a CoupledState")
        du, dV = self._rhs_limit(state.u, state.V)
        return CoupledState(du, dV, state.t)

    def weights(self) -> tuple[np.ndarray, np.ndarray]:
        """Quadrature weights of the energy inner product, shaped like the state arrays."""
        rect, seg, box = self.grids.rect, self.grids.seg, self.grids.box
        if self.model.type.is_eps:
            return np.full(rect.shape, rect.h**2), np.full(box.shape, seg.h * box.h2)
        return np.full(rect.shape, self.model.r2_measure * rect.h**2), np.full(seg.M, seg.h)


def rhs(state, model: ModelKind, kernels: tuple[KernelSpec, KernelSpec], grids: GridSet):
    """Time derivative of ``state`` under ``model``."""
    return CoupledSystem(model, kernels, grids).rhs(state)


# --- generator assembly -------------------------------------------------------


def _laplacian_matrix(rect: RectGrid) -> np.ndarray:
    n = rect.size
    L = np.zeros((n, n))
    idx = np.arange(n).reshape(rect.shape)
    pairs = [(idx[:, :-1].ravel(), idx[:, 1:].ravel()), (idx[:-1, :].ravel(), idx[1:, :].ravel())]
    inv_h2 = 1.0 / rect.h**2
    for p, q in pairs:
        L[p, q] += inv_h2
        L[q, p] += inv_h2
        L[p, p] -= inv_h2
        L[q, q] -= inv_h2
    return L


def assemble_generator(
    model: ModelKind,
    kernels: tuple[KernelSpec, KernelSpec],
    grids: GridSet,
    include_laplacian: bool = True,
) -> Generator:
    """Materialize the limit operator as a dense matrix.

    Rows and columns follow :data:`ORDERING`. The weights are ``|R2| h^2`` on
    rectangle entries and ``h`` on segment entries; ``diag(weights) @ A`` is
    symmetric.
    """
    if model.type.is_eps:
        raise ModelKindError("generator assembly is only supported for limit models")
    kernel_j, kernel_g = kernels
    rect, seg = grids.rect, grids.seg
    r2 = model.r2_measure
    n_u, n_v = rect.size, seg.M
    A = np.zeros((n_u + n_v, n_u + n_v))
    if include_laplacian:
        A[:n_u, :n_u] = _laplacian_matrix(rect)

    Jmat = line_kernel_matrix(kernel_j, seg)
    A[n_u:, n_u:] += r2 * seg.h * (Jmat - np.diag(Jmat.sum(axis=1)))

    if model.type is ModelType.LIMIT_SOURCE:
        rows = np.flatnonzero(rect.interior_mask().ravel())
        G = source_kernel_matrix(kernel_g, grids)
        to_local, to_nonlocal = seg.h, rect.h**2
    else:
        rows = rect.gamma_nodes
        G = boundary_kernel_matrix(kernel_g, grids)
        to_local, to_nonlocal = seg.h / rect.h, rect.h
    cols = n_u + np.arange(n_v)
    A[np.ix_(rows, cols)] += to_local * G
    A[rows, rows] -= to_local * r2 * G.sum(axis=1)
    A[np.ix_(cols, rows)] += to_nonlocal * r2 * G.T
    A[cols, cols] -= to_nonlocal * G.sum(axis=0)

    weights = np.concatenate([np.full(n_u, r2 * rect.h**2), np.full(n_v, seg.h)])
    return Generator(A, weights, n_u, r2)


def gershgorin_bound(gen: Generator) -> float:
    """Largest time step for which Gershgorin guarantees explicit-Euler stability."""
    W = np.sqrt(gen.weights)
    S = W[:, None] * gen.matrix / W[None, :]
    radius = np.max(np.abs(S).sum(axis=1))
    return 2.0 / radius
