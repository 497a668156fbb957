"""Discrete geometry: the rectangle, the segment, the thin box, and the states living on them.

Fields on the rectangle are stored as ``(N, M)`` arrays, row ``j`` holding
``y_j`` and column ``i`` holding ``x_i``. Flattening is therefore row-major
with ``j`` outer and ``i`` inner. Coordinates are always ``lo + k*h`` computed
from the index, never accumulated.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError

GAMMA_SIDES = ("top", "bottom", "left", "right")


class NodeClass(enum.IntEnum):
    INTERIOR = 0
    EDGE = 1
    CORNER = 2


def _nodes(lo: float, h: float, count: int) -> np.ndarray:
    return lo + h * np.arange(count, dtype=float)


@dataclass(frozen=True, eq=False)
class RectGrid:
    a: float
    b: float
    c: float
    d: float
    M: int
    N: int
    gamma_side: str = "top"
    h: float = field(init=False)
    x: np.ndarray = field(init=False, repr=False)
    y: np.ndarray = field(init=False, repr=False)
    node_class: np.ndarray = field(init=False, repr=False)
    gamma_nodes: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.M < 3 or self.N < 3:
            raise ConfigError(f"need M, N >= 3, got M={self.M}, N={self.N}", key="m")
        if not (self.b > self.a and self.d > self.c):
            raise ConfigError("omega bounds must satisfy a < b and c < d", key="omega_bounds")
        hx = (self.b - self.a) / (self.M - 1)
        hy = (self.d - self.c) / (self.N - 1)
        if abs(hx - hy) > 1e-12 * max(hx, hy):
            raise ConfigError(
                f"spacing must be equal in both directions, got {hx!r} and {hy!r}", key="omega_bounds"
            )
        if self.gamma_side not in GAMMA_SIDES:
            raise ConfigError(f"unknown side {self.gamma_side!r}", key="gamma_side")
        x = _nodes(self.a, hx, self.M)
        y = _nodes(self.c, hx, self.N)
        x[-1], y[-1] = self.b, self.d

        on_x_edge = np.zeros(self.M, dtype=bool)
        on_x_edge[[0, -1]] = True
        on_y_edge = np.zeros(self.N, dtype=bool)
        on_y_edge[[0, -1]] = True
        cls = on_y_edge[:, None].astype(int) + on_x_edge[None, :].astype(int)

        idx = np.arange(self.M * self.N).reshape(self.N, self.M)
        gamma = {
            "top": idx[-1, :],
            "bottom": idx[0, :],
            "left": idx[:, 0],
            "right": idx[:, -1],
        }[self.gamma_side]

        for name, value in (("h", hx), ("x", x), ("y", y), ("node_class", cls), ("gamma_nodes", gamma.copy())):
            object.__setattr__(self, name, value)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.N, self.M)

    @property
    def size(self) -> int:
        return self.M * self.N

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Coordinate arrays ``(X, Y)`` of shape ``(N, M)``."""
        return np.meshgrid(self.x, self.y)

    def interior_mask(self) -> np.ndarray:
        return self.node_class == NodeClass.INTERIOR

    def class_counts(self) -> dict[NodeClass, int]:
        return {c: int(np.count_nonzero(self.node_class == c)) for c in NodeClass}

    def gamma_coords(self) -> tuple[np.ndarray, np.ndarray]:
        X, Y = self.mesh()
        return X.ravel()[self.gamma_nodes], Y.ravel()[self.gamma_nodes]


@dataclass(frozen=True, eq=False)
class SegmentGrid:
    lo: float
    hi: float
    M: int
    h: float = field(init=False)
    z: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.M < 2:
            raise ConfigError(f"segment needs at least 2 nodes, got {self.M}", key="m")
        if not self.hi > self.lo:
            raise ConfigError("segment bounds must satisfy lo < hi", key="r1_bounds")
        h = (self.hi - self.lo) / (self.M - 1)
        z = _nodes(self.lo, h, self.M)
        z[-1] = self.hi
        object.__setattr__(self, "h", h)
        object.__setattr__(self, "z", z)

    @property
    def size(self) -> int:
        return self.M


@dataclass(frozen=True, eq=False)
class BoxGrid:
    """Thin box ``R1 x R2`` in rescaled coordinates.

    The second direction uses left-endpoint Riemann nodes with weight ``h2``.
    """

    base: SegmentGrid
    r2_lo: float
    r2_hi: float
    M2: int
    h2: float = field(init=False)
    s: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if self.M2 < 2:
            raise ConfigError(f"need m2 >= 2, got {self.M2}", key="m2")
        if not self.r2_hi > self.r2_lo:
            raise ConfigError("r2 bounds must satisfy lo < hi", key="r2_bounds")
        h2 = (self.r2_hi - self.r2_lo) / self.M2
        object.__setattr__(self, "h2", h2)
        object.__setattr__(self, "s", _nodes(self.r2_lo, h2, self.M2))

    @property
    def shape(self) -> tuple[int, int]:
        return (self.base.M, self.M2)

    @property
    def size(self) -> int:
        return self.base.M * self.M2


@dataclass(frozen=True, eq=False)
class GridSet:
    rect: RectGrid
    seg: SegmentGrid
    box: BoxGrid | None = None

    @property
    def r2_length(self) -> float | None:
        return None if self.box is None else self.box.r2_hi - self.box.r2_lo


def make_grids(
    omega_bounds=(-1.0, 1.0, -1.0, 1.0),
    r1_bounds=(1.0, 3.0),
    r2_bounds=(0.0, 1.0),
    m: int = 11,
    n: int = 11,
    m2: int | None = 8,
    gamma_side: str = "top",
) -> GridSet:
    """Build the three grids. ``m2=None`` skips the thin box."""
    a, b, c, d = (float(v) for v in omega_bounds)
    rect = RectGrid(a, b, c, d, int(m), int(n), gamma_side)
    seg = SegmentGrid(float(r1_bounds[0]), float(r1_bounds[1]), int(m))
    box = None
    if m2 is not None:
        box = BoxGrid(seg, float(r2_bounds[0]), float(r2_bounds[1]), int(m2))
    return GridSet(rect, seg, box)


def build_grids(config) -> GridSet:
    """Build the grids described by a :class:`~thincouple.config.RunConfig`."""
    m2 = config.m2 if config.model.is_eps else (config.m2 if config.m2 >= 2 else None)
    return make_grids(
        config.omega_bounds, config.r1_bounds, config.r2_bounds, config.m, config.n, m2, config.gamma_side
    )


def _check(arr: np.ndarray, shape: tuple[int, ...], name: str) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if arr.shape != shape:
        raise ShapeError(f"{name} has shape {arr.shape}, expected {shape}")
    return arr


@dataclass
class CoupledState:
    """Limit-problem state: ``u`` on the rectangle, ``V`` on the segment."""

    u: np.ndarray
    V: np.ndarray
    t: float = 0.0

    def validate(self, grids: GridSet) -> "CoupledState":
        self.u = _check(self.u, grids.rect.shape, "u")
        self.V = _check(self.V, (grids.seg.M,), "V")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.V))):
            raise ShapeError("state contains non-finite values")
        return self

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.u.ravel(), self.V])

    @classmethod
    def from_flat(cls, w: np.ndarray, grids: GridSet, t: float = 0.0) -> "CoupledState":
        n_u = grids.rect.size
        w = np.asarray(w, dtype=float)
        if w.shape != (n_u + grids.seg.M,):
            raise ShapeError(f"flat state has shape {w.shape}, expected {(n_u + grids.seg.M,)}")
        return cls(w[:n_u].reshape(grids.rect.shape).copy(), w[n_u:].copy(), t)

    def copy(self) -> "CoupledState":
        return CoupledState(self.u.copy(), self.V.copy(), self.t)


@dataclass
class EpsState:
    """Pre-limit state: ``u`` on the rectangle, ``v`` on the rescaled thin box."""

    u: np.ndarray
    v: np.ndarray
    t: float = 0.0
    eps: float = 1.0

    def validate(self, grids: GridSet) -> "EpsState":
        if grids.box is None:
            raise ConfigError("epsilon states need the thin box grid", key="m2")
        if not (0.0 < self.eps <= 1.0):
            raise ConfigError(f"eps must lie in (0, 1], got {self.eps!r}", key="eps")
        self.u = _check(self.u, grids.rect.shape, "u")
        self.v = _check(self.v, grids.box.shape, "v")
        if not (np.all(np.isfinite(self.u)) and np.all(np.isfinite(self.v))):
            raise ShapeError("state contains non-finite values")
        return self

    def flatten(self) -> np.ndarray:
        return np.concatenate([self.u.ravel(), self.v.ravel()])

    def copy(self) -> "EpsState":
        return EpsState(self.u.copy(), self.v.copy(), self.t, self.eps)
