"""Interaction kernels J and G.

Kernels are symmetric, nonnegative and compactly supported in a box of
half-width ``support_radius``. Evaluation functions accept scalars or numpy
arrays and broadcast like numpy ufuncs.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, KernelKindError


class KernelKind(enum.Enum):
    COSINE_HALF_1D = "cosine_half_1d"
    COSINE_PRODUCT_2D = "cosine_product_2d"
    UNIFORM_1D = "uniform_1d"
    UNIFORM_2D = "uniform_2d"

    @property
    def dim(self) -> int:
        return 1 if self in (KernelKind.COSINE_HALF_1D, KernelKind.UNIFORM_1D) else 2

    @property
    def is_cosine(self) -> bool:
        return self in (KernelKind.COSINE_HALF_1D, KernelKind.COSINE_PRODUCT_2D)


class ScaledMode(enum.Enum):
    """Which coordinate of an epsilon-rescaled kernel argument is compressed."""

    J_EPS = "j_eps"
    G_EPS_SOURCE_U = "g_eps_source_u"
    G_EPS_SOURCE_V = "g_eps_source_v"
    G_EPS_BOUNDARY = "g_eps_boundary"


_DEFAULT_AMPLITUDE = {
    KernelKind.COSINE_HALF_1D: 0.5,
    KernelKind.COSINE_PRODUCT_2D: 0.25,
    KernelKind.UNIFORM_1D: 0.5,
    KernelKind.UNIFORM_2D: 0.25,
}


@dataclass(frozen=True)
class KernelSpec:
    """A convolution kernel ``J(d)`` or ``G(d1, d2)``.

    Parameters
    ----------
    kind:
        Functional form.
    amplitude:
        Peak value, attained at the origin.
    support_radius:
        Half-width of the support in each coordinate. Cosine kernels need
        ``support_radius <= pi/2`` to stay nonnegative.
    """

    kind: KernelKind
    amplitude: float
    support_radius: float = math.pi / 2

    def __post_init__(self) -> None:
        if not (self.amplitude > 0 and math.isfinite(self.amplitude)):
            raise ConfigError(f"amplitude must be positive, got {self.amplitude!r}", key="amplitude")
        if not (self.support_radius > 0 and math.isfinite(self.support_radius)):
            raise ConfigError(
                f"support radius must be positive, got {self.support_radius!r}", key="support_radius"
            )
        if self.kind.is_cosine and self.support_radius > math.pi / 2 + 1e-15:
            raise ConfigError("cosine kernels need support_radius <= pi/2", key="support_radius")

    @classmethod
    def default(cls, kind: KernelKind | str) -> "KernelSpec":
        kind = KernelKind(kind)
        radius = math.pi / 2 if kind.is_cosine else 1.0
        return cls(kind, _DEFAULT_AMPLITUDE[kind], radius)

    @property
    def dim(self) -> int:
        return self.kind.dim

    @property
    def lipschitz(self) -> float:
        """Lipschitz constant of the profile in one coordinate (cosine kinds only)."""
        return self.amplitude if self.kind.is_cosine else math.inf


def _profile(spec: KernelSpec, d):
    d = np.asarray(d, dtype=float)
    inside = np.abs(d) <= spec.support_radius
    if spec.kind.is_cosine:
        return np.where(inside, np.cos(d), 0.0)
    return inside.astype(float)


def _scalarize(x):
    return float(x) if np.ndim(x) == 0 else x


def eval1(spec: KernelSpec, d):
    """Evaluate a 1D kernel at the difference ``d``."""
    if spec.dim != 1:
        raise KernelKindError(f"eval1 needs a 1D kernel, got {spec.kind.value}")
    return _scalarize(spec.amplitude * _profile(spec, d))


def eval2(spec: KernelSpec, d1, d2):
    """Evaluate a 2D kernel at the difference ``(d1, d2)``."""
    if spec.dim != 2:
        raise KernelKindError(f"eval2 needs a 2D kernel, got {spec.kind.value}")
    return _scalarize(spec.amplitude * _profile(spec, d1) * _profile(spec, d2))


def eval_scaled(spec: KernelSpec, d1, s2, t2, mode: ScaledMode | str, eps: float):
    """Evaluate a 2D kernel at the true coordinate difference of a rescaled pair.

    ``s2`` and ``t2`` are the second coordinates of the target and source
    point. Rescaled thin-domain coordinates are mapped back by a factor
    ``eps`` before differencing:

    * ``J_EPS``: both points rescaled, ``(d1, eps*(s2 - t2))``
    * ``G_EPS_SOURCE_U``: target in the fixed domain, source rescaled, ``(d1, s2 - eps*t2)``
    * ``G_EPS_SOURCE_V``: target rescaled, source in the fixed domain, ``(d1, eps*s2 - t2)``
    * ``G_EPS_BOUNDARY``: target on the coupling boundary, source rescaled, ``(d1, s2 - eps*t2)``
    """
    if not (0.0 < eps <= 1.0):
        raise ConfigError(f"eps must lie in (0, 1], got {eps!r}", key="eps")
    mode = ScaledMode(mode)
    s2 = np.asarray(s2, dtype=float)
    t2 = np.asarray(t2, dtype=float)
    if mode is ScaledMode.J_EPS:
        d2 = eps * (s2 - t2)
    elif mode is ScaledMode.G_EPS_SOURCE_V:
        d2 = eps * s2 - t2
    else:
        d2 = s2 - eps * t2
    return eval2(spec, d1, d2)


def limit_slice(spec: KernelSpec, d1, d2=0.0):
    """Zero-thickness limit of a 2D kernel.

    With ``d2 = 0`` this is ``J*(d1) = J(d1, 0)``; for the coupling kernel
    pass the surviving second coordinate of the fixed-domain point, giving
    ``G*(d1, d2) = G(d1, d2)``.
    """
    return eval2(spec, d1, d2)


def eval_line(spec: KernelSpec, d):
    """Evaluate a kernel acting along a segment.

    1D kernels are evaluated directly, 2D kernels through their zero slice.
    """
    if spec.dim == 1:
        return eval1(spec, d)
    return limit_slice(spec, d, 0.0)
