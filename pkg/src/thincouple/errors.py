"""Exception hierarchy.

Configuration problems map to CLI exit code 2, numerical divergence to 3.
"""
from __future__ import annotations


class ThinCoupleError(Exception):
    """Base class for all package errors."""


class ConfigError(ThinCoupleError, ValueError):
    """Invalid configuration or precondition violation."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        if key is not None:
            message = f"{key}: {message}"
        super().__init__(message)


class KernelKindError(ThinCoupleError, ValueError):
    """A 1D kernel was used where a 2D kernel is required, or vice versa."""


class ShapeError(ThinCoupleError, ValueError):
    """A field does not match the grid it is supposed to live on."""


class ModelKindError(ThinCoupleError, ValueError):
    """State kind and model kind do not match, or the kind is unsupported."""


class CFLViolation(ConfigError):
    """Time step exceeds the explicit-Euler stability bound."""

    def __init__(self, dt: float, bound: float):
        self.dt = dt
        self.bound = bound
        super().__init__(f"dt={dt!r} exceeds the stability bound {bound!r}", key="dt")


class DivergenceError(ThinCoupleError, ArithmeticError):
    """A time step produced non-finite values."""

    def __init__(self, message: str, step: int | None = None, node: str | None = None):
        self.step = step
        self.node = node
        super().__init__(message)


class MassConstraintError(ThinCoupleError, ValueError):
    """Rayleigh quotient requested for a state with nonzero weighted mass."""


class DisconnectedCouplingError(ThinCoupleError, ArithmeticError):
    """The generator has a kernel of dimension larger than one."""


class KernelPairingError(ConfigError):
    """The epsilon problem and the limit problem do not share limit kernels."""
