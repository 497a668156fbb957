"""Coupled local/nonlocal diffusion in thin domains: explicit schemes, limit problems and spectral diagnostics."""
from .config import RunConfig, emit_config, initial_state, parse_config
from .grids import CoupledState, EpsState, GridSet, make_grids
from .kernels import KernelKind, KernelSpec
from .operators import CoupledSystem, Generator, ModelKind, ModelType, assemble_generator, rhs

__version__ = "0.1.0"

__all__ = [
    "CoupledState",
    "CoupledSystem",
    "EpsState",
    "Generator",
    "GridSet",
    "KernelKind",
    "KernelSpec",
    "ModelKind",
    "ModelType",
    "RunConfig",
    "assemble_generator",
    "emit_config",
    "initial_state",
    "make_grids",
    "parse_config",
    "rhs",
]
