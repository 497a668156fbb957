"""Run configuration: a line-oriented ``key = value`` format.

Example::

    # experiment-3 shape
    model = limit_source
    ic_u = cos_product
    ic_v = parabola_down

Unknown keys are rejected. Every key has a documented default except
``model``:

=================  ===============================================
key                default
=================  ===============================================
omega_bounds       -1, 1, -1, 1
r1_bounds          1, 3
r2_bounds          0, 1
m, n               11, 11
m2                 8
dt                 0.005
t_final            100
record_every       20
kernel_j           cosine_half_1d (limit), cosine_product_2d (eps)
kernel_g           cosine_product_2d
kernel_*_amplitude kernel default (1/2 for 1D, 1/4 for 2D)
kernel_*_support   pi/2 for cosine kernels, 1 for uniform ones
ic_u, ic_v         zero, one
ic_v_profile       uniform
r2_measure         length of r2_bounds
eps                none (required for eps models)
gamma_side         top
out_dir            out
snapshot_times     0, t_final
strict_cfl         false
=================  ===============================================
"""
from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import CFLViolation, ConfigError
from .grids import GAMMA_SIDES, CoupledState, EpsState, GridSet, build_grids
from .kernels import KernelKind, KernelSpec
from .operators import ModelKind, ModelType

# --- initial condition presets -----------------------------------------------

IC_PRESETS = {
    "zero": lambda x, y: np.zeros_like(x),
    "one": lambda x, y: np.ones_like(x),
    "cos_product": lambda x, y: np.cos(np.pi * x / 2) * np.cos(np.pi * y / 2),
    "parabola_down": lambda x, y: 9.0 - x**2,
    "radial_sq": lambda x, y: x**2 + y**2,
    "sq": lambda x, y: x**2,
}

_CONST = re.compile(r"^const\(\s*([^)]+?)\s*\)$")
V_PROFILES = ("uniform", "ramp")


def ic_function(name: str):
    """Closed-form evaluator ``f(x, y)`` for a preset name, including ``const(c)``."""
    if name in IC_PRESETS:
        return IC_PRESETS[name]
    match = _CONST.match(name)
    if match:
        try:
            c = float(match.group(1))
        except ValueError:
            raise ConfigError(f"bad constant in {name!r}") from None
        if not math.isfinite(c):
            raise ConfigError(f"constant must be finite in {name!r}")
        return lambda x, y: np.full_like(x, c, dtype=float)
    raise ConfigError(f"unknown initial condition preset {name!r}")


# --- config ---------------------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    model: ModelType
    omega_bounds: tuple[float, float, float, float] = (-1.0, 1.0, -1.0, 1.0)
    r1_bounds: tuple[float, float] = (1.0, 3.0)
    r2_bounds: tuple[float, float] = (0.0, 1.0)
    m: int = 11
    n: int = 11
    m2: int = 8
    dt: float = 0.005
    t_final: float = 100.0
    record_every: int = 20
    kernel_j: KernelKind | None = None
    kernel_g: KernelKind = KernelKind.COSINE_PRODUCT_2D
    kernel_j_amplitude: float | None = None
    kernel_j_support: float | None = None
    kernel_g_amplitude: float | None = None
    kernel_g_support: float | None = None
    ic_u: str = "zero"
    ic_v: str = "one"
    ic_v_profile: str = "uniform"
    r2_measure: float | None = None
    eps: float | None = None
    gamma_side: str = "top"
    out_dir: str = "out"
    snapshot_times: tuple[float, ...] | None = None
    strict_cfl: bool = False

    def __post_init__(self) -> None:
        set_ = lambda k, v: object.__setattr__(self, k, v)  # noqa: E731
        set_("model", ModelType(self.model))
        if self.kernel_j is None:
            set_("kernel_j", KernelKind.COSINE_PRODUCT_2D if self.model.is_eps else KernelKind.COSINE_HALF_1D)
        if self.r2_measure is None:
            set_("r2_measure", float(self.r2_bounds[1] - self.r2_bounds[0]))
        if self.snapshot_times is None:
            set_("snapshot_times", (0.0, float(self.t_final)))
        self._validate()

    # validation

    def _validate(self) -> None:
        a, b, c, d = self.omega_bounds
        if self.m < 3 or self.n < 3:
            raise ConfigError("need at least 3 nodes per direction", key="m")
        h = (b - a) / (self.m - 1)
        if not (b > a and d > c):
            raise ConfigError("need a < b and c < d", key="omega_bounds")
        if abs(h - (d - c) / (self.n - 1)) > 1e-12 * h:
            raise ConfigError("spacing must be equal in both directions", key="omega_bounds")
        if not self.r1_bounds[1] > self.r1_bounds[0]:
            raise ConfigError("need lo < hi", key="r1_bounds")
        if not self.r2_bounds[1] > self.r2_bounds[0]:
            raise ConfigError("need lo < hi", key="r2_bounds")
        if self.m2 < 2:
            raise ConfigError(f"need m2 >= 2, got {self.m2}", key="m2")
        if not self.r2_measure > 0:
            raise ConfigError("must be positive", key="r2_measure")
        if self.gamma_side not in GAMMA_SIDES:
            raise ConfigError(f"must be one of {', '.join(GAMMA_SIDES)}", key="gamma_side")
        if self.ic_v_profile not in V_PROFILES:
            raise ConfigError(f"must be one of {', '.join(V_PROFILES)}", key="ic_v_profile")
        if self.record_every < 1:
            raise ConfigError("must be >= 1", key="record_every")
        if not self.dt > 0:
            raise ConfigError("must be positive", key="dt")
        if self.dt > h * h / 4 + 1e-15:
            raise CFLViolation(self.dt, h * h / 4)
        if self.t_final < 0:
            raise ConfigError("must be nonnegative", key="t_final")
        steps = self.t_final / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(steps, 1.0):
            raise ConfigError("must be a multiple of dt", key="t_final")
        for t in self.snapshot_times:
            s = t / self.dt
            if t < 0 or t > self.t_final + 1e-12 or abs(s - round(s)) > 1e-9 * max(s, 1.0):
                raise ConfigError(f"{t!r} is not a step time within [0, t_final]", key="snapshot_times")
        for key in ("ic_u", "ic_v"):
            try:
                ic_function(getattr(self, key))
            except ConfigError as exc:
                raise ConfigError(str(exc), key=key) from None
        if self.model.is_eps:
            if self.eps is None or not (0.0 < self.eps <= 1.0):
                raise ConfigError("epsilon models need eps in (0, 1]", key="eps")
            if abs(self.r2_measure - (self.r2_bounds[1] - self.r2_bounds[0])) > 1e-12:
                raise ConfigError("epsilon models need r2_measure equal to the r2 length", key="r2_measure")
            if self.kernel_j.dim != 2:
                raise ConfigError("epsilon models need a 2D kernel", key="kernel_j")
        elif self.eps is not None:
            raise ConfigError("only epsilon models take eps", key="eps")
        if self.kernel_g.dim != 2:
            raise ConfigError("coupling kernel must be 2D", key="kernel_g")
        self.kernels()  # amplitude/support checks

    # derived objects

    def model_kind(self) -> ModelKind:
        return ModelKind(self.model, self.r2_measure, self.eps if self.model.is_eps else None)

    def kernels(self) -> tuple[KernelSpec, KernelSpec]:
        out = []
        for prefix in ("kernel_j", "kernel_g"):
            kind = getattr(self, prefix)
            base = KernelSpec.default(kind)
            amp = getattr(self, prefix + "_amplitude")
            sup = getattr(self, prefix + "_support")
            try:
                out.append(
                    KernelSpec(kind, base.amplitude if amp is None else amp, base.support_radius if sup is None else sup)
                )
            except ConfigError as exc:
                raise ConfigError(str(exc), key=prefix) from None
        return tuple(out)

    def grids(self) -> GridSet:
        return build_grids(self)

    def plan(self):
        from .stepper import StepPlan

        return StepPlan(self.dt, self.t_final, self.record_every)

    def snapshot_steps(self) -> list[int]:
        return sorted({int(round(t / self.dt)) for t in self.snapshot_times})

    def replace(self, **changes) -> "RunConfig":
        if "t_final" in changes and "snapshot_times" not in changes:
            changes["snapshot_times"] = None
        return dataclasses.replace(self, **changes)


def initial_state(config: RunConfig, grids: GridSet, eps: float | None = None):
    """Evaluate the initial-condition presets on the grids.

    Epsilon models get ``v0(z, s) = V0(z) * phi(s)`` with a section profile
    ``phi`` normalized so the discrete section average reproduces ``V0``.
    """
    X, Y = grids.rect.mesh()
    u0 = np.asarray(ic_function(config.ic_u)(X, Y), dtype=float)
    z = grids.seg.z
    V0 = np.asarray(ic_function(config.ic_v)(z, np.zeros_like(z)), dtype=float)
    if not config.model.is_eps:
        return CoupledState(u0, V0, 0.0)
    box = grids.box
    if config.ic_v_profile == "uniform":
        w = np.ones(box.M2)
    else:
        w = 0.5 + (box.s - box.r2_lo) / (box.r2_hi - box.r2_lo)
    phi = w / (box.h2 * w.sum())
    eps = config.eps if eps is None else eps
    return EpsState(u0, V0[:, None] * phi[None, :], 0.0, eps)


# --- text format ------------------------------------------------------------------

_FIELDS = {f.name: f for f in dataclasses.fields(RunConfig)}
KEYS = tuple(_FIELDS)
_TUPLE_LEN = {"omega_bounds": 4, "r1_bounds": 2, "r2_bounds": 2}
_INT = {"m", "n", "m2", "record_every"}
_FLOAT = {"dt", "t_final", "r2_measure", "eps"} | {
    f"kernel_{k}_{p}" for k in "jg" for p in ("amplitude", "support")
}
_OPTIONAL = {"r2_measure", "eps", "kernel_j_amplitude", "kernel_j_support", "kernel_g_amplitude", "kernel_g_support"}


def _parse_float(key: str, text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"expected a number, got {text!r}", key=key) from None
    if not math.isfinite(value):
        raise ConfigError(f"expected a finite number, got {text!r}", key=key)
    return value


def _parse_value(key: str, text: str):
    if key in _OPTIONAL and text.lower() == "none":
        return None
    if key == "model":
        try:
            return ModelType(text)
        except ValueError:
            raise ConfigError(f"unknown model {text!r}", key=key) from None
    if key in ("kernel_j", "kernel_g"):
        try:
            return KernelKind(text)
        except ValueError:
            raise ConfigError(f"unknown kernel {text!r}", key=key) from None
    if key in _TUPLE_LEN or key == "snapshot_times":
        parts = [p.strip() for p in text.split(",") if p.strip()]
        values = tuple(_parse_float(key, p) for p in parts)
        if key in _TUPLE_LEN and len(values) != _TUPLE_LEN[key]:
            raise ConfigError(f"expected {_TUPLE_LEN[key]} numbers, got {len(values)}", key=key)
        return values
    if key in _INT:
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"expected an integer, got {text!r}", key=key) from None
    if key in _FLOAT:
        return _parse_float(key, text)
    if key == "strict_cfl":
        low = text.lower()
        if low not in ("true", "false"):
            raise ConfigError(f"expected true or false, got {text!r}", key=key)
        return low == "true"
    return text


def parse_config(text: str) -> RunConfig:
    """Parse ``key = value`` lines into a validated :class:`RunConfig`."""
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (s.strip() for s in line.partition("="))
        if key not in _FIELDS:
            raise ConfigError(f"line {lineno}: unknown key", key=key)
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key", key=key)
        values[key] = _parse_value(key, value)
    if "model" not in values:
        raise ConfigError("missing required key", key="model")
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def _format_value(value) -> str:
    if value is None:
        return "none"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (KernelKind, ModelType)):
        return value.value
    if isinstance(value, tuple):
        return ", ".join(repr(float(v)) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def config_items(config: RunConfig) -> list[tuple[str, str]]:
    return [(key, _format_value(getattr(config, key))) for key in KEYS]


def emit_config(config: RunConfig) -> str:
    """Serialize every effective value; ``parse_config(emit_config(c)) == c``."""
    return "".join(f"{k} = {v}\n" for k, v in config_items(config))
