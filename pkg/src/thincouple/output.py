"""CSV and report writers. All floats use the shortest round-trip representation."""
from __future__ import annotations

from pathlib import Path

import numpy as np

from .config import RunConfig, config_items, parse_config
from .errors import ThinCoupleError
from .grids import EpsState

DIAGNOSTICS_HEADER = "t,mass,distance,energy"
CONFIG_PREFIX = "config."


class OutputError(ThinCoupleError, OSError):
    pass


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def diagnostics_csv(series) -> str:
    lines = [DIAGNOSTICS_HEADER]
    for row in zip(series.t, series.mass, series.distance, series.energy):
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def time_label(t: float) -> str:
    return f"{t:.6g}"


def field_csv(arr: np.ndarray) -> str:
    arr = np.atleast_2d(arr)
    return "".join(",".join(_fmt(v) for v in row) + "\n" for row in arr)


def report_text(report: dict, config: RunConfig | None = None) -> str:
    lines = [f"{k}={_fmt(v)}" for k, v in report.items()]
    if config is not None:
        lines += [f"{CONFIG_PREFIX}{k}={v}" for k, v in config_items(config)]
    return "\n".join(lines) + "\n"


def config_from_report(text: str) -> RunConfig:
    """Recover the effective configuration embedded in a ``report.txt``."""
    body = [
        line[len(CONFIG_PREFIX) :].replace("=", " = ", 1)
        for line in text.splitlines()
        if line.startswith(CONFIG_PREFIX)
    ]
    return parse_config("\n".join(body))


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8", newline="\n")
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def write_outputs(series, snapshots: dict, config: RunConfig, out_dir, report: dict | None = None, grids=None) -> list[Path]:
    """Write ``diagnostics.csv``, per-time snapshots and ``report.txt``.

    ``snapshots`` maps step index to state. ``u`` is written as N rows by M
    columns; the segment field as a single row (the section average for
    epsilon states, which needs ``grids``).
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OutputError(f"cannot create {out}: {exc}") from exc
    written = []
    path = out / "diagnostics.csv"
    _write(path, diagnostics_csv(series))
    written.append(path)
    for step in sorted(snapshots):
        state = snapshots[step]
        label = time_label(step * config.dt)
        if isinstance(state, EpsState):
            second = grids.box.h2 * state.v.sum(axis=1)
        else:
            second = state.V
        for name, arr in ((f"snapshot_{label}.csv", state.u), (f"snapshot_v_{label}.csv", second)):
            _write(out / name, field_csv(arr))
            written.append(out / name)
    path = out / "report.txt"
    _write(path, report_text(report or {}, config))
    written.append(path)
    return written
