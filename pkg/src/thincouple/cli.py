"""Command line interface.

Exit codes: 0 on success, 2 on configuration errors, 3 on numerical divergence.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .config import initial_state, parse_config
from .diagnostics import mean_steady_value, node_average
from .epsilon_sweep import sweep_and_compare
from .errors import ConfigError, DivergenceError, ThinCoupleError
from .experiments import run_experiment
from .operators import CoupledSystem, assemble_generator
from .output import OutputError, report_text, write_outputs
from .spectral import decay_rate_fit, smallest_nonzero_eigenvalue
from .stepper import check_cfl_strict, run

EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3

log = logging.getLogger("thincouple")


def _load(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    return parse_config(text)


def cmd_run(args) -> int:
    cfg = _load(args.config)
    grids = cfg.grids()
    model = cfg.model_kind()
    system = CoupledSystem(model, cfg.kernels(), grids)
    if cfg.strict_cfl and not model.type.is_eps:
        check_cfl_strict(system, cfg.dt)
    state0 = initial_state(cfg, grids)
    series, final, snaps = run(state0, system, cfg.plan(), snapshot_steps=cfg.snapshot_steps())
    report = {
        "model": cfg.model.value,
        "t_final": float(final.t),
        "steady_value": mean_steady_value(state0, model, grids),
        "initial_node_average": node_average(state0),
        "mass_drift": series.mass_drift(),
        "final_distance": series.distance[-1],
    }
    out = args.out or cfg.out_dir
    write_outputs(series, snaps, cfg, out, report, grids)
    print(f"wrote {out}")
    return 0


def cmd_experiment(args) -> int:
    result = run_experiment(args.number, t_final=args.t_final)
    out = args.out or result.config.out_dir
    write_outputs(result.series, result.snapshots, result.config, out, result.report)
    sys.stdout.write(report_text(result.report))
    return 0


def cmd_spectrum(args) -> int:
    cfg = _load(args.config)
    if cfg.model.is_eps:
        raise ConfigError("spectral analysis needs a limit model", key="model")
    grids = cfg.grids()
    kernels = cfg.kernels()
    rep = smallest_nonzero_eigenvalue(assemble_generator(cfg.model_kind(), kernels, grids))
    if args.fit:
        system = CoupledSystem(cfg.model_kind(), kernels, grids)
        series, _, _ = run(initial_state(cfg, grids), system, cfg.plan())
        rep.fitted_rate = decay_rate_fit(series)
        rep.fit_window = (0.5 * series.t[-1], series.t[-1])
    sys.stdout.write(rep.as_text())
    if args.csv:
        rows = ["index,eigenvalue"] + [f"{i},{float(v)!r}" for i, v in enumerate(rep.eigenvalues)]
        try:
            Path(args.csv).write_text("\n".join(rows) + "\n", encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot write {args.csv}: {exc}") from exc
    return 0


def _eps_list(text: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad eps list {text!r}") from None


def cmd_eps_sweep(args) -> int:
    cfg = _load(args.config)
    result = sweep_and_compare(cfg, args.eps, args.t)
    text = result.to_csv()
    if args.out:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "sweep.csv").write_text(text, encoding="utf-8")
        except OSError as exc:
            raise OutputError(f"cannot write {out}: {exc}") from exc
    sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="thincouple", description="Coupled local/nonlocal diffusion in thin domains")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a configuration file")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("experiment", help="run one of the six experiment presets")
    p.add_argument("number", type=int, choices=range(1, 7))
    p.add_argument("--out")
    p.add_argument("--t-final", type=float, default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("spectrum", help="spectral gap of a limit model")
    p.add_argument("--config", required=True)
    p.add_argument("--csv", help="write the full spectrum here")
    p.add_argument("--fit", action="store_true", help="also fit the decay rate of a run")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("eps-sweep", help="compare epsilon runs against the limit run")
    p.add_argument("--config", required=True)
    p.add_argument("--eps", type=_eps_list, default=[0.8, 0.4, 0.2, 0.1])
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_eps_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except DivergenceError as exc:
        print(f"error: divergence: {exc}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except (ThinCoupleError, np.linalg.LinAlgError) as exc:
        if isinstance(exc, OutputError):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
