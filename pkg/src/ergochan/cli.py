"""Command-line interface: `evolve`, `measures` and `divscan` subcommands.

Each subcommand reads a JSON run configuration and emits CSV (17
significant digits, scientific notation) plus, where applicable, a JSON
summary.  Outputs are deterministic: identical config and seed produce
byte-identical files.  Worker count for per-point parallelism is capped
by the ERGOCHAN_THREADS environment variable (0 = auto).

Exit codes: 0 success, 2 configuration error, 3 numerical singularity,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .channels import EPS_P
from .config import RunConfig, parse_config
from .errors import (ConfigError, InvariantViolationError,
                     NonInvertibleMapError, SingularScheduleError)
from .divisibility import divisibility_scan
from .ergotropy import nm_measure
from .lindblad import ergodic_generator_family, integrate
from .nonmarkov import backflow_windows, rhp_result

MEASURES_HEADER = "t,p,pdot,g_rhp_numeric,g_rhp_closed,blp_closed,W_max,sigma_W,N_W_cumulative"
DIVSCAN_HEADER = "b,p,s1,s2,s3,margin"


def _fmt(value: float) -> str:
    """17-significant-digit scientific notation; +inf as the token 'inf'."""
    if math.isnan(value):
        raise InvariantViolationError("NaN encountered while writing output")
    if math.isinf(value):
        if value < 0:
            raise InvariantViolationError("negative infinity encountered while writing output")
        return "inf"
    return f"{value:.16e}"


def resolve_workers() -> int:
    """Worker count from ERGOCHAN_THREADS (0 or unset-invalid = auto, min 1)."""
    raw = os.environ.get("ERGOCHAN_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"ERGOCHAN_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ConfigError(f"ERGOCHAN_THREADS must be nonnegative, got {n}")
    if n == 0:
        return os.cpu_count() or 1
    return n


def _map_ordered(fn: Callable, items: Sequence, workers: int) -> list:
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _singular_times(config: RunConfig) -> list[float]:
    """Times in [t0, t1] where the schedule probability reaches the floor."""
    schedule = config.schedule()
    bad: set[float] = set()
    if config.schedule_type in ("cosine_squared", "damped_cosine") and config.omega > 0.0:
        # p vanishes exactly at odd multiples of pi / (2 omega).
        half = math.pi / (2.0 * config.omega)
        n = math.ceil((config.t0 / half - 1.0) / 2.0)
        t = (2 * max(n, 0) + 1) * half
        while t <= config.t1:
            if t >= config.t0:
                bad.add(t)
            t += 2.0 * half
    for t in config.times():
        if schedule.evaluate(float(t))[0] <= EPS_P:
            bad.add(float(t))
    return sorted(bad)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    print(f"wrote {path}")


def _write_json(path: Path, payload: dict) -> None:
    _write_text(path, json.dumps(payload, sort_keys=True, indent=2) + "\n")


def cmd_evolve(config: RunConfig, out_dir: Path) -> None:
    """Integrate the master equation and compare against the closed-form map."""
    channel = config.channel()
    singular = _singular_times(config)
    if singular:
        listing = ", ".join(f"{t:.9g}" for t in singular[:8])
        raise SingularScheduleError(
            f"schedule probability vanishes inside the time grid at t = {listing}"
            + (" ..." if len(singular) > 8 else "")
        )
    rho0 = config.initial_state()
    times = config.times()
    trajectory = integrate(ergodic_generator_family(channel), rho0, times)

    d = config.dimension
    entry_cols = []
    for i in range(d):
        for j in range(d):
            entry_cols.append(f"rho{i}{j}_re")
            entry_cols.append(f"rho{i}{j}_im")
    header = "t,p," + ",".join(entry_cols) + ",closed_form_max_dev"

    lines = [header]
    for t, state in zip(times, trajectory):
        p, _ = channel.schedule.evaluate(float(t))
        closed = channel.apply_with_probability(p, rho0)
        dev = float(np.max(np.abs(state.matrix - closed.matrix)))
        cells = [_fmt(float(t)), _fmt(p)]
        for i in range(d):
            for j in range(d):
                cells.append(_fmt(float(state.matrix[i, j].real)))
                cells.append(_fmt(float(state.matrix[i, j].imag)))
        cells.append(_fmt(dev))
        lines.append(",".join(cells))
    _write_text(out_dir / "evolve.csv", "\n".join(lines) + "\n")


def cmd_measures(config: RunConfig, out_dir: Path) -> None:
    """Time series of non-Markovianity rates and the ergotropy measure."""
    channel = config.channel()
    times = config.times()
    qubit = config.dimension == 2

    trace = None
    if qubit:
        # nm_measure validates passivity of the fixed point against H.
        trace = nm_measure(channel, config.hamiltonian_obj(), times)

    def rhp_at(t: float):
        return rhp_result(channel, float(t), delta=config.rhp_delta)

    workers = resolve_workers()
    rhp = _map_ordered(rhp_at, list(times), workers)

    lines = [MEASURES_HEADER]
    for k, t in enumerate(times):
        p, pdot = channel.schedule.evaluate(float(t))
        cells = [
            _fmt(float(t)),
            _fmt(p),
            _fmt(pdot),
            _fmt(rhp[k].g_numeric),
            _fmt(rhp[k].g_closed),
            _fmt(max(0.0, pdot)),
        ]
        if trace is not None:
            cells.extend([
                _fmt(trace.w_max[k]),
                _fmt(trace.sigma_w[k]),
                _fmt(trace.n_w_cumulative[k]),
            ])
        else:
            cells.extend(["", "", ""])
        lines.append(",".join(cells))
    _write_text(out_dir / "measures.csv", "\n".join(lines) + "\n")

    windows = backflow_windows(config.schedule(), config.t1)
    windows = [[a, b] for a, b in windows if b > config.t0]
    summary = {
        "N_W": (trace.n_w_cumulative[-1] if trace is not None else None),
        "script_N_W": (trace.script_n_w if trace is not None else None),
        "backflow_windows": windows,
    }
    if trace is not None and not 0.0 <= trace.script_n_w < 1.0:
        raise InvariantViolationError(f"script_N_W = {trace.script_n_w} outside [0, 1)")
    _write_json(out_dir / "measures_summary.json", summary)


def cmd_divscan(config: RunConfig, out_dir: Path) -> None:
    """Lorentz-form margin scan over the (b, p) grid."""
    rows, summary = divisibility_scan(config.grid_b, config.grid_p)
    lines = [DIVSCAN_HEADER]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    _write_text(out_dir / "divscan.csv", "\n".join(lines) + "\n")
    _write_json(out_dir / "divscan_summary.json", {
        "min_margin": summary.min_margin,
        "at_b": summary.at_b,
        "at_p": summary.at_p,
        "rows": summary.rows,
        "grid_b": config.grid_b,
        "grid_p": config.grid_p,
    })


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ergochan",
        description="Ergodic-channel dynamics, non-Markovianity measures and divisibility scans.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("evolve", "integrate the master equation and compare with the closed-form map"),
        ("measures", "emit RHP/BLP/ergotropy time series and summary"),
        ("divscan", "emit the Lorentz-form margin grid scan"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (default: config output_dir)")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def run(argv: Sequence[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    config = parse_config(args.config)
    if args.seed is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
        config = dataclasses.replace(config, seed=args.seed)
    out_dir = Path(args.out) if args.out is not None else Path(config.output_dir)
    if args.command == "evolve":
        cmd_evolve(config, out_dir)
    elif args.command == "measures":
        cmd_measures(config, out_dir)
    else:
        cmd_divscan(config, out_dir)


def main(argv: Sequence[str] | None = None) -> int:
    try:
        run(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (SingularScheduleError, NonInvertibleMapError) as exc:
        print(f"numerical singularity: {exc}", file=sys.stderr)
        return 3
    except (InvariantViolationError,) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
