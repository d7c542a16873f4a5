"""Time series of the maximal-input ergotropy from a `measures` CSV.

Plots W_max(t) (solid, left axis) and, when present, the backflow rate
sigma_W (dashed, right axis).  A Markovian (exponential-schedule) input
yields a monotone nonincreasing curve, a cosine-squared input an
oscillating one.  Exits 2 on malformed input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .csvio import SchemaError, floats, read_columns, sha256_of

STYLE = Path(__file__).with_name("style.mplstyle")


def load_series(path: Path) -> tuple[np.ndarray, dict[str, np.ndarray]]:
    """Return (t, value columns).  Prefers W_max/sigma_W; otherwise takes
    the first non-time column so the script works on any t-indexed CSV."""
    columns = read_columns(path, required=("t",))
    t = np.array(floats(columns["t"], "t"))
    series: dict[str, np.ndarray] = {}
    for name in ("W_max", "sigma_W"):
        if name in columns and any(cell != "" for cell in columns[name]):
            series[name] = np.array(floats(columns[name], name))
    if not series:
        for name, cells in columns.items():
            if name == "t" or all(cell == "" for cell in cells):
                continue
            series[name] = np.array(floats(cells, name))
            break
    if not series:
        raise SchemaError(f"{path}: no value column to plot")
    return t, series


def render(t: np.ndarray, series: dict[str, np.ndarray], out_path: Path, source: Path) -> None:
    with plt.style.context(str(STYLE)):
        fig, ax = plt.subplots()
        first = next(iter(series))
        finite = np.isfinite(series[first])
        ax.plot(t[finite], series[first][finite], label=first, color="C0")
        ax.set_xlabel("t")
        ax.set_ylabel(first)
        if "sigma_W" in series and first != "sigma_W":
            ax2 = ax.twinx()
            finite2 = np.isfinite(series["sigma_W"])
            ax2.plot(t[finite2], series["sigma_W"][finite2], label="sigma_W",
                     color="C1", linestyle="--", alpha=0.8)
            ax2.set_ylabel("sigma_W")
            ax2.grid(False)
        ax.set_title("Maximal extractable work under the ergodic channel")
        out_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out_path, format="png",
                    metadata={"ergochan-input-sha256": sha256_of(source),
                              "ergochan-input-name": source.name})
        plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Render the ergotropy time series.")
    parser.add_argument("--in", dest="input", required=True, help="measures CSV path")
    parser.add_argument("--out", dest="output", required=True, help="output PNG path")
    args = parser.parse_args(argv)
    try:
        t, series = load_series(Path(args.input))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    render(t, series, Path(args.output), Path(args.input))
    print(f"wrote {args.output} ({', '.join(series)})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
