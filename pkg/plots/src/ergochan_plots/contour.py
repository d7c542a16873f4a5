"""Contour of the divisibility margin s_min^2 - s1 s2 s3 over the (b, p) grid.

Reads the `divscan` CSV (columns b, p, margin on a rectangular grid) and
writes a PNG.  Exits 1 if any margin lies below -1e-12 (the scanned
channels are expected to be infinitesimally divisible everywhere), 2 on
malformed input.
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

MARGIN_FLOOR = -1e-12
STYLE = Path(__file__).with_name("style.mplstyle")


def load_grid(path: Path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return (b_axis, p_axis, margin[b, p]) from a rectangular scan CSV."""
    columns = read_columns(path, required=("b", "p", "margin"))
    b = np.array(floats(columns["b"], "b"))
    p = np.array(floats(columns["p"], "p"))
    margin = np.array(floats(columns["margin"], "margin"))
    b_axis = np.unique(b)
    p_axis = np.unique(p)
    if b_axis.size * p_axis.size != b.size:
        raise SchemaError(
            f"{path}: rows do not form a rectangular grid "
            f"({b_axis.size} x {p_axis.size} != {b.size})")
    field = np.full((b_axis.size, p_axis.size), np.nan)
    bi = np.searchsorted(b_axis, b)
    pi = np.searchsorted(p_axis, p)
    field[bi, pi] = margin
    if np.any(np.isnan(field)):
        raise SchemaError(f"{path}: duplicate or missing grid points")
    return b_axis, p_axis, field


def render(b_axis: np.ndarray, p_axis: np.ndarray, field: np.ndarray,
           out_path: Path, source: Path) -> None:
    with plt.style.context(str(STYLE)):
        fig, ax = plt.subplots()
        levels = 21
        cf = ax.contourf(b_axis, p_axis, field.T, levels=levels, vmin=0.0)
        fig.colorbar(cf, ax=ax, label="margin")
        ax.set_xlabel("fixed-point Bloch length b")
        ax.set_ylabel("probability p")
        ax.set_title("Infinitesimal-divisibility margin  $s_{min}^2 - s_1 s_2 s_3$")
        out_path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(out_path, format="png",
                    metadata={"ergochan-input-sha256": sha256_of(source),
                              "ergochan-input-name": source.name})
        plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description="Render the divisibility-margin contour.")
    parser.add_argument("--in", dest="input", required=True, help="divscan CSV path")
    parser.add_argument("--out", dest="output", required=True, help="output PNG path")
    args = parser.parse_args(argv)
    try:
        b_axis, p_axis, field = load_grid(Path(args.input))
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    min_margin = float(np.min(field))
    if min_margin < MARGIN_FLOOR:
        print(f"negative divisibility margin {min_margin:.3e} below {MARGIN_FLOOR:g}",
              file=sys.stderr)
        return 1
    render(b_axis, p_axis, field, Path(args.output), Path(args.input))
    print(f"wrote {args.output} (min margin {min_margin:.3e})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
