"""Figure renderers for ergochan CSV outputs.

One script per figure kind, both taking ``--in <csv> --out <png>``:
``ergochan-plot-contour`` (divisibility-margin contour over the (b, p)
grid) and ``ergochan-plot-timeseries`` (maximal-ergotropy time series).
The scripts never recompute physics; they consume the CSV contracts of
the primary CLI and embed a SHA-256 checksum of the input in the PNG
metadata.
"""

__version__ = "0.1.0"
