"""
Result writers: CSV tables with 6-significant-digit floats, JSON documents,
and long-format plot data.
"""

import json
from pathlib import Path
from typing import Any

import polars as pl

from loguru import logger


PLOT_SERIES = ("lower", "upper", "plugin")
PLOT_SCHEMA = {
    "n": pl.Int64,
    "t": pl.Int64,
    "t_over_n": pl.Float64,
    "series": pl.Utf8,
    "value": pl.Float64,
    "clamped": pl.Boolean,
}


def format_floats(frame: pl.DataFrame, digits: int = 6) -> pl.DataFrame:
    """Render every float column with ``digits`` significant digits."""
    spec = f"{{:.{digits}g}}"
    return frame.with_columns(
        pl.col(name).map_elements(spec.format, return_dtype=pl.Utf8)
        for name, dtype in frame.schema.items()
        if dtype in (pl.Float32, pl.Float64)
    )


def write_table(frame: pl.DataFrame, path: Path) -> Path:
    """Write ``frame`` as CSV (floats to 6 significant digits)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    format_floats(frame).write_csv(path)
    logger.debug(f"Wrote {frame.height} rows to {path}")
    return path


def write_json(data: Any, path: Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(data, f, indent=2, default=str)
        f.write("\n")
    return path


def emit_plotdata(sweeps: pl.DataFrame) -> pl.DataFrame:
    """
    Tidy long-format cutoff profile: one row per (n, t, series).

    Values are clamped to [0, 1]; ``clamped`` flags rows that were moved.
    Missing estimates (e.g. no plug-in column for large n) are dropped.
    """
    series = [s for s in PLOT_SERIES if s in sweeps.columns]
    if sweeps.height == 0 or not series:
        return pl.DataFrame(schema=PLOT_SCHEMA)

    long = (
        sweeps.with_columns((pl.col("t") / pl.col("n")).alias("t_over_n"))
        .unpivot(
            index=["n", "t", "t_over_n"],
            on=series,
            variable_name="series",
            value_name="raw",
        )
        .drop_nulls("raw")
    )
    return (
        long.with_columns(
            pl.col("raw").clip(0.0, 1.0).alias("value"),
            ((pl.col("raw") < 0) | (pl.col("raw") > 1)).alias("clamped"),
        )
        .select(list(PLOT_SCHEMA))
        .cast(PLOT_SCHEMA)
        .sort(["n", "t", "series"])
    )
