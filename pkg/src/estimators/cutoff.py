"""
Cutoff location - DuckDB SQL over sweep tables.

For each n the chain is mixed to within ε after t_hi(n) steps (upper bound)
and still at distance >= 1 − ε after t_lo(n) steps (lower bound). Cutoff shows
up as t_lo/n and t_hi/n both approaching ρ̂ while (t_hi − t_lo)/n shrinks.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

import duckdb
import polars as pl
from loguru import logger

from ..chain.driving import DrivingSequence
from ..chain.sampler import DensityEstimate, stationary_density
from ..core.errors import GridTooCoarseError
from ..core.instructions import InstructionSource
from ..core.topology import build_interval
from ..utils.seeds import derive_seed
from .sweep import mixing_sweep


CUTOFF_COLUMNS = ["n", "t_lo", "t_hi", "rho_hat", "window_over_n"]


def default_t_grid(n: int) -> List[int]:
    """0..2n in steps of max(1, n // 16)."""
    return list(range(0, 2 * n + 1, max(1, n // 16)))


@dataclass
class CutoffReport:
    """Per-n crossings plus the sweeps they were read from."""
    frame: pl.DataFrame
    sweeps: pl.DataFrame
    epsilon: float
    densities: Dict[int, DensityEstimate] = field(default_factory=dict)

    @property
    def windows(self) -> List[float]:
        return self.frame["window_over_n"].to_list()

    @property
    def window_shrinking(self) -> bool:
        w = self.windows
        return all(b < a for a, b in zip(w, w[1:]))

    def scaling(self) -> pl.DataFrame:
        """t_lo/n, t_hi/n and their relative distance to ρ̂."""
        return self.frame.with_columns(
            (pl.col("t_lo") / pl.col("n")).alias("t_lo_over_n"),
            (pl.col("t_hi") / pl.col("n")).alias("t_hi_over_n"),
        ).with_columns(
            ((pl.col("t_lo_over_n") - pl.col("rho_hat")).abs() / pl.col("rho_hat"))
            .alias("t_lo_rel_err"),
            ((pl.col("t_hi_over_n") - pl.col("rho_hat")).abs() / pl.col("rho_hat"))
            .alias("t_hi_rel_err"),
        )


class CutoffLocator:
    """
    Extracts crossing points from sweep tables with DuckDB.

    Sweeps and densities are handed over as Arrow tables and queried in memory.
    """

    def __init__(self, epsilon: float):
        if not 0 < epsilon < 0.5:
            raise ValueError(f"epsilon must lie in (0, 1/2), got {epsilon}")
        self.epsilon = float(epsilon)
        self.conn = duckdb.connect(":memory:")
        self.logger = logger.bind(component="CutoffLocator")

    def _load_sql(self, filename: str) -> str:
        """Load SQL query from file."""
        sql_path = Path(__file__).parent / "sql" / filename
        if not sql_path.exists():
            raise FileNotFoundError(f"SQL file not found: {sql_path}")
        return sql_path.read_text()

    def locate(self, sweeps: pl.DataFrame, densities: pl.DataFrame) -> pl.DataFrame:
        """
        Args:
            sweeps: Concatenated sweep tables (columns n, t, lower, upper, ...).
            densities: Columns n, rho_hat.

        Raises:
            GridTooCoarseError: a crossing is missing or sits on the grid edge.
        """
        self.conn.register("sweep", sweeps.select(["n", "t", "lower", "upper"]).to_arrow())
        self.conn.register("densities", densities.select(["n", "rho_hat"]).to_arrow())
        try:
            result = self.conn.execute(
                self._load_sql("cutoff_crossings.sql"), {"epsilon": self.epsilon}
            ).pl()
        finally:
            self.conn.unregister("sweep")
            self.conn.unregister("densities")

        for row in result.iter_rows(named=True):
            n = row["n"]
            span = f"t∈[{row['t_min']},{row['t_max']}]"
            if row["t_lo"] is None:
                raise GridTooCoarseError(
                    f"n={n}: lower bound never reaches {1 - self.epsilon} on {span}"
                )
            if row["t_lo"] >= row["t_max"]:
                raise GridTooCoarseError(
                    f"n={n}: lower bound never drops below {1 - self.epsilon} on {span}"
                )
            if row["t_hi"] is None:
                raise GridTooCoarseError(
                    f"n={n}: upper bound never drops to {self.epsilon} on {span}"
                )
            if row["t_hi"] <= row["t_min"]:
                raise GridTooCoarseError(
                    f"n={n}: upper bound is already at most {self.epsilon} at t={row['t_min']}"
                )
            if row["t_lo"] > row["t_hi"]:
                self.logger.warning(
                    f"n={n}: t_lo={row['t_lo']} exceeds t_hi={row['t_hi']}; "
                    f"bounds overlap within Monte Carlo error"
                )

        return result.select(CUTOFF_COLUMNS)

    def close(self) -> None:
        """Close the DuckDB connection."""
        self.conn.close()

    def __enter__(self) -> "CutoffLocator":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def locate_cutoff(
    n_grid: Sequence[int],
    sleep_rate: float,
    epsilon: float,
    reps: int,
    seed: int,
    driving: Optional[DrivingSequence] = None,
    t_grid: Optional[Callable[[int], Sequence[int]]] = None,
    density_reps: Optional[int] = None,
    m_grid: Optional[Sequence[int]] = None,
    confidence: float = 0.95,
    conservative: bool = True,
    threads: int = 1,
) -> CutoffReport:
    """
    Sweep every n of ``n_grid`` on the interval and locate both crossings.

    Each size uses its own sub-seed ("size", n). ρ̂(n) comes from
    ``stationary_density`` on the same (n, λ).
    """
    with CutoffLocator(epsilon) as locator:
        locator.logger.info("=" * 60)
        locator.logger.info(f"CUTOFF: n∈{list(n_grid)} λ={sleep_rate} ε={epsilon}")
        locator.logger.info("=" * 60)

        driving = driving or DrivingSequence.central()
        t_grid = t_grid or default_t_grid

        sweeps, estimates = [], {}
        for n in sorted(set(int(x) for x in n_grid)):
            source = InstructionSource(build_interval(n), sleep_rate, derive_seed(seed, "size", n))
            estimates[n] = stationary_density(source, density_reps or reps, confidence, threads)
            sweeps.append(
                mixing_sweep(
                    source, t_grid(n), driving, reps,
                    m_grid=m_grid, confidence=confidence, conservative=conservative,
                    plugin=False, threads=threads,
                )
            )

        sweep_frame = pl.concat(sweeps)
        densities = pl.DataFrame({
            "n": list(estimates),
            "rho_hat": [e.mean for e in estimates.values()],
        })
        frame = locator.locate(sweep_frame, densities)
        for row in frame.iter_rows(named=True):
            locator.logger.info(
                f"✓ n={row['n']}: t_lo/n={row['t_lo'] / row['n']:.3f} "
                f"t_hi/n={row['t_hi'] / row['n']:.3f} "
                f"ρ̂={row['rho_hat']:.4f}±{estimates[row['n']].half_width:.4f} "
                f"window/n={row['window_over_n']:.3f}"
            )
    return CutoffReport(frame=frame, sweeps=sweep_frame, epsilon=epsilon, densities=estimates)
