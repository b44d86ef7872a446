"""
Mixing estimators: hitting tails, TV bounds, sweeps, cutoff and exit experiments.
"""

from .bounds import (
    CountingLowerBound,
    PluginEstimate,
    TVBounds,
    VisitEstimate,
    default_m_grid,
    first_visit_time,
    tv_lower_bound_counting,
    tv_plugin_small_n,
    tv_upper_bound,
    visit_failure_prob,
)
from .cutoff import CUTOFF_COLUMNS, CutoffLocator, CutoffReport, default_t_grid, locate_cutoff
from .exits import ExitEstimate, exit_probability, weighted_sum
from .hitting import HittingTail, hitting_tail, hitting_tail_at
from .laws import ConfigurationLaw, LawKind
from .stats import bootstrap_tv, clopper_pearson, empirical_tv, normal_interval
from .sweep import SWEEP_COLUMNS, DecayReport, empty_sweep, mixing_sweep, visit_failure_decay

__all__ = [
    "CountingLowerBound",
    "PluginEstimate",
    "TVBounds",
    "VisitEstimate",
    "default_m_grid",
    "first_visit_time",
    "tv_lower_bound_counting",
    "tv_plugin_small_n",
    "tv_upper_bound",
    "visit_failure_prob",
    "CUTOFF_COLUMNS",
    "CutoffLocator",
    "CutoffReport",
    "default_t_grid",
    "locate_cutoff",
    "ExitEstimate",
    "exit_probability",
    "weighted_sum",
    "HittingTail",
    "hitting_tail",
    "hitting_tail_at",
    "ConfigurationLaw",
    "LawKind",
    "bootstrap_tv",
    "clopper_pearson",
    "empirical_tv",
    "normal_interval",
    "SWEEP_COLUMNS",
    "DecayReport",
    "empty_sweep",
    "mixing_sweep",
    "visit_failure_decay",
]
