"""Age of Information analysis, bounds, optimisation and simulation for 802.11ax UORA."""

from .analytics import AoiBreakdown, average_aoi, vacancy_moments
from .bounds import aaoi_closed_form_m0, aaoi_lower_bound_m0, stationary_roots
from .config import ConfigError, NetworkConfig, build_ladder
from .optimizer import efficient_search_alg1, efficient_search_alg2, exhaustive_search
from .simulator import SimConfig, SimStats, run_simulation
from .steady_state import FixedPointError, SteadyState, solve_fixed_point

__all__ = [
    "AoiBreakdown", "ConfigError", "FixedPointError", "NetworkConfig", "SimConfig", "SimStats",
    "SteadyState", "aaoi_closed_form_m0", "aaoi_lower_bound_m0", "average_aoi", "build_ladder",
    "efficient_search_alg1", "efficient_search_alg2", "exhaustive_search", "run_simulation",
    "solve_fixed_point", "stationary_roots", "vacancy_moments",
]
