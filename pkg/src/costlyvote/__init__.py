"""Costly voting in two-tier elections: pivot probabilities, cutpoint equilibria,
Monte Carlo simulation, welfare and turnout-deviation analysis."""

from .behavioral import camp_of, category_summary, deviation_table
from .equilibrium import SolverOptions, best_response, find_all_fixed_points, solve
from .model import (
    Category,
    ElectorateConfig,
    GroupTally,
    GroupTie,
    Rule,
    StrategyProfile,
    allocate_weights,
    categorize,
    overall_support_rate,
    weight_lottery,
    win_credit_a,
)
from .montecarlo import SimOptions, estimate, estimate_pivot, simulate_election
from .pivot import pivot_probability, pivot_vector, tally_distribution, win_probability_a
from .welfare import ex_ante_gini, expected_welfare, gini, welfare_from_sample

__version__ = "0.1.0"
