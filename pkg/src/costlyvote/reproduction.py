"""Recomputation of the published tables from the model."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Optional

from . import reference
from .behavioral import Camp, camp_of
from .equilibrium import EquilibriumResult, SolverOptions, solve
from .model import Category, GroupTie, Rule, StrategyProfile
from .montecarlo import SimOptions, estimate_win_probability
from .pivot import win_probability_a
from .welfare import WelfareReport, expected_welfare, point_mass_samples, welfare_from_sample

NON_IC = (Category.GLOBAL, Category.LOCAL, Category.BOTH)


@dataclass(frozen=True)
class Table4Row:
    config_id: int
    category: Category
    rule: Rule
    t_a: float
    t_b: float
    published_a: float
    published_b: float
    result: EquilibriumResult

    @property
    def gap_a(self) -> float:
        return self.t_a - self.published_a

    @property
    def gap_b(self) -> float:
        return self.t_b - self.published_b

    @property
    def max_gap(self) -> float:
        return max(abs(self.gap_a), abs(self.gap_b))


def solve_embedded(config_id: int, rule, options: Optional[SolverOptions] = None) -> EquilibriumResult:
    return solve(reference.config(config_id), rule, options)


def reproduce_table4(
    rules: Iterable = (Rule.WTA, Rule.PR),
    options: Optional[SolverOptions] = None,
    ids: Iterable[int] = reference.CONFIG_IDS,
    workers: int = 1,
) -> list[Table4Row]:
    """Solve every embedded situation; rows ordered by configuration id, then rule."""
    jobs = [(i, Rule.parse(r)) for i in ids for r in rules]

    def run(job):
        i, r = job
        res = solve_embedded(i, r, options)
        ta, tb = res.profile.t[0]
        pa, pb = reference.equilibrium_turnout(i, r)
        return Table4Row(i, reference.category(i), r, ta, tb, pa, pb, res)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            return list(pool.map(run, jobs))
    return [run(j) for j in jobs]


def equilibrium_welfare(config_id: int, rule, group_tie=GroupTie.COIN) -> tuple[EquilibriumResult, WelfareReport]:
    cfg = reference.config(config_id)
    res = solve(cfg, rule, SolverOptions(group_tie=group_tie))
    return res, expected_welfare(cfg, rule, res.profile, group_tie)


def experiment_welfare(config_id: int, rule, equilibrium: EquilibriumResult) -> WelfareReport:
    """Welfare with group 1 at the published experimental averages (point-mass samples)."""
    cfg = reference.config(config_id)
    samples = point_mass_samples(cfg, *reference.experiment_turnout(config_id, rule))
    return welfare_from_sample(cfg, rule, samples, equilibrium.profile)


@dataclass(frozen=True)
class CategoryWelfare:
    category: Category
    rule: Rule
    majority: float
    minority: float
    gini: float


def category_welfare(rule, reports: dict[int, WelfareReport]) -> list[CategoryWelfare]:
    """Average majority/minority welfare and Gini over each non-IC category."""
    out = []
    for cat in NON_IC:
        ids = [i for i in reference.ids_in(cat) if i in reports]
        if not ids:
            continue
        out.append(
            CategoryWelfare(
                cat,
                Rule.parse(rule),
                fmean(reports[i].majority for i in ids),
                fmean(reports[i].minority for i in ids),
                fmean(reports[i].gini for i in ids),
            )
        )
    return out


@dataclass(frozen=True)
class WelfareShift:
    config_id: int
    rule: Rule
    majority_theory: float
    majority_observed: float
    minority_theory: float
    minority_observed: float

    @property
    def majority_gain(self) -> float:
        return self.majority_observed - self.majority_theory

    @property
    def minority_gain(self) -> float:
        return self.minority_observed - self.minority_theory


def welfare_shifts(rule) -> list[WelfareShift]:
    rows = []
    for cat in NON_IC:
        for i in reference.ids_in(cat):
            res, th = equilibrium_welfare(i, rule)
            ob = experiment_welfare(i, rule, res)
            rows.append(WelfareShift(i, Rule.parse(rule), th.majority, ob.majority, th.minority, ob.minority))
    return sorted(rows, key=lambda r: r.config_id)


def observed_profile(config_id: int, rule, equilibrium: EquilibriumResult) -> StrategyProfile:
    t1 = reference.experiment_turnout(config_id, rule)
    return StrategyProfile((t1,) + equilibrium.profile.t[1:])


@dataclass(frozen=True)
class MajorityWin:
    config_id: int
    rule: Rule
    equilibrium: float
    observed: float
    observed_se: Optional[float] = None


def majority_win_probabilities(rule, sim: Optional[SimOptions] = None) -> list[MajorityWin]:
    """Majority candidate's win probability at equilibrium vs. with observed group-1 turnout.

    Analytic unless ``sim`` is given, in which case the observed-turnout side
    is simulated.
    """
    rows = []
    for cat in NON_IC:
        for i in reference.ids_in(cat):
            cfg = reference.config(i)
            res = solve(cfg, rule)
            maj = "A" if camp_of(cfg, "A") is Camp.MAJORITY else "B"
            sign = (lambda x: x) if maj == "A" else (lambda x: 1.0 - x)
            eq = sign(win_probability_a(cfg, rule, res.profile))
            prof = observed_profile(i, rule, res)
            if sim is None:
                rows.append(MajorityWin(i, Rule.parse(rule), eq, sign(win_probability_a(cfg, rule, prof))))
            else:
                est = estimate_win_probability(cfg, rule, prof, sim)
                rows.append(MajorityWin(i, Rule.parse(rule), eq, sign(est.value), est.se))
    return sorted(rows, key=lambda r: r.config_id)
