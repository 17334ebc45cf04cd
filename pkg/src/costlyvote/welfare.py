"""Expected welfare per voter type and ex-ante inequality.

Welfare is expressed in units of the benefit: a type's welfare is the
probability that its candidate wins minus its expected cost divided by the
benefit.  With costs uniform on [0, c_max] and cutpoint t * c_max the
expected cost is ``E[c 1(c <= t c_max)] = t**2 * c_max / 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Mapping, Optional, Sequence

from .behavioral import Camp, camp_of
from .model import CANDIDATES, GROUPS, ElectorateConfig, GroupTie, StrategyProfile, ValidationError
from .pivot import PivotEngine

Table = tuple[tuple[float, float], tuple[float, float], tuple[float, float]]


class EmptySample(ValidationError):
    pass


class NegativeWelfare(ValueError):
    pass


@dataclass(frozen=True)
class CutpointSample:
    group_index: int
    candidate: str
    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise EmptySample(f"no cutpoints for group {self.group_index}, candidate {self.candidate}", "values")
        object.__setattr__(self, "values", vals)

    def check(self, cost_cap: float) -> None:
        for v in self.values:
            if not (0.0 <= v <= cost_cap):
                raise ValidationError(f"cutpoint {v!r} outside [0, {cost_cap}]", "values")

    def vote_probability(self, cost_cap: float) -> float:
        return fmean(self.values) / cost_cap

    def cost_term(self, cost_cap: float, benefit: float) -> float:
        """Expected cost / benefit when each voter draws her cutpoint from the sample."""
        return fmean(v * v for v in self.values) / (2.0 * cost_cap * benefit)


@dataclass(frozen=True)
class WelfareReport:
    """Per-type welfare in units of the benefit.

    ``welfare`` is ex ante: P(own candidate wins) minus expected cost, the
    win probability being that of the election as a whole.  ``interim``
    instead conditions the win probability on the voter being of that type,
    which adds her own contribution to her candidate's vote.
    """

    welfare: Table
    interim: Table
    cost: Table
    win_prob_a: float
    majority: Optional[float]
    minority: Optional[float]
    gini: Optional[float]

    def get(self, g: int, candidate: str) -> float:
        return self.welfare[g - 1][CANDIDATES.index(candidate)]


def gini(values: Iterable[tuple[float, float]]) -> float:
    """Population-weighted Gini of (welfare, mass) pairs."""
    pairs = [(float(w), float(m)) for w, m in values]
    if not pairs:
        raise ValueError("gini of an empty population")
    if any(m <= 0 for _, m in pairs):
        raise ValueError("masses must be positive")
    if any(w < 0 for w, _ in pairs):
        raise NegativeWelfare("Gini undefined for negative welfare; shift values first")
    total = math.fsum(m for _, m in pairs)
    mean = math.fsum(w * m for w, m in pairs) / total
    if mean == 0:
        return 0.0
    spread = math.fsum(mi * mj * abs(wi - wj) for wi, mi in pairs for wj, mj in pairs)
    return spread / (2.0 * total * total * mean)


def type_masses(config: ElectorateConfig) -> Table:
    return tuple((config.size(g) * config.rate(g), config.size(g) * (1.0 - config.rate(g))) for g in GROUPS)


def ex_ante_gini(config: ElectorateConfig, report: WelfareReport, groups: Sequence[int] = (1,)) -> float:
    """Gini over the supporter types of ``groups``, weighted by expected type counts.

    Types with zero expected mass are left out.
    """
    masses = type_masses(config)
    pairs = [
        (report.welfare[g - 1][k], masses[g - 1][k]) for g in groups for k in range(2) if masses[g - 1][k] > 0
    ]
    return gini(pairs)


def _report(
    config: ElectorateConfig,
    engine: PivotEngine,
    vote_prob: Table,
    cost: Table,
    gini_groups: Sequence[int],
) -> WelfareReport:
    pa = engine.win_probability_a()
    welfare, interim = [], []
    for g in GROUPS:
        abstain = engine.conditional_credit_a(g, None)
        row_w, row_i = [], []
        for k, cand in enumerate(CANDIDATES):
            t = vote_prob[g - 1][k]
            voted = engine.conditional_credit_a(g, cand)
            own_a = t * voted + (1.0 - t) * abstain
            row_w.append((pa if cand == "A" else 1.0 - pa) - cost[g - 1][k])
            row_i.append((own_a if cand == "A" else 1.0 - own_a) - cost[g - 1][k])
        welfare.append(tuple(row_w))
        interim.append(tuple(row_i))
    majority = minority = None
    try:
        camps = camp_of(config, "A") is not None
    except ValidationError:
        # outside the region where camps are defined
        camps = False
    if camps:
        by_camp = {camp_of(config, c): welfare[0][k] for k, c in enumerate(CANDIDATES)}
        majority, minority = by_camp[Camp.MAJORITY], by_camp[Camp.MINORITY]
    report = WelfareReport(tuple(welfare), tuple(interim), cost, pa, majority, minority, None)
    try:
        g = ex_ante_gini(config, report, gini_groups)
    except NegativeWelfare:
        g = None
    return WelfareReport(report.welfare, report.interim, cost, pa, majority, minority, g)


def expected_welfare(
    config: ElectorateConfig,
    rule,
    profile: StrategyProfile,
    group_tie=GroupTie.COIN,
    gini_groups: Sequence[int] = (1,),
) -> WelfareReport:
    scale = config.cost_cap / (2.0 * config.benefit)
    cost = tuple((a * a * scale, b * b * scale) for a, b in profile.t)
    engine = PivotEngine(config, rule, profile, group_tie=group_tie)
    return _report(config, engine, profile.t, cost, gini_groups)


def welfare_from_sample(
    config: ElectorateConfig,
    rule,
    samples: Mapping[str, CutpointSample],
    computer_profile: StrategyProfile,
    group_tie=GroupTie.COIN,
    gini_groups: Sequence[int] = (1,),
) -> WelfareReport:
    """Welfare when every group-1 voter draws her cutpoint from the observed sample.

    Independent draws make each group-1 vote probability the sample mean over
    the cost cap, while the expected cost uses the second moment.  Groups 2
    and 3 follow ``computer_profile``.
    """
    c = config.cost_cap
    for cand in CANDIDATES:
        if cand not in samples:
            raise EmptySample(f"missing group-1 sample for candidate {cand}", "samples")
        samples[cand].check(c)
    t1 = tuple(min(1.0, samples[cand].vote_probability(c)) for cand in CANDIDATES)
    profile = StrategyProfile((t1,) + computer_profile.t[1:])
    scale = c / (2.0 * config.benefit)
    cost = (tuple(samples[cand].cost_term(c, config.benefit) for cand in CANDIDATES),) + tuple(
        (a * a * scale, b * b * scale) for a, b in computer_profile.t[1:]
    )
    engine = PivotEngine(config, rule, profile, group_tie=group_tie)
    return _report(config, engine, profile.t, cost, gini_groups)


def point_mass_samples(config: ElectorateConfig, t_a: float, t_b: float) -> dict[str, CutpointSample]:
    """Degenerate samples placing every group-1 cutpoint at t * cost_cap."""
    return {
        "A": CutpointSample(1, "A", (t_a * config.cost_cap,)),
        "B": CutpointSample(1, "B", (t_b * config.cost_cap,)),
    }
