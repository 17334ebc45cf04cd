"""Observed-versus-equilibrium turnout gaps: behavioral bandwagon and Titanic effects."""

from __future__ import annotations

import enum
from collections import defaultdict
from dataclasses import dataclass
from statistics import fmean
from typing import Iterable, Mapping, Optional

from . import reference
from .model import Category, ElectorateConfig, Rule, ValidationError, categorize


class Camp(str, enum.Enum):
    MAJORITY = "majority"
    MINORITY = "minority"


class Effect(str, enum.Enum):
    BANDWAGON = "behavioral_bandwagon"
    TITANIC = "titanic"
    NONE = "none"


class MissingKey(KeyError):
    pass


@dataclass(frozen=True)
class ObservedTurnout:
    config_id: int
    rule: Rule
    t_a: float
    t_b: float

    def __post_init__(self):
        object.__setattr__(self, "rule", Rule.parse(self.rule))
        for name in ("t_a", "t_b"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"must lie in [0, 1], got {v!r}", name)

    def get(self, candidate: str) -> float:
        return self.t_a if candidate == "A" else self.t_b


@dataclass(frozen=True)
class DeviationRecord:
    config_id: int
    rule: Rule
    camp: Camp
    deviation: float
    effect: Effect


def camp_of(config: ElectorateConfig, candidate: str) -> Optional[Camp]:
    """Camp of ``candidate``'s supporters; None when no camp exists (IC).

    In the studied region A is never favoured, so any asymmetry makes A the
    minority and B the majority.
    """
    if candidate not in ("A", "B"):
        raise ValidationError(f"unknown candidate {candidate!r}", "candidate")
    if categorize(config) is Category.IC:
        return None
    return Camp.MINORITY if candidate == "A" else Camp.MAJORITY


def camp_candidate(config: ElectorateConfig, camp: Camp) -> Optional[str]:
    for c in ("A", "B"):
        if camp_of(config, c) is Camp(camp):
            return c
    return None


def classify(camp: Camp, deviation: float) -> Effect:
    if camp is Camp.MAJORITY and deviation > 0:
        return Effect.BANDWAGON
    if camp is Camp.MINORITY and deviation < 0:
        return Effect.TITANIC
    return Effect.NONE


def embedded_theory() -> dict[tuple[int, Rule], tuple[float, float]]:
    return {(i, r): reference.equilibrium_turnout(i, r) for i in reference.CONFIG_IDS for r in Rule}


def embedded_observed() -> list[ObservedTurnout]:
    return [
        ObservedTurnout(i, r, *reference.experiment_turnout(i, r)) for i in reference.CONFIG_IDS for r in Rule
    ]


def deviation_table(
    theory: Mapping[tuple[int, Rule], tuple[float, float]],
    observed: Iterable[ObservedTurnout],
    configs: Optional[Mapping[int, ElectorateConfig]] = None,
) -> list[DeviationRecord]:
    """Observed minus theoretical group-1 turnout for each camp.

    ``theory`` maps (config id, rule) to (t[1, A], t[1, B]).  IC
    configurations have no camps and yield no records.  ``configs`` defaults
    to the embedded configurations.
    """
    records = []
    for obs in sorted(observed, key=lambda o: (o.config_id, o.rule.value != "WTA")):
        key = (obs.config_id, obs.rule)
        if key not in theory:
            raise MissingKey(f"no theoretical turnout for config {obs.config_id} under {obs.rule.value}")
        cfg = configs[obs.config_id] if configs is not None else reference.config(obs.config_id)
        th = dict(zip("AB", theory[key]))
        for camp in (Camp.MAJORITY, Camp.MINORITY):
            cand = camp_candidate(cfg, camp)
            if cand is None:
                continue
            dev = obs.get(cand) - th[cand]
            records.append(DeviationRecord(obs.config_id, obs.rule, camp, dev, classify(camp, dev)))
    return records


def category_summary(
    records: Iterable[DeviationRecord], categories: Optional[Mapping[int, Category]] = None
) -> dict[tuple[Category, Rule, Camp], float]:
    """Mean deviation per (category, rule, camp); IC never appears."""
    groups = defaultdict(list)
    for r in records:
        cat = categories[r.config_id] if categories is not None else reference.category(r.config_id)
        if cat is Category.IC:
            continue
        groups[(cat, r.rule, r.camp)].append(r.deviation)
    return {k: fmean(v) for k, v in sorted(groups.items(), key=lambda kv: tuple(x.value for x in kv[0]))}
