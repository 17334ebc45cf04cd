"""Election primitives: configurations, aggregation rules and winner determination.

Weights are handled as exact rationals (``fractions.Fraction``) so that a
50/50 split of the total weight is recognised exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

GROUPS = (1, 2, 3)
CANDIDATES = ("A", "B")

#: tolerance used when comparing rounded support rates against 0.5
CATEGORY_TOL = 0.005


class ValidationError(ValueError):
    """Raised when an input violates a domain invariant.

    ``field`` carries a dotted path to the offending value when known.
    """

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class Rule(str, enum.Enum):
    WTA = "WTA"
    PR = "PR"

    @classmethod
    def parse(cls, value) -> "Rule":
        if isinstance(value, Rule):
            return value
        try:
            return cls(str(value).upper())
        except ValueError:
            raise ValidationError(f"unknown rule {value!r}", "rule") from None


class GroupTie(str, enum.Enum):
    """How a WTA group with equal vote counts (including 0-0) awards its weight.

    COIN hands the whole weight to one candidate by a fair coin; SPLIT gives
    each candidate half.  Under PR the only group tie is 0-0, which always
    splits.
    """

    COIN = "coin"
    SPLIT = "split"

    @classmethod
    def parse(cls, value) -> "GroupTie":
        if isinstance(value, GroupTie):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(f"unknown group-tie convention {value!r}", "group_tie") from None


class Category(str, enum.Enum):
    IC = "IC"
    GLOBAL = "Global"
    LOCAL = "Local"
    BOTH = "Both"


@dataclass(frozen=True)
class ElectorateConfig:
    """One voting configuration: three groups with sizes and support rates for A."""

    group_sizes: tuple[int, int, int]
    support_rates: tuple[float, float, float]
    benefit: float = 1000.0
    cost_cap: float = 200.0
    label: Optional[str] = None

    def __post_init__(self):
        sizes = tuple(self.group_sizes)
        rates = tuple(float(p) for p in self.support_rates)
        if len(sizes) != 3:
            raise ValidationError("expected three group sizes", "group_sizes")
        if len(rates) != 3:
            raise ValidationError("expected three support rates", "support_rates")
        for i, n in enumerate(sizes):
            if isinstance(n, bool) or int(n) != n or n < 1:
                raise ValidationError(f"must be a positive integer, got {n!r}", f"group_sizes[{i}]")
        for i, p in enumerate(rates):
            if not (0.0 <= p <= 1.0):
                raise ValidationError(f"must lie in [0, 1], got {p!r}", f"support_rates[{i}]")
        if not (math.isfinite(self.benefit) and self.benefit > 0):
            raise ValidationError(f"must be positive, got {self.benefit!r}", "benefit")
        if not (math.isfinite(self.cost_cap) and self.cost_cap > 0):
            raise ValidationError(f"must be positive, got {self.cost_cap!r}", "cost_cap")
        object.__setattr__(self, "group_sizes", tuple(int(n) for n in sizes))
        object.__setattr__(self, "support_rates", rates)
        object.__setattr__(self, "benefit", float(self.benefit))
        object.__setattr__(self, "cost_cap", float(self.cost_cap))

    @property
    def total_weight(self) -> int:
        return sum(self.group_sizes)

    def size(self, g: int) -> int:
        return self.group_sizes[g - 1]

    def rate(self, g: int) -> float:
        return self.support_rates[g - 1]

    def swapped(self) -> "ElectorateConfig":
        """Mirror image with the candidate labels exchanged."""
        return ElectorateConfig(
            self.group_sizes,
            tuple(1.0 - p for p in self.support_rates),
            self.benefit,
            self.cost_cap,
            self.label,
        )

    def to_dict(self) -> dict:
        d = {
            "group_sizes": list(self.group_sizes),
            "support_rates": list(self.support_rates),
            "benefit": self.benefit,
            "cost_cap": self.cost_cap,
        }
        if self.label is not None:
            d["label"] = self.label
        return d


@dataclass(frozen=True)
class StrategyProfile:
    """Normalised cutpoints t[g, I] in [0, 1]; equal to each type's vote probability.

    ``t`` is stored as ``((t1A, t1B), (t2A, t2B), (t3A, t3B))``.
    """

    t: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        rows = tuple(tuple(float(x) for x in row) for row in self.t)
        if len(rows) != 3 or any(len(r) != 2 for r in rows):
            raise ValidationError("expected a 3x2 array of cutpoints", "profile")
        for g, row in enumerate(rows, start=1):
            for I, x in zip(CANDIDATES, row):
                if not (0.0 <= x <= 1.0) or math.isnan(x):
                    raise ValidationError(f"must lie in [0, 1], got {x!r}", f"profile.t[{g},{I}]")
        object.__setattr__(self, "t", rows)

    @classmethod
    def uniform(cls, value: float) -> "StrategyProfile":
        return cls(((value, value),) * 3)

    @classmethod
    def from_flat(cls, values: Sequence[float]) -> "StrategyProfile":
        v = [float(x) for x in values]
        if len(v) != 6:
            raise ValidationError("expected six cutpoints", "profile")
        return cls(((v[0], v[1]), (v[2], v[3]), (v[4], v[5])))

    def flat(self) -> list[float]:
        return [x for row in self.t for x in row]

    def get(self, g: int, candidate: str) -> float:
        return self.t[g - 1][CANDIDATES.index(candidate)]

    def replace(self, g: int, candidate: str, value: float) -> "StrategyProfile":
        rows = [list(r) for r in self.t]
        rows[g - 1][CANDIDATES.index(candidate)] = value
        return StrategyProfile(tuple(tuple(r) for r in rows))

    def swapped(self) -> "StrategyProfile":
        return StrategyProfile(tuple((b, a) for a, b in self.t))


@dataclass(frozen=True)
class GroupTally:
    votes_a: int
    votes_b: int
    group_index: int = 1

    def __post_init__(self):
        if self.votes_a < 0 or self.votes_b < 0:
            raise ValidationError("vote counts must be nonnegative", "tally")


@dataclass(frozen=True)
class WeightAllocation:
    weight_a: Fraction
    weight_b: Fraction
    group_index: int = 1


def overall_support_rate(config: ElectorateConfig) -> float:
    """Population-weighted share of A-supporters across the electorate."""
    n, p = config.group_sizes, config.support_rates
    return sum(ni * pi for ni, pi in zip(n, p)) / config.total_weight


def categorize(config: ElectorateConfig, tol: float = CATEGORY_TOL) -> Category:
    p1 = config.support_rates[0]
    pbar = overall_support_rate(config)
    if p1 > 0.5 + tol or pbar > 0.5 + tol:
        raise ValidationError(
            f"outside studied region (p1={p1:.4f}, pbar={pbar:.4f}); A must be the weak minority",
            "support_rates",
        )
    local_even = abs(p1 - 0.5) <= tol
    global_even = abs(pbar - 0.5) <= tol
    if local_even and global_even:
        return Category.IC
    if local_even:
        return Category.GLOBAL
    if global_even:
        return Category.LOCAL
    return Category.BOTH


def allocate_weights(tally: GroupTally, rule: Rule, group_size: int) -> WeightAllocation:
    a, b = tally.votes_a, tally.votes_b
    if a + b > group_size:
        raise ValidationError(f"{a + b} votes exceed group size {group_size}", "tally")
    n = Fraction(group_size)
    rule = Rule.parse(rule)
    if a + b == 0 or (rule is Rule.WTA and a == b):
        wa = n / 2
    elif rule is Rule.WTA:
        wa = n if a > b else Fraction(0)
    else:
        wa = n * a / (a + b)
    return WeightAllocation(wa, n - wa, tally.group_index)


def weight_lottery(
    tally: GroupTally, rule: Rule, group_size: int, group_tie: GroupTie = GroupTie.COIN
) -> list[tuple[WeightAllocation, Fraction]]:
    """Possible allocations of one group's weight with their probabilities.

    Deterministic unless a WTA group is tied and ``group_tie`` is COIN.
    """
    rule = Rule.parse(rule)
    split = allocate_weights(tally, rule, group_size)
    tied = rule is Rule.WTA and tally.votes_a == tally.votes_b
    if not tied or GroupTie.parse(group_tie) is GroupTie.SPLIT:
        return [(split, Fraction(1))]
    n = Fraction(group_size)
    i = tally.group_index
    return [
        (WeightAllocation(n, Fraction(0), i), Fraction(1, 2)),
        (WeightAllocation(Fraction(0), n, i), Fraction(1, 2)),
    ]


def win_credit_a(total_weight_a, total_weight: int) -> float:
    """1 for a strict majority of the weight, 0.5 for an exact split, else 0."""
    w = Fraction(total_weight_a)
    half = Fraction(total_weight, 2)
    if w > half:
        return 1.0
    if w == half:
        return 0.5
    return 0.0
