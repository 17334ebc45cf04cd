"""Exact win and pivot probabilities by enumeration of group tallies.

Each group's tally follows a trinomial law (vote A / vote B / abstain).  A
group's contribution to A's weight is encoded as an integer key
``weight_a * scale`` where ``scale = 2 * lcm(1..max n_g)``; every PR share
``n * a / (a + b)`` and every half split ``n / 2`` is then an exact integer,
so the majority test ``sum(keys) vs N * scale / 2`` involves no rounding.

Joint outcomes are combined by collapsing each group onto its distinct
weight keys and convolving, which is equivalent to the nested sum over all
tally triples but much cheaper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .model import (
    CANDIDATES,
    GROUPS,
    ElectorateConfig,
    GroupTally,
    GroupTie,
    Rule,
    StrategyProfile,
    ValidationError,
)


@dataclass(frozen=True)
class TallyDistribution:
    group_index: int
    votes_a: np.ndarray
    votes_b: np.ndarray
    prob: np.ndarray

    @property
    def entries(self) -> list[tuple[GroupTally, float]]:
        return [
            (GroupTally(int(a), int(b), self.group_index), float(q))
            for a, b, q in zip(self.votes_a, self.votes_b, self.prob)
        ]

    def as_dict(self) -> dict[tuple[int, int], float]:
        return {(int(a), int(b)): float(q) for a, b, q in zip(self.votes_a, self.votes_b, self.prob)}


@dataclass(frozen=True)
class PivotVector:
    pi: tuple[tuple[float, float], tuple[float, float], tuple[float, float]]

    def get(self, g: int, candidate: str) -> float:
        return self.pi[g - 1][CANDIDATES.index(candidate)]

    def flat(self) -> list[float]:
        return [x for row in self.pi for x in row]


def _binomial_pmf(n: int, q: float) -> np.ndarray:
    """Binomial(n, q) probabilities of 0..n, with 0**0 == 1 at the endpoints."""
    r = 1.0 - q
    return np.array([math.comb(n, k) * q**k * r ** (n - k) for k in range(n + 1)])


def tally_distribution(n: int, p: float, t_a: float, t_b: float, group_index: int = 1) -> TallyDistribution:
    """Joint law of (A votes, B votes) among ``n`` independent voters.

    A voter votes A with probability ``p * t_a``, B with ``(1 - p) * t_b``
    and abstains otherwise.  Computed as Binomial(total turnout) times
    Binomial(A share | turnout).
    """
    if n < 0:
        raise ValidationError("group size must be nonnegative", "n")
    qa = p * t_a
    qb = (1.0 - p) * t_b
    q = qa + qb
    share_a = qa / q if q > 0 else 0.0
    a_list, b_list, pr = [], [], []
    total = _binomial_pmf(n, q)
    for k in range(n + 1):
        a = np.arange(k + 1)
        cond = _binomial_pmf(k, share_a)
        a_list.append(a)
        b_list.append(k - a)
        pr.append(total[k] * cond)
    return TallyDistribution(
        group_index,
        np.concatenate(a_list),
        np.concatenate(b_list),
        np.concatenate(pr),
    )


@lru_cache(maxsize=None)
def weight_scale(max_size: int) -> int:
    """Integer scale making every group weight allocation integral."""
    return 2 * math.lcm(*range(1, max_size + 1))


def _weight_keys(votes_a, votes_b, size: int, rule: Rule, scale: int) -> np.ndarray:
    """Scaled weight for A with group ties split (the expected-weight encoding)."""
    a = np.asarray(votes_a, dtype=np.int64)
    b = np.asarray(votes_b, dtype=np.int64)
    full = size * scale
    keys = np.full(a.shape, full // 2, dtype=np.int64)
    cast = a + b
    if rule is Rule.WTA:
        keys[a > b] = full
        keys[a < b] = 0
    else:
        m = cast > 0
        keys[m] = (full * a[m]) // cast[m]
    return keys


def group_weight_law(
    votes_a, votes_b, prob, size: int, rule, scale: int, group_tie=GroupTie.COIN, prune: float = 0.0
):
    """Distribution of a group's scaled A-weight as (sorted keys, probabilities)."""
    rule = Rule.parse(rule)
    a = np.asarray(votes_a, dtype=np.int64)
    b = np.asarray(votes_b, dtype=np.int64)
    prob = np.asarray(prob, dtype=float)
    keys = _weight_keys(a, b, size, rule, scale)
    if rule is Rule.WTA and GroupTie.parse(group_tie) is GroupTie.COIN:
        tie = a == b
        full = size * scale
        keys = np.concatenate([np.where(tie, 0, keys), np.full(int(tie.sum()), full, dtype=np.int64)])
        prob = np.concatenate([np.where(tie, prob / 2, prob), prob[tie] / 2])
    return _collapse(keys, prob, prune)


def _collapse(keys: np.ndarray, prob: np.ndarray, prune: float = 0.0):
    if prune > 0:
        keep = prob >= prune
        keys, prob = keys[keep], prob[keep]
    uniq, inv = np.unique(keys, return_inverse=True)
    return uniq, np.bincount(inv, weights=prob, minlength=len(uniq))


def _convolve(law1, law2):
    k = np.add.outer(law1[0], law2[0]).ravel()
    q = np.multiply.outer(law1[1], law2[1]).ravel()
    return _collapse(k, q)


class _Tail:
    """Sorted law of the other groups' weight with fast threshold queries."""

    def __init__(self, law):
        self.keys, self.prob = law
        # upper[i] = P(key >= keys[i]); summed from the top for accuracy in the tail
        self.upper = np.cumsum(self.prob[::-1])[::-1]

    def credit(self, need: np.ndarray) -> np.ndarray:
        """E[credit] when A needs rest-key > need to win (== need is a tie)."""
        idx = np.searchsorted(self.keys, need, side="right")
        above = np.where(idx < len(self.keys), self.upper[np.minimum(idx, len(self.keys) - 1)], 0.0)
        j = idx - 1
        hit = (j >= 0) & (self.keys[np.maximum(j, 0)] == need)
        tie = np.where(hit, self.prob[np.maximum(j, 0)], 0.0)
        return above + 0.5 * tie


class PivotEngine:
    """Pre-computes per-group weight laws for one (config, rule, profile)."""

    def __init__(
        self,
        config: ElectorateConfig,
        rule,
        profile: StrategyProfile,
        prune: float = 0.0,
        group_tie=GroupTie.COIN,
    ):
        self.config = config
        self.rule = Rule.parse(rule)
        self.group_tie = GroupTie.parse(group_tie)
        self.profile = profile
        self.prune = prune
        self.scale = weight_scale(max(config.group_sizes))
        self.half = config.total_weight * self.scale // 2
        self._full = {}
        self._others = {}
        for g in GROUPS:
            n = config.size(g)
            ta, tb = profile.t[g - 1]
            p = config.rate(g)
            self._full[g] = self._law(tally_distribution(n, p, ta, tb, g), n)
            self._others[g] = tally_distribution(n - 1, p, ta, tb, g)
        self._rest = {}

    def _law(self, dist: TallyDistribution, size: int, add_a: int = 0, add_b: int = 0):
        return group_weight_law(
            dist.votes_a + add_a,
            dist.votes_b + add_b,
            dist.prob,
            size,
            self.rule,
            self.scale,
            self.group_tie,
            self.prune,
        )

    def _rest_tail(self, g: int) -> _Tail:
        if g not in self._rest:
            i, j = (h for h in GROUPS if h != g)
            self._rest[g] = _Tail(_convolve(self._full[i], self._full[j]))
        return self._rest[g]

    def _expected_credit(self, law, tail: _Tail) -> float:
        keys, prob = law
        c = tail.credit(self.half - keys)
        return math.fsum(prob * c)

    def win_probability_a(self) -> float:
        return self._expected_credit(self._full[1], self._rest_tail(1))

    def conditional_credit_a(self, g: int, focal: Optional[str]) -> float:
        """E[A's win credit] given a focal group-g voter votes ``focal`` (None = abstains)."""
        add_a = 1 if focal == "A" else 0
        add_b = 1 if focal == "B" else 0
        if focal not in (None, "A", "B"):
            raise ValidationError(f"unknown candidate {focal!r}", "candidate")
        law = self._law(self._others[g], self.config.size(g), add_a, add_b)
        return self._expected_credit(law, self._rest_tail(g))

    def pivot(self, g: int, candidate: str) -> float:
        abstain = self.conditional_credit_a(g, None)
        vote = self.conditional_credit_a(g, candidate)
        gain = vote - abstain if candidate == "A" else abstain - vote
        # rounding can leave a -1e-17 residue when the vote is irrelevant
        return min(1.0, max(0.0, gain))

    def pivot_vector(self) -> PivotVector:
        rows = []
        for g in GROUPS:
            abstain = self.conditional_credit_a(g, None)
            va = self.conditional_credit_a(g, "A")
            vb = self.conditional_credit_a(g, "B")
            rows.append((min(1.0, max(0.0, va - abstain)), min(1.0, max(0.0, abstain - vb))))
        return PivotVector(tuple(rows))


def win_probability_a(
    config: ElectorateConfig, rule, profile: StrategyProfile, prune: float = 0.0, group_tie=GroupTie.COIN
) -> float:
    """Probability that A wins, exact weight ties counted as one half."""
    return PivotEngine(config, rule, profile, prune, group_tie).win_probability_a()


def pivot_probability(
    config: ElectorateConfig,
    rule,
    profile: StrategyProfile,
    g: int,
    candidate: str,
    prune: float = 0.0,
    group_tie=GroupTie.COIN,
) -> float:
    """Marginal gain in ``candidate``'s win credit from one extra vote by a group-g supporter."""
    if g not in GROUPS:
        raise ValidationError(f"group must be 1, 2 or 3, got {g!r}", "group")
    if candidate not in CANDIDATES:
        raise ValidationError(f"unknown candidate {candidate!r}", "candidate")
    return PivotEngine(config, rule, profile, prune, group_tie).pivot(g, candidate)


def pivot_vector(
    config: ElectorateConfig, rule, profile: StrategyProfile, prune: float = 0.0, group_tie=GroupTie.COIN
) -> PivotVector:
    return PivotEngine(config, rule, profile, prune, group_tie).pivot_vector()
