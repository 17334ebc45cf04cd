"""Seeded Monte Carlo simulation of whole elections.

Trials are processed in fixed-size blocks.  Block ``k`` draws from its own
Philox stream keyed by ``SeedSequence([seed, k])``, so results do not depend
on how blocks are spread over threads.  Block statistics are first and
second moments of a per-trial vector; they are merged in block order with
``math.fsum``, which keeps the report bit-identical for any worker count.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import CANDIDATES, GROUPS, ElectorateConfig, GroupTie, Rule, StrategyProfile, ValidationError
from .pivot import _weight_keys, weight_scale

BLOCK = 1 << 15
THREADS_ENV = "COSTLYVOTE_THREADS"


class CostModel(str, enum.Enum):
    CONTINUOUS = "continuous"
    DISCRETE = "discrete"


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class SimOptions:
    trials: int = 100_000
    seed: int = 0
    cost_model: CostModel = CostModel.CONTINUOUS
    group_tie: GroupTie = GroupTie.COIN
    workers: Optional[int] = None

    def __post_init__(self):
        if int(self.trials) != self.trials or self.trials < 1:
            raise ValidationError(f"trials must be a positive integer, got {self.trials!r}", "trials")
        if not (0 <= int(self.seed) < 2**64):
            raise ValidationError("seed must be a 64-bit unsigned integer", "seed")
        object.__setattr__(self, "cost_model", CostModel(self.cost_model))
        object.__setattr__(self, "group_tie", GroupTie.parse(self.group_tie))


@dataclass(frozen=True)
class Estimate:
    value: float
    se: float

    def __iter__(self):
        yield self.value
        yield self.se


@dataclass(frozen=True)
class SimReport:
    """Monte Carlo summary.

    ``turnout[g][k]`` is the share of group-g voters who support candidate k
    and vote (expectation p * t or (1 - p) * t).  ``welfare`` is ex ante
    (P(candidate wins) - expected cost per supporter, in benefit units);
    ``realized_welfare`` averages realized payoffs over the supporters
    actually drawn.  Entries for types with zero expected mass are None.
    """

    win_prob_a: Estimate
    turnout: tuple[tuple[Estimate, Estimate], ...]
    welfare: tuple[tuple[Optional[Estimate], Optional[Estimate]], ...]
    realized_welfare: tuple[tuple[Optional[Estimate], Optional[Estimate]], ...]
    trials: int


@dataclass(frozen=True)
class Election:
    """One simulated election.  Payoffs are in raw units (benefit minus costs)."""

    winner: str
    votes: tuple[tuple[int, int], ...]
    weight_a: float
    supporters: tuple[tuple[int, int], ...]
    payoff_sums: tuple[tuple[float, float], ...]


def _draw_costs(rng: np.random.Generator, shape, config: ElectorateConfig, cost_model: CostModel):
    if cost_model is CostModel.DISCRETE:
        return rng.integers(0, math.floor(config.cost_cap) + 1, size=shape).astype(float)
    return rng.random(shape) * config.cost_cap


class _Batch:
    """Vectorised draws for ``size`` elections sharing one random stream."""

    def __init__(self, config, rule, profile, rng, size, cost_model, group_tie, focal_group=None):
        self.config = config
        self.rule = Rule.parse(rule)
        self.group_tie = group_tie
        self.scale = weight_scale(max(config.group_sizes))
        self.size = size
        self.groups = {}
        for g in GROUPS:
            n = config.size(g) - (1 if g == focal_group else 0)
            is_a = rng.random((size, n)) < config.rate(g)
            cost = _draw_costs(rng, (size, n), config, cost_model)
            ta, tb = profile.t[g - 1]
            cut = np.where(is_a, ta, tb) * config.cost_cap
            voted = cost <= cut
            self.groups[g] = (is_a, cost, voted)
        self.group_coins = rng.random((size, 3)) < 0.5
        self.final_coin = rng.random(size) < 0.5

    def votes(self, g):
        is_a, _, voted = self.groups[g]
        return (voted & is_a).sum(axis=1), (voted & ~is_a).sum(axis=1)

    def keys(self, g, add_a=0, add_b=0):
        a, b = self.votes(g)
        a, b = a + add_a, b + add_b
        n = self.config.size(g)
        keys = _weight_keys(a, b, n, self.rule, self.scale)
        if self.rule is Rule.WTA and self.group_tie is GroupTie.COIN:
            tie = a == b
            keys = np.where(tie, np.where(self.group_coins[:, g - 1], n * self.scale, 0), keys)
        return keys

    def credit_a(self, total_keys):
        """Win credit with the exact-tie case counted as 0.5."""
        half = self.config.total_weight * self.scale // 2
        return np.where(total_keys > half, 1.0, np.where(total_keys == half, 0.5, 0.0))

    def winner_a(self, total_keys):
        half = self.config.total_weight * self.scale // 2
        return (total_keys > half) | ((total_keys == half) & self.final_coin)


def simulate_election(
    config: ElectorateConfig,
    rule,
    profile: StrategyProfile,
    rng: np.random.Generator,
    cost_model=CostModel.CONTINUOUS,
    group_tie=GroupTie.COIN,
) -> Election:
    b = _Batch(config, rule, profile, rng, 1, CostModel(cost_model), GroupTie.parse(group_tie))
    total = sum(b.keys(g) for g in GROUPS)
    a_wins = bool(b.winner_a(total)[0])
    votes, supporters, payoffs = [], [], []
    for g in GROUPS:
        is_a, cost, voted = b.groups[g]
        va, vb = b.votes(g)
        votes.append((int(va[0]), int(vb[0])))
        row_n, row_p = [], []
        for mask, wins in ((is_a[0], a_wins), (~is_a[0], not a_wins)):
            k = int(mask.sum())
            paid = float(cost[0][mask & voted[0]].sum())
            row_n.append(k)
            row_p.append(k * config.benefit * wins - paid)
        supporters.append(tuple(row_n))
        payoffs.append(tuple(row_p))
    return Election(
        "A" if a_wins else "B",
        tuple(votes),
        float(total[0]) / b.scale,
        tuple(supporters),
        tuple(payoffs),
    )


def _block_moments(q: np.ndarray):
    """Sum and cross-product sum of the per-trial rows of one block."""
    return q.sum(axis=0), q.T @ q


def _run_blocks(fn, trials: int, seed: int, workers: int):
    sizes = [BLOCK] * (trials // BLOCK) + ([trials % BLOCK] if trials % BLOCK else [])

    def job(k):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, k])))
        return _block_moments(fn(rng, sizes[k]))

    if workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(job, range(len(sizes))))
    else:
        parts = [job(k) for k in range(len(sizes))]
    s1 = np.array([math.fsum(col) for col in zip(*(p[0] for p in parts))])
    d = len(s1)
    stacked = np.stack([p[1] for p in parts])
    s2 = np.array([[math.fsum(stacked[:, i, j]) for j in range(d)] for i in range(d)])
    mean = s1 / trials
    cov = s2 / trials - np.outer(mean, mean)
    return mean, cov


def _delta(grad: np.ndarray, cov: np.ndarray, trials: int) -> float:
    var = float(grad @ cov @ grad)
    return math.sqrt(max(var, 0.0) / trials)


def estimate(
    config: ElectorateConfig, rule, profile: StrategyProfile, options: Optional[SimOptions] = None
) -> SimReport:
    opts = options or SimOptions()
    workers = opts.workers or default_workers()
    beta = config.benefit
    n = [config.size(g) for g in GROUPS]

    # per-trial columns: win_a, then per type (g, k): supporters X, voters V,
    # cost C / beta and payoff sum Y = win_k * X - C
    def fn(rng, size):
        b = _Batch(config, rule, profile, rng, size, opts.cost_model, opts.group_tie)
        win = b.winner_a(sum(b.keys(g) for g in GROUPS)).astype(float)
        cols = [win]
        for g in GROUPS:
            is_a, cost, voted = b.groups[g]
            for mask, won in ((is_a, win), (~is_a, 1.0 - win)):
                x = mask.sum(axis=1).astype(float)
                c = np.where(mask & voted, cost, 0.0).sum(axis=1) / beta
                cols += [x, (mask & voted).sum(axis=1).astype(float), c, won * x - c]
        return np.column_stack(cols)

    mean, cov = _run_blocks(fn, opts.trials, int(opts.seed), workers)
    T = opts.trials
    d = len(mean)

    def unit(i, c=1.0):
        e = np.zeros(d)
        e[i] = c
        return e

    win = Estimate(float(mean[0]), _delta(unit(0), cov, T))
    turnout, welfare, realized = [], [], []
    for gi, g in enumerate(GROUPS):
        row_t, row_w, row_r = [], [], []
        for k in range(2):
            ix, iv, ic, iy = range(1 + 4 * (2 * gi + k), 5 + 4 * (2 * gi + k))
            row_t.append(Estimate(float(mean[iv] / n[gi]), _delta(unit(iv, 1.0 / n[gi]), cov, T)))
            mx = mean[ix]
            if mx <= 0:
                row_w.append(None)
                row_r.append(None)
                continue
            p_win = mean[0] if k == 0 else 1.0 - mean[0]
            sign = 1.0 if k == 0 else -1.0
            # ex ante: P(win) - E[C] / E[X]
            grad = unit(0, sign) - unit(ic, 1.0 / mx) + unit(ix, mean[ic] / mx**2)
            row_w.append(Estimate(float(p_win - mean[ic] / mx), _delta(grad, cov, T)))
            # realized: E[Y] / E[X]
            r = mean[iy] / mx
            row_r.append(Estimate(float(r), _delta(unit(iy, 1.0 / mx) - unit(ix, r / mx), cov, T)))
        turnout.append(tuple(row_t))
        welfare.append(tuple(row_w))
        realized.append(tuple(row_r))
    return SimReport(win, tuple(turnout), tuple(welfare), tuple(realized), T)


def estimate_pivot(
    config: ElectorateConfig,
    rule,
    profile: StrategyProfile,
    g: int,
    candidate: str,
    options: Optional[SimOptions] = None,
) -> Estimate:
    """Paired estimate of the marginal win credit of one group-g vote for ``candidate``.

    Every trial draws the other voters once and evaluates the election with
    the focal voter voting and abstaining; both branches share the group
    tie coins.
    """
    if g not in GROUPS:
        raise ValidationError(f"group must be 1, 2 or 3, got {g!r}", "group")
    if candidate not in CANDIDATES:
        raise ValidationError(f"unknown candidate {candidate!r}", "candidate")
    opts = options or SimOptions()
    workers = opts.workers or default_workers()
    add = (1, 0) if candidate == "A" else (0, 1)

    def fn(rng, size):
        b = _Batch(config, rule, profile, rng, size, opts.cost_model, opts.group_tie, focal_group=g)
        rest = sum(b.keys(h) for h in GROUPS if h != g)
        voted = b.credit_a(rest + b.keys(g, *add))
        abstained = b.credit_a(rest + b.keys(g))
        diff = voted - abstained if candidate == "A" else abstained - voted
        return diff[:, None]

    mean, cov = _run_blocks(fn, opts.trials, int(opts.seed), workers)
    return Estimate(float(mean[0]), math.sqrt(max(cov[0, 0], 0.0) / opts.trials))


def estimate_win_probability(
    config: ElectorateConfig, rule, profile: StrategyProfile, options: Optional[SimOptions] = None
) -> Estimate:
    """Win-probability-only estimate (cheaper than the full ``estimate`` report)."""
    opts = options or SimOptions()
    workers = opts.workers or default_workers()

    def fn(rng, size):
        b = _Batch(config, rule, profile, rng, size, opts.cost_model, opts.group_tie)
        return b.winner_a(sum(b.keys(h) for h in GROUPS)).astype(float)[:, None]

    mean, cov = _run_blocks(fn, opts.trials, int(opts.seed), workers)
    return Estimate(float(mean[0]), math.sqrt(max(cov[0, 0], 0.0) / opts.trials))
