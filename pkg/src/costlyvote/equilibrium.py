"""Quasi-symmetric cutpoint equilibria via damped best-response iteration.

A type (g, I) votes iff its cost is at most ``benefit * pi[g, I]``, so in
normalised form the equilibrium is a fixed point of

    t[g, I] = clamp(benefit * pi[g, I](t) / cost_cap, 0, 1).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .model import ElectorateConfig, GroupTie, Rule, StrategyProfile, ValidationError
from .pivot import PivotEngine


MIN_DAMPING = 1e-3


class InvalidOptions(ValidationError):
    pass


class NonConvergence(RuntimeError):
    def __init__(self, result: "EquilibriumResult"):
        super().__init__(
            f"no fixed point within {result.iterations} iterations (residual {result.residual:.3g})"
        )
        self.result = result


@dataclass(frozen=True)
class SolverOptions:
    damping: float = 0.5
    tolerance: float = 1e-7
    max_iterations: int = 10_000
    start: Optional[StrategyProfile] = None
    group_tie: GroupTie = GroupTie.COIN
    prune: float = 0.0
    raise_on_failure: bool = False

    def __post_init__(self):
        if not (0.0 < self.damping <= 1.0):
            raise InvalidOptions(f"damping must lie in (0, 1], got {self.damping!r}", "damping")
        if not (self.tolerance > 0 and math.isfinite(self.tolerance)):
            raise InvalidOptions(f"tolerance must be positive, got {self.tolerance!r}", "tolerance")
        if int(self.max_iterations) != self.max_iterations or self.max_iterations < 1:
            raise InvalidOptions(
                f"max_iterations must be a positive integer, got {self.max_iterations!r}", "max_iterations"
            )
        object.__setattr__(self, "group_tie", GroupTie.parse(self.group_tie))


@dataclass(frozen=True)
class EquilibriumResult:
    profile: StrategyProfile
    residual: float
    iterations: int
    converged: bool
    corner_flags: tuple[tuple[bool, bool], tuple[bool, bool], tuple[bool, bool]]
    #: benefit * pi / cost_cap before clamping, at ``profile``
    response: tuple[float, ...] = field(default=(), compare=False)

    def corner(self, g: int, candidate: str) -> bool:
        return self.corner_flags[g - 1]["AB".index(candidate)]


def _raw_response(config: ElectorateConfig, rule: Rule, t: Sequence[float], opts: SolverOptions) -> list[float]:
    engine = PivotEngine(config, rule, StrategyProfile.from_flat(t), opts.prune, opts.group_tie)
    ratio = config.benefit / config.cost_cap
    return [ratio * x for x in engine.pivot_vector().flat()]


def _clamp(x: float) -> float:
    return min(1.0, max(0.0, x))


def best_response(
    config: ElectorateConfig, rule, profile: StrategyProfile, group_tie=GroupTie.COIN
) -> StrategyProfile:
    """Normalised best-response cutpoints to ``profile``."""
    opts = SolverOptions(group_tie=group_tie)
    raw = _raw_response(config, Rule.parse(rule), profile.flat(), opts)
    return StrategyProfile.from_flat([_clamp(x) for x in raw])


def _result(t: list[float], raw: list[float], iterations: int, converged: bool) -> EquilibriumResult:
    residual = max(abs(a - _clamp(r)) for a, r in zip(t, raw))
    flags = [(x == 0.0 and r < 0.0) or (x == 1.0 and r > 1.0) for x, r in zip(t, raw)]
    return EquilibriumResult(
        StrategyProfile.from_flat(t),
        residual,
        iterations,
        converged,
        ((flags[0], flags[1]), (flags[2], flags[3]), (flags[4], flags[5])),
        tuple(raw),
    )


def solve(config: ElectorateConfig, rule, options: Optional[SolverOptions] = None) -> EquilibriumResult:
    """Damped fixed-point iteration from ``options.start`` (default: every cutpoint 0.5).

    The damping factor is halved whenever the best-response gap fails to
    shrink.  Benefit and cost cap are taken from ``config``.
    """
    opts = options or SolverOptions()
    rule = Rule.parse(rule)
    t = (opts.start or StrategyProfile.uniform(0.5)).flat()
    lam = opts.damping
    best = None
    prev_gap = math.inf
    for it in range(opts.max_iterations + 1):
        raw = _raw_response(config, rule, t, opts)
        br = [_clamp(r) for r in raw]
        gap = max(abs(a - b) for a, b in zip(t, br))
        if gap >= prev_gap:
            # overshooting: shrink the step
            lam = max(lam / 2, MIN_DAMPING)
        prev_gap = gap
        if best is None or gap < best[0]:
            best = (gap, list(t), raw, it)
        if gap <= opts.tolerance:
            # damping only approaches a bound geometrically; put corner components on it
            snapped = [_clamp(r) if not 0.0 <= r <= 1.0 else a for a, r in zip(t, raw)]
            if snapped != t:
                raw_s = _raw_response(config, rule, snapped, opts)
                if max(abs(a - _clamp(r)) for a, r in zip(snapped, raw_s)) <= opts.tolerance:
                    return _result(snapped, raw_s, it, True)
            return _result(t, raw, it, True)
        if it == opts.max_iterations:
            break
        t = [(1.0 - lam) * a + lam * b for a, b in zip(t, br)]
    _, t, raw, _ = best
    result = _result(t, raw, opts.max_iterations, False)
    if opts.raise_on_failure:
        raise NonConvergence(result)
    return result


def symmetric_starts(values: Iterable[float]) -> list[StrategyProfile]:
    """Every assignment of a grid value to each group, with A and B started equal."""
    vals = list(values)
    return [StrategyProfile(tuple((v, v) for v in combo)) for combo in itertools.product(vals, repeat=3)]


def find_all_fixed_points(
    config: ElectorateConfig,
    rule,
    grid: Iterable,
    options: Optional[SolverOptions] = None,
    distinct: float = 1e-3,
    workers: int = 1,
) -> list[EquilibriumResult]:
    """Multi-start search; ``grid`` holds start profiles or scalar values (see ``symmetric_starts``)."""
    opts = options or SolverOptions()
    grid = list(grid)
    if grid and not isinstance(grid[0], StrategyProfile):
        grid = symmetric_starts(grid)
    runs = [SolverOptions(**{**opts.__dict__, "start": s, "raise_on_failure": False}) for s in grid]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda o: solve(config, rule, o), runs))
    else:
        results = [solve(config, rule, o) for o in runs]
    found: list[EquilibriumResult] = []
    for r in results:
        if not r.converged:
            continue
        if all(max(abs(a - b) for a, b in zip(r.profile.flat(), f.profile.flat())) > distinct for f in found):
            found.append(r)
    found.sort(key=lambda r: r.profile.t[0][0])
    return found
