import random

import pytest

from costlyvote import reference
from costlyvote.model import ElectorateConfig, Rule, StrategyProfile, ValidationError
from costlyvote.montecarlo import SimOptions, estimate
from costlyvote.welfare import (
    CutpointSample,
    EmptySample,
    NegativeWelfare,
    ex_ante_gini,
    expected_welfare,
    gini,
    point_mass_samples,
    type_masses,
    welfare_from_sample,
)


def test_gini_two_point():
    # mean 0.45, E|x - y| = 2 * 0.25 * 0.3 = 0.15, G = 0.15 / (2 * 0.45)
    assert gini([(0.6, 1), (0.3, 1)]) == pytest.approx(1 / 6, abs=1e-15)


def test_gini_equal_values_is_zero():
    assert gini([(0.4, 3), (0.4, 1), (0.4, 2)]) == 0.0


def test_gini_scale_invariance():
    pairs = [(0.2, 1.5), (0.7, 2.0), (0.55, 0.5)]
    g = gini(pairs)
    assert gini([(3 * w, m) for w, m in pairs]) == pytest.approx(g, abs=1e-14)
    assert gini([(w, 4 * m) for w, m in pairs]) == pytest.approx(g, abs=1e-14)


def test_gini_all_mass_on_one_value():
    # masses 1 and 1 at welfare 0 and 1: G = 1/2
    assert gini([(0.0, 1), (1.0, 1)]) == pytest.approx(0.5)


def test_gini_rejects_negative_welfare():
    with pytest.raises(NegativeWelfare):
        gini([(-0.1, 1), (0.5, 1)])


def test_gini_rejects_bad_masses():
    with pytest.raises(ValueError):
        gini([(0.1, 0), (0.5, 1)])
    with pytest.raises(ValueError):
        gini([])


def test_type_masses():
    cfg = ElectorateConfig((5, 3, 1), (0.4, 1.0, 0.0))
    assert type_masses(cfg) == ((2.0, 3.0), (3.0, 0.0), (0.0, 1.0))


def test_sample_cost_uses_second_moment():
    cfg = reference.config(5)
    c, b = cfg.cost_cap, cfg.benefit
    spread = CutpointSample(1, "A", (0.0, c))
    point = CutpointSample(1, "A", (c / 2,))
    assert spread.vote_probability(c) == point.vote_probability(c) == 0.5
    assert spread.cost_term(c, b) == pytest.approx(c / (4 * b))
    assert point.cost_term(c, b) == pytest.approx(c / (8 * b))


def test_empty_sample():
    with pytest.raises(EmptySample):
        CutpointSample(1, "A", ())
    cfg = reference.config(5)
    with pytest.raises(EmptySample):
        welfare_from_sample(cfg, Rule.WTA, {"A": CutpointSample(1, "A", (10.0,))}, StrategyProfile.uniform(0.5))


def test_sample_outside_cost_range():
    cfg = reference.config(5)
    bad = {"A": CutpointSample(1, "A", (250.0,)), "B": CutpointSample(1, "B", (10.0,))}
    with pytest.raises(ValidationError):
        welfare_from_sample(cfg, Rule.WTA, bad, StrategyProfile.uniform(0.5))


@pytest.mark.parametrize("cid", [1, 5, 9, 15])
@pytest.mark.parametrize("rule", list(Rule))
def test_point_mass_equals_profile(cid, rule):
    cfg = reference.config(cid)
    prof = StrategyProfile(((0.31, 0.77), (0.2, 0.45), (0.9, 0.05)))
    direct = expected_welfare(cfg, rule, prof)
    sampled = welfare_from_sample(cfg, rule, point_mass_samples(cfg, 0.31, 0.77), prof)
    for row_d, row_s in zip(direct.welfare + direct.interim, sampled.welfare + sampled.interim):
        assert row_s == pytest.approx(row_d, abs=1e-10)
    assert sampled.gini == pytest.approx(direct.gini, abs=1e-10)


def _random_instance(rng):
    cfg = ElectorateConfig(
        tuple(rng.randint(1, 6) for _ in range(3)),
        tuple(round(rng.uniform(0.05, 0.95), 3) for _ in range(3)),
        benefit=rng.choice([500.0, 1000.0]),
        cost_cap=rng.choice([100.0, 200.0, 400.0]),
    )
    prof = StrategyProfile(tuple((rng.random(), rng.random()) for _ in range(3)))
    return cfg, rng.choice(list(Rule)), prof


def test_welfare_bounds():
    rng = random.Random(12)
    for _ in range(40):
        cfg, rule, prof = _random_instance(rng)
        rep = expected_welfare(cfg, rule, prof)
        cap = cfg.cost_cap / (2 * cfg.benefit)
        for row in rep.welfare + rep.interim:
            for w in row:
                assert -cap - 1e-12 <= w <= 1.0 + 1e-12
        for (wa, wb), (ca, cb) in zip(rep.welfare, rep.cost):
            # ex-ante welfare of A and B supporters sums to 1 minus their costs
            assert wa + wb == pytest.approx(1.0 - ca - cb, abs=1e-12)


def test_zero_turnout_costs_nothing():
    cfg = reference.config(3)
    rep = expected_welfare(cfg, Rule.WTA, StrategyProfile.uniform(0.0))
    assert rep.cost == ((0.0, 0.0),) * 3
    assert rep.win_prob_a == pytest.approx(0.5, abs=1e-15)


def test_majority_minority_labels():
    cfg = reference.config(5)
    rep = expected_welfare(cfg, Rule.PR, StrategyProfile.uniform(0.5))
    assert rep.minority == rep.get(1, "A")
    assert rep.majority == rep.get(1, "B")
    ic = expected_welfare(reference.config(1), Rule.PR, StrategyProfile.uniform(0.5))
    assert ic.majority is None and ic.minority is None


def test_gini_groups_option():
    cfg = reference.config(9)
    rep = expected_welfare(cfg, Rule.WTA, StrategyProfile.uniform(0.4))
    six = ex_ante_gini(cfg, rep, groups=(1, 2, 3))
    assert rep.gini == ex_ante_gini(cfg, rep)
    assert expected_welfare(cfg, Rule.WTA, StrategyProfile.uniform(0.4), gini_groups=(1, 2, 3)).gini == six


def test_welfare_agrees_with_simulation():
    rng = random.Random(77)
    for k in range(10):
        cfg, rule, prof = _random_instance(rng)
        exact = expected_welfare(cfg, rule, prof)
        rep = estimate(cfg, rule, prof, SimOptions(trials=60_000, seed=k))
        for g in range(3):
            for i in range(2):
                est = rep.welfare[g][i]
                if est is None:
                    continue
                assert abs(est.value - exact.welfare[g][i]) <= 4.5 * est.se + 1e-12
