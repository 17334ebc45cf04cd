import pytest

from costlyvote import reference
from costlyvote.behavioral import (
    Camp,
    Effect,
    MissingKey,
    ObservedTurnout,
    camp_candidate,
    camp_of,
    category_summary,
    classify,
    deviation_table,
    embedded_observed,
    embedded_theory,
)
from costlyvote.model import Category, Rule, ValidationError

PRINTED_TOL = 0.0015


@pytest.fixture(scope="module")
def records():
    return deviation_table(embedded_theory(), embedded_observed())


def test_camps():
    assert camp_of(reference.config(1), "A") is None
    assert camp_of(reference.config(5), "A") is Camp.MINORITY
    assert camp_of(reference.config(5), "B") is Camp.MAJORITY
    assert camp_candidate(reference.config(9), Camp.MAJORITY) == "B"
    assert camp_candidate(reference.config(2), Camp.MINORITY) is None
    with pytest.raises(ValidationError):
        camp_of(reference.config(5), "C")


@pytest.mark.parametrize(
    "camp, dev, effect",
    [
        (Camp.MAJORITY, 0.1, Effect.BANDWAGON),
        (Camp.MAJORITY, -0.1, Effect.NONE),
        (Camp.MINORITY, -0.1, Effect.TITANIC),
        (Camp.MINORITY, 0.1, Effect.NONE),
        (Camp.MINORITY, 0.0, Effect.NONE),
    ],
)
def test_classify(camp, dev, effect):
    assert classify(camp, dev) is effect


def test_every_printed_deviation(records):
    assert len(records) == 2 * 2 * len(reference.deviation_ids())
    for r in records:
        printed = reference.printed_deviation(r.config_id, r.rule, r.camp.value)
        assert r.deviation == pytest.approx(printed, abs=PRINTED_TOL), (r.config_id, r.rule, r.camp)


@pytest.mark.parametrize(
    "cid, rule, camp, value, effect",
    [
        (5, Rule.PR, Camp.MINORITY, -0.650, Effect.TITANIC),
        (9, Rule.WTA, Camp.MAJORITY, 0.149, Effect.BANDWAGON),
        (17, Rule.PR, Camp.MAJORITY, -0.022, Effect.NONE),
    ],
)
def test_spot_values(records, cid, rule, camp, value, effect):
    (rec,) = [r for r in records if (r.config_id, r.rule, r.camp) == (cid, rule, camp)]
    assert rec.deviation == pytest.approx(value, abs=PRINTED_TOL)
    assert rec.effect is effect


def test_ic_configs_have_no_records(records):
    ids = {r.config_id for r in records}
    assert not ids & set(reference.ids_in(Category.IC))


def test_category_sizes():
    assert len(reference.ids_in(Category.GLOBAL)) == 4
    assert len(reference.ids_in(Category.LOCAL)) == 3
    assert len(reference.ids_in(Category.BOTH)) == 6


def test_minority_effect_is_more_common(records):
    titanic = sum(r.effect is Effect.TITANIC for r in records)
    bandwagon = sum(r.effect is Effect.BANDWAGON for r in records)
    assert titanic > bandwagon
    for rule in Rule:
        mins = [r for r in records if r.rule is rule and r.camp is Camp.MINORITY]
        assert sum(r.deviation < 0 for r in mins) >= 11


def test_category_summary(records):
    summary = category_summary(records)
    assert len(summary) == 3 * 2 * 2
    assert all(cat is not Category.IC for cat, _, _ in summary)
    local = [r.deviation for r in records if r.config_id in (5, 13, 15) and r.rule is Rule.PR and r.camp is Camp.MINORITY]
    assert summary[(Category.LOCAL, Rule.PR, Camp.MINORITY)] == pytest.approx(sum(local) / 3)
    # the PR titanic effect is strongest where the minority is local
    assert summary[(Category.LOCAL, Rule.PR, Camp.MINORITY)] < summary[(Category.GLOBAL, Rule.PR, Camp.MINORITY)]


def test_custom_observed_input():
    theory = {(5, Rule.WTA): (0.5, 0.4)}
    obs = [ObservedTurnout(5, Rule.WTA, 0.3, 0.6)]
    recs = deviation_table(theory, obs)
    assert [(r.camp, round(r.deviation, 12)) for r in recs] == [(Camp.MAJORITY, 0.2), (Camp.MINORITY, -0.2)]


def test_missing_theory_key():
    with pytest.raises(MissingKey):
        deviation_table({}, [ObservedTurnout(5, Rule.WTA, 0.3, 0.6)])


def test_observed_turnout_validated():
    with pytest.raises(ValidationError):
        ObservedTurnout(5, Rule.WTA, 1.3, 0.6)
