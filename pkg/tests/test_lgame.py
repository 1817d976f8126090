import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lexmetric.errors import InvalidMass, LawTooLarge, MissingTable, RuleNotInRegulation, Unpunished
from lexmetric.lgame import (
    ENTROPY,
    EventSpace,
    LGame,
    Law,
    Player,
    ProbabilityModel,
    PunishmentModel,
    Regulation,
    Society,
    entropy,
    expected_severity,
    independent_compliance,
    is_titere,
    make_game,
    mean_probability,
    submasks,
)

from helpers import oracle_entropy, oracle_severity, random_distribution, random_game, random_law

TAX = Law(("tax",), (100,))


def two_event(p_breach):
    reg = TAX.regulation(["tax"])
    return ProbabilityModel(reg, {0: 1 - p_breach, 1: p_breach})


# --- law and regulation -----------------------------------------------------


def test_law_rejects_bad_input():
    with pytest.raises(ValueError):
        Law((), ())
    with pytest.raises(ValueError):
        Law(("a", "a"), (1, 1))
    with pytest.raises(ValueError):
        Law(("a",), (-1,))
    with pytest.raises(LawTooLarge):
        Law(tuple(f"r{i}" for i in range(17)), (1,) * 17)
    Law(tuple(f"r{i}" for i in range(16)), (1,) * 16)


def test_regulation_masks_follow_rule_order(communal):
    law = communal.law
    assert law.mask(["tax"]) == 1 and law.mask(["comp"]) == 4
    assert law.mask(["comp", "raffle"]) == law.mask(["raffle", "comp"]) == 6
    assert law.members(6) == ("raffle", "comp")
    assert len(law.regulations()) == 8
    assert Regulation(law, 0).members == ()


def test_event_space_is_powerset():
    law = Law(("a", "b", "c", "d"), (1, 2, 3, 4))
    for mask in range(16):
        space = EventSpace(law.regulation(mask))
        assert len(space) == 2 ** bin(mask).count("1")
        assert 0 in space
        assert all(e & ~mask == 0 for e in space)
    assert submasks(5) == [0, 1, 4, 5]


# --- probability models -------------------------------------------------------


def test_probability_model_validation():
    reg = TAX.regulation(["tax"])
    with pytest.raises(InvalidMass):
        ProbabilityModel(reg, {0: Fraction(8, 10), 1: Fraction(1, 10)})
    with pytest.raises(InvalidMass):
        ProbabilityModel(reg, {0: 2, 1: -1})
    with pytest.raises(InvalidMass):
        ProbabilityModel(TAX.regulation(), {1: 1})
    ProbabilityModel(reg, {0: 0.7, 1: 0.3 + 1e-10})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4))
def test_generated_models_are_distributions(seed, n):
    import random

    rng = random.Random(seed)
    law = random_law(rng, max_rules=n, min_rules=n)
    reg = law.regulation(rng.randrange(1 << n))
    model = ProbabilityModel(reg, random_distribution(rng, reg.event_space().events))
    values = [model.p(e) for e in reg.event_space()]
    assert abs(sum(values) - 1) <= 1e-9
    assert all(0 <= v <= 1 for v in values)
    rates = {r: rng.random() for r in law.rules}
    gen = independent_compliance(reg, rates)
    assert abs(sum(gen.p(e) for e in reg.event_space()) - 1) <= 1e-9


def test_independent_compliance_products():
    law = Law(("a", "b"), (1, 1))
    model = independent_compliance(law.regulation(["a", "b"]), {"a": Fraction(1, 2), "b": Fraction(1, 10)})
    assert model.p(0) == Fraction(9, 20)
    assert model.p(3) == Fraction(1, 20)


# --- mean probability ---------------------------------------------------------


def test_mean_of_identical_tables():
    reg = TAX.regulation(["tax"])
    table = two_event(Fraction(8, 30))
    s = Society("s", players=tuple(Player(str(i), 1, {reg.mask: table}) for i in range(3)))
    m = mean_probability(s, reg)
    assert m.p(0) == Fraction(22, 30) and m.p(1) == Fraction(8, 30)


def test_mean_communal_row_b(communal):
    m = mean_probability(communal.society, communal.law.regulation(["tax"]))
    assert m.p(0) == Fraction(22, 30) and m.p(1) == Fraction(8, 30)


def test_weighted_mean():
    reg = TAX.regulation(["tax"])
    s = Society("s", players=(Player("x", 2, {1: two_event(0)}), Player("y", 1, {1: two_event(1)})))
    m = mean_probability(s, reg)
    assert m.p(0) == Fraction(2, 3) and m.p(1) == Fraction(1, 3)


def test_mean_precedence_and_errors():
    reg = TAX.regulation(["tax"])
    agg = two_event(Fraction(1, 5))
    s = Society("s", players=(Player("x", 1, {1: two_event(1)}),), aggregate={1: agg})
    assert mean_probability(s, reg) is agg
    with pytest.raises(MissingTable):
        mean_probability(Society("s", players=(Player("x", 1, {}),)), reg)
    gen = Society("g", breach_rates={"tax": Fraction(1, 4)})
    assert mean_probability(gen, reg).p(1) == Fraction(1, 4)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_equal_weight_mean_is_arithmetic_mean(seed):
    import random

    rng = random.Random(seed)
    law = random_law(rng, max_rules=3)
    reg = law.regulation(law.full_mask)
    events = reg.event_space().events
    tables = [ProbabilityModel(reg, random_distribution(rng, events)) for _ in range(rng.randint(1, 5))]
    s = Society("s", players=tuple(Player(str(i), 1, {reg.mask: t}) for i, t in enumerate(tables)))
    m = mean_probability(s, reg)
    for e in events:
        assert abs(m.p(e) - sum(t.p(e) for t in tables) / len(tables)) <= 1e-12


# --- severity, entropy, titere -------------------------------------------------


def test_expected_severity_examples(communal):
    pun = communal.punishment
    d = make_game(communal.society, communal.law.regulation(["comp"]), pun)
    b = make_game(communal.society, communal.law.regulation(["tax"]), pun)
    assert expected_severity(d) == Fraction(166, 30)
    assert expected_severity(b) == Fraction(800, 30)
    only_empty = LGame(d.regulation, ProbabilityModel.point(d.regulation), pun)
    assert expected_severity(only_empty) == 0
    with pytest.raises(Unpunished):
        expected_severity(d.with_punishment(None))


def test_entropy_examples(communal):
    reg = Law(("a", "b"), (1, 1)).regulation(3)
    assert entropy(LGame(reg, ProbabilityModel.point(reg, 2))) == 0
    uniform = LGame(reg, ProbabilityModel(reg, {e: Fraction(1, 4) for e in range(4)}))
    assert abs(entropy(uniform) - math.log(4)) <= 1e-12
    d = make_game(communal.society, communal.law.regulation(["comp"]))
    expected = -(29 / 30) * math.log(29 / 30) - (1 / 30) * math.log(1 / 30)
    assert abs(entropy(d) - expected) <= 1e-12
    assert abs(entropy(d) - 0.146145) <= 1e-4


def test_row_d_entropy_quoted_decimal_is_a_slip(communal):
    # the stated expression evaluates to 0.14614..., not the 0.1441 quoted beside it
    d = make_game(communal.society, communal.law.regulation(["comp"]))
    assert abs(entropy(d) - 0.1441) > 1e-3
    assert abs(entropy(d) * math.log2(math.e) - 0.1441) > 1e-3


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_entropy_equals_entropy_mode_severity(seed):
    import random

    rng = random.Random(seed)
    law = random_law(rng)
    game = random_game(rng, law)
    ent = game.with_punishment(PunishmentModel(law, mode=ENTROPY))
    assert entropy(game) == expected_severity(ent)
    probs = [game.probability.p(e) for e in game.events()]
    assert abs(entropy(game) - oracle_entropy(probs)) <= 1e-12


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_severity_matches_oracle_and_zero_condition(seed):
    import random

    rng = random.Random(seed)
    law = random_law(rng)
    game = random_game(rng, law)
    sev = expected_severity(game)
    assert sev >= 0
    assert abs(sev - oracle_severity(game)) <= 1e-9
    all_free = all(game.g(e) == 0 for e, p in game.probability.items() if p > 0)
    assert (sev == 0) == all_free


def test_entropy_mode_punishment_of_empty_event():
    # surprisal of a certain empty event is 0; otherwise entropy mode charges it
    reg = TAX.regulation(["tax"])
    game = LGame(reg, ProbabilityModel.point(reg), PunishmentModel(TAX, mode=ENTROPY))
    assert game.g(0) == 0
    assert game.g(1) == 0


def test_titere(communal):
    s, law = communal.society, communal.law
    assert not is_titere(law, s, law.regulation(law.full_mask), "tax")
    assert not is_titere(law, s, law.regulation(["tax", "raffle"]), "raffle")
    assert is_titere(law, s, law.regulation(["tax", "comp"]), "tax") is False
    with pytest.raises(RuleNotInRegulation):
        is_titere(law, s, law.regulation(["tax"]), "comp")
    law2 = Law(("a", "b"), (5, 7))
    reg = law2.regulation(3)
    zero_b = Society("z", aggregate={3: ProbabilityModel(reg, {0: Fraction(1, 2), 1: Fraction(1, 2)})})
    assert is_titere(law2, zero_b, reg, "b")
    assert not is_titere(law2, zero_b, reg, "a")


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_adding_titere_rule_keeps_severity(seed):
    import random

    rng = random.Random(seed)
    law = random_law(rng, min_rules=2)
    new = rng.choice(law.rules)
    base_mask = rng.randrange(1 << law.size) & ~law.bit(new)
    base = random_game(rng, law, law.regulation(base_mask))
    ext_reg = law.regulation(base_mask | law.bit(new))
    extended = LGame(ext_reg, ProbabilityModel(ext_reg, dict(base.probability.items())), base.punishment)
    assert new in extended.titere_rules()
    assert expected_severity(extended) == expected_severity(base)


def test_punishment_defaults_and_overrides(communal):
    law = communal.law
    pm = PunishmentModel(law)
    assert pm(0) == 0
    assert pm(law.full_mask) == 366
    over = PunishmentModel(law, {law.full_mask: 500})
    assert over(law.full_mask) == 500 and over(3) == 200
    with pytest.raises(ValueError):
        PunishmentModel(law, {0: 1})
    with pytest.raises(ValueError):
        PunishmentModel(law, {1: -1})
