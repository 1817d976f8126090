import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lexmetric.divergence import (
    DivergenceReport,
    ZERO,
    check_coherence,
    divergence_report,
    kl_social_divergence,
    lgame_premetric,
    symmetrize_max,
    symmetrize_plus,
)
from lexmetric.errors import (
    AbsoluteContinuityViolated,
    LawMismatch,
    NotAnExtension,
    RegulationMismatch,
    Unpunished,
)
from lexmetric.lgame import Law, LGame, ProbabilityModel, PunishmentModel

from helpers import oracle_kl, oracle_premetric, random_distribution, random_game, random_law


def games(cfg, *names):
    g = cfg.graph(overrides=False)
    return [g.game(cfg.names[n]) for n in names]


# --- KL -------------------------------------------------------------------------


def test_kl_examples():
    law = Law(("a",), (1,))
    reg = law.regulation(1)
    p = ProbabilityModel(reg, {0: Fraction(1, 2), 1: Fraction(1, 2)})
    q = ProbabilityModel(reg, {0: Fraction(1, 4), 1: Fraction(3, 4)})
    assert kl_social_divergence(p, p) == 0
    expected = 0.5 * math.log(2) + 0.5 * math.log(2 / 3)
    assert abs(kl_social_divergence(p, q) - expected) <= 1e-12
    assert abs(kl_social_divergence(p, q) - 0.1438) <= 1e-4
    with pytest.raises(AbsoluteContinuityViolated):
        kl_social_divergence(ProbabilityModel.point(reg, 0), ProbabilityModel.point(reg, 1))
    # zero-mass events of p contribute nothing whatever q does
    assert kl_social_divergence(ProbabilityModel.point(reg, 0), p) == pytest.approx(math.log(2))


def test_kl_regulation_mismatch():
    law = Law(("a", "b"), (1, 1))
    with pytest.raises(RegulationMismatch):
        kl_social_divergence(ProbabilityModel.point(law.regulation(1)), ProbabilityModel.point(law.regulation(2)))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_kl_gibbs_and_oracle(seed):
    rng = random.Random(seed)
    law = random_law(rng, max_rules=3)
    reg = law.regulation(rng.randrange(1 << law.size))
    events = reg.event_space().events
    p = ProbabilityModel(reg, random_distribution(rng, events))
    q = ProbabilityModel(reg, random_distribution(rng, events, zero_prob=0.0))
    value = kl_social_divergence(p, q)
    assert value >= 0
    assert abs(value - oracle_kl([p.p(e) for e in events], [q.p(e) for e in events])) <= 1e-9
    assert kl_social_divergence(p, p) == 0


# --- premetric --------------------------------------------------------------------


def test_premetric_examples(communal):
    A, D, G = games(communal, "A", "D", "G")
    assert lgame_premetric(D, D) == 0
    assert lgame_premetric(D, A) == Fraction(166, 30)
    assert lgame_premetric(A, D) == 0
    assert lgame_premetric(G, D) == Fraction(100, 90)
    # the zero extension charges the whole punishment of {raffle, comp}
    assert lgame_premetric(G, D, ZERO) == Fraction(266, 90)


def test_symmetrizations(communal):
    A, D = games(communal, "A", "D")
    assert symmetrize_plus(D, A) == symmetrize_plus(A, D) == Fraction(166, 30)
    assert symmetrize_max(D, A) == symmetrize_max(A, D) == Fraction(166, 30)
    assert symmetrize_plus(D, D) == symmetrize_max(D, D) == 0


def test_severity_identity_every_regulation(communal):
    g = communal.graph(overrides=False)
    empty = g.game(0)
    from lexmetric.lgame import expected_severity

    for reg in g.nodes:
        game = g.game(reg)
        assert lgame_premetric(game, empty) == expected_severity(game)
        assert lgame_premetric(empty, game) == 0


def test_premetric_errors(communal):
    A, D = games(communal, "A", "D")
    with pytest.raises(Unpunished):
        lgame_premetric(D.with_punishment(None), A)
    other = Law(("x", "y", "z"), (1, 1, 1))
    foreign = LGame(other.regulation(1), ProbabilityModel.point(other.regulation(1)), PunishmentModel(other))
    with pytest.raises(LawMismatch):
        lgame_premetric(foreign, A)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["restrict", "zero"]))
def test_premetric_matches_oracle(seed, extension):
    rng = random.Random(seed)
    law = random_law(rng)
    a, b = random_game(rng, law), random_game(rng, law)
    assert abs(lgame_premetric(a, b, extension) - oracle_premetric(a, b, extension)) <= 1e-9
    assert lgame_premetric(a, a, extension) == 0
    assert symmetrize_plus(a, b, extension) == symmetrize_plus(b, a, extension)
    assert symmetrize_max(a, b, extension) == symmetrize_max(b, a, extension)
    assert symmetrize_max(a, b, extension) <= symmetrize_plus(a, b, extension)


def test_triangle_inequality_can_fail(communal):
    # moving A -> E -> B costs less than A -> B directly
    A, B, E = games(communal, "A", "B", "E")
    direct = lgame_premetric(B, A)
    via = lgame_premetric(B, E) + lgame_premetric(E, A)
    assert direct == Fraction(80, 3) and via == Fraction(110, 9)
    assert direct > via


def test_report_carrier(communal):
    A, D = games(communal, "A", "D")
    rep = divergence_report(D, A, "plus", names=("D", "A"))
    assert isinstance(rep, DivergenceReport)
    assert rep.value == Fraction(166, 30) and rep.variant == "plus"
    with pytest.raises(ValueError):
        DivergenceReport(-1, ("a", "b"), "directed")


# --- coherence --------------------------------------------------------------------


def test_coherence_examples(communal):
    A, B, D = games(communal, "A", "B", "D")
    v = check_coherence(A, D, "comp", factors=(1, Fraction(200, 166)), shifts=(0,))
    assert v.severity_values == (Fraction(166, 30), Fraction(200, 30))
    assert v.coherent
    v = check_coherence(A, B, "tax", factors=(1,), shifts=(0, Fraction(1, 22)))
    # shifting 1/22 of the 22/30 rule-free mass adds exactly 1/30 to P({tax})
    assert v.breach_values == (Fraction(800, 30), Fraction(900, 30))
    with pytest.raises(NotAnExtension):
        check_coherence(A, B, "comp")
    with pytest.raises(NotAnExtension):
        check_coherence(B, B, "tax")


def test_zero_breach_rule_contributes_nothing():
    law = Law(("a", "b"), (3, 50))
    base_reg, ext_reg = law.regulation(1), law.regulation(3)
    pm = PunishmentModel(law)
    base = LGame(base_reg, ProbabilityModel(base_reg, {0: Fraction(1, 2), 1: Fraction(1, 2)}), pm)
    ext = LGame(ext_reg, ProbabilityModel(ext_reg, {0: Fraction(1, 2), 1: Fraction(1, 2)}), pm)
    v = check_coherence(base, ext, "b")
    assert set(v.severity_values) == {0}


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["restrict", "zero"]))
def test_coherence_random(seed, extension):
    rng = random.Random(seed)
    law = random_law(rng, min_rules=1)
    rule = rng.choice(law.rules)
    base_mask = rng.randrange(1 << law.size) & ~law.bit(rule)
    base = random_game(rng, law, law.regulation(base_mask))
    ext = random_game(rng, law, law.regulation(base_mask | law.bit(rule)))
    assert check_coherence(base, ext, rule, extension=extension).coherent
