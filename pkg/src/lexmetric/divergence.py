"""Distance-like functionals between l-games and between societies."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    AbsoluteContinuityViolated,
    LawMismatch,
    NotAnExtension,
    RegulationMismatch,
    Unpunished,
)
from .lgame import LGame, ProbabilityModel, shift_breach_mass

DIRECTED = "directed"
PLUS = "plus"
MAX = "max"
VARIANTS = (DIRECTED, PLUS, MAX)

# How the source game punishes an event that is not in its own event space.
#   restrict: only the broken rules the source regulation contains are punished,
#             g_source(x) = g_source(x & source)
#   zero:     the whole event goes unpunished, g_source(x) = 0
RESTRICT = "restrict"
ZERO = "zero"
EXTENSIONS = (RESTRICT, ZERO)

MONOTONE_TOL = 1e-12


@dataclass(frozen=True)
class DivergenceReport:
    value: object
    direction: tuple[str, str]
    variant: str

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("divergence values are nonnegative")
        if self.variant not in VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")


def kl_social_divergence(p: ProbabilityModel, q: ProbabilityModel) -> float:
    """Relative entropy sum p(x) log(p(x)/q(x)), natural log.

    Terms with p(x) = 0 contribute nothing. Raises when q(x) = 0 < p(x).
    """
    if p.regulation != q.regulation:
        raise RegulationMismatch(
            f"cannot compare societies on {p.regulation.label()} and {q.regulation.label()}"
        )
    terms = []
    for event, pe in p.items():
        if pe == 0:
            continue
        qe = q.p(event)
        if qe == 0:
            raise AbsoluteContinuityViolated(
                f"event {p.regulation.law.label(event)} has mass {pe} but reference mass 0"
            )
        if pe == qe:
            continue
        if isinstance(pe, (int, Fraction)) and isinstance(qe, (int, Fraction)):
            ratio = float(Fraction(pe) / Fraction(qe))
        else:
            ratio = float(pe) / float(qe)
        terms.append(float(pe) * math.log(ratio))
    # rounding can leave a tiny negative sum for near-identical inputs
    return max(0.0, math.fsum(terms))


def _check_pair(target: LGame, source: LGame):
    if target.law.rules != source.law.rules:
        raise LawMismatch("l-games are defined under different laws")
    for game in (target, source):
        if game.punishment is None:
            raise Unpunished(f"l-game on {game.regulation.label()} has no punishment model")


def lgame_premetric(target: LGame, source: LGame, extension: str = RESTRICT):
    """Social resistance to move from ``source`` to ``target``.

    Sums p_target(x) * |g_target(x) - g_source(x)| over the target's event
    space. ``extension`` decides the source punishment of events outside the
    source's own space (see RESTRICT / ZERO).
    """
    _check_pair(target, source)
    if extension not in EXTENSIONS:
        raise ValueError(f"unknown extension {extension!r}")
    smask = source.regulation.mask
    total = 0
    for event, p in target.probability.items():
        gt = target.g(event)
        gs = source.g(event & smask) if extension == RESTRICT else source.g(event)
        total += p * abs(gt - gs)
    return total


def symmetrize_plus(a: LGame, b: LGame, extension: str = RESTRICT):
    return lgame_premetric(a, b, extension) + lgame_premetric(b, a, extension)


def symmetrize_max(a: LGame, b: LGame, extension: str = RESTRICT):
    return max(lgame_premetric(a, b, extension), lgame_premetric(b, a, extension))


def premetric_variant(target: LGame, source: LGame, variant: str = DIRECTED, extension: str = RESTRICT):
    if variant == DIRECTED:
        return lgame_premetric(target, source, extension)
    if variant == PLUS:
        return symmetrize_plus(target, source, extension)
    if variant == MAX:
        return symmetrize_max(target, source, extension)
    raise ValueError(f"unknown variant {variant!r}")


def divergence_report(
    target: LGame, source: LGame, variant: str = DIRECTED, names=None, extension: str = RESTRICT
) -> DivergenceReport:
    names = names or (target.regulation.label(), source.regulation.label())
    return DivergenceReport(premetric_variant(target, source, variant, extension), tuple(names), variant)


@dataclass(frozen=True)
class CoherenceVerdict:
    c1: bool
    c2: bool
    severity_values: tuple
    breach_values: tuple

    @property
    def coherent(self) -> bool:
        return self.c1 and self.c2


def _nondecreasing(values) -> bool:
    return all(b >= a - MONOTONE_TOL * max(1.0, abs(float(a))) for a, b in zip(values, values[1:]))


def check_coherence(
    base: LGame,
    extended: LGame,
    added_rule: str,
    factors=(1, 2, 5),
    shifts=(0, Fraction(1, 4), Fraction(1, 2), 1),
    extension: str = RESTRICT,
) -> CoherenceVerdict:
    """Probe both coherence conditions for one added rule.

    C1 scales the added rule's punishment by each factor; C2 moves a growing
    share of every rule-free event's mass onto the same event plus the added
    rule. Each sequence of D(extended || base) values must be nondecreasing.
    This is a test harness over finitely many probes, not a proof.
    """
    _check_pair(extended, base)
    law = base.law
    if added_rule not in law.rules or added_rule in base.regulation:
        raise NotAnExtension(f"{added_rule!r} is not a new rule for {base.regulation.label()}")
    if extended.regulation.mask != base.regulation.mask | law.bit(added_rule):
        raise NotAnExtension(
            f"{extended.regulation.label()} is not {base.regulation.label()} plus {added_rule!r}"
        )
    severity = []
    for factor in sorted(factors):
        ext = extended.with_punishment(extended.punishment.scaled(added_rule, factor))
        bas = base.with_punishment(base.punishment.scaled(added_rule, factor))
        severity.append(lgame_premetric(ext, bas, extension))
    breach = []
    for t in sorted(shifts):
        ext = extended.with_probability(shift_breach_mass(extended.probability, added_rule, t))
        breach.append(lgame_premetric(ext, base, extension))
    return CoherenceVerdict(_nondecreasing(severity), _nondecreasing(breach), tuple(severity), tuple(breach))
