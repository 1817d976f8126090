"""Laws, regulations, breach-probability models and l-games.

A regulation is a subset of a law's rules. Rule order in the law fixes the
bit position of each rule, so regulations and breach events are both plain
integer bitmasks over the same rule positions. An event is the set of rules
broken simultaneously; a regulation's event space is the powerset of its
rules.

Numbers are kept in whatever type they arrive in: ``Fraction`` inputs give
exact results for every functional except the logarithmic ones.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Iterable, Iterator, Mapping, Sequence

from .errors import (
    InvalidMass,
    LawMismatch,
    LawTooLarge,
    MissingTable,
    RuleNotInRegulation,
    Unpunished,
)

DEFAULT_CAP = 16
MASS_TOL = 1e-9

ADDITIVE = "additive"
ENTROPY = "entropy"
PUNISHMENT_MODES = (ADDITIVE, ENTROPY)


def submasks(mask: int) -> list[int]:
    """All submasks of ``mask`` in ascending order."""
    out = []
    sub = mask
    while True:
        out.append(sub)
        if sub == 0:
            break
        sub = (sub - 1) & mask
    out.reverse()
    return out


def surprisal(p) -> float:
    # 0 * log(1/0) = 0 convention: zero-mass events carry no entropy punishment
    p = float(p)
    return -math.log(p) if p > 0 else 0.0


@dataclass(frozen=True)
class Law:
    rules: tuple[str, ...]
    punishments: tuple = ()
    cap: int = field(default=DEFAULT_CAP, compare=False)

    def __post_init__(self):
        rules = tuple(self.rules)
        object.__setattr__(self, "rules", rules)
        if not rules:
            raise ValueError("a law needs at least one rule")
        if len(rules) > self.cap:
            raise LawTooLarge(f"{len(rules)} rules exceed the cap of {self.cap}")
        for r in rules:
            if not isinstance(r, str) or not r:
                raise ValueError(f"rule identifiers must be nonempty strings, got {r!r}")
        if len(set(rules)) != len(rules):
            raise ValueError("rule identifiers must be unique")
        pun = tuple(self.punishments) if self.punishments else (0,) * len(rules)
        if len(pun) != len(rules):
            raise ValueError("one punishment per rule is required")
        for r, v in zip(rules, pun):
            if v < 0:
                raise ValueError(f"punishment of rule {r!r} is negative")
        object.__setattr__(self, "punishments", pun)

    @classmethod
    def from_mapping(cls, rule_punishments: Mapping[str, object], cap: int = DEFAULT_CAP) -> "Law":
        return cls(tuple(rule_punishments), tuple(rule_punishments.values()), cap=cap)

    @property
    def rule_punishments(self) -> dict:
        return dict(zip(self.rules, self.punishments))

    @property
    def size(self) -> int:
        return len(self.rules)

    @property
    def full_mask(self) -> int:
        return (1 << len(self.rules)) - 1

    def bit(self, rule: str) -> int:
        try:
            return 1 << self.rules.index(rule)
        except ValueError:
            raise KeyError(f"rule {rule!r} is not part of the law") from None

    def mask(self, members: Iterable[str]) -> int:
        m = 0
        for r in members:
            m |= self.bit(r)
        return m

    def members(self, mask: int) -> tuple[str, ...]:
        return tuple(r for i, r in enumerate(self.rules) if mask >> i & 1)

    def label(self, mask: int) -> str:
        return "{" + ", ".join(self.members(mask)) + "}"

    def regulation(self, members: Iterable[str] | int = ()) -> "Regulation":
        if isinstance(members, int):
            return Regulation(self, members)
        return Regulation(self, self.mask(members))

    def regulations(self) -> list["Regulation"]:
        return [Regulation(self, m) for m in range(1 << len(self.rules))]


@dataclass(frozen=True)
class Regulation:
    law: Law
    mask: int

    def __post_init__(self):
        if self.mask < 0 or self.mask & ~self.law.full_mask:
            raise ValueError(f"mask {self.mask:#x} is not a subset of the law")

    @property
    def members(self) -> tuple[str, ...]:
        return self.law.members(self.mask)

    def __contains__(self, rule: str) -> bool:
        return rule in self.law.rules and bool(self.mask & self.law.bit(rule))

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def __lt__(self, other: "Regulation") -> bool:
        return self.mask < other.mask

    def issubset(self, other: "Regulation") -> bool:
        return self.mask & ~other.mask == 0

    def with_rule(self, rule: str) -> "Regulation":
        return Regulation(self.law, self.mask | self.law.bit(rule))

    def event_space(self) -> "EventSpace":
        return EventSpace(self)

    def label(self) -> str:
        return self.law.label(self.mask)

    def __repr__(self) -> str:
        return f"Regulation({self.label()})"


class EventSpace:
    """Powerset of a regulation's rules, each event a bitmask."""

    def __init__(self, regulation: Regulation):
        self.regulation = regulation
        self.events = tuple(submasks(regulation.mask))

    def __iter__(self) -> Iterator[int]:
        return iter(self.events)

    def __len__(self) -> int:
        return len(self.events)

    def __contains__(self, event: int) -> bool:
        return event & ~self.regulation.mask == 0


@dataclass(frozen=True, eq=False)
class ProbabilityModel:
    regulation: Regulation
    mass: Mapping[int, object]

    def __post_init__(self):
        mass = {}
        total = 0
        for event, p in self.mass.items():
            if event & ~self.regulation.mask:
                raise InvalidMass(
                    f"event {self.regulation.law.label(event)} lies outside "
                    f"regulation {self.regulation.label()}"
                )
            if not 0 <= p <= 1:
                raise InvalidMass(f"mass {p} of event {self.regulation.law.label(event)} is not in [0, 1]")
            total += p
            if p:
                mass[event] = p
        if abs(total - 1) > MASS_TOL:
            raise InvalidMass(
                f"masses for regulation {self.regulation.label()} sum to {float(total):.12g}, not 1"
            )
        object.__setattr__(self, "mass", MappingProxyType(dict(sorted(mass.items()))))

    def p(self, event: int):
        return self.mass.get(event, 0)

    def items(self):
        return self.mass.items()

    def __eq__(self, other):
        if not isinstance(other, ProbabilityModel):
            return NotImplemented
        return self.regulation == other.regulation and dict(self.mass) == dict(other.mass)

    @classmethod
    def from_members(cls, regulation: Regulation, table: Mapping[Iterable[str], object]) -> "ProbabilityModel":
        law = regulation.law
        mass: dict[int, object] = {}
        for members, p in table.items():
            e = law.mask(members)
            mass[e] = mass.get(e, 0) + p
        return cls(regulation, mass)

    @classmethod
    def point(cls, regulation: Regulation, event: int = 0) -> "ProbabilityModel":
        return cls(regulation, {event: 1})


def independent_compliance(regulation: Regulation, breach_rates: Mapping[str, object]) -> ProbabilityModel:
    """Event masses from independent per-rule breach probabilities.

    A modeling convenience for regulations without a supplied table:
    P(x) = prod_{r in x} q_r * prod_{r not in x} (1 - q_r).
    """
    law = regulation.law
    rates = []
    for r in regulation.members:
        if r not in breach_rates:
            raise MissingTable(f"no breach rate for rule {r!r}")
        q = breach_rates[r]
        if not 0 <= q <= 1:
            raise InvalidMass(f"breach rate of {r!r} is not in [0, 1]")
        rates.append((law.bit(r), q))
    mass = {}
    for event in submasks(regulation.mask):
        p = 1
        for bit, q in rates:
            p *= q if event & bit else 1 - q
        mass[event] = p
    return ProbabilityModel(regulation, mass)


@dataclass(frozen=True)
class Player:
    id: str
    weight: object = 1
    tables: Mapping[int, ProbabilityModel] = field(default_factory=dict)

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError(f"player {self.id!r} has a negative weight")


@dataclass(frozen=True, eq=False)
class Society:
    name: str
    players: tuple[Player, ...] = ()
    aggregate: Mapping[int, ProbabilityModel] = field(default_factory=dict)
    breach_rates: Mapping[str, object] | None = None

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))
        if self.players and sum(p.weight for p in self.players) <= 0:
            raise ValueError(f"player weights of society {self.name!r} must sum to a positive value")

    def __eq__(self, other):
        if not isinstance(other, Society):
            return NotImplemented
        return (
            self.name == other.name
            and self.players == other.players
            and dict(self.aggregate) == dict(other.aggregate)
            and self.breach_rates == other.breach_rates
        )

    def normalized_weights(self) -> list:
        total = sum(p.weight for p in self.players)
        if isinstance(total, int):
            return [Fraction(p.weight, total) for p in self.players]
        return [p.weight / total for p in self.players]

    def probability(self, regulation: Regulation) -> ProbabilityModel:
        return mean_probability(self, regulation)


def mean_probability(society: Society, regulation: Regulation) -> ProbabilityModel:
    """Society-level breach distribution for one regulation.

    A directly supplied aggregate wins; otherwise the weighted mean of the
    player tables (weights normalized over all players); otherwise the
    independent-compliance generator when breach rates are configured.
    """
    agg = society.aggregate.get(regulation.mask)
    if agg is not None:
        return agg
    players = society.players
    have = [p for p in players if regulation.mask in p.tables]
    if players and len(have) == len(players):
        mass: dict[int, object] = {}
        for w, player in zip(society.normalized_weights(), players):
            table = player.tables[regulation.mask]
            if table.regulation != regulation:
                raise InvalidMass(f"table of player {player.id!r} belongs to another regulation")
            for event, p in table.items():
                mass[event] = mass.get(event, 0) + w * p
        return ProbabilityModel(regulation, mass)
    if have:
        missing = ", ".join(p.id for p in players if p not in have)
        raise MissingTable(
            f"society {society.name!r}: players {missing} have no table for {regulation.label()}"
        )
    if society.breach_rates is not None:
        return independent_compliance(regulation, society.breach_rates)
    raise MissingTable(f"society {society.name!r} has no data for regulation {regulation.label()}")


@dataclass(frozen=True, eq=False)
class PunishmentModel:
    """Per-event punishment g.

    Additive mode sums the law's per-rule punishments over the broken rules,
    unless an override gives the event's value. Entropy mode uses the
    surprisal log(1/P(x)) of the game's own distribution.
    """

    law: Law
    overrides: Mapping[int, object] = field(default_factory=dict)
    mode: str = ADDITIVE

    def __post_init__(self):
        if self.mode not in PUNISHMENT_MODES:
            raise ValueError(f"unknown punishment mode {self.mode!r}")
        for event, v in self.overrides.items():
            if event == 0:
                raise ValueError("the empty event cannot be overridden: g(empty) = 0")
            if event & ~self.law.full_mask:
                raise ValueError(f"override event {event:#x} lies outside the law")
            if v < 0:
                raise ValueError(f"override for {self.law.label(event)} is negative")
        object.__setattr__(self, "overrides", MappingProxyType(dict(self.overrides)))

    def __eq__(self, other):
        if not isinstance(other, PunishmentModel):
            return NotImplemented
        return self.law == other.law and self.mode == other.mode and dict(self.overrides) == dict(other.overrides)

    def __call__(self, event: int, probability: ProbabilityModel | None = None):
        if self.mode == ENTROPY:
            if probability is None:
                raise ValueError("entropy-mode punishment needs the game's probability model")
            return surprisal(probability.p(event))
        if event in self.overrides:
            return self.overrides[event]
        total = 0
        for i, v in enumerate(self.law.punishments):
            if event >> i & 1:
                total += v
        return total

    def scaled(self, rule: str, factor) -> "PunishmentModel":
        i = self.law.rules.index(rule)
        pun = list(self.law.punishments)
        pun[i] = pun[i] * factor
        law = Law(self.law.rules, tuple(pun), cap=self.law.cap)
        return PunishmentModel(law, self.overrides, self.mode)


@dataclass(frozen=True, eq=False)
class LGame:
    regulation: Regulation
    probability: ProbabilityModel
    punishment: PunishmentModel | None = None

    def __post_init__(self):
        if self.probability.regulation != self.regulation:
            raise ValueError("probability model belongs to a different regulation")
        if self.punishment is not None and self.punishment.law.rules != self.regulation.law.rules:
            raise LawMismatch("punishment model is defined over a different law")

    @property
    def law(self) -> Law:
        return self.regulation.law

    @property
    def punished(self) -> bool:
        return self.punishment is not None

    def events(self) -> tuple[int, ...]:
        return self.regulation.event_space().events

    def g(self, event: int):
        """Punishment of ``event`` under this game; 0 for events outside its space."""
        if self.punishment is None:
            raise Unpunished(f"l-game on {self.regulation.label()} has no punishment model")
        if event & ~self.regulation.mask:
            return 0
        return self.punishment(event, self.probability)

    def titere_rules(self) -> tuple[str, ...]:
        law = self.law
        massed = [e for e, p in self.probability.items() if p > 0]
        return tuple(r for r in self.regulation.members if not any(e & law.bit(r) for e in massed))

    def with_punishment(self, punishment: PunishmentModel | None) -> "LGame":
        return LGame(self.regulation, self.probability, punishment)

    def with_probability(self, probability: ProbabilityModel) -> "LGame":
        return LGame(self.regulation, probability, self.punishment)


def make_game(society: Society, regulation: Regulation, punishment: PunishmentModel | None = None) -> LGame:
    return LGame(regulation, mean_probability(society, regulation), punishment)


def expected_severity(game: LGame):
    """Expected per-capita punishment: sum of P(x) * g(x) over the event space."""
    if game.punishment is None:
        raise Unpunished(f"l-game on {game.regulation.label()} has no punishment model")
    if game.punishment.mode == ENTROPY:
        return sum(float(p) * game.g(e) for e, p in game.probability.items())
    return sum(p * game.g(e) for e, p in game.probability.items())


def entropy(game: LGame) -> float:
    # same summation as expected_severity under entropy-mode punishment
    return sum(float(p) * surprisal(p) for _, p in game.probability.items())


def is_titere(law: Law, society: Society, regulation: Regulation, rule: str) -> bool:
    if regulation.law != law:
        raise LawMismatch("regulation belongs to another law")
    if rule not in regulation:
        raise RuleNotInRegulation(f"rule {rule!r} is not in {regulation.label()}")
    probability = mean_probability(society, regulation)
    bit = law.bit(rule)
    return all(p == 0 for e, p in probability.items() if e & bit)


def shift_breach_mass(model: ProbabilityModel, rule: str, fraction) -> ProbabilityModel:
    """Move ``fraction`` of every rule-free event's mass onto that event plus ``rule``."""
    if rule not in model.regulation:
        raise RuleNotInRegulation(f"rule {rule!r} is not in {model.regulation.label()}")
    if not 0 <= fraction <= 1:
        raise ValueError("fraction must lie in [0, 1]")
    bit = model.regulation.law.bit(rule)
    mass = dict(model.items())
    for e, p in list(model.items()):
        if not e & bit:
            moved = p * fraction
            mass[e] = mass[e] - moved
            mass[e | bit] = mass.get(e | bit, 0) + moved
    return ProbabilityModel(model.regulation, {e: min(max(p, 0), 1) for e, p in mass.items()})


def society_from_tables(
    name: str, law: Law, tables: Sequence[tuple[Iterable[str], Mapping[Iterable[str], object]]]
) -> Society:
    """Society with an aggregate table per regulation, keyed by member lists."""
    aggregate = {}
    for members, table in tables:
        reg = law.regulation(members)
        aggregate[reg.mask] = ProbabilityModel.from_members(reg, table)
    return Society(name, aggregate=aggregate)
