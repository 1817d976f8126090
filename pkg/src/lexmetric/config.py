"""Analysis config: JSON document -> validated domain objects.

Structure is checked against ``SCHEMA`` (unknown fields rejected); semantic
invariants (masses summing to one, known rule names, acyclic preferences)
are checked while building the domain objects. Every failure carries the
field path it refers to.

Numbers may be JSON numbers or strings holding a fraction or decimal
("8/30", "0.25"). Both are read exactly as ``Fraction``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from .consensus import DIRECTIONS, TOWARD, PlayerPreference, Preorder, PreferenceProfile
from .divergence import DIRECTED, EXTENSIONS, RESTRICT, VARIANTS
from .errors import LexError, ParseError, ValidationError
from .gamegraph import GameOfGames
from .lgame import (
    ADDITIVE,
    DEFAULT_CAP,
    PUNISHMENT_MODES,
    Law,
    Player,
    ProbabilityModel,
    PunishmentModel,
    Regulation,
    Society,
)

LOG_BASES = ("e", "2")

_NUMBER = {
    "oneOf": [
        {"type": "number"},
        {"type": "string", "pattern": r"^\s*\d+(\.\d+)?(\s*/\s*\d+)?\s*$"},
    ]
}
_MEMBERS = {"type": "array", "items": {"type": "string", "minLength": 1}}
_REGULATION = {"oneOf": [{"type": "string", "minLength": 1}, _MEMBERS]}
_TABLE = {
    "type": "object",
    "additionalProperties": False,
    "required": ["regulation", "mass"],
    "properties": {
        "regulation": _REGULATION,
        "mass": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["event", "p"],
                "properties": {"event": _MEMBERS, "p": _NUMBER},
            },
        },
    },
}
_SOCIETY = {
    "type": "object",
    "additionalProperties": False,
    "required": ["name"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "players": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["id"],
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "weight": _NUMBER,
                    "tables": {"type": "array", "items": _TABLE},
                },
            },
        },
        "aggregate": {"type": "array", "items": _TABLE},
        "breach_rates": {"type": "object", "additionalProperties": _NUMBER},
    },
}
_PAIR = {"type": "array", "items": _REGULATION, "minItems": 2, "maxItems": 2}

SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["law", "society"],
    "properties": {
        "law": {
            "type": "object",
            "additionalProperties": False,
            "required": ["rules"],
            "properties": {
                "rules": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["id"],
                        "properties": {"id": {"type": "string", "minLength": 1}, "punishment": _NUMBER},
                    },
                },
                "names": {"type": "object", "additionalProperties": _MEMBERS},
            },
        },
        "society": {"oneOf": [_SOCIETY, {"type": "array", "items": _SOCIETY, "minItems": 1}]},
        "punishment": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "mode": {"enum": list(PUNISHMENT_MODES)},
                "extension": {"enum": list(EXTENSIONS)},
                "overrides": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["event", "g"],
                        "properties": {"event": _MEMBERS, "g": _NUMBER},
                    },
                },
            },
        },
        "preferences": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["player"],
                "properties": {
                    "player": {"type": "string", "minLength": 1},
                    "top": {"type": "array", "items": _REGULATION},
                    "strict": {"type": "array", "items": _PAIR},
                    "indifferent": {"type": "array", "items": _PAIR},
                    "threshold": _NUMBER,
                },
            },
        },
        "options": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "variant": {"enum": list(VARIANTS)},
                "log_base": {"enum": list(LOG_BASES)},
                "direction": {"enum": list(DIRECTIONS)},
                "cap": {"type": "integer", "minimum": 1},
                "allowlist": {"type": "array", "items": _REGULATION},
                "edge_overrides": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "additionalProperties": False,
                        "required": ["from", "to", "weight"],
                        "properties": {"from": _REGULATION, "to": _REGULATION, "weight": _NUMBER},
                    },
                },
            },
        },
    },
}

_FRACTION = re.compile(r"^\s*(\d+(?:\.\d+)?)\s*(?:/\s*(\d+))?\s*$")


@dataclass(frozen=True)
class PreferenceDecl:
    player: str
    top: tuple[int, ...] = ()
    strict: tuple[tuple[int, int], ...] = ()
    indifferent: tuple[tuple[int, int], ...] = ()
    threshold: Any = None


@dataclass(frozen=True)
class AnalysisConfig:
    law: Law
    societies: tuple[Society, ...]
    punishment: PunishmentModel
    names: dict[str, int] = field(default_factory=dict)
    extension: str = RESTRICT
    preferences: tuple[PreferenceDecl, ...] = ()
    variant: str = DIRECTED
    log_base: str = "e"
    direction: str = TOWARD
    allowlist: tuple[int, ...] | None = None
    edge_overrides: dict[tuple[int, int], Any] = field(default_factory=dict)

    @property
    def society(self) -> Society:
        return self.societies[0]

    @property
    def domain(self) -> tuple[Regulation, ...]:
        masks = self.allowlist if self.allowlist is not None else range(1 << self.law.size)
        return tuple(Regulation(self.law, m) for m in masks)

    def label(self, mask: int) -> str:
        for name, m in self.names.items():
            if m == mask:
                return name
        return self.law.label(mask)

    def labels(self) -> dict[int, str]:
        out: dict[int, str] = {}
        for name, m in self.names.items():
            out.setdefault(m, name)
        return out

    def graph(self, variant: str | None = None, extension: str | None = None, overrides: bool = True) -> GameOfGames:
        return GameOfGames(
            self.law,
            self.society,
            self.punishment,
            variant or self.variant,
            self.allowlist,
            self.edge_overrides if overrides else None,
            extension or self.extension,
        )

    def profile(self) -> PreferenceProfile:
        domain = self.domain
        players = []
        for decl in self.preferences:
            players.append(PlayerPreference(decl.player, _preorder(domain, decl), decl.threshold))
        return PreferenceProfile(tuple(players))


def _preorder(domain, decl: PreferenceDecl) -> Preorder:
    pairs = []
    if decl.top:
        top = set(decl.top)
        rest = [d.mask for d in domain if d.mask not in top]
        tops = sorted(top)
        # listed deals tie for best, every other deal ties below them
        pairs += [(tops[0], t) for t in tops[1:]] + [(t, tops[0]) for t in tops[1:]]
        pairs += [(rest[0], r) for r in rest[1:]] + [(r, rest[0]) for r in rest[1:]]
        strict = [(r, tops[0]) for r in rest[:1]]
    else:
        strict = []
    return Preorder.from_pairs(
        domain,
        strict=list(decl.strict) + strict,
        indifferent=list(decl.indifferent),
        weak=pairs,
    )


def number(value, path=()) -> Any:
    if isinstance(value, bool):
        raise ValidationError("expected a number", path)
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(str(value))
    if isinstance(value, str):
        m = _FRACTION.match(value)
        if m:
            den = int(m.group(2)) if m.group(2) else 1
            if den == 0:
                raise ValidationError("zero denominator", path)
            return Fraction(m.group(1)) / den
    raise ValidationError(f"expected a number or fraction string, got {value!r}", path)


def format_number(value) -> Any:
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"
    return value


def loads(text: str) -> Any:
    try:
        return json.loads(text, parse_float=Fraction)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def parse_config(document) -> AnalysisConfig:
    """Validate a JSON text or an already-decoded document."""
    data = loads(document) if isinstance(document, (str, bytes)) else document
    validator = jsonschema.Draft202012Validator(SCHEMA)
    error = jsonschema.exceptions.best_match(validator.iter_errors(data))
    if error is not None:
        raise ValidationError(error.message, error.absolute_path)
    return _Builder(data).build()


def load_config(path) -> AnalysisConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    return parse_config(text)


def bundled(name: str = "communal") -> str:
    return resources.files("lexmetric.data").joinpath(f"{name}.json").read_text(encoding="utf-8")


def bundled_config(name: str = "communal") -> AnalysisConfig:
    return parse_config(bundled(name))


class _Builder:
    def __init__(self, data):
        self.data = data

    def build(self) -> AnalysisConfig:
        d = self.data
        options = d.get("options", {})
        cap = options.get("cap", DEFAULT_CAP)
        law = self._law(d["law"], cap)
        self.law = law
        self.names = self._names(d["law"].get("names", {}))
        pun = d.get("punishment", {})
        punishment = self._punishment(pun)
        socs = d["society"]
        if isinstance(socs, dict):
            societies = (self._society(socs, ("society",)),)
        else:
            societies = tuple(self._society(s, ("society", i)) for i, s in enumerate(socs))
        seen = set()
        for i, s in enumerate(societies):
            if s.name in seen:
                raise ValidationError(f"duplicate society name {s.name!r}", ("society", i, "name"))
            seen.add(s.name)
        allowlist = None
        if "allowlist" in options:
            allowlist = tuple(
                sorted({self._reg(r, ("options", "allowlist", i)) for i, r in enumerate(options["allowlist"])})
            )
        overrides = {}
        for i, item in enumerate(options.get("edge_overrides", [])):
            path = ("options", "edge_overrides", i)
            key = (self._reg(item["from"], path + ("from",)), self._reg(item["to"], path + ("to",)))
            if allowlist is not None and not set(key) <= set(allowlist):
                raise ValidationError("edge refers to a regulation outside the allowlist", path)
            overrides[key] = number(item["weight"], path + ("weight",))
        cfg = AnalysisConfig(
            law=law,
            societies=societies,
            punishment=punishment,
            names=self.names,
            extension=pun.get("extension", RESTRICT),
            preferences=tuple(self._pref(p, ("preferences", i)) for i, p in enumerate(d.get("preferences", []))),
            variant=options.get("variant", DIRECTED),
            log_base=options.get("log_base", "e"),
            direction=options.get("direction", TOWARD),
            allowlist=allowlist,
            edge_overrides=overrides,
        )
        ids = [p.player for p in cfg.preferences]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate preference player", ("preferences",))
        try:
            cfg.profile()
        except LexError as exc:
            raise ValidationError(str(exc), ("preferences",)) from None
        except KeyError as exc:
            raise ValidationError(str(exc.args[0]), ("preferences",)) from None
        return cfg

    def _law(self, node, cap) -> Law:
        rules = node["rules"]
        if not rules:
            raise ValidationError("a law needs at least one rule", ("law", "rules"))
        ids, pun = [], []
        for i, r in enumerate(rules):
            ids.append(r["id"])
            path = ("law", "rules", i, "punishment")
            pun.append(number(r.get("punishment", 0), path))
            if pun[-1] < 0:
                raise ValidationError("punishments are nonnegative", path)
        if len(set(ids)) != len(ids):
            raise ValidationError("rule identifiers must be unique", ("law", "rules"))
        if len(ids) > cap:
            raise ValidationError(f"{len(ids)} rules exceed the cap of {cap}", ("law", "rules"))
        return Law(tuple(ids), tuple(pun), cap=cap)

    def _members(self, members, path) -> int:
        try:
            return self.law.mask(members)
        except KeyError as exc:
            raise ValidationError(exc.args[0], path) from None

    def _names(self, names) -> dict[str, int]:
        return {name: self._members(m, ("law", "names", name)) for name, m in names.items()}

    def _reg(self, ref, path) -> int:
        if isinstance(ref, str):
            if ref not in self.names:
                raise ValidationError(f"unknown regulation name {ref!r}", path)
            return self.names[ref]
        return self._members(ref, path)

    def _punishment(self, node) -> PunishmentModel:
        overrides = {}
        for i, item in enumerate(node.get("overrides", [])):
            path = ("punishment", "overrides", i)
            event = self._members(item["event"], path + ("event",))
            if event == 0:
                raise ValidationError("the empty event always has punishment 0", path + ("event",))
            overrides[event] = number(item["g"], path + ("g",))
        return PunishmentModel(self.law, overrides, node.get("mode", ADDITIVE))

    def _table(self, node, path) -> ProbabilityModel:
        reg = Regulation(self.law, self._reg(node["regulation"], path + ("regulation",)))
        mass: dict[int, Any] = {}
        for j, item in enumerate(node["mass"]):
            ipath = path + ("mass", j)
            event = self._members(item["event"], ipath + ("event",))
            if event & ~reg.mask:
                raise ValidationError(f"event lies outside regulation {reg.label()}", ipath + ("event",))
            if event in mass:
                raise ValidationError("event listed twice", ipath + ("event",))
            mass[event] = number(item["p"], ipath + ("p",))
        try:
            return ProbabilityModel(reg, mass)
        except LexError as exc:
            raise ValidationError(f"regulation {reg.label()}: {exc}", path) from None

    def _tables(self, items, path) -> dict[int, ProbabilityModel]:
        out = {}
        for i, node in enumerate(items):
            model = self._table(node, path + (i,))
            if model.regulation.mask in out:
                raise ValidationError(f"second table for {model.regulation.label()}", path + (i,))
            out[model.regulation.mask] = model
        return out

    def _society(self, node, path) -> Society:
        players = []
        for i, p in enumerate(node.get("players", [])):
            ppath = path + ("players", i)
            players.append(
                Player(
                    p["id"],
                    number(p.get("weight", 1), ppath + ("weight",)),
                    self._tables(p.get("tables", []), ppath + ("tables",)),
                )
            )
        if len({p.id for p in players}) != len(players):
            raise ValidationError("duplicate player id", path + ("players",))
        if players and sum(p.weight for p in players) <= 0:
            raise ValidationError("player weights must sum to a positive value", path + ("players",))
        rates = None
        if "breach_rates" in node:
            rates = {}
            for rule, q in node["breach_rates"].items():
                rpath = path + ("breach_rates", rule)
                self._members([rule], rpath)
                rates[rule] = number(q, rpath)
                if rates[rule] > 1:
                    raise ValidationError("breach rate must lie in [0, 1]", rpath)
        aggregate = self._tables(node.get("aggregate", []), path + ("aggregate",))
        return Society(node["name"], tuple(players), aggregate, rates)

    def _pref(self, node, path) -> PreferenceDecl:
        def pairs(key):
            return tuple(
                (self._reg(a, path + (key, i, 0)), self._reg(b, path + (key, i, 1)))
                for i, (a, b) in enumerate(node.get(key, []))
            )

        top = tuple(sorted({self._reg(r, path + ("top", i)) for i, r in enumerate(node.get("top", []))}))
        threshold = number(node["threshold"], path + ("threshold",)) if "threshold" in node else None
        return PreferenceDecl(node["player"], top, pairs("strict"), pairs("indifferent"), threshold)


def dump_config(cfg: AnalysisConfig) -> dict:
    """Emit a JSON-ready document that parses back to an equivalent config."""
    law = cfg.law
    label = cfg.law.members

    def table(model: ProbabilityModel) -> dict:
        return {
            "regulation": list(label(model.regulation.mask)),
            "mass": [{"event": list(label(e)), "p": format_number(p)} for e, p in model.items()],
        }

    def society(s: Society) -> dict:
        out: dict[str, Any] = {"name": s.name}
        if s.players:
            out["players"] = [
                {"id": p.id, "weight": format_number(p.weight), "tables": [table(t) for _, t in sorted(p.tables.items())]}
                for p in s.players
            ]
        if s.aggregate:
            out["aggregate"] = [table(t) for _, t in sorted(s.aggregate.items())]
        if s.breach_rates is not None:
            out["breach_rates"] = {r: format_number(q) for r, q in s.breach_rates.items()}
        return out

    doc: dict[str, Any] = {
        "law": {
            "rules": [{"id": r, "punishment": format_number(v)} for r, v in zip(law.rules, law.punishments)],
        },
        "society": [society(s) for s in cfg.societies],
        "punishment": {
            "mode": cfg.punishment.mode,
            "extension": cfg.extension,
            "overrides": [
                {"event": list(label(e)), "g": format_number(v)} for e, v in sorted(cfg.punishment.overrides.items())
            ],
        },
        "options": {
            "variant": cfg.variant,
            "log_base": cfg.log_base,
            "direction": cfg.direction,
            "cap": law.cap,
        },
    }
    if cfg.names:
        doc["law"]["names"] = {n: list(label(m)) for n, m in cfg.names.items()}
    if cfg.preferences:
        prefs = []
        for p in cfg.preferences:
            item: dict[str, Any] = {"player": p.player}
            if p.top:
                item["top"] = [list(label(m)) for m in p.top]
            if p.strict:
                item["strict"] = [[list(label(a)), list(label(b))] for a, b in p.strict]
            if p.indifferent:
                item["indifferent"] = [[list(label(a)), list(label(b))] for a, b in p.indifferent]
            if p.threshold is not None:
                item["threshold"] = format_number(p.threshold)
            prefs.append(item)
        doc["preferences"] = prefs
    if cfg.allowlist is not None:
        doc["options"]["allowlist"] = [list(label(m)) for m in cfg.allowlist]
    if cfg.edge_overrides:
        doc["options"]["edge_overrides"] = [
            {"from": list(label(u)), "to": list(label(v)), "weight": format_number(w)}
            for (u, v), w in sorted(cfg.edge_overrides.items())
        ]
    return doc
