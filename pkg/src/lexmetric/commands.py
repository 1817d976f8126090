"""Command dispatch: one function per CLI command, each returning a Report."""

from __future__ import annotations

import math
import warnings

from .config import AnalysisConfig
from .consensus import (
    analyze,
    classify_signer,
    closest_pareto_deal,
    is_compatible,
    min_consensus_radius,
)
from .divergence import kl_social_divergence, lgame_premetric
from .errors import AbsoluteContinuityViolated, LexError, MissingTable
from .gamegraph import (
    k_shortest_incremental_paths,
    k_shortest_paths,
    path_distance,
    shortest_path,
    step_value,
    to_dot,
)
from .lgame import Regulation, entropy, expected_severity, make_game, mean_probability
from .reports import Num, Report
from .reproduce import reproduce

COMMANDS = (
    "validate", "severity", "entropy", "divergence", "distance", "graph",
    "path", "pareto", "radius", "signers", "reproduce",
)


class UsageError(Exception):
    """Bad command-line input (exit code 2)."""


def resolve_set(cfg: AnalysisConfig, text: str) -> int:
    """Regulation from a configured name, ``{}`` for the empty set, or comma-separated rule ids."""
    text = text.strip()
    if text in cfg.names:
        return cfg.names[text]
    body = text[1:-1] if text.startswith("{") and text.endswith("}") else text
    members = [m.strip() for m in body.split(",") if m.strip()]
    try:
        return cfg.law.mask(members)
    except KeyError:
        raise UsageError(f"unknown regulation {text!r}") from None


def _log_scale(log_base: str) -> float:
    return 1 / math.log(2) if log_base == "2" else 1.0


def _regs(cfg: AnalysisConfig, source):
    if source is not None:
        return [Regulation(cfg.law, source)]
    return list(cfg.domain)


def _need(value, flag, command):
    if value is None:
        raise UsageError(f"{command} needs {flag}")
    return value


def run_command(
    cfg: AnalysisConfig,
    command: str,
    *,
    variant: str | None = None,
    log_base: str | None = None,
    source: int | None = None,
    target: int | None = None,
    k: int | None = None,
    incremental: bool = False,
    r=None,
    fmt: str = "human",
) -> Report:
    if command not in COMMANDS:
        raise UsageError(f"unknown command {command!r}")
    if fmt == "dot" and command != "graph":
        raise UsageError("--format dot is only available for the graph command")
    variant = variant or cfg.variant
    log_base = log_base or cfg.log_base
    label = cfg.label
    for m in (source, target):
        if m is not None and cfg.allowlist is not None and m not in cfg.allowlist:
            raise UsageError(f"{cfg.law.label(m)} is not an allowlisted regulation")

    if command == "validate":
        rep = Report(command)
        t = rep.table("config", ["field", "value"])
        t.add("rules", ", ".join(f"{r}={Num(p).exact}" for r, p in cfg.law.rule_punishments.items()))
        t.add("regulations", len(cfg.domain))
        t.add("societies", ", ".join(s.name for s in cfg.societies))
        t.add("punishment", f"{cfg.punishment.mode}, extension={cfg.extension}")
        t.add("variant", cfg.variant)
        t.add("preferences", ", ".join(p.player for p in cfg.preferences) or None)
        cov = rep.table("coverage", ["society", "regulations with data"])
        for s in cfg.societies:
            n = 0
            for reg in cfg.domain:
                try:
                    mean_probability(s, reg)
                    n += 1
                except MissingTable:
                    pass
            cov.add(s.name, f"{n}/{len(cfg.domain)}")
        rep.notes.append("config is valid")
        return rep

    if command in ("severity", "entropy"):
        rep = Report(command)
        unit = f"entropy[log {log_base}]" if command == "entropy" else "expected severity"
        t = rep.table(command, ["regulation", "members", unit])
        for reg in _regs(cfg, source):
            try:
                game = make_game(cfg.society, reg, cfg.punishment)
            except MissingTable as exc:
                if source is not None:
                    raise
                rep.notes.append(str(exc))
                continue
            value = expected_severity(game) if command == "severity" else entropy(game) * _log_scale(log_base)
            t.add(label(reg.mask), reg.label(), Num(value))
        return rep

    if command == "divergence":
        if len(cfg.societies) < 2:
            raise LexError("divergence needs at least two societies in the config")
        rep = Report(command)
        t = rep.table(
            f"KL social divergence [log {log_base}]", ["regulation", "from", "to", "divergence"]
        )
        scale = _log_scale(log_base)
        for reg in _regs(cfg, source):
            for a in cfg.societies:
                for b in cfg.societies:
                    if a is b:
                        continue
                    try:
                        p, q = mean_probability(a, reg), mean_probability(b, reg)
                    except MissingTable as exc:
                        rep.notes.append(str(exc))
                        continue
                    try:
                        value = Num(kl_social_divergence(p, q) * scale)
                    except AbsoluteContinuityViolated:
                        value = "undefined"
                    t.add(label(reg.mask), a.name, b.name, value)
        return rep

    if command == "distance":
        src = _need(source, "--from", command)
        dst = _need(target, "--to", command)
        g = cfg.graph(overrides=False)
        a, b = g.game(src), g.game(dst)
        fwd = lgame_premetric(b, a, cfg.extension)
        back = lgame_premetric(a, b, cfg.extension)
        rep = Report(command)
        t = rep.table(f"distance {label(src)} -> {label(dst)} [{cfg.extension}]", ["quantity", "value"])
        t.add(f"D({label(dst)}||{label(src)})  resistance {label(src)} -> {label(dst)}", Num(fwd))
        t.add(f"D({label(src)}||{label(dst)})  resistance {label(dst)} -> {label(src)}", Num(back))
        t.add("D+ (sum)", Num(fwd + back))
        t.add("Ds (max)", Num(max(fwd, back)))
        return rep

    g = cfg.graph(variant=variant)
    names = cfg.labels()
    if cfg.edge_overrides:
        note = "edge weights from the config's override block replace computed values"
    else:
        note = None

    if command == "graph":
        rep = Report(command)
        if fmt == "dot":
            rep.text = to_dot(g, names)
            return rep
        t = rep.table(f"edge weights [{variant}]", ["from", "to", "weight"])
        for u, v, w in g.edges():
            t.add(label(u.mask), label(v.mask), Num(w))
        if note:
            rep.notes.append(note)
        return rep

    if command == "path":
        src = _need(source, "--from", command)
        dst = _need(target, "--to", command)
        rep = Report(command)
        if incremental:
            paths = k_shortest_incremental_paths(g, src, dst, k if k is not None else math.factorial(len(cfg.law.rules)))
        elif k is not None:
            paths = k_shortest_paths(g, src, dst, k)
        else:
            paths = [shortest_path(g, src, dst)]
        kind = "incremental paths" if incremental else "paths"
        t = rep.table(f"{kind} {label(src)} -> {label(dst)} [{variant}]", ["rank", "path", "length", "max step"])
        for i, p in enumerate(paths, 1):
            t.add(i, p.label(names), Num(p.length), Num(max(p.steps, default=0)))
        rep.notes.append(f"path distance {label(src)} -> {label(dst)}: {Num(path_distance(g, src, dst)).human()}")
        if note:
            rep.notes.append(note)
        return rep

    if command == "reproduce":
        return reproduce(cfg)

    if command == "signers":
        step = step_value(g)
        rep = Report(command)
        t = rep.table(f"signers [{variant}]", ["player", "threshold", "class"])
        for p in cfg.preferences:
            if p.threshold is None:
                rep.notes.append(f"player {p.player!r} has no threshold")
                continue
            t.add(p.player, Num(p.threshold), classify_signer(g, p.threshold))
        if r is not None:
            t.add("(--r)", Num(r), classify_signer(g, r))
        rep.notes.append(f"graph step (smallest positive move cost): {Num(step).human()}")
        if note:
            rep.notes.append(note)
        return rep

    profile = cfg.profile()
    if not profile.players:
        raise LexError(f"{command} needs a preferences block in the config")

    if command == "pareto":
        rep = Report(command)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            analysis = analyze(g, profile, cfg.direction)
            closest = closest_pareto_deal(g, profile, cfg.direction) if analysis.pareto else None
        t = rep.table("players", ["player", "maximal deals", "lower semicontinuous", "compatible"])
        for pl in profile.players:
            t.add(
                pl.id,
                " ".join(label(m.mask) for m in analysis.maximal[pl.id]),
                analysis.lsc[pl.id],
                is_compatible(pl.preorder, g, direction=cfg.direction),
            )
        cols = ["deal", "members"] + [f"d[{p.id}]" for p in profile.players] + ["closest"]
        d = rep.table(f"pareto deals [{variant}, {cfg.direction}]", cols)
        for y in analysis.pareto:
            scores = [Num(analysis.rankings[p.id].scores[y.mask]) for p in profile.players]
            d.add(label(y.mask), y.label(), *scores, y == closest)
        rep.notes.extend(analysis.warnings)
        if note:
            rep.notes.append(note)
        return rep

    if command == "radius":
        res = min_consensus_radius(g, profile, cfg.direction)
        rep = Report(command)
        t = rep.table(f"consensus radius [{variant}, {cfg.direction}]", ["quantity", "value"])
        t.add("radius (balls of any larger radius intersect)", Num(res.radius))
        t.add("witnesses", " ".join(label(y.mask) for y in res.witnesses))
        if note:
            rep.notes.append(note)
        return rep

    raise UsageError(f"unhandled command {command!r}")  # pragma: no cover
