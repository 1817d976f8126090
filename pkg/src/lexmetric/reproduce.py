"""Side-by-side check of the communal example against its reference numbers.

The reference edge labels and path lengths do not agree with each other or
with direct evaluation of the premetric; this module recomputes everything
from the definition and flags each deviation instead of hiding it.
"""

from __future__ import annotations

import warnings
from fractions import Fraction

from .config import AnalysisConfig
from .consensus import analyze, closest_pareto_deal, min_consensus_radius, minimax_step
from .divergence import PLUS, RESTRICT, ZERO, lgame_premetric
from .errors import LexError
from .gamegraph import k_shortest_incremental_paths
from .reports import Num, Report

NAMES = "ABCDEFGH"

# undirected edge labels of the reference graph drawing
REFERENCE_EDGE_LABELS = {
    ("A", "B"): Fraction(166, 30), ("A", "C"): Fraction(166, 30), ("A", "D"): Fraction(332, 30),
    ("A", "E"): Fraction(80, 9), ("A", "F"): Fraction(166, 30), ("A", "G"): Fraction(10),
    ("A", "H"): Fraction(88, 10),
    ("B", "C"): Fraction(166, 30), ("B", "D"): Fraction(166, 30), ("B", "E"): Fraction(166, 30),
    ("B", "F"): Fraction(166, 30), ("B", "G"): Fraction(166, 30), ("B", "H"): Fraction(166, 30),
    ("C", "D"): Fraction(1162, 30), ("C", "E"): Fraction(1298, 90), ("C", "F"): Fraction(166, 90),
    ("C", "G"): Fraction(166, 30), ("C", "H"): Fraction(966, 30),
    ("D", "E"): Fraction(1796, 90), ("D", "F"): Fraction(332, 30), ("D", "G"): Fraction(632, 30),
    ("D", "H"): Fraction(332, 30),
    ("E", "F"): Fraction(1298, 90), ("E", "G"): Fraction(170, 9), ("E", "H"): Fraction(10, 3),
    ("F", "G"): Fraction(466, 30), ("F", "H"): Fraction(966, 30),
    ("G", "H"): Fraction(110, 3),
}

# reference path lengths, quoted to two or three decimals
PATH_CLAIMS = {
    ("A", "D", "G", "H"): 12.91,
    ("A", "C", "E", "H"): 34.422,
    ("A", "B", "G", "H"): 46.5,
}
CLAIM_TOL = 5e-3
STEP_CLAIM = Fraction(166, 30)
MIDPOINT_CLAIM = ("D", "G")


def _require_names(cfg: AnalysisConfig) -> dict[str, int]:
    missing = [n for n in NAMES if n not in cfg.names]
    if missing or cfg.law.size != 3:
        raise LexError("reproduce needs the communal example (3 rules, regulations named A..H)")
    return {n: cfg.names[n] for n in NAMES}


def _match(value, claim, tol) -> bool:
    return abs(float(value) - float(claim)) <= tol


def reproduce(cfg: AnalysisConfig) -> Report:
    names = _require_names(cfg)
    labels = {m: n for n, m in names.items()}
    graphs = {ext: cfg.graph(variant="directed", extension=ext, overrides=False) for ext in (RESTRICT, ZERO)}
    main = graphs[cfg.extension]
    report = Report("reproduce")

    paths = report.table(
        "incremental paths A -> H",
        ["rank", "path", "length[restrict]", "length[zero]", "reference", "verdict"],
    )
    ranked = k_shortest_incremental_paths(graphs[RESTRICT], names["A"], names["H"], 6)
    listed = set()
    for rank, p in enumerate(ranked, 1):
        key = tuple(labels[m] for m in p.masks)
        listed.add(key)
        other = graphs[ZERO].path(p.masks).length
        claim = PATH_CLAIMS.get(key)
        paths.add(rank, "".join(key), Num(p.length), Num(other), Num(claim) if claim else None,
                  _verdict(claim, p.length, other))
    for key, claim in PATH_CLAIMS.items():
        if key not in listed:
            masks = [names[n] for n in key]
            a = graphs[RESTRICT].path(masks).length
            b = graphs[ZERO].path(masks).length
            paths.add("-", "".join(key), Num(a), Num(b), Num(claim), "not incremental; " + _verdict(claim, a, b))

    steps = report.table("largest single step", ["quantity", "restrict", "zero", "reference"])
    mm, best = {}, {}
    for ext, g in graphs.items():
        incremental = k_shortest_incremental_paths(g, names["A"], names["H"], 6)
        mm[ext] = minimax_step(incremental)
        best[ext] = max(incremental[0].steps)
    steps.add("max step on least-resistance path", Num(best[RESTRICT]), Num(best[ZERO]), Num(STEP_CLAIM))
    steps.add("min over paths of max step", Num(mm[RESTRICT]), Num(mm[ZERO]), Num(STEP_CLAIM))

    fig = report.table(
        f"reference edges [{cfg.extension}]",
        ["edge", "reference", "D(v||u)", "D(u||v)", "D+", "Ds", "verdict"],
    )
    deviations = 0
    for (u, v), label in REFERENCE_EDGE_LABELS.items():
        gu, gv = main.game(names[u]), main.game(names[v])
        fwd = lgame_premetric(gv, gu, cfg.extension)
        back = lgame_premetric(gu, gv, cfg.extension)
        candidates = {"D(v||u)": fwd, "D(u||v)": back, "D+": fwd + back, "Ds": max(fwd, back)}
        hits = [k for k, val in candidates.items() if val == label]
        if not hits:
            deviations += 1
        fig.add(f"{u}-{v}", Num(label), Num(fwd), Num(back), Num(fwd + back), Num(max(fwd, back)),
                "matches " + ", ".join(hits) if hits else "deviates")
    report.notes.append(f"{deviations} of {len(REFERENCE_EDGE_LABELS)} reference edge labels match none of D, D+, Ds")

    if cfg.preferences:
        g = cfg.graph(variant=PLUS, overrides=False)
        profile = cfg.profile()
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            analysis = analyze(g, profile, cfg.direction)
            closest = closest_pareto_deal(g, profile, cfg.direction)
        radius = min_consensus_radius(g, profile, cfg.direction)
        deal = report.table("agreement search [plus]", ["quantity", "value"])
        deal.add("players", ", ".join(f"{p}: {' '.join(labels[m.mask] for m in top)}" for p, top in analysis.maximal.items()))
        deal.add("pareto deals", " ".join(labels[y.mask] for y in analysis.pareto))
        deal.add("closest pareto deal", labels[closest.mask])
        deal.add("consensus radius (infimum)", Num(radius.radius))
        deal.add("radius witnesses", " ".join(labels[y.mask] for y in radius.witnesses))
        deal.add("reference midpoints", " ".join(MIDPOINT_CLAIM))
        inside = all(names[m] in {y.mask for y in analysis.pareto} for m in MIDPOINT_CLAIM)
        deal.add("reference midpoints are pareto", inside)
        report.notes.extend(analysis.warnings)
    return report


def _verdict(claim, restrict, zero) -> str:
    if claim is None:
        return "-"
    hits = [name for name, val in (("restrict", restrict), ("zero", zero)) if _match(val, claim, CLAIM_TOL)]
    return "matches " + ", ".join(hits) if hits else "deviates"
