"""Player preferences over regulations and agreement search.

Preferences are preorders over the nodes of a game of games. Each player's
maximal deals induce a distance ranking (a total preorder by minimum
distance to those deals); intersecting the rankings of all players gives the
Pareto optimal deals. Distances come from ``GameOfGames.distance`` so the
graph's variant, extension rule and weight overrides all apply.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import EmptyMaximalSet, PreorderCycle
from .gamegraph import GameOfGames, LegalPath, step_value
from .lgame import Regulation

TOWARD = "toward"  # d(G*, y) = D(G* || y): resistance to move from y to G*
AWAY = "away"  # d(y, G*) = D(y || G*): resistance to move from G* to y
DIRECTIONS = (TOWARD, AWAY)

BOYCOTTER = "boycotter"
STUBBORN = "stubborn"
ORDINARY = "ordinary"


class LscWarning(UserWarning):
    """A preference is not lower semicontinuous; Pareto guarantees are void."""


# binary-relation taxonomy over an explicit domain and a set of pairs


def is_reflexive(domain, rel) -> bool:
    return all((x, x) in rel for x in domain)


def is_irreflexive(domain, rel) -> bool:
    return all((x, x) not in rel for x in domain)


def is_symmetric(domain, rel) -> bool:
    return all((y, x) in rel for x, y in rel)


def is_antisymmetric(domain, rel) -> bool:
    return all(x == y for x, y in rel if (y, x) in rel)


def is_asymmetric(domain, rel) -> bool:
    return all((y, x) not in rel for x, y in rel)


def is_total(domain, rel) -> bool:
    return all((x, y) in rel or (y, x) in rel for x in domain for y in domain)


def is_transitive(domain, rel) -> bool:
    succ: dict = {}
    for x, y in rel:
        succ.setdefault(x, set()).add(y)
    return all(z in succ.get(x, ()) for x, y in rel for z in succ.get(y, ()))


def is_preorder(domain, rel) -> bool:
    return is_reflexive(domain, rel) and is_transitive(domain, rel)


def is_total_preorder(domain, rel) -> bool:
    return is_preorder(domain, rel) and is_total(domain, rel)


class Preorder:
    """Reflexive-transitive relation over regulations; ``leq(x, y)`` reads x ≾ y."""

    def __init__(self, domain: Iterable[Regulation], weak_pairs: Iterable[tuple] = ()):
        self.domain = tuple(sorted(set(domain)))
        if not self.domain:
            raise ValueError("a preorder needs a nonempty domain")
        self._law = self.domain[0].law
        self._masks = [d.mask for d in self.domain]
        known = set(self._masks)
        succ = {m: set() for m in self._masks}
        for x, y in weak_pairs:
            a, b = self._mask(x), self._mask(y)
            if a not in known or b not in known:
                raise KeyError("preference pair refers to a regulation outside the domain")
            succ[a].add(b)
        self._up = {}
        for m in self._masks:
            seen = {m}
            todo = deque([m])
            while todo:
                for nxt in succ[todo.popleft()]:
                    if nxt not in seen:
                        seen.add(nxt)
                        todo.append(nxt)
            self._up[m] = frozenset(seen)

    @classmethod
    def from_pairs(cls, domain, strict=(), indifferent=(), weak=()) -> "Preorder":
        """Closure of the declared pairs; ``strict`` pairs read (lower, upper)."""
        pairs = list(weak) + list(strict)
        for x, y in indifferent:
            pairs += [(x, y), (y, x)]
        pre = cls(domain, pairs)
        for x, y in strict:
            if pre.leq(y, x):
                raise PreorderCycle(
                    f"declared strict pair {_label(x)} < {_label(y)} collapses under closure"
                )
        return pre

    @classmethod
    def from_scores(cls, domain, score: Mapping[int, object]) -> "Preorder":
        """Total preorder where a lower score is better (x ≾ y iff score(y) <= score(x))."""
        domain = list(domain)
        pairs = [(x, y) for x in domain for y in domain if score[y.mask] <= score[x.mask]]
        return cls(domain, pairs)

    @staticmethod
    def _mask(x) -> int:
        return x.mask if isinstance(x, Regulation) else int(x)

    def _reg(self, m: int) -> Regulation:
        return Regulation(self._law, m)

    def leq(self, x, y) -> bool:
        return self._mask(y) in self._up[self._mask(x)]

    def lt(self, x, y) -> bool:
        return self.leq(x, y) and not self.leq(y, x)

    def incomparable(self, x, y) -> bool:
        return not self.leq(x, y) and not self.leq(y, x)

    def pairs(self) -> set[tuple[int, int]]:
        return {(x, y) for x, ups in self._up.items() for y in ups}

    def strict_pairs(self) -> list[tuple[Regulation, Regulation]]:
        return [
            (self._reg(x), self._reg(y))
            for x in self._masks
            for y in sorted(self._up[x])
            if x not in self._up[y]
        ]

    def lower_contour(self, a) -> set[int]:
        a = self._mask(a)
        return {t for t in self._masks if a in self._up[t]}

    def classes(self) -> list[tuple[Regulation, ...]]:
        """Indifference classes, each sorted, ordered by smallest member."""
        out, placed = [], set()
        for m in self._masks:
            if m in placed:
                continue
            cls = sorted(y for y in self._up[m] if m in self._up[y])
            placed.update(cls)
            out.append(tuple(self._reg(c) for c in cls))
        return out


def _label(x) -> str:
    return x.label() if isinstance(x, Regulation) else str(x)


@dataclass(frozen=True)
class PlayerPreference:
    id: str
    preorder: Preorder
    threshold: object = None

    def __post_init__(self):
        if self.threshold is not None and self.threshold < 0:
            raise ValueError(f"signer threshold of {self.id!r} must be nonnegative")


@dataclass(frozen=True)
class PreferenceProfile:
    players: tuple[PlayerPreference, ...]

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))


@dataclass(frozen=True)
class TotalPreorderRanking:
    """Total preorder by score, best (smallest score) class first."""

    player: str
    classes: tuple[tuple[Regulation, ...], ...]
    scores: Mapping[int, object]
    maximal: tuple[Regulation, ...] = ()
    direction: str = TOWARD

    def leq(self, x, y) -> bool:
        return self.scores[y.mask] <= self.scores[x.mask]

    def lt(self, x, y) -> bool:
        return self.scores[y.mask] < self.scores[x.mask]

    def rank(self, x) -> int:
        for i, cls in enumerate(self.classes):
            if x in cls:
                return i
        raise KeyError(x)

    @property
    def domain(self) -> tuple[Regulation, ...]:
        return tuple(sorted(r for cls in self.classes for r in cls))


def maximal_elements(preference: Preorder) -> set[Regulation]:
    """Regulations with no strictly preferred alternative."""
    return {x for x in preference.domain if not any(preference.lt(x, y) for y in preference.domain)}


def _min_distance(g: GameOfGames, maximal, y, direction: str):
    if direction == TOWARD:
        return min(g.distance(m, y) for m in maximal)
    if direction == AWAY:
        return min(g.distance(y, m) for m in maximal)
    raise ValueError(f"unknown direction {direction!r}")


def distance_linear_order(
    g: GameOfGames, maximal: Iterable, player: str = "", direction: str = TOWARD, domain=None
) -> TotalPreorderRanking:
    """Rank regulations by their minimum distance to the maximal set (closer is better)."""
    maximal = tuple(sorted(g.node(m) for m in maximal))
    if not maximal:
        raise EmptyMaximalSet(f"player {player!r} has no maximal deals")
    nodes = tuple(sorted(g.node(n) for n in domain)) if domain is not None else g.nodes
    scores = {y.mask: _min_distance(g, maximal, y, direction) for y in nodes}
    classes: dict = {}
    for y in nodes:
        classes.setdefault(scores[y.mask], []).append(y)
    ordered = tuple(tuple(classes[s]) for s in sorted(classes))
    return TotalPreorderRanking(player, ordered, scores, maximal, direction)


def check_linear_extension(preference: Preorder, ranking: TotalPreorderRanking) -> bool:
    """Every strict preference x < y is strict in the ranking too."""
    return all(ranking.lt(x, y) for x, y in preference.strict_pairs())


def is_tau_lsc(preference: Preorder, g: GameOfGames, maximal=None, direction: str = TOWARD) -> bool:
    """Lower semicontinuity for the topology of unions of balls around the maximal deals.

    Open sets are the sublevel sets {y : min-distance(y) < r} (plus the empty
    set and the whole space), so a weak lower contour is closed exactly when
    its complement is empty or strictly closer than every contour member.
    """
    if maximal is None:
        maximal = maximal_elements(preference)
    ranking = distance_linear_order(g, maximal, direction=direction, domain=preference.domain)
    score = ranking.scores
    for a in preference.domain:
        lower = preference.lower_contour(a)
        outside = [score[y.mask] for y in preference.domain if y.mask not in lower]
        if not outside:
            continue
        inside = [score[m] for m in lower]
        if not max(outside) < min(inside):
            return False
    return True


def maximal_chains(preference: Preorder) -> list[list[tuple[Regulation, ...]]]:
    """All maximal chains, each a bottom-to-top list of indifference classes."""
    classes = preference.classes()
    n = len(classes)
    below = [[preference.lt(classes[i][0], classes[j][0]) for j in range(n)] for i in range(n)]
    covers = [
        [j for j in range(n) if below[i][j] and not any(below[i][k] and below[k][j] for k in range(n))]
        for i in range(n)
    ]
    minimal = [j for j in range(n) if not any(below[i][j] for i in range(n))]
    chains = []

    def walk(path):
        nxt = covers[path[-1]]
        if not nxt:
            chains.append([classes[i] for i in path])
            return
        for j in nxt:
            walk(path + [j])

    for i in minimal:
        walk([i])
    return chains


def is_compatible(preference: Preorder, g: GameOfGames, maximal=None, direction: str = TOWARD) -> bool:
    """Along every maximal chain, strictly preferred deals sit no farther from the chain's top.

    Distances to the top are taken to the nearest member of the chain's top
    indifference class. Indifferent pairs are not constrained.
    """
    if maximal is not None and set(g.node(m) for m in maximal) != maximal_elements(preference):
        raise ValueError("maximal set disagrees with the preference")
    for chain in maximal_chains(preference):
        top = chain[-1]
        members = [(level, x) for level, cls in enumerate(chain) for x in cls]
        dist = {x.mask: _min_distance(g, top, x, direction) for _, x in members}
        for la, a in members:
            for lb, b in members:
                if la < lb and dist[b.mask] > dist[a.mask]:
                    return False
    return True


@dataclass(frozen=True)
class ConsensusAnalysis:
    maximal: Mapping[str, tuple[Regulation, ...]]
    rankings: Mapping[str, TotalPreorderRanking]
    lsc: Mapping[str, bool]
    pareto: tuple[Regulation, ...]
    direction: str = TOWARD
    warnings: tuple[str, ...] = field(default=())


def analyze(g: GameOfGames, profile: PreferenceProfile, direction: str = TOWARD) -> ConsensusAnalysis:
    if not profile.players:
        raise ValueError("the preference profile has no players")
    maximal, rankings, lsc, notes = {}, {}, {}, []
    for pl in profile.players:
        if tuple(pl.preorder.domain) != tuple(g.nodes):
            raise ValueError(f"preference of {pl.id!r} is not defined over the graph's regulations")
        top = tuple(sorted(maximal_elements(pl.preorder)))
        if not top:
            raise EmptyMaximalSet(f"player {pl.id!r} has no maximal deals")
        maximal[pl.id] = top
        rankings[pl.id] = distance_linear_order(g, top, pl.id, direction)
        lsc[pl.id] = is_tau_lsc(pl.preorder, g, top, direction)
        if not lsc[pl.id]:
            msg = f"preference of {pl.id!r} is not lower semicontinuous; Pareto guarantees do not apply"
            notes.append(msg)
            warnings.warn(msg, LscWarning, stacklevel=3)
    vectors = {y.mask: tuple(rankings[p.id].scores[y.mask] for p in profile.players) for y in g.nodes}
    front = tuple(y for y in g.nodes if not any(_dominates(vectors[z.mask], vectors[y.mask]) for z in g.nodes))
    return ConsensusAnalysis(maximal, rankings, lsc, front, direction, tuple(notes))


def _dominates(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b)) and any(x < y for x, y in zip(a, b))


def pareto_deals(g: GameOfGames, profile: PreferenceProfile, direction: str = TOWARD) -> set[Regulation]:
    """Maximal elements of the intersection of all players' distance rankings."""
    return set(analyze(g, profile, direction).pareto)


def _worst_distance(g, analysis: ConsensusAnalysis, y):
    tops = [m for top in analysis.maximal.values() for m in top]
    return max(_min_distance(g, (m,), y, analysis.direction) for m in tops)


def closest_pareto_deal(g: GameOfGames, profile: PreferenceProfile, direction: str = TOWARD) -> Regulation:
    """Pareto deal minimizing the largest distance from any player's maximal deal."""
    analysis = analyze(g, profile, direction)
    return min(analysis.pareto, key=lambda y: (_worst_distance(g, analysis, y), y.mask))


@dataclass(frozen=True)
class ConsensusRadius:
    """Balls are open, so the radius is an infimum: every r > radius works, r = radius does not."""

    radius: object
    witnesses: tuple[Regulation, ...]
    candidates: tuple = ()


def ball_union(g: GameOfGames, centers: Iterable, r, direction: str = TOWARD) -> set[Regulation]:
    centers = tuple(centers)
    return {y for y in g.nodes if _min_distance(g, centers, y, direction) < r}


def min_consensus_radius(g: GameOfGames, profile: PreferenceProfile, direction: str = TOWARD) -> ConsensusRadius:
    tops = []
    for pl in profile.players:
        top = tuple(sorted(maximal_elements(pl.preorder)))
        if not top:
            raise EmptyMaximalSet(f"player {pl.id!r} has no maximal deals")
        tops.append(top)
    if not tops:
        raise ValueError("the preference profile has no players")
    worst = {y.mask: max(_min_distance(g, top, y, direction) for top in tops) for y in g.nodes}
    radius = min(worst.values())
    witnesses = tuple(y for y in g.nodes if worst[y.mask] == radius)
    candidates = sorted({_min_distance(g, top, y, direction) for top in tops for y in g.nodes})
    return ConsensusRadius(radius, witnesses, tuple(candidates))


def classify_signer(g: GameOfGames, r) -> str:
    if r < 0:
        raise ValueError("signer thresholds are nonnegative")
    if r == 0:
        return BOYCOTTER
    if r < step_value(g):
        return STUBBORN
    return ORDINARY


def signs(g: GameOfGames, deal, other, r) -> bool:
    """An r-signer of ``deal`` accepts ``other`` when moving there costs less than r."""
    return g.weight(deal, other) < r


def admits_path(path: LegalPath, r) -> bool:
    return all(step < r for step in path.steps)


def minimax_step(paths: Iterable[LegalPath]):
    """Smallest achievable largest single step over the given paths."""
    return min(max(p.steps, default=0) for p in paths)
