"""The game of games: every regulation of a law as a node of one complete,
weighted, directed graph.

Moving from node ``u`` to node ``v`` costs ``weight(u, v) = D(v || u)``
under the chosen variant. Edge weights are computed lazily and memoized.
"""

from __future__ import annotations

import heapq
import math
import threading
from dataclasses import dataclass
from itertools import permutations
from typing import Iterable, Mapping

from .divergence import DIRECTED, RESTRICT, VARIANTS, EXTENSIONS, premetric_variant
from .errors import LawMismatch, LawTooLarge, NotMonotone
from .lgame import LGame, Law, PunishmentModel, Regulation, Society, make_game

TIE_TOL = 1e-12


def _close(a, b) -> bool:
    if isinstance(a, float) or isinstance(b, float):
        return math.isclose(a, b, rel_tol=TIE_TOL, abs_tol=TIE_TOL)
    return a == b


@dataclass(frozen=True)
class LegalPath:
    nodes: tuple[Regulation, ...]
    length: object
    steps: tuple = ()

    def __post_init__(self):
        for a, b in zip(self.nodes, self.nodes[1:]):
            if a == b:
                raise ValueError("consecutive path nodes must differ")
        if self.steps:
            if len(self.steps) != len(self.nodes) - 1:
                raise ValueError("one step weight per traversed edge")
            if not _close(sum(self.steps), self.length) and abs(sum(self.steps) - self.length) > 1e-12:
                raise ValueError("path length must equal the sum of its steps")

    @property
    def incremental(self) -> bool:
        return all(
            a.issubset(b) and len(b) == len(a) + 1 for a, b in zip(self.nodes, self.nodes[1:])
        )

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(n.mask for n in self.nodes)

    def label(self, names: Mapping[int, str] | None = None) -> str:
        names = names or {}
        return " -> ".join(names.get(n.mask, n.label()) for n in self.nodes)


class GameOfGames:
    def __init__(
        self,
        law: Law,
        society: Society,
        punishment: PunishmentModel | None = None,
        variant: str = DIRECTED,
        nodes: Iterable[Regulation | int] | None = None,
        weight_overrides: Mapping[tuple[int, int], object] | None = None,
        extension: str = RESTRICT,
    ):
        if law.size > law.cap:
            raise LawTooLarge(f"{law.size} rules exceed the cap of {law.cap}")
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}")
        if extension not in EXTENSIONS:
            raise ValueError(f"unknown extension {extension!r}")
        self.law = law
        self.society = society
        self.punishment = punishment if punishment is not None else PunishmentModel(law)
        if self.punishment.law.rules != law.rules:
            raise LawMismatch("punishment model is defined over a different law")
        self.variant = variant
        self.extension = extension
        if nodes is None:
            masks = range(1 << law.size)
        else:
            masks = sorted({n.mask if isinstance(n, Regulation) else int(n) for n in nodes})
        self.nodes = tuple(Regulation(law, m) for m in masks)
        self._index = {n.mask: i for i, n in enumerate(self.nodes)}
        self.weight_overrides = dict(weight_overrides or {})
        for (u, v), w in self.weight_overrides.items():
            if u not in self._index or v not in self._index:
                raise ValueError("weight override refers to a regulation outside the graph")
            if w < 0:
                raise ValueError("weight overrides must be nonnegative")
        self._games: dict[int, LGame] = {}
        self._weights: dict[tuple[int, int], object] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, node) -> bool:
        try:
            self.node(node)
        except (KeyError, ValueError):
            return False
        return True

    def node(self, node) -> Regulation:
        """Resolve a Regulation, bitmask or member list to a graph node."""
        if isinstance(node, Regulation):
            if node.law.rules != self.law.rules:
                raise LawMismatch("regulation belongs to another law")
            mask = node.mask
        elif isinstance(node, int):
            mask = node
        else:
            mask = self.law.mask(node)
        i = self._index.get(mask)
        if i is None:
            raise KeyError(f"{self.law.label(mask)} is not a node of this graph")
        return self.nodes[i]

    def game(self, node) -> LGame:
        reg = self.node(node)
        game = self._games.get(reg.mask)
        if game is None:
            game = make_game(self.society, reg, self.punishment)
            with self._lock:
                game = self._games.setdefault(reg.mask, game)
        return game

    def weight(self, u, v):
        """Cost of moving from ``u`` to ``v``: D(v || u) under the graph's variant."""
        a, b = self.node(u).mask, self.node(v).mask
        if a == b:
            return 0
        key = (a, b)
        w = self._weights.get(key)
        if w is None:
            if key in self.weight_overrides:
                w = self.weight_overrides[key]
            else:
                w = premetric_variant(self.game(b), self.game(a), self.variant, self.extension)
            with self._lock:
                w = self._weights.setdefault(key, w)
        return w

    def distance(self, x, y):
        """Premetric d(x, y) = D(x || y): resistance to move from ``y`` to ``x``."""
        return self.weight(y, x)

    def edges(self):
        for u in self.nodes:
            for v in self.nodes:
                if u != v:
                    yield u, v, self.weight(u, v)

    def path(self, nodes: Iterable) -> LegalPath:
        regs = tuple(self.node(n) for n in nodes)
        steps = tuple(self.weight(a, b) for a, b in zip(regs, regs[1:]))
        return LegalPath(regs, sum(steps), steps)

    # shortest-path machinery; masks internally
    def _dijkstra(self, root: int, to_root: bool, excluded=frozenset(), banned=frozenset()):
        """Single-source distances from ``root`` (or to it when ``to_root``)."""
        dist = {root: 0}
        done = set()
        heap = [(0, root)]
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            for node in self.nodes:
                v = node.mask
                if v == u or v in excluded or v in done:
                    continue
                edge = (v, u) if to_root else (u, v)
                if edge in banned:
                    continue
                nd = d + self.weight(*edge)
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    heapq.heappush(heap, (nd, v))
        return dist

    def _shortest(self, source: int, target: int, excluded=frozenset(), banned=frozenset()):
        """Lexicographically smallest among minimal-length simple paths, as masks."""
        if source == target:
            return (source,)
        dist = self._dijkstra(target, True, excluded, banned)
        if source not in dist:
            return None
        path = [source]
        remaining = dist[source]
        while path[-1] != target:
            cur = path[-1]
            avoid = frozenset(excluded) | frozenset(path)
            d_rest = self._dijkstra(target, True, avoid, banned) if target not in avoid else {}
            for node in self.nodes:
                w = node.mask
                if w in avoid or w not in d_rest or (cur, w) in banned:
                    continue
                step = self.weight(cur, w)
                if _close(step + d_rest[w], remaining):
                    path.append(w)
                    remaining = d_rest[w]
                    break
            else:  # pragma: no cover - guarded by the distance invariant
                raise RuntimeError("no tight successor found")
        return tuple(path)


def build_graph(
    law: Law,
    society: Society,
    variant: str = DIRECTED,
    punishment: PunishmentModel | None = None,
    allowlist: Iterable | None = None,
    weight_overrides: Mapping | None = None,
    extension: str = RESTRICT,
) -> GameOfGames:
    return GameOfGames(law, society, punishment, variant, allowlist, weight_overrides, extension)


def shortest_path(g: GameOfGames, source, target) -> LegalPath:
    masks = g._shortest(g.node(source).mask, g.node(target).mask)
    return g.path(masks)


def k_shortest_paths(g: GameOfGames, source, target, k: int) -> list[LegalPath]:
    """Up to ``k`` loopless paths in nondecreasing length (Yen's algorithm)."""
    s, t = g.node(source).mask, g.node(target).mask
    if k <= 0:
        return []
    first = g._shortest(s, t)
    found = [g.path(first)]
    seen = {first}
    candidates: list = []
    while len(found) < k:
        last = found[-1].masks
        for i in range(len(last) - 1):
            root = last[: i + 1]
            banned = {p.masks[i : i + 2] for p in found if p.masks[: i + 1] == root and len(p.masks) > i + 1}
            spur = g._shortest(last[i], t, frozenset(root[:-1]), frozenset(banned))
            if spur is None:
                continue
            total = root[:-1] + spur
            if total not in seen:
                seen.add(total)
                p = g.path(total)
                heapq.heappush(candidates, (p.length, total, p))
        if not candidates:
            break
        found.append(heapq.heappop(candidates)[2])
    return found


def k_shortest_incremental_paths(g: GameOfGames, source, target, k: int) -> list[LegalPath]:
    """Rank every one-rule-per-step path from ``source`` up to ``target``.

    With m rules to add there are m! orderings; all are enumerated (those
    crossing a node missing from an allowlisted graph are dropped).
    """
    src, dst = g.node(source), g.node(target)
    if not src.issubset(dst):
        raise NotMonotone(f"{src.label()} is not contained in {dst.label()}")
    to_add = [r for r in dst.members if r not in src]
    paths = []
    for order in permutations(to_add):
        masks = [src.mask]
        for rule in order:
            masks.append(masks[-1] | g.law.bit(rule))
        if all(m in g._index for m in masks):
            paths.append(g.path(masks))
    paths.sort(key=lambda p: (p.length, p.masks))
    return paths[: max(k, 0)]


def path_distance(g: GameOfGames, u, v):
    """Length of the shortest path from ``u`` to ``v``."""
    a, b = g.node(u).mask, g.node(v).mask
    if a == b:
        return 0
    return g._dijkstra(a, False)[b]


def path_distances(g: GameOfGames) -> dict[tuple[int, int], object]:
    """All-pairs path distances keyed by mask pairs."""
    out = {}
    for u in g.nodes:
        for v, d in g._dijkstra(u.mask, False).items():
            out[u.mask, v] = d
    return out


def ball(g: GameOfGames, center, r) -> set[Regulation]:
    """Open ball {y : d(center, y) < r}."""
    if r < 0:
        raise ValueError("radius must be nonnegative")
    c = g.node(center)
    return {y for y in g.nodes if g.distance(c, y) < r}


def is_subgame(sub: LGame, sup: LGame) -> bool:
    """``sub`` is an l-subgame of ``sup``: it contains sup's rules and every
    titere rule of sub that sup also has is titere in sup."""
    if sub.law.rules != sup.law.rules:
        raise LawMismatch("l-games are defined under different laws")
    if not sup.regulation.issubset(sub.regulation):
        return False
    sup_titere = set(sup.titere_rules())
    return all(r in sup_titere for r in sub.titere_rules() if r in sup.regulation)


def step_value(g: GameOfGames):
    """Smallest positive weight over distinct ordered node pairs.

    Zero-weight pairs are skipped: in the directed variant dropping rules is
    free, and counting those pairs would pin every graph to a zero step.
    """
    best = None
    for _, _, w in g.edges():
        if w > 0 and (best is None or w < best):
            best = w
    if best is None:
        return math.inf if len(g) < 2 else 0
    return best


def is_r_step(g: GameOfGames, r) -> bool:
    if r < 0:
        raise ValueError("r must be nonnegative")
    return r == 0 or r <= step_value(g)


def to_dot(g: GameOfGames, names: Mapping[int, str] | None = None) -> str:
    names = names or {}
    lines = ["digraph game_of_games {"]
    for n in g.nodes:
        label = n.label()
        if n.mask in names:
            label = f"{names[n.mask]} {label}"
        lines.append(f'  n{n.mask} [label="{label}"];')
    for u, v, w in g.edges():
        lines.append(f"  n{u.mask} -> n{v.mask} [weight={float(w):.6f}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
