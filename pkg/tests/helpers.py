"""Random instances and brute-force oracles shared by the tests.

The oracles work on frozensets of rule names and plain dicts so they share no
code path with the bitmask implementation they check.
"""

import itertools
import math
from fractions import Fraction

from lexmetric.consensus import Preorder, distance_linear_order
from lexmetric.lgame import Law, ProbabilityModel, PunishmentModel, Society, LGame


def powerset(items):
    items = list(items)
    return [frozenset(c) for r in range(len(items) + 1) for c in itertools.combinations(items, r)]


def random_distribution(rng, events, zero_prob=0.3):
    weights = [0.0 if rng.random() < zero_prob else rng.random() for _ in events]
    if not any(weights):
        weights[rng.randrange(len(weights))] = 1.0
    total = sum(weights)
    return {e: w / total for e, w in zip(events, weights)}


def random_fraction_distribution(rng, events, zero_prob=0.3, denom=12):
    weights = [0 if rng.random() < zero_prob else rng.randint(1, denom) for _ in events]
    if not any(weights):
        weights[rng.randrange(len(weights))] = 1
    total = sum(weights)
    return {e: Fraction(w, total) for e, w in zip(events, weights)}


def random_law(rng, max_rules=4, min_rules=1):
    n = rng.randint(min_rules, max_rules)
    rules = tuple(f"r{i}" for i in range(n))
    return Law(rules, tuple(round(rng.uniform(0, 200), 3) for _ in rules))


def random_exact_law(rng, n):
    rules = tuple(f"r{i}" for i in range(n))
    return Law(rules, tuple(Fraction(rng.randint(0, 200)) for _ in rules))


def random_graph(rng, n_rules, variant="directed", extension="restrict", exact=False, allow=None):
    from lexmetric.gamegraph import build_graph

    law = random_exact_law(rng, n_rules) if exact else random_law(rng, n_rules, n_rules)
    society = random_society(rng, law, exact=exact)
    return build_graph(law, society, variant, allowlist=allow, extension=extension)


def random_society(rng, law, zero_prob=0.3, exact=False):
    draw = random_fraction_distribution if exact else random_distribution
    aggregate = {}
    for reg in law.regulations():
        events = reg.event_space().events
        aggregate[reg.mask] = ProbabilityModel(reg, draw(rng, events, zero_prob))
    return Society("random", aggregate=aggregate)


def random_game(rng, law, reg=None, zero_prob=0.3):
    if reg is None:
        reg = law.regulation(rng.randrange(1 << law.size))
    events = reg.event_space().events
    return LGame(reg, ProbabilityModel(reg, random_distribution(rng, events, zero_prob)), PunishmentModel(law))


ACCEPTANCE = {}


def record(n, ok, detail):
    """Remember and print one acceptance line; the caller asserts ``ok``."""
    line = f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[n] = line
    print(line)
    return ok


def lsc_preference(rng, g):
    """Random total preorder whose weak lower contours are closed in the
    topology of unions of balls around its own maximal deals."""
    M = set(rng.sample(list(g.nodes), rng.randint(1, min(3, len(g)))))
    while True:
        rk = distance_linear_order(g, M)
        if set(rk.classes[0]) == M:
            break
        M = set(rk.classes[0])
    # the maximal deals form the top band; farther levels merge into random bands
    levels = sorted(set(rk.scores.values()))
    band_of, band = {levels[0]: 0}, 0
    for i, lv in enumerate(levels[1:]):
        if i == 0 or rng.random() < 0.5:
            band += 1
        band_of[lv] = band
    return Preorder.from_scores(g.nodes, {y.mask: band_of[rk.scores[y.mask]] for y in g.nodes})


# --- oracles -------------------------------------------------------------


def table_of(game):
    """{frozenset(rule names): probability} over the full event space."""
    law = game.law
    members = game.regulation.members
    return {x: game.probability.p(law.mask(x)) for x in powerset(members)}


def oracle_g(rule_punishments, event, regulation):
    # additive punishment of ``event`` under ``regulation``; rules outside carry 0
    return sum(rule_punishments[r] for r in event if r in regulation)


def oracle_premetric(target, source, extension="restrict"):
    pun = dict(zip(target.law.rules, target.law.punishments))
    t_reg = frozenset(target.regulation.members)
    s_reg = frozenset(source.regulation.members)
    total = 0
    for x, p in table_of(target).items():
        g1 = oracle_g(pun, x, t_reg)
        if extension == "restrict":
            g2 = oracle_g(pun, x, s_reg)
        else:
            g2 = oracle_g(pun, x, s_reg) if x <= s_reg else 0
        total += p * abs(g1 - g2)
    return total


def oracle_severity(game):
    pun = dict(zip(game.law.rules, game.law.punishments))
    reg = frozenset(game.regulation.members)
    return sum(p * oracle_g(pun, x, reg) for x, p in table_of(game).items())


def oracle_entropy(probs):
    return -sum(p * math.log(p) for p in probs if p > 0)


def oracle_kl(p, q):
    return sum(pi * math.log(pi / qi) for pi, qi in zip(p, q) if pi > 0)


def all_simple_path_min(weight, nodes, s, t):
    """Minimum over all simple paths, by depth-first search.

    Branches are cut only once their partial cost reaches the best complete
    path found, which is safe because weights are nonnegative.
    """
    if s == t:
        return 0
    best = [math.inf]

    def dfs(u, cost, seen):
        if cost >= best[0]:
            return
        if u == t:
            best[0] = cost
            return
        # cheapest edges first so the bound tightens early
        for v in sorted((v for v in nodes if v not in seen), key=lambda v: weight(u, v)):
            seen.add(v)
            dfs(v, cost + weight(u, v), seen)
            seen.discard(v)

    dfs(s, 0, {s})
    return best[0]


def all_simple_paths(nodes, s, t):
    if s == t:
        yield (s,)
        return
    others = [n for n in nodes if n not in (s, t)]
    for r in range(len(others) + 1):
        for mid in itertools.permutations(others, r):
            yield (s,) + mid + (t,)


def floyd_warshall(weight, nodes):
    d = {(u, v): (0 if u == v else weight(u, v)) for u in nodes for v in nodes}
    for k in nodes:
        for i in nodes:
            for j in nodes:
                if d[i, k] + d[k, j] < d[i, j]:
                    d[i, j] = d[i, k] + d[k, j]
    return d


def pareto_oracle(deal, nodes, rankings):
    """Pairwise Pareto definition against the players' distance rankings:
    whenever some player strictly prefers G to the deal, another strictly prefers the deal."""
    for other in nodes:
        if other == deal:
            continue
        gains = [rk.lt(deal, other) for rk in rankings]
        losses = [rk.lt(other, deal) for rk in rankings]
        if any(gains) and not any(losses):
            return False
    return True


def fr(a, b):
    return Fraction(a, b)
