"""Disruption problem: can Disruptor fix one strategy under which no k plays
jointly cover every objective?

Objective subsets are bitsets over objective indices.  Three routes:

* Buchi: enumerate memoryless Disruptor strategies and inspect the maximal
  sets a single Coverer play can satisfy against each.
* co-Buchi: search symbolic fairness pairs (U, g); `solve_disruption_cobuchi`
  uses an SCC-structured search, `solve_disruption_cobuchi_literal` the plain
  enumeration of pairs and candidate inf-sets (small graphs only).
* any kind, small objective sets: iterate candidate families of satisfiable
  sets and solve the matching two-player game (`solve_disruption_fixed_beta`).
"""

from __future__ import annotations

import itertools
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Sequence

from .game import CoverageGame, GameGraph, Kind, Player, bits, has_cycle, popcount, reach, reachable, sccs
from .solvers import (
    MemorylessStrategy,
    attractor,
    solve_all_buchi,
    solve_exists_cobuchi,
    superset_to_all_buchi,
)

DISRUPTOR = Player.DISRUPTOR
DEFAULT_STRATEGY_BUDGET = 1 << 20
DEFAULT_PAIR_BUDGET = 1 << 24


class BudgetExceeded(RuntimeError):
    pass


class IncompleteStrategy(ValueError):
    pass


@dataclass(frozen=True)
class FairnessPair:
    region: int
    g: dict[int, int]

    def to_json(self, graph: GameGraph) -> dict:
        return {
            "U": graph.names(self.region),
            "g": {graph.ids[v]: graph.names(m) for v, m in sorted(self.g.items())},
        }


# -- antichains and covers --------------------------------------------------

def maximal(sets: Sequence[int]) -> list[int]:
    """Antichain of the inclusion-maximal members, ascending, no duplicates."""
    uniq = sorted(set(sets), key=lambda s: (-popcount(s), s))
    out: list[int] = []
    for s in uniq:
        if not any(s & t == s for t in out):
            out.append(s)
    return sorted(out)


def min_cover(sets: Sequence[int], full: int, limit: int | None = None) -> int | None:
    """Fewest members whose union is `full`, or None (also None past `limit`)."""
    if full == 0:
        return 0
    sets = maximal([s & full for s in sets])
    seen = {0}
    layer = {0}
    steps = 0
    while layer and (limit is None or steps < limit):
        steps += 1
        nxt = set()
        for m in layer:
            for s in sets:
                u = m | s
                if u == full:
                    return steps
                if u not in seen:
                    seen.add(u)
                    nxt.add(u)
        layer = nxt
    return None


def covers_within(sets: Sequence[int], full: int, k: int) -> bool:
    return min_cover(sets, full, k) is not None


def is_k_wise_intersecting(complements: Sequence[int], k: int) -> bool:
    """Every k members, repetition allowed, share an element."""
    items = sorted(set(complements))
    if any(c == 0 for c in items):
        return False
    if not items:
        return True

    def dfs(start: int, acc: int, depth: int) -> bool:
        if acc == 0:
            return False
        if depth == k:
            return True
        for i in range(start, len(items)):
            if not dfs(i + 1, acc & items[i], depth + 1):
                return False
        return True

    return dfs(0, -1, 0)


# -- Delta sets and memoryless Disruptor strategies -------------------------

def _strategy_succ(graph: GameGraph, f2) -> list[int]:
    choice = f2.choice if isinstance(f2, MemorylessStrategy) else f2
    succ = list(graph.succ)
    for v in bits(graph.owned(DISRUPTOR)):
        w = choice.get(v)
        if w is None or not graph.succ[v] >> w & 1:
            raise IncompleteStrategy(f"no valid move at {graph.ids[v]}")
        succ[v] = 1 << w
    return succ


def _satisfied_sets(succ: Sequence[int], start: int, masks: Sequence[int], kind: Kind) -> list[int]:
    live = reach(succ, 1 << start)
    if kind is Kind.BUCHI:
        out = []
        for comp, trivial in sccs(succ, live):
            if not trivial:
                out.append(sum(1 << i for i, m in enumerate(masks) if m & comp))
        return maximal(out)
    found: list[int] = []
    for sigma in sorted(range(1 << len(masks)), key=lambda s: (-popcount(s), s)):
        if any(sigma & f == sigma for f in found):
            continue
        avoid = 0
        for i in bits(sigma):
            avoid |= masks[i]
        if has_cycle(succ, live & ~avoid):
            found.append(sigma)
    return maximal(found)


def delta_sets(graph: GameGraph, f2, beta: Sequence[int], kind: Kind | str) -> list[int]:
    """Maximal objective sets one Coverer play satisfies against f2."""
    return _satisfied_sets(_strategy_succ(graph, f2), graph.initial, list(beta), Kind(kind))


def is_disrupting_memoryless(game: CoverageGame, f2) -> bool:
    if not game.objectives:
        return False
    delta = delta_sets(game.graph, f2, game.masks, game.kind)
    return not covers_within(delta, game.all_objectives, game.agents)


def _slots(graph: GameGraph) -> list[tuple[int, list[int]]]:
    live = reachable(graph, graph.initial)
    return [(v, list(bits(graph.succ[v]))) for v in bits(graph.owned(DISRUPTOR) & live)]


def _decode(index: int, slots: Sequence[tuple[int, list[int]]]) -> dict[int, int]:
    # mixed radix, last slot fastest, matching itertools.product order
    choice = {}
    for v, opts in reversed(slots):
        index, r = divmod(index, len(opts))
        choice[v] = opts[r]
    return choice


def _full_strategy(graph: GameGraph, partial: dict[int, int]) -> MemorylessStrategy:
    choice = dict(partial)
    for v in bits(graph.owned(DISRUPTOR)):
        choice.setdefault(v, (graph.succ[v] & -graph.succ[v]).bit_length() - 1)
    return MemorylessStrategy(DISRUPTOR, dict(sorted(choice.items())))


def _scan(game: CoverageGame, slots, lo: int, hi: int) -> int | None:
    for i in range(lo, hi):
        if is_disrupting_memoryless(game, _full_strategy(game.graph, _decode(i, slots))):
            return i
    return None


def _scan_job(args) -> int | None:
    return _scan(*args)


def count_disruptor_strategies(game: CoverageGame) -> int:
    total = 1
    for _, opts in _slots(game.graph):
        total *= len(opts)
    return total


def solve_disruption_buchi(
    game: CoverageGame, budget: int = DEFAULT_STRATEGY_BUDGET, jobs: int = 1, stats: dict | None = None
) -> tuple[bool, MemorylessStrategy | None]:
    """First disrupting memoryless strategy in canonical order, if any.

    Only Disruptor vertices reachable from the initial vertex are enumerated;
    the rest get their lowest successor.
    """
    if game.kind is not Kind.BUCHI:
        raise ValueError("Buchi game expected")
    if not game.objectives:
        return False, None
    slots = _slots(game.graph)
    total = count_disruptor_strategies(game)
    if total > budget:
        raise BudgetExceeded(f"{total} memoryless strategies exceed the budget {budget}")
    if jobs <= 1 or total < 64:
        hit = _scan(game, slots, 0, total)
    else:
        step = -(-total // (jobs * 4))
        chunks = [(game, slots, lo, min(total, lo + step)) for lo in range(0, total, step)]
        hit = None
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for found in pool.map(_scan_job, chunks):
                if found is not None:
                    hit = found
                    break
    if stats is not None:
        stats["candidates"] = total if hit is None else hit + 1
    if hit is None:
        return False, None
    return True, _full_strategy(game.graph, _decode(hit, slots))


# -- fairness pairs ---------------------------------------------------------

def _nonempty_submasks(mask: int) -> list[int]:
    out = []
    sub = mask
    while sub:
        out.append(sub)
        sub = (sub - 1) & mask
    return sorted(out)


def _fair_succ(graph: GameGraph, g: dict[int, int], within: int) -> list[int]:
    succ = [0] * len(graph.ids)
    for v in bits(within):
        succ[v] = (g[v] if v in g else graph.succ[v]) & within
    return succ


def _strongly_connected_cycle(succ: Sequence[int], s: int) -> bool:
    if not s:
        return False
    comps = sccs(succ, s)
    return len(comps) == 1 and not comps[0][1]


def enumerate_fairness_pairs(graph: GameGraph) -> Iterator[FairnessPair]:
    """Every valid (U, g): Coverer vertices of U keep all successors in U,
    g picks nonempty successor sets inside U, and Disruptor forces U."""
    n = len(graph.ids)
    mine = graph.owned(Player.COVERER)
    theirs = graph.owned(DISRUPTOR)
    for u in range(1, 1 << n):
        if any(graph.succ[v] & ~u for v in bits(u & mine)):
            continue
        opts = []
        ok = True
        for v in bits(u & theirs):
            inside = graph.succ[v] & u
            if not inside:
                ok = False
                break
            opts.append((v, _nonempty_submasks(inside)))
        if not ok or not attractor(graph, DISRUPTOR, u) >> graph.initial & 1:
            continue
        verts = [v for v, _ in opts]
        for pick in itertools.product(*(o for _, o in opts)):
            yield FairnessPair(u, dict(zip(verts, pick)))


def fair_candidates(pair: FairnessPair, graph: GameGraph) -> Iterator[int]:
    """Candidate inf-sets S within U, by subset enumeration."""
    u, g = pair.region, pair.g
    succ = _fair_succ(graph, g, u)
    theirs = graph.owned(DISRUPTOR)
    for s in _nonempty_submasks(u):
        if s & ~u:
            continue
        if any(g[v] & ~s for v in bits(s & theirs)):
            continue
        if not _strongly_connected_cycle([m & s for m in succ], s):
            continue
        entered = 0
        for v in bits(s & theirs):
            entered |= g[v]
        for v in bits(s & ~theirs):
            entered |= graph.succ[v]
        if s & ~entered:
            continue
        yield s


def _cobuchi_sat(s: int, masks: Sequence[int]) -> int:
    return sum(1 << i for i, m in enumerate(masks) if not m & s)


def fairness_pair_is_disrupting(pair: FairnessPair, game: CoverageGame) -> bool:
    if not game.objectives:
        return False
    sats = [_cobuchi_sat(s, game.masks) for s in fair_candidates(pair, game.graph)]
    return not covers_within(sats, game.all_objectives, game.agents)


def solve_disruption_cobuchi_literal(game: CoverageGame) -> tuple[bool, FairnessPair | None]:
    """Plain enumeration over every pair; exponential in |V| twice over."""
    if not game.objectives:
        return False, None
    for pair in enumerate_fairness_pairs(game.graph):
        if fairness_pair_is_disrupting(pair, game):
            return True, pair
    return False, None


class _Budget:
    def __init__(self, cap: int):
        self.cap = cap
        self.used = 0

    def spend(self, n: int = 1):
        self.used += n
        if self.used > self.cap:
            raise BudgetExceeded(f"fairness search exceeded {self.cap} work units")


def _find_candidate(succ: Sequence[int], g: dict[int, int], theirs: int, x: int, budget: _Budget) -> bool:
    """Some nonempty g-closed S within x that is strongly connected with a cycle."""
    budget.spend()
    while True:
        bad = 0
        for v in bits(x & theirs):
            if g[v] & ~x:
                bad |= 1 << v
        if not bad:
            break
        x &= ~bad
    if not x:
        return False
    for comp, trivial in sccs([m & x for m in succ], x):
        if trivial:
            continue
        inner_bad = 0
        for v in bits(comp & theirs):
            if g[v] & ~comp:
                inner_bad |= 1 << v
        if not inner_bad:
            return True
        if _find_candidate(succ, g, theirs, comp & ~inner_bad, budget):
            return True
    return False


def _maximal_achievable(
    comp: int, succ: Sequence[int], g: dict[int, int], theirs: int, masks: Sequence[int], budget: _Budget
) -> list[int]:
    """Maximal sigma such that a candidate inf-set inside comp avoids every objective in sigma."""
    free = sum(1 << i for i, m in enumerate(masks) if not m & comp)
    rest = [i for i in range(len(masks)) if not free >> i & 1]
    memo: dict[int, bool] = {}

    def ok(sigma: int) -> bool:
        if sigma not in memo:
            avoid = 0
            for i in bits(sigma):
                avoid |= masks[i]
            memo[sigma] = _find_candidate(succ, g, theirs, comp & ~avoid, budget)
        return memo[sigma]

    found: list[int] = []

    def grow(sigma: int, start: int):
        extended = False
        for j in range(start, len(rest)):
            nxt = sigma | 1 << rest[j]
            if ok(nxt):
                extended = True
                grow(nxt, j + 1)
        if not extended:
            found.append(sigma | free)

    if not ok(0):
        return []
    grow(0, 0)
    return maximal(found)


def solve_disruption_cobuchi(
    game: CoverageGame, budget: int = DEFAULT_PAIR_BUDGET, stats: dict | None = None
) -> tuple[bool, FairnessPair | None]:
    """Fairness-pair search organized by the SCCs of the fair graph.

    For each total choice g of nonempty successor sets, the inf-set
    candidates of any valid U are exactly those inside the non-trivial SCCs
    of the g-graph that U contains, and for a set A of such SCCs the largest
    valid U is the set of vertices all of whose reachable SCCs lie in A.
    Only the part reachable from the initial vertex is searched.
    """
    if game.kind is not Kind.COBUCHI:
        raise ValueError("co-Buchi game expected")
    if not game.objectives:
        return False, None
    graph = game.graph
    live = reachable(graph, graph.initial)
    theirs = graph.owned(DISRUPTOR)
    full = game.all_objectives
    k = game.agents
    work = _Budget(budget)
    cache: dict[tuple, list[int]] = {}
    slots = [(v, _nonempty_submasks(graph.succ[v])) for v in bits(theirs & live)]
    verts = [v for v, _ in slots]

    for pick in itertools.product(*(o for _, o in slots)):
        work.spend()
        g = dict(zip(verts, pick))
        succ = _fair_succ(graph, g, live)
        comps = [c for c, trivial in sccs(succ, live) if not trivial]
        fams = []
        for c in comps:
            key = (c, tuple(g[v] for v in bits(c & theirs)))
            if key not in cache:
                cache[key] = _maximal_achievable(c, succ, g, theirs, game.masks, work)
            fams.append(cache[key])
        # vertices reaching each SCC, for computing U_A
        reaches = [0] * len(comps)
        pred = [0] * len(graph.ids)
        for v in bits(live):
            for w in bits(succ[v]):
                pred[w] |= 1 << v
        for i, c in enumerate(comps):
            reaches[i] = reach(pred, c, live)
        hit = _best_region(comps, fams, reaches, live, full, k, graph, work)
        if stats is not None:
            stats["candidates"] = work.used
        if hit is not None:
            return True, FairnessPair(hit, {v: g[v] for v in bits(hit & theirs)})
    return False, None


def _best_region(comps, fams, reaches, live, full, k, graph, work) -> int | None:
    """First maximal k-union-free SCC selection whose region Disruptor forces."""
    n = len(comps)

    def region(chosen: int) -> int:
        u = live
        for i in range(n):
            if not chosen >> i & 1:
                u &= ~reaches[i]
        return u

    def free(chosen: int, extra: int) -> bool:
        sets = []
        for i in bits(chosen | 1 << extra if extra >= 0 else chosen):
            sets.extend(fams[i])
        return not covers_within(sets, full, k)

    def dfs(i: int, chosen: int) -> int | None:
        work.spend()
        if i == n:
            for j in range(n):
                if not chosen >> j & 1 and free(chosen, j):
                    return None
            u = region(chosen)
            if u and attractor(graph, DISRUPTOR, u) >> graph.initial & 1:
                return u
            return None
        if free(chosen, i):
            got = dfs(i + 1, chosen | 1 << i)
            if got is not None:
                return got
        return dfs(i + 1, chosen)

    return dfs(0, 0)


# -- fixed objective sets ---------------------------------------------------

def _antichains(universe: Sequence[int]) -> Iterator[list[int]]:
    """Nonempty antichains over `universe`, members in ascending order."""
    items = sorted(universe)

    def rec(i: int, chosen: list[int]):
        if i == len(items):
            if chosen:
                yield list(chosen)
            return
        s = items[i]
        if all(s & c != s and s & c != c for c in chosen):
            chosen.append(s)
            yield from rec(i + 1, chosen)
            chosen.pop()
        yield from rec(i + 1, chosen)

    yield from rec(0, [])


def _drop_supersets(targets: Sequence[int]) -> list[int]:
    out: list[int] = []
    for t in sorted(set(targets), key=lambda m: (popcount(m), m)):
        if not any(o & t == o for o in out):
            out.append(t)
    return out


def solve_disruption_fixed_beta(game: CoverageGame) -> bool:
    """Try each family of satisfiable sets that k plays cannot combine into
    every objective, and ask whether Disruptor confines Coverer to it."""
    if not game.objectives:
        return False
    graph, masks, full, k = game.graph, game.masks, game.all_objectives, game.agents
    v0 = graph.initial
    universe = [s for s in range(1 << len(masks)) if s != full]
    for delta in _antichains(universe):
        if covers_within(delta, full, k):
            continue
        missing = [[masks[i] for i in bits(full & ~d)] for d in delta]
        if game.kind is Kind.BUCHI:
            fams = []
            for group in missing:
                u = 0
                for m in group:
                    u |= m
                fams.append(u)
            win = solve_exists_cobuchi(graph, fams, DISRUPTOR)[0]
        else:
            targets = _drop_supersets(superset_to_all_buchi(missing))
            win = solve_all_buchi(graph, targets, DISRUPTOR)[0]
        if win >> v0 & 1:
            return True
    return False


def solve_disruption(game: CoverageGame, budget: int | None = None, jobs: int = 1, stats: dict | None = None):
    if game.kind is Kind.BUCHI:
        return solve_disruption_buchi(game, budget or DEFAULT_STRATEGY_BUDGET, jobs, stats)
    return solve_disruption_cobuchi(game, budget or DEFAULT_PAIR_BUDGET, stats)


def witness_to_json(witness, graph: GameGraph):
    if witness is None:
        return None
    return witness.to_json(graph)
