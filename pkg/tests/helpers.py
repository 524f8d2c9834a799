"""Independent brute-force oracles used by the tests.

None of these call the production solvers except where a test explicitly
composes them (the l-ary decomposability check builds on per-part winning
sets by design).
"""

from __future__ import annotations

import itertools
import random
from typing import Iterator, Sequence

from covgames.coverage import winning_coverage_set
from covgames.game import CoverageGame, GameGraph, Kind, Player, play_from, reach, sccs
from covgames.reductions import random_game
from covgames.solvers import iter_memoryless


def satisfies(inf: int, alpha: int, kind: Kind) -> bool:
    return bool(inf & alpha) if kind is Kind.BUCHI else not inf & alpha


def profile_winners(graph: GameGraph, alpha: int, player: Player, kind: Kind) -> int:
    """Vertices where `player` has a memoryless strategy beating every memoryless
    opponent strategy, by evaluating every profile's unique play."""
    mine = list(iter_memoryless(graph, player))
    theirs = list(iter_memoryless(graph, player.opponent))
    win = 0
    for v in range(len(graph.ids)):
        for f in mine:
            ok = True
            for h in theirs:
                inf = play_from({**f, **h}, v).inf()
                if not satisfies(inf, alpha, kind):
                    ok = False
                    break
            if ok:
                win |= 1 << v
                break
    return win


def all_buchi_oracle(graph: GameGraph, targets: Sequence[int], player: Player) -> int:
    """Generalized Buchi region: the opponent has memoryless counter-strategies,
    so the player wins from v iff every memoryless opponent strategy leaves a
    reachable cycle meeting every target."""
    win = 0
    opp = player.opponent
    for v in range(len(graph.ids)):
        ok = True
        for h in iter_memoryless(graph, opp):
            succ = list(graph.succ)
            for u, w in h.items():
                succ[u] = 1 << w
            live = reach(succ, 1 << v)
            if not any(
                not trivial and all(t & comp for t in targets) for comp, trivial in sccs(succ, live)
            ):
                ok = False
                break
        if ok:
            win |= 1 << v
    return win


def wins_against_all(graph: GameGraph, choice: dict[int, int], region: int, alpha: int, kind: Kind) -> bool:
    """Every play from `region` under the fixed protagonist choice satisfies the
    single objective (opponent free): checked by reachable cycles."""
    succ = list(graph.succ)
    for u, w in choice.items():
        succ[u] = 1 << w
    live = reach(succ, region)
    if kind is Kind.BUCHI:
        return not any(not t for _, t in sccs(succ, live & ~alpha))
    return not any(not t and c & alpha for c, t in sccs(succ, live))


def superset_holds(inf: int, families: Sequence[Sequence[int]]) -> bool:
    return any(all(inf & s for s in fam) for fam in families)


def set_partitions(items: Sequence[int], l: int) -> Iterator[list[list[int]]]:
    """Partitions of `items` into exactly l nonempty blocks."""
    items = list(items)
    if l == 0:
        if not items:
            yield []
        return
    if len(items) < l:
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest, l - 1):
        yield [[first]] + part
    for part in set_partitions(rest, l):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def compositions(k: int, l: int) -> Iterator[tuple[int, ...]]:
    for cut in itertools.combinations(range(1, k), l - 1):
        bounds = (0,) + cut + (k,)
        yield tuple(b - a for a, b in zip(bounds, bounds[1:]))


def decomposable_l(game: CoverageGame, v: str | int, l: int) -> bool:
    """Direct (k,l)-decomposability: split objectives and agents into l groups."""
    g = game.graph
    v = g.vertex(v)
    idx = list(range(len(game.objectives)))
    for blocks in set_partitions(idx, l):
        for counts in compositions(game.agents, l):
            if all(
                winning_coverage_set(g, kk, [game.masks[i] for i in block], game.kind) >> v & 1
                for kk, block in zip(counts, blocks)
            ):
                return True
    return False


def corpus(seed: int, count: int, max_v: int = 8, max_beta: int = 4, max_k: int = 4,
           kind: Kind | str | None = None) -> list[CoverageGame]:
    """Random games with mixed ownership, alternating kinds unless fixed."""
    rng = random.Random(seed)
    out = []
    for i in range(count):
        kd = Kind(kind) if kind else (Kind.BUCHI, Kind.COBUCHI)[i % 2]
        out.append(random_game(rng, rng.randint(1, max_v), rng.randint(1, max_beta), rng.randint(1, max_k), kd))
    return out


def one_play_satisfied(game: CoverageGame, f1: dict[int, int], f2: dict[int, int]) -> int:
    lasso = play_from({**f1, **f2}, game.graph.initial)
    return sum(1 << i for i, m in enumerate(game.masks) if satisfies(lasso.inf(), m, game.kind))

