"""One-player coverage games.

When Disruptor owns nothing, the k agents choose k lassos freely and the
question becomes set cover over the maximal satisfiable objective sets.  When
Coverer owns nothing, Disruptor moves all tokens together, so it suffices to
find one lasso violating one objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .disruption import maximal, min_cover
from .game import GameGraph, Kind, LassoPath, Player, bits, popcount, reach, sccs, shortest_path, path_to


class NotOnePlayer(ValueError):
    pass


@dataclass(frozen=True)
class SatisfiableSets:
    sets: tuple[int, ...]
    witnesses: tuple[LassoPath, ...]


def _require_owner(graph: GameGraph, player: Player):
    if graph.owned(player.opponent):
        raise NotOnePlayer(f"every vertex must belong to {player.name.lower()}")


def _tour(succ: Sequence[int], start: int, stops: Sequence[int], within: int) -> list[int]:
    """Cycle from `start` through one vertex of each stop set, back to start."""
    seq = [start]
    for target in stops:
        if target >> seq[-1] & 1:
            continue
        seq += shortest_path(succ, seq[-1], target, within)[1:]
    if len(seq) == 1:
        return path_to(succ, start, 1 << start, within)[:-1]
    if seq[-1] == start:
        return seq[:-1]
    back = shortest_path(succ, seq[-1], 1 << start, within)
    return seq + back[1:-1]


def _lasso(succ: Sequence[int], start: int, comp: int, stops: Sequence[int]) -> LassoPath:
    """Stem to the first stop (or to comp), then a tour inside comp."""
    first = (stops[0] & comp) if stops else comp
    stem = shortest_path(succ, start, first)
    loop = _tour(succ, stem[-1], [s & comp for s in stops[1:]], comp)
    return LassoPath(tuple(stem[:-1]), tuple(loop))


def maximal_satisfiable_sets(graph: GameGraph, beta: Sequence[int], kind: Kind | str) -> SatisfiableSets:
    _require_owner(graph, Player.COVERER)
    kind = Kind(kind)
    succ, v0 = graph.succ, graph.initial
    live = reach(succ, 1 << v0)
    found: dict[int, LassoPath] = {}
    if kind is Kind.BUCHI:
        for comp, trivial in sccs(succ, live):
            if trivial:
                continue
            sigma = sum(1 << i for i, m in enumerate(beta) if m & comp)
            if sigma not in found:
                found[sigma] = _lasso(succ, v0, comp, [beta[i] for i in bits(sigma)])
    else:
        for sigma in sorted(range(1 << len(beta)), key=lambda s: (-popcount(s), s)):
            if any(sigma & f == sigma for f in found):
                continue
            avoid = 0
            for i in bits(sigma):
                avoid |= beta[i]
            comp = next((c for c, t in sccs(succ, live & ~avoid) if not t), 0)
            if comp:
                found[sigma] = _lasso(succ, v0, comp, [])
    keep = maximal(list(found))
    return SatisfiableSets(tuple(keep), tuple(found[s] for s in keep))


def coverage_one_player_coverer(graph: GameGraph, k: int, beta: Sequence[int], kind: Kind | str) -> bool:
    _require_owner(graph, Player.COVERER)
    full = (1 << len(beta)) - 1
    if not full:
        return True
    sets = maximal_satisfiable_sets(graph, beta, kind).sets
    best = min_cover(sets, full)
    return best is not None and best <= k


def disruption_one_player_disruptor(
    graph: GameGraph, k: int, beta: Sequence[int], kind: Kind | str
) -> tuple[bool, LassoPath | None]:
    """A lasso violating some objective; k plays no role since all tokens move together."""
    _require_owner(graph, Player.DISRUPTOR)
    kind = Kind(kind)
    succ, v0 = graph.succ, graph.initial
    live = reach(succ, 1 << v0)
    for alpha in beta:
        if kind is Kind.BUCHI:
            comp = next((c for c, t in sccs(succ, live & ~alpha) if not t), 0)
            if comp:
                return True, _lasso(succ, v0, comp, [])
        else:
            for comp, trivial in sccs(succ, live):
                if not trivial and comp & alpha:
                    return True, _lasso(succ, v0, comp, [alpha])
    return False, None


def coverage_one_player_disruptor(graph: GameGraph, k: int, beta: Sequence[int], kind: Kind | str) -> bool:
    return not disruption_one_player_disruptor(graph, k, beta, kind)[0]
