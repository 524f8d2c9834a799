"""Two-player solvers: attractors, Buchi, co-Buchi and their conjunctive and
disjunctive generalizations.

Every solver takes an optional `arena` bitset; the arena must be total for the
moves it contains (every vertex keeps a successor inside).  Ties between
successors are always broken towards the lowest vertex index.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from typing import Iterator, Sequence

from .game import GameGraph, Player, bits, lowest


class DegenerateSuperset(UserWarning):
    """A superset objective whose only family was empty."""


@dataclass(frozen=True)
class MemorylessStrategy:
    owner: Player
    choice: dict[int, int]

    def __call__(self, v: int) -> int:
        return self.choice[v]

    def to_json(self, graph: GameGraph) -> dict[str, str]:
        return {graph.ids[v]: graph.ids[w] for v, w in sorted(self.choice.items())}

    @classmethod
    def from_json(cls, data: dict, graph: GameGraph, owner: Player) -> "MemorylessStrategy":
        choice = {}
        for a, b in data.items():
            v, w = graph.vertex(a), graph.vertex(b)
            if graph.owners[v] != owner or not graph.succ[v] >> w & 1:
                raise ValueError(f"bad strategy entry {a}->{b}")
            choice[v] = w
        return cls(owner, choice)


@dataclass(frozen=True)
class WinningCage:
    cage: int
    witnesses: tuple[MemorylessStrategy, ...]


@dataclass(frozen=True)
class FairnessRequirement:
    g: dict[int, int]


# -- attractors -------------------------------------------------------------

def attractor_with_strategy(
    graph: GameGraph, player: Player, target: int, arena: int | None = None
) -> tuple[int, dict[int, int]]:
    """Attractor plus a rank-decreasing move for each attracted player vertex."""
    arena = graph.full if arena is None else arena
    mine = graph.owned(player)
    attr = target & arena
    moves: dict[int, int] = {}
    frontier = attr
    succ, pred = graph.succ, graph.pred
    while frontier:
        cand = 0
        for v in bits(frontier):
            cand |= pred[v]
        cand &= arena & ~attr
        new = 0
        for v in bits(cand):
            s = succ[v] & arena
            if mine >> v & 1:
                moves[v] = lowest(s & attr)
                new |= 1 << v
            elif not s & ~attr:
                new |= 1 << v
        attr |= new
        frontier = new
    return attr, moves


def attractor(graph: GameGraph, player: Player, target: int, arena: int | None = None) -> int:
    return attractor_with_strategy(graph, player, target, arena)[0]


def _complete(graph: GameGraph, player: Player, moves: dict[int, int], arena: int) -> MemorylessStrategy:
    """Fill in lowest-index moves for the player's vertices that have none."""
    choice = dict(moves)
    for v in bits(graph.owned(player) & arena):
        if v not in choice:
            choice[v] = lowest(graph.succ[v] & arena)
    return MemorylessStrategy(player, dict(sorted(choice.items())))


@dataclass(frozen=True)
class _Regions:
    """Outcome of a conjunctive Buchi solve for `player` inside `arena`.

    `win` is the player's winning region, `witnesses[i]` reaches target i
    inside `win`, and `counter` is a memoryless strategy for the opponent that
    wins the dual (some target visited finitely often) outside `win`.
    """

    win: int
    witnesses: tuple[dict[int, int], ...]
    counter: dict[int, int]


def _conjunctive_buchi(graph: GameGraph, targets: Sequence[int], player: Player, arena: int) -> _Regions:
    opp = player.opponent
    cur = arena
    counter: dict[int, int] = {}
    theirs = graph.owned(opp)
    changed = True
    while changed and cur:
        changed = False
        for t in targets:
            reach, _ = attractor_with_strategy(graph, player, t & cur, cur)
            trap = cur & ~reach
            if not trap:
                continue
            # the trap avoids t and the opponent can stay inside it
            lost, moves = attractor_with_strategy(graph, opp, trap, cur)
            counter.update(moves)
            for v in bits(trap & theirs):
                counter[v] = lowest(graph.succ[v] & trap)
            cur &= ~lost
            changed = True
            break
    witnesses = []
    mine = graph.owned(player)
    for t in targets:
        _, moves = attractor_with_strategy(graph, player, t & cur, cur)
        for v in bits(t & cur & mine):
            moves[v] = lowest(graph.succ[v] & cur)
        witnesses.append(moves)
    return _Regions(cur, tuple(witnesses), counter)


# -- public solvers ---------------------------------------------------------

def solve_buchi(
    graph: GameGraph, alpha: int, protagonist: Player, arena: int | None = None
) -> tuple[int, MemorylessStrategy]:
    arena = graph.full if arena is None else arena
    r = _conjunctive_buchi(graph, [alpha], protagonist, arena)
    return r.win, _complete(graph, protagonist, r.witnesses[0], arena)


def solve_cobuchi(
    graph: GameGraph, alpha: int, protagonist: Player, arena: int | None = None
) -> tuple[int, MemorylessStrategy]:
    arena = graph.full if arena is None else arena
    r = _conjunctive_buchi(graph, [alpha], protagonist.opponent, arena)
    return arena & ~r.win, _complete(graph, protagonist, r.counter, arena)


def solve_all_buchi(
    graph: GameGraph, delta: Sequence[int], protagonist: Player, arena: int | None = None
) -> tuple[int, WinningCage | None]:
    """Generalized Buchi by iterated removal of opponent traps.

    The cage is returned when the protagonist wins from the initial vertex; it
    is the whole winning region with one reachability witness per target.
    """
    arena = graph.full if arena is None else arena
    r = _conjunctive_buchi(graph, list(delta), protagonist, arena)
    if not r.win >> graph.initial & 1:
        return r.win, None
    witnesses = tuple(_complete(graph, protagonist, w, r.win) for w in r.witnesses)
    return r.win, WinningCage(r.win, witnesses)


def all_buchi_cage(
    graph: GameGraph, delta: Sequence[int], protagonist: Player, arena: int
) -> tuple[int, tuple[MemorylessStrategy, ...]]:
    """Winning region and witnesses regardless of where the initial vertex lies."""
    r = _conjunctive_buchi(graph, list(delta), protagonist, arena)
    return r.win, tuple(_complete(graph, protagonist, w, r.win) for w in r.witnesses)


def solve_all_cobuchi(
    graph: GameGraph, delta: Sequence[int], protagonist: Player, arena: int | None = None
) -> tuple[int, MemorylessStrategy]:
    union = 0
    for d in delta:
        union |= d
    return solve_cobuchi(graph, union, protagonist, arena)


def solve_exists_cobuchi(
    graph: GameGraph, families: Sequence[int], protagonist: Player, arena: int | None = None
) -> tuple[int, MemorylessStrategy]:
    """Some set in `families` is visited finitely often.

    Complement of the opponent's generalized Buchi region; the protagonist's
    memoryless strategy is read off the trap sequence of that solve.
    """
    arena = graph.full if arena is None else arena
    r = _conjunctive_buchi(graph, list(families), protagonist.opponent, arena)
    return arena & ~r.win, _complete(graph, protagonist, r.counter, arena)


def superset_to_all_buchi(families: Sequence[Sequence[int]]) -> list[int]:
    """Choice product: one union per way of picking a set from every family.

    A play meets every set of some family iff it meets every output set.
    """
    kept = [f for f in families if len(f)]
    if len(kept) < len(families) and not kept:
        warnings.warn("only family is empty", DegenerateSuperset, stacklevel=2)
        return [0]
    out = []
    for pick in itertools.product(*kept):
        u = 0
        for s in pick:
            u |= s
        out.append(u)
    return out


# -- enumeration ------------------------------------------------------------

def memoryless_choices(graph: GameGraph, player: Player, within: int | None = None) -> list[tuple[int, list[int]]]:
    within = graph.full if within is None else within
    return [
        (v, list(bits(graph.succ[v] & within)))
        for v in bits(graph.owned(player) & within)
    ]


def count_memoryless(graph: GameGraph, player: Player, within: int | None = None) -> int:
    total = 1
    for _, opts in memoryless_choices(graph, player, within):
        total *= len(opts)
    return total


def iter_memoryless(graph: GameGraph, player: Player, within: int | None = None) -> Iterator[dict[int, int]]:
    """All memoryless strategies in lexicographic order over (vertex, successor)."""
    slots = memoryless_choices(graph, player, within)
    verts = [v for v, _ in slots]
    for pick in itertools.product(*(opts for _, opts in slots)):
        yield dict(zip(verts, pick))
