"""Coverage problem: decide whether k agents can jointly cover every objective
against a single Disruptor strategy, and synthesize checkable strategies.

A vertex is decomposable for (k, objs) when the objectives and the agents can
be split in two nonempty groups that each win from it.  Coverer wins from v
iff she can force the play into a decomposable Coverer vertex, or she wins
the conjunctive game on the region where Disruptor avoids all of them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence, Union

from .game import (
    CoverageGame,
    GameGraph,
    Kind,
    Objective,
    Player,
    bits,
    has_cycle,
    lowest,
    popcount,
    reach,
    reachable,
    sccs,
)
from .solvers import (
    MemorylessStrategy,
    all_buchi_cage,
    attractor_with_strategy,
    solve_all_buchi,
    solve_buchi,
    solve_cobuchi,
)

COVERER = Player.COVERER


class StructuralError(Exception):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class TreeFormatError(ValueError):
    pass


def submasks(mask: int):
    """Nonempty proper submasks containing the lowest bit, ascending."""
    low = mask & -mask
    rest = mask ^ low
    sub = 0
    while True:
        if sub != rest:
            yield low | sub
        if sub == rest:
            break
        sub = (sub - rest) & rest


class CoverageTable:
    """Memoized winning sets keyed by (agents, objective-index bitset)."""

    def __init__(self, graph: GameGraph, masks: Sequence[int], kind: Kind, arena: int | None = None):
        self.graph = graph
        self.masks = tuple(masks)
        self.kind = kind
        self.arena = graph.full if arena is None else arena
        self._win: dict[tuple[int, int], int] = {}
        self._split: dict[tuple[int, int], dict[int, tuple[int, int]]] = {}
        self.subproblems = 0

    def union(self, objs: int) -> int:
        u = 0
        for i in bits(objs):
            u |= self.masks[i]
        return u

    def targets(self, objs: int) -> list[int]:
        return [self.masks[i] for i in bits(objs)]

    def splits(self, k: int, objs: int) -> dict[int, tuple[int, int]]:
        """First (k1, part) split found at each decomposable vertex, any owner."""
        key = (k, objs)
        if key not in self._split:
            found: dict[int, tuple[int, int]] = {}
            if k >= 2 and popcount(objs) >= 2:
                for part in submasks(objs):
                    other = objs ^ part
                    for k1 in range(1, k):
                        both = self.win(k1, part) & self.win(k - k1, other)
                        for v in bits(both):
                            found.setdefault(v, (k1, part))
            self._split[key] = found
        return self._split[key]

    def decomposable(self, k: int, objs: int) -> int:
        d = 0
        for v in self.splits(k, objs):
            d |= 1 << v
        return d & self.graph.owned(COVERER)

    def avoid_region(self, k: int, objs: int) -> tuple[int, int, dict[int, int]]:
        d = self.decomposable(k, objs)
        attr, moves = attractor_with_strategy(self.graph, COVERER, d, self.arena)
        return d, attr, moves

    def all_win(self, objs: int, arena: int) -> int:
        if self.kind is Kind.BUCHI:
            return solve_all_buchi(self.graph, self.targets(objs), COVERER, arena)[0]
        return solve_cobuchi(self.graph, self.union(objs), COVERER, arena)[0]

    def win(self, k: int, objs: int) -> int:
        key = (k, objs)
        if key in self._win:
            return self._win[key]
        if objs == 0:
            w = self.arena
        else:
            _, attr, _ = self.avoid_region(k, objs)
            avoid = self.arena & ~attr
            w = attr | self.all_win(objs, avoid)
        self.subproblems += 1
        self._win[key] = w
        return w


def _table(game: CoverageGame, arena: int | None = None) -> CoverageTable:
    return CoverageTable(game.graph, game.masks, game.kind, arena)


def is_decomposable(game: CoverageGame, v: str | int, l: int = 2) -> bool:
    if l != 2:
        raise ValueError("only bipartitions are supported")
    g = game.graph
    v = g.vertex(v)
    table = _table(game, reachable(g, v))
    return v in table.splits(game.agents, game.all_objectives)


def winning_coverage_set(
    graph: GameGraph, k: int, beta: Sequence[Union[int, Objective]], kind: Kind | str | None = None
) -> int:
    masks = [b.vertices if isinstance(b, Objective) else b for b in beta]
    if kind is None:
        kind = beta[0].kind if beta and isinstance(beta[0], Objective) else Kind.BUCHI
    table = CoverageTable(graph, masks, Kind(kind))
    return table.win(k, (1 << len(masks)) - 1)


def coverage_by_regime(game: CoverageGame) -> bool | None:
    """Verdict from the k=1 and k>=|objectives| characterizations, else None."""
    g, v0 = game.graph, game.graph.initial
    if not game.objectives:
        return True
    if game.agents == 1:
        if game.kind is Kind.BUCHI:
            return bool(solve_all_buchi(g, game.masks, COVERER)[0] >> v0 & 1)
        union = 0
        for m in game.masks:
            union |= m
        return bool(solve_cobuchi(g, union, COVERER)[0] >> v0 & 1)
    if game.agents >= len(game.objectives):
        single = solve_buchi if game.kind is Kind.BUCHI else solve_cobuchi
        return all(single(g, m, COVERER)[0] >> v0 & 1 for m in game.masks)
    return None


# -- strategy trees ---------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    """All agents move together and the single play wins every objective.

    Buchi leaves rotate through `witnesses` (one per objective, ascending
    index), switching when the current target is visited; co-Buchi leaves
    carry one memoryless strategy.
    """

    agents: int
    objectives: int
    region: int
    witnesses: tuple[MemorylessStrategy, ...]


@dataclass(frozen=True)
class Split:
    at: int
    parts: tuple[tuple[int, int, "Node"], ...]


@dataclass(frozen=True)
class March:
    """Force the play into a split vertex; `avoid` handles the region where
    Disruptor can stay away from every split vertex."""

    agents: int
    objectives: int
    attractor: int
    strategy: MemorylessStrategy
    splits: tuple[Split, ...]
    avoid: Leaf | None = None


Node = Union[Leaf, March]


@dataclass
class _Synth:
    table: CoverageTable
    cache: dict = field(default_factory=dict)

    def leaf(self, k: int, objs: int, arena: int) -> Leaf:
        t, g = self.table, self.table.graph
        if t.kind is Kind.BUCHI:
            region, witnesses = all_buchi_cage(g, t.targets(objs), COVERER, arena)
            if not objs:
                witnesses = (solve_buchi(g, g.full, COVERER, arena)[1],)
        else:
            region, strat = solve_cobuchi(g, t.union(objs), COVERER, arena)
            witnesses = (strat,)
        return Leaf(k, objs, region, witnesses)

    def node(self, k: int, objs: int, entry: int) -> Node:
        key = (k, objs, entry)
        if key in self.cache:
            return self.cache[key]
        t, g = self.table, self.table.graph
        d, attr, moves = t.avoid_region(k, objs)
        if not d:
            out: Node = self.leaf(k, objs, t.arena)
        else:
            avoid = t.arena & ~attr
            leaf = self.leaf(k, objs, avoid) if avoid >> entry & 1 else None
            step = list(g.succ)
            for v in bits(g.owned(COVERER) & t.arena):
                if d >> v & 1:
                    step[v] = 0
                elif v in moves:
                    step[v] = 1 << moves[v]
                elif leaf is not None:
                    step[v] = 0
                    for w in leaf.witnesses:
                        step[v] |= 1 << w.choice[v] if v in w.choice else 0
            hit = reach(step, 1 << entry, t.arena) & d
            splits = []
            table_splits = t.splits(k, objs)
            for v in bits(hit):
                k1, part = table_splits[v]
                other = objs ^ part
                splits.append(Split(v, (
                    (k1, part, self.node(k1, part, v)),
                    (k - k1, other, self.node(k - k1, other, v)),
                )))
            out = March(k, objs, attr, MemorylessStrategy(COVERER, moves), tuple(splits), leaf)
        self.cache[key] = out
        return out


def solve_coverage(
    game: CoverageGame, synthesize: bool = True, stats: dict | None = None
) -> tuple[bool, Node | None]:
    """Decide coverage by the decomposition recursion in every regime."""
    g = game.graph
    table = _table(game, reachable(g, g.initial))
    verdict = bool(table.win(game.agents, game.all_objectives) >> g.initial & 1)
    if stats is not None:
        stats["subproblems"] = table.subproblems
    if not verdict or not synthesize:
        return verdict, None
    return True, _Synth(table).node(game.agents, game.all_objectives, g.initial)


def coverage_table(game: CoverageGame) -> CoverageTable:
    g = game.graph
    return _table(game, reachable(g, g.initial))


# -- verification -----------------------------------------------------------

def _check_node(node: Node, game: CoverageGame, entry: int, k: int, objs: int, path: str) -> str | None:
    g = game.graph
    if not isinstance(node, (Leaf, March)):
        raise StructuralError(path, "expected a leaf or march node")
    if node.agents != k or node.objectives != objs:
        raise StructuralError(path, "agent count or objective set differs from the parent split")
    splits: dict[int, Split] = {}
    leaf: Leaf | None
    if isinstance(node, March):
        for s in node.splits:
            splits[s.at] = s
        leaf = node.avoid
        domain = node.attractor | (leaf.region if leaf else 0)
        march_moves = node.strategy.choice
    else:
        leaf = node
        domain = node.region
        march_moves = {}
    targets = [game.masks[i] for i in bits(objs)]
    buchi = game.kind is Kind.BUCHI
    rounds = len(targets) if buchi else 0
    union = 0
    for t in targets:
        union |= t
    if leaf is not None and buchi and objs and len(leaf.witnesses) != rounds:
        raise StructuralError(path, "leaf needs one witness per objective")

    def arrive(v: int, mem: int) -> tuple[int, bool]:
        if rounds and targets[mem] >> v & 1:
            return (mem + 1) % rounds, True
        return mem, False

    def moves_at(v: int, mem: int) -> int | str:
        if g.owners[v] != COVERER:
            return g.succ[v]
        if v in march_moves:
            w = march_moves[v]
        elif leaf is not None and leaf.region >> v & 1:
            strat = leaf.witnesses[mem] if buchi and objs else leaf.witnesses[0]
            if v not in strat.choice:
                return f"no move at {g.ids[v]}"
            w = strat.choice[v]
        else:
            return f"no move at {g.ids[v]}"
        if not g.succ[v] >> w & 1:
            return f"move {g.ids[v]}->{g.ids[w]} is not an edge"
        return 1 << w

    start = (entry, arrive(entry, 0)[0])
    seen = {start}
    stack = [start]
    edges: dict[tuple[int, int], list[tuple[tuple[int, int], bool]]] = {}
    reached_splits: set[int] = set()
    while stack:
        v, mem = stack.pop()
        if v in splits:
            reached_splits.add(v)
            edges[(v, mem)] = []
            continue
        if not domain >> v & 1:
            return f"{path}: play leaves the region at {g.ids[v]}"
        nxt = moves_at(v, mem)
        if isinstance(nxt, str):
            return f"{path}: {nxt}"
        out = []
        for w in bits(nxt):
            m2, progress = arrive(w, mem)
            out.append(((w, m2), progress))
            if (w, m2) not in seen:
                seen.add((w, m2))
                stack.append((w, m2))
        edges[(v, mem)] = out

    # a play that never splits is one joint play and must win every objective
    states = list(edges)
    idx = {s: i for i, s in enumerate(states)}
    if buchi:
        if rounds:
            plain = [0] * len(states)
            for s, out in edges.items():
                for t, progress in out:
                    if not progress:
                        plain[idx[s]] |= 1 << idx[t]
            if has_cycle(plain, (1 << len(states)) - 1):
                return f"{path}: some play stops visiting the objectives (objectives {list(bits(objs))})"
    else:
        full = [0] * len(states)
        for s, out in edges.items():
            for t, _ in out:
                full[idx[s]] |= 1 << idx[t]
        for comp, trivial in sccs(full, (1 << len(states)) - 1):
            if trivial:
                continue
            if any(union >> states[i][0] & 1 for i in bits(comp)):
                return f"{path}: some play visits the objectives forever (objectives {list(bits(objs))})"

    for at in sorted(reached_splits):
        s = splits[at]
        here = f"{path}/split@{g.ids[at]}"
        if not s.parts:
            raise StructuralError(here, "split without parts")
        seen_objs = 0
        agents = 0
        for kk, part, _ in s.parts:
            if kk < 1 or not part:
                raise StructuralError(here, "every part needs an agent and an objective")
            if part & seen_objs:
                raise StructuralError(here, "parts share an objective")
            seen_objs |= part
            agents += kk
        if seen_objs != objs:
            raise StructuralError(here, "parts do not cover the objectives")
        if agents != k:
            raise StructuralError(here, "agent counts do not add up")
        for n, (kk, part, child) in enumerate(s.parts):
            reason = _check_node(child, game, at, kk, part, f"{here}/part{n}")
            if reason:
                return reason
    return None


def check_covering_strategy(tree: Node, game: CoverageGame) -> str | None:
    """None when the tree covers the game, otherwise a counterexample note."""
    return _check_node(tree, game, game.graph.initial, game.agents, game.all_objectives, "root")


def verify_covering_strategy(tree: Node, game: CoverageGame) -> bool:
    return check_covering_strategy(tree, game) is None


# -- JSON -------------------------------------------------------------------

def tree_to_json(node: Node | Split, graph: GameGraph) -> dict:
    if isinstance(node, Leaf):
        return {
            "type": "leaf",
            "agents": node.agents,
            "objectives": list(bits(node.objectives)),
            "region": graph.names(node.region),
            "witnesses": [w.to_json(graph) for w in node.witnesses],
        }
    if isinstance(node, March):
        return {
            "type": "march",
            "agents": node.agents,
            "objectives": list(bits(node.objectives)),
            "attractor": graph.names(node.attractor),
            "strategy": node.strategy.to_json(graph),
            "splits": [tree_to_json(s, graph) for s in node.splits],
            "avoid": tree_to_json(node.avoid, graph) if node.avoid else None,
        }
    return {
        "type": "split",
        "at": graph.ids[node.at],
        "parts": [
            {"agents": k, "objectives": list(bits(p)), "child": tree_to_json(c, graph)}
            for k, p, c in node.parts
        ],
    }


def tree_from_json(data: dict, graph: GameGraph):
    try:
        return _from_json(data, graph)
    except (KeyError, TypeError, AttributeError) as exc:
        raise TreeFormatError(f"malformed strategy tree: {exc}") from None


def _vid(graph: GameGraph, v) -> int:
    if not isinstance(v, str) or v not in graph.index:
        raise TreeFormatError(f"unknown vertex {v!r}")
    return graph.index[v]


def _strategy(data: dict, graph: GameGraph) -> MemorylessStrategy:
    return MemorylessStrategy(COVERER, {_vid(graph, a): _vid(graph, b) for a, b in data.items()})


def _objs(items) -> int:
    m = 0
    for i in items:
        if not isinstance(i, int) or i < 0:
            raise TreeFormatError(f"bad objective index {i!r}")
        m |= 1 << i
    return m


def _from_json(data: dict, graph: GameGraph):
    kind = data["type"]
    if kind == "leaf":
        return Leaf(
            data["agents"],
            _objs(data["objectives"]),
            graph.vset(_vid(graph, v) for v in data["region"]),
            tuple(_strategy(w, graph) for w in data["witnesses"]),
        )
    if kind == "march":
        avoid = data.get("avoid")
        return March(
            data["agents"],
            _objs(data["objectives"]),
            graph.vset(_vid(graph, v) for v in data["attractor"]),
            _strategy(data["strategy"], graph),
            tuple(_from_json(s, graph) for s in data["splits"]),
            _from_json(avoid, graph) if avoid else None,
        )
    if kind == "split":
        return Split(
            _vid(graph, data["at"]),
            tuple((p["agents"], _objs(p["objectives"]), _from_json(p["child"], graph)) for p in data["parts"]),
        )
    raise TreeFormatError(f"unknown node type {kind!r}")


__all__ = [
    "CoverageTable",
    "Leaf",
    "March",
    "Split",
    "StructuralError",
    "TreeFormatError",
    "check_covering_strategy",
    "coverage_by_regime",
    "coverage_table",
    "is_decomposable",
    "lowest",
    "solve_coverage",
    "tree_from_json",
    "tree_to_json",
    "verify_covering_strategy",
    "winning_coverage_set",
]
