"""Game graphs, objectives and coverage games.

Vertices are dense indices 0..n-1 with stable string ids; every vertex set is a
Python int used as a bitset.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, replace as _replace
from functools import cached_property
from typing import Iterable, Iterator, Sequence


class Player(enum.IntEnum):
    COVERER = 1
    DISRUPTOR = 2

    @property
    def opponent(self) -> "Player":
        return Player.DISRUPTOR if self is Player.COVERER else Player.COVERER


class Kind(str, enum.Enum):
    BUCHI = "buchi"
    COBUCHI = "cobuchi"

    @property
    def dual(self) -> "Kind":
        return Kind.COBUCHI if self is Kind.BUCHI else Kind.BUCHI


class GameError(Exception):
    pass


class UnknownVertex(GameError):
    pass


class NonTotalRestriction(GameError):
    pass


class InitialRemoved(GameError):
    pass


class GameFormatError(GameError):
    """Raised by the JSON loader; carries the list of violations found."""

    def __init__(self, violations: Sequence["Violation"] | str):
        if isinstance(violations, str):
            self.violations: tuple[Violation, ...] = (Violation("Format", violations),)
        else:
            self.violations = tuple(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


# -- bitset helpers ---------------------------------------------------------

def bits(mask: int) -> Iterator[int]:
    """Indices of set bits, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(indices: Iterable[int]) -> int:
    m = 0
    for i in indices:
        m |= 1 << i
    return m


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def lowest(mask: int) -> int:
    """Lowest set index; -1 for the empty set."""
    return (mask & -mask).bit_length() - 1


# -- core types -------------------------------------------------------------

@dataclass(frozen=True)
class GameGraph:
    ids: tuple[str, ...]
    owners: tuple[int, ...]
    succ: tuple[int, ...]
    initial: int

    @classmethod
    def build(
        cls,
        vertices: Sequence[tuple[str, int]],
        edges: Iterable[tuple[str, str]],
        initial: str,
    ) -> "GameGraph":
        ids = tuple(v for v, _ in vertices)
        index = {v: i for i, v in enumerate(ids)}
        if len(index) != len(ids):
            raise GameFormatError("duplicate vertex id")
        succ = [0] * len(ids)
        for a, b in edges:
            if a not in index or b not in index:
                raise UnknownVertex(a if a not in index else b)
            succ[index[a]] |= 1 << index[b]
        if initial not in index:
            raise UnknownVertex(initial)
        return cls(ids, tuple(int(o) for _, o in vertices), tuple(succ), index[initial])

    def __len__(self) -> int:
        return len(self.ids)

    @cached_property
    def index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.ids)}

    @cached_property
    def full(self) -> int:
        return (1 << len(self.ids)) - 1

    @cached_property
    def pred(self) -> tuple[int, ...]:
        pred = [0] * len(self.ids)
        for v, s in enumerate(self.succ):
            for w in bits(s):
                pred[w] |= 1 << v
        return tuple(pred)

    def owned(self, player: Player | int) -> int:
        return self._owned[int(player)]

    @cached_property
    def _owned(self) -> dict[int, int]:
        out = {1: 0, 2: 0}
        for v, o in enumerate(self.owners):
            out.setdefault(o, 0)
            out[o] |= 1 << v
        return out

    def vertex(self, v: str | int) -> int:
        """Resolve a vertex id or index to an index."""
        if isinstance(v, str):
            if v not in self.index:
                raise UnknownVertex(v)
            return self.index[v]
        if not 0 <= v < len(self.ids):
            raise UnknownVertex(str(v))
        return v

    def vset(self, vs: Iterable[str | int]) -> int:
        return mask_of(self.vertex(v) for v in vs)

    def names(self, mask: int) -> list[str]:
        return [self.ids[i] for i in bits(mask)]

    def edges(self) -> Iterator[tuple[int, int]]:
        for v, s in enumerate(self.succ):
            for w in bits(s):
                yield v, w

    def with_initial(self, v: str | int) -> "GameGraph":
        return GameGraph(self.ids, self.owners, self.succ, self.vertex(v))


@dataclass(frozen=True)
class Objective:
    kind: Kind
    vertices: int
    label: str = ""


@dataclass(frozen=True)
class CoverageGame:
    graph: GameGraph
    agents: int
    objectives: tuple[Objective, ...]
    kind: Kind = Kind.BUCHI

    @classmethod
    def make(
        cls,
        graph: GameGraph,
        agents: int,
        objectives: Sequence[Iterable[str | int]],
        kind: Kind | str = Kind.BUCHI,
        labels: Sequence[str] | None = None,
    ) -> "CoverageGame":
        kind = Kind(kind)
        labels = labels or [f"a{i + 1}" for i in range(len(objectives))]
        objs = tuple(
            Objective(kind, graph.vset(o), lab) for o, lab in zip(objectives, labels)
        )
        return cls(graph, agents, objs, kind)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(o.vertices for o in self.objectives)

    @property
    def all_objectives(self) -> int:
        """Index bitset of the whole objective list."""
        return (1 << len(self.objectives)) - 1

    def replace(self, **changes) -> "CoverageGame":
        return _replace(self, **changes)

    def with_objectives(self, indices: Iterable[int]) -> "CoverageGame":
        return self.replace(objectives=tuple(self.objectives[i] for i in indices))


@dataclass(frozen=True)
class LassoPath:
    stem: tuple[int, ...]
    loop: tuple[int, ...]

    def inf(self) -> int:
        return mask_of(self.loop)

    def __len__(self) -> int:
        return len(self.stem) + len(self.loop)

    def is_valid(self, graph: GameGraph) -> bool:
        if not self.loop:
            return False
        seq = list(self.stem) + list(self.loop) + [self.loop[0]]
        if seq[0] != graph.initial:
            return False
        return all(graph.succ[a] >> b & 1 for a, b in zip(seq, seq[1:]))

    def to_json(self, graph: GameGraph) -> dict:
        return {
            "stem": [graph.ids[v] for v in self.stem],
            "loop": [graph.ids[v] for v in self.loop],
        }


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str = ""

    def __str__(self) -> str:
        return f"{self.rule}({self.subject})" if self.subject else self.rule


def play_from(choice: dict[int, int], start: int) -> LassoPath:
    """The unique play from `start` when every vertex has a fixed successor."""
    order: dict[int, int] = {}
    seq: list[int] = []
    v = start
    while v not in order:
        order[v] = len(seq)
        seq.append(v)
        v = choice[v]
    i = order[v]
    return LassoPath(tuple(seq[:i]), tuple(seq[i:]))


def validate(game: CoverageGame) -> list[Violation]:
    g = game.graph
    n = len(g)
    out: list[Violation] = []
    if len(g.owners) != n or len(g.succ) != n:
        out.append(Violation("Shape"))
        return out
    if not 0 <= g.initial < n:
        out.append(Violation("InitialMissing"))
    for v in range(n):
        if g.owners[v] not in (1, 2):
            out.append(Violation("Owner", g.ids[v]))
        if g.succ[v] >> n:
            out.append(Violation("UnknownVertex", g.ids[v]))
        if not g.succ[v] & g.full:
            out.append(Violation("Totality", g.ids[v]))
    if game.agents < 1:
        out.append(Violation("Agents", str(game.agents)))
    for o in game.objectives:
        if o.kind is not game.kind:
            out.append(Violation("MixedKinds", o.label))
        if o.vertices >> n or o.vertices < 0:
            out.append(Violation("UnknownVertex", o.label))
    return out


# -- graph operations -------------------------------------------------------

def restrict(graph: GameGraph, keep: int | Iterable[str | int]) -> GameGraph:
    """Induced subgraph on `keep`, reindexed in the original vertex order."""
    if not isinstance(keep, int):
        keep = graph.vset(keep)
    keep &= graph.full
    if not keep >> graph.initial & 1:
        raise InitialRemoved(graph.ids[graph.initial])
    old = list(bits(keep))
    new_of = {v: i for i, v in enumerate(old)}
    succ = []
    for v in old:
        s = graph.succ[v] & keep
        if not s:
            raise NonTotalRestriction(graph.ids[v])
        succ.append(mask_of(new_of[w] for w in bits(s)))
    return GameGraph(
        tuple(graph.ids[v] for v in old),
        tuple(graph.owners[v] for v in old),
        tuple(succ),
        new_of[graph.initial],
    )


def reach(succ: Sequence[int], start: int, within: int = -1) -> int:
    """Forward closure of `start` under `succ`, staying inside `within`."""
    seen = start & within
    frontier = seen
    while frontier:
        nxt = 0
        for v in bits(frontier):
            nxt |= succ[v]
        nxt &= within & ~seen
        seen |= nxt
        frontier = nxt
    return seen


def reachable(graph: GameGraph, source: str | int) -> int:
    return reach(graph.succ, 1 << graph.vertex(source))


def sccs(succ: Sequence[int], within: int) -> list[tuple[int, bool]]:
    """Tarjan's algorithm on the subgraph induced by `within`.

    Returns (component, trivial) pairs in reverse topological order: every edge
    leaving a component points to a component listed earlier.
    """
    index: dict[int, int] = {}
    low: dict[int, int] = {}
    on_stack = 0
    stack: list[int] = []
    out: list[tuple[int, bool]] = []
    counter = 0
    for root in bits(within):
        if root in index:
            continue
        work = [(root, iter(bits(succ[root] & within)))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack |= 1 << root
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if w not in index:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack |= 1 << w
                    work.append((w, iter(bits(succ[w] & within))))
                    advanced = True
                    break
                if on_stack >> w & 1:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                low[u] = min(low[u], low[v])
            if low[v] == index[v]:
                comp = 0
                while True:
                    w = stack.pop()
                    on_stack &= ~(1 << w)
                    comp |= 1 << w
                    if w == v:
                        break
                trivial = comp == 1 << v and not succ[v] >> v & 1
                out.append((comp, trivial))
    return out


def scc_decomposition(graph: GameGraph) -> list[tuple[int, bool]]:
    return sccs(graph.succ, graph.full)


def has_cycle(succ: Sequence[int], within: int) -> bool:
    return any(not trivial for _, trivial in sccs(succ, within))


def shortest_path(succ: Sequence[int], src: int, targets: int, within: int = -1) -> list[int] | None:
    """BFS path src..t for the lowest-index reachable t in `targets` (at least one vertex)."""
    if targets >> src & 1:
        return [src]
    parent = {src: src}
    frontier = [src]
    while frontier:
        nxt = []
        for v in frontier:
            for w in bits(succ[v] & within):
                if w in parent:
                    continue
                parent[w] = v
                if targets >> w & 1:
                    path = [w]
                    while path[-1] != src:
                        path.append(parent[path[-1]])
                    return path[::-1]
                nxt.append(w)
        frontier = nxt
    return None


def path_to(succ: Sequence[int], src: int, targets: int, within: int = -1) -> list[int] | None:
    """Like shortest_path but with at least one edge; returns src..t."""
    best = None
    for w in bits(succ[src] & within):
        p = shortest_path(succ, w, targets, within)
        if p is not None and (best is None or len(p) < len(best)):
            best = p
    return None if best is None else [src] + best


# -- serialization ----------------------------------------------------------

def game_to_json(game: CoverageGame) -> dict:
    g = game.graph
    return {
        "vertices": [{"id": v, "owner": o} for v, o in zip(g.ids, g.owners)],
        "initial": g.ids[g.initial],
        "edges": [[g.ids[a], g.ids[b]] for a, b in g.edges()],
        "objective_kind": game.kind.value,
        "objectives": [
            {"label": o.label, "vertices": g.names(o.vertices)} for o in game.objectives
        ],
        "agents": game.agents,
    }


def game_from_json(data: dict | str) -> CoverageGame:
    """Parse the JSON game format; raises GameFormatError listing every problem."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise GameFormatError(f"invalid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise GameFormatError("top level must be an object")
    required = ("vertices", "initial", "edges", "objective_kind", "objectives", "agents")
    missing = [k for k in required if k not in data]
    if missing:
        raise GameFormatError([Violation("MissingKey", k) for k in missing])
    problems: list[Violation] = []
    try:
        vertices = [(str(v["id"]), int(v["owner"])) for v in data["vertices"]]
        edges = [(str(a), str(b)) for a, b in data["edges"]]
        kind = Kind(data["objective_kind"])
        objectives = [(str(o["label"]), [str(x) for x in o["vertices"]]) for o in data["objectives"]]
        agents = data["agents"]
        initial = str(data["initial"])
    except (KeyError, TypeError, ValueError) as exc:
        raise GameFormatError(f"malformed field: {exc}") from None
    if not isinstance(agents, int) or isinstance(agents, bool):
        raise GameFormatError([Violation("Agents", repr(agents))])
    ids = [v for v, _ in vertices]
    known = set(ids)
    if len(known) != len(ids):
        problems.append(Violation("DuplicateVertex"))
    seen_edges: set[tuple[str, str]] = set()
    for e in edges:
        if e in seen_edges:
            problems.append(Violation("DuplicateEdge", f"{e[0]}->{e[1]}"))
        seen_edges.add(e)
        for x in e:
            if x not in known:
                problems.append(Violation("UnknownVertex", x))
    if initial not in known:
        problems.append(Violation("InitialMissing", initial))
    for label, vs in objectives:
        for x in vs:
            if x not in known:
                problems.append(Violation("UnknownVertex", f"{label}:{x}"))
    if problems:
        raise GameFormatError(problems)
    graph = GameGraph.build(vertices, edges, initial)
    game = CoverageGame(
        graph,
        agents,
        tuple(Objective(kind, graph.vset(vs), label) for label, vs in objectives),
        kind,
    )
    problems = validate(game)
    if problems:
        raise GameFormatError(problems)
    return game


def load_game(path: str) -> CoverageGame:
    with open(path, encoding="utf-8") as fh:
        return game_from_json(fh.read())


def to_dot(game: CoverageGame) -> str:
    g = game.graph
    lines = ["digraph game {", '  node [fontname="Helvetica"];']
    for v, vid in enumerate(g.ids):
        shape = "circle" if g.owners[v] == Player.COVERER else "box"
        labels = [o.label for o in game.objectives if o.vertices >> v & 1]
        text = vid + ("\\n" + ",".join(labels) if labels else "")
        extra = " penwidth=2" if v == g.initial else ""
        lines.append(f'  "{vid}" [shape={shape} label="{text}"{extra}];')
    for a, b in g.edges():
        lines.append(f'  "{g.ids[a]}" -> "{g.ids[b]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
