"""Instance generators: fixture games, hardness reductions and brute-force
oracles for the source problems.

Literal +i is variable x_i, literal -i its negation.  Vertex ids follow the
fixed scheme "v_i", "x_i", "nx_i", "C_i", "l_i_j" so generated games are
diff-stable.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

from .game import CoverageGame, GameGraph, Kind, Objective, Player

C, D = int(Player.COVERER), int(Player.DISRUPTOR)


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class CnfFormula:
    n: int
    clauses: tuple[tuple[int, int, int], ...]

    @classmethod
    def of(cls, n: int, clauses: Iterable[Sequence[int]]) -> "CnfFormula":
        """Build from clauses of 1-3 literals, padding by repeating the last literal."""
        out = []
        for c in clauses:
            c = list(c)
            if not 1 <= len(c) <= 3:
                raise GeneratorError(f"clause {c} must have 1-3 literals")
            for lit in c:
                if lit == 0 or abs(lit) > n:
                    raise GeneratorError(f"literal {lit} out of range")
            while len(c) < 3:
                c.append(c[-1])
            out.append(tuple(c))
        return cls(n, tuple(out))

    def holds(self, assignment: Sequence[bool]) -> bool:
        """CNF truth under assignment[i-1] for variable i."""
        return all(any(lit_value(l, assignment) for l in c) for c in self.clauses)

    def holds_dnf(self, assignment: Sequence[bool]) -> bool:
        return any(all(lit_value(l, assignment) for l in c) for c in self.clauses)


@dataclass(frozen=True)
class QbfFormula:
    prefix: tuple[tuple[str, int], ...]
    matrix: CnfFormula
    dnf: bool = False

    def __post_init__(self):
        if sorted(v for _, v in self.prefix) != list(range(1, self.matrix.n + 1)):
            raise GeneratorError("prefix must quantify every variable exactly once")
        if any(q not in ("e", "a") for q, _ in self.prefix):
            raise GeneratorError("quantifiers are 'e' or 'a'")


@dataclass(frozen=True)
class UndirectedGraph:
    n: int
    edges: frozenset[tuple[int, int]]

    @classmethod
    def of(cls, n: int, edges: Iterable[tuple[int, int]]) -> "UndirectedGraph":
        es = set()
        for a, b in edges:
            if a == b:
                raise GeneratorError("self-pairs are not edges")
            es.add((min(a, b), max(a, b)))
        return cls(n, frozenset(es))


def lit_value(lit: int, assignment: Sequence[bool]) -> bool:
    v = assignment[abs(lit) - 1]
    return v if lit > 0 else not v


def lit_name(lit: int) -> str:
    return f"x_{lit}" if lit > 0 else f"nx_{-lit}"


# -- oracles ----------------------------------------------------------------

def sat_brute(phi: CnfFormula) -> bool:
    return any(phi.holds(a) for a in itertools.product((False, True), repeat=phi.n))


def qbf_brute(q: QbfFormula) -> bool:
    holds = q.matrix.holds_dnf if q.dnf else q.matrix.holds
    assignment = [False] * q.matrix.n

    def go(i: int) -> bool:
        if i == len(q.prefix):
            return holds(assignment)
        quant, var = q.prefix[i]
        results = []
        for val in (False, True):
            assignment[var - 1] = val
            results.append(go(i + 1))
        return any(results) if quant == "e" else all(results)

    return go(0)


def vertex_cover_brute(g: UndirectedGraph, k: int) -> bool:
    for size in range(min(k, g.n) + 1):
        for cover in itertools.combinations(range(g.n), size):
            s = set(cover)
            if all(a in s or b in s for a, b in g.edges):
                return True
    return False


# -- small builder ----------------------------------------------------------

class _Builder:
    def __init__(self):
        self.vertices: list[tuple[str, int]] = []
        self.edges: list[tuple[str, str]] = []
        self._seen: set[str] = set()
        self._edge_set: set[tuple[str, str]] = set()

    def add(self, vid: str, owner: int) -> str:
        if vid not in self._seen:
            self._seen.add(vid)
            self.vertices.append((vid, owner))
        return vid

    def edge(self, a: str, b: str) -> None:
        if (a, b) not in self._edge_set:
            self._edge_set.add((a, b))
            self.edges.append((a, b))

    def game(self, initial: str, agents: int, kind: Kind, objectives: Sequence[tuple[str, Iterable[str]]]) -> CoverageGame:
        graph = GameGraph.build(self.vertices, self.edges, initial)
        objs = tuple(Objective(kind, graph.vset(vs), label) for label, vs in objectives)
        return CoverageGame(graph, agents, objs, kind)


# -- fixtures ---------------------------------------------------------------

def fixture_undetermined(kind: Kind | str = Kind.BUCHI) -> CoverageGame:
    """Two agents, three objectives; neither player wins."""
    kind = Kind(kind)
    b = _Builder()
    for v, o in (("v0", C), ("v1", C), ("v2", D), ("u1", C), ("d1", C), ("u2", C), ("d2", C)):
        b.add(v, o)
    for e in (("v0", "v1"), ("v0", "v2"), ("v1", "u1"), ("v1", "d1"), ("v2", "u2"), ("v2", "d2")):
        b.edge(*e)
    for s in ("u1", "d1", "u2", "d2"):
        b.edge(s, s)
    third = ["u2", "d2"] if kind is Kind.BUCHI else ["u1", "d1"]
    objs = [("a1", ["u1", "u2"]), ("a2", ["d1", "d2"]), ("a3", third)]
    return b.game("v0", 2, kind, objs)


def _nondecomp_into(b: _Builder, k: int, prefix: str) -> tuple[list[list[str]], list[str]]:
    """Add the k-agent non-decomposable gadget rooted at f"{prefix}v0".

    Returns the Buchi objective sets and the list of sink ids.
    """
    root = b.add(f"{prefix}v0", D)
    sinks = []
    sink = lambda i, j: f"{prefix}s_{i}_{j}"  # noqa: E731  s_i^j
    for i in range(1, k + 2):
        vi = b.add(f"{prefix}v_{i}", C)
        b.edge(root, vi)
        for j in range(1, k + 1):
            s = b.add(sink(i, j), C)
            b.edge(vi, s)
            b.edge(s, s)
            sinks.append(s)
    objectives = []
    for i in range(1, k + 2):
        alpha = [sink(j, i) for j in range(i + 1, k + 2)]
        alpha += [sink(j, i - 1) for j in range(1, i)]
        alpha.append(sink(i, 1))
        objectives.append(alpha)
    return objectives, sinks


def _dualize_over(sinks: Sequence[str], objectives: Sequence[Sequence[str]]) -> list[list[str]]:
    # every play ends in a sink, so co-Buchi "sinks minus a" matches Buchi "a"
    return [[s for s in sinks if s not in set(a)] for a in objectives]


def fixture_nondecomposable(k: int = 2, kind: Kind | str = Kind.BUCHI) -> CoverageGame:
    """Coverer wins with k agents but cannot split the objectives up front."""
    if k < 2:
        raise GeneratorError("k must be at least 2")
    kind = Kind(kind)
    b = _Builder()
    objectives, sinks = _nondecomp_into(b, k, "")
    if kind is Kind.COBUCHI:
        objectives = _dualize_over(sinks, objectives)
    return b.game("v0", k, kind, [(f"a{i + 1}", a) for i, a in enumerate(objectives)])


def fixture_partial_decomposable(k: int, l: int, kind: Kind | str = Kind.BUCHI) -> CoverageGame:
    """(k,l)-decomposable at the initial vertex but not (k,l+1)-decomposable."""
    if k < 2 or not 1 <= l < k:
        raise GeneratorError("need k >= 2 and 1 <= l < k")
    kind = Kind(kind)
    b = _Builder()
    # Coverer owns the root; with Disruptor there the singleton sinks are unwinnable
    root = b.add("r", C)
    objectives: list[list[str]] = []
    sinks = []
    for i in range(1, l):
        s = b.add(f"w_{i}", C)
        b.edge(root, s)
        b.edge(s, s)
        sinks.append(s)
        objectives.append([s])
    entry = b.add(f"w_{l}", C)
    b.edge(root, entry)
    inner, inner_sinks = _nondecomp_into(b, k - (l - 1), "g.")
    b.edge(entry, "g.v0")
    objectives += inner
    sinks += inner_sinks
    if kind is Kind.COBUCHI:
        objectives = _dualize_over(sinks, objectives)
    return b.game("r", k, kind, [(f"a{i + 1}", a) for i, a in enumerate(objectives)])


def fixture_example_illustrative(kind: Kind | str = Kind.BUCHI) -> CoverageGame:
    """Three-objective demo game for the CLI and DOT output.

    Illustrative only; no test depends on its verdicts.
    """
    kind = Kind(kind)
    b = _Builder()
    for v, o in (("v0", D), ("v1", C), ("v2", C), ("u1", D), ("m1", D), ("d1", D),
                 ("u2", C), ("d2", C), ("u3", C), ("d3", C), ("w", D)):
        b.add(v, o)
    for e in (("v0", "u1"), ("v0", "m1"), ("v0", "d1"), ("v0", "w"), ("u1", "v0"),
              ("m1", "v0"), ("d1", "v0"), ("w", "v1"), ("w", "v2"),
              ("v1", "u2"), ("v1", "d2"), ("v2", "u3"), ("v2", "d3")):
        b.edge(*e)
    for s in ("u2", "d2", "u3", "d3"):
        b.edge(s, s)
    objs = [("a1", ["u1", "u2", "u3"]), ("a2", ["m1", "u2", "d3"]), ("a3", ["d1", "d2", "d3"])]
    return b.game("v0", 2, kind, objs)


# -- vertex cover -----------------------------------------------------------

def from_vertex_cover(g: UndirectedGraph, k: int, kind: Kind | str = Kind.BUCHI) -> CoverageGame:
    kind = Kind(kind)
    b = _Builder()
    b.add("v0", C)
    sinks = []
    for v in range(g.n):
        s = b.add(f"v_{v + 1}", C)
        b.edge("v0", s)
        b.edge(s, s)
        sinks.append(s)
    objectives = []
    for a, c in sorted(g.edges):
        endpoints = {f"v_{a + 1}", f"v_{c + 1}"}
        if kind is Kind.BUCHI:
            objectives.append((f"e_{a + 1}_{c + 1}", sorted(endpoints)))
        else:
            objectives.append((f"e_{a + 1}_{c + 1}", [s for s in sinks if s not in endpoints]))
    return b.game("v0", k, kind, objectives)


# -- 3SAT -------------------------------------------------------------------

ONE_PLAYER_COBUCHI = "one_player_cobuchi"
TWO_AGENT_BUCHI_COVERAGE = "two_agent_buchi_coverage"
TWO_AGENT_BUCHI_DISRUPTION = "two_agent_buchi_disruption"
SAT_TARGETS = (ONE_PLAYER_COBUCHI, TWO_AGENT_BUCHI_COVERAGE, TWO_AGENT_BUCHI_DISRUPTION)


def from_3sat(phi: CnfFormula, target: str) -> CoverageGame:
    """Two-agent games encoding satisfiability of a 3CNF formula.

    one_player_cobuchi: Coverer-only co-Buchi game, covered iff satisfiable.
    two_agent_buchi_coverage: covered iff satisfiable.
    two_agent_buchi_disruption: disrupted iff satisfiable.
    """
    if target not in SAT_TARGETS:
        raise GeneratorError(f"unknown target {target}")
    n, m = phi.n, len(phi.clauses)
    literals = [lit for i in range(1, n + 1) for lit in (i, -i)]
    clause_lits = [(i, j, phi.clauses[i - 1][j - 1]) for i in range(1, m + 1) for j in (1, 2, 3)]
    cl = lambda i, j: f"l_{i}_{j}"  # noqa: E731
    b = _Builder()
    b.add("v0", C)
    if target == ONE_PLAYER_COBUCHI:
        own_var = own_lit = C
    elif target == TWO_AGENT_BUCHI_COVERAGE:
        own_var, own_lit = C, D
    else:
        own_var, own_lit = D, C
    for i in range(1, n + 1):
        b.add(f"v_{i}", own_var)
    for lit in literals:
        b.add(lit_name(lit), own_lit)
    for i in range(1, m + 1):
        b.add(f"C_{i}", own_var)
    for i, j, _ in clause_lits:
        b.add(cl(i, j), own_lit)

    b.edge("v0", "v_1")
    b.edge("v0", "C_1")
    for i in range(1, n + 1):
        b.edge(f"v_{i}", f"x_{i}")
        b.edge(f"v_{i}", f"nx_{i}")
    for i in range(1, m + 1):
        for j in (1, 2, 3):
            b.edge(f"C_{i}", cl(i, j))
    if target == ONE_PLAYER_COBUCHI:
        for i in range(1, n + 1):
            nxt = f"v_{i % n + 1}"
            b.edge(f"x_{i}", nxt)
            b.edge(f"nx_{i}", nxt)
        for i, j, _ in clause_lits:
            b.edge(cl(i, j), f"C_{i % m + 1}")
    else:
        for lit in literals:
            b.edge(lit_name(lit), lit_name(lit))
            if abs(lit) < n:
                b.edge(lit_name(lit), f"v_{abs(lit) + 1}")
        for i, j, _ in clause_lits:
            b.edge(cl(i, j), cl(i, j))
            if i < m:
                b.edge(cl(i, j), f"C_{i + 1}")

    assignment_lits = [lit_name(l) for l in literals]
    objectives = [("a1", assignment_lits), ("a2", [cl(i, j) for i, j, _ in clause_lits])]
    for lit in literals:
        if target == ONE_PLAYER_COBUCHI:
            vs = [lit_name(lit)] + [cl(i, j) for i, j, x in clause_lits if x == -lit]
        elif target == TWO_AGENT_BUCHI_COVERAGE:
            vs = [lit_name(x) for x in literals if x != lit]
            vs += [cl(i, j) for i, j, x in clause_lits if x != -lit]
        else:
            vs = [lit_name(x) for x in literals if x != lit]
            vs += [cl(i, j) for i, j, x in clause_lits if x == -lit]
        objectives.append((f"a_{lit_name(lit)}", vs))
    kind = Kind.COBUCHI if target == ONE_PLAYER_COBUCHI else Kind.BUCHI
    return b.game("v0", 2, kind, objectives)


# -- QBF --------------------------------------------------------------------

def from_qbf(q: QbfFormula, kind: Kind | str = Kind.BUCHI) -> CoverageGame:
    """|X|-agent game covered iff the CNF-matrix QBF is true."""
    if q.dnf:
        raise GeneratorError("from_qbf needs a CNF matrix")
    kind = Kind(kind)
    n = q.matrix.n
    order = [v for _, v in q.prefix]
    quant = {v: qq for qq, v in q.prefix}
    # variable vertices follow the quantifier order
    pos = {v: i + 1 for i, v in enumerate(order)}
    b = _Builder()
    for v in order:
        b.add(f"v_{pos[v]}", C if quant[v] == "e" else D)
    for v in order:
        b.add(f"x_{v}", C)
        b.add(f"nx_{v}", C)
    for v in order:
        i = pos[v]
        b.edge(f"v_{i}", f"x_{v}")
        b.edge(f"v_{i}", f"nx_{v}")
        for lit in (f"x_{v}", f"nx_{v}"):
            b.edge(lit, lit)
        if i < n:
            if quant[v] == "e":
                b.edge(f"v_{i}", f"v_{i + 1}")
            else:
                b.edge(f"x_{v}", f"v_{i + 1}")
                b.edge(f"nx_{v}", f"v_{i + 1}")
    objectives = [(f"a_x_{v}", [f"x_{v}", f"nx_{v}"]) for v in range(1, n + 1)]
    objectives += [
        (f"a_C_{i + 1}", sorted({lit_name(l) for l in c})) for i, c in enumerate(q.matrix.clauses)
    ]
    if kind is Kind.COBUCHI:
        all_lits = [lit_name(l) for v in range(1, n + 1) for l in (v, -v)]
        objectives = [(lab, [x for x in all_lits if x not in set(vs)]) for lab, vs in objectives]
    return b.game("v_1", n, kind, objectives)


GENERAL_KIND = "general"
COBUCHI_TWO_AGENT = "cobuchi_two_agent"


def negate_dnf(matrix: CnfFormula) -> CnfFormula:
    return CnfFormula(matrix.n, tuple(tuple(-l for l in term) for term in matrix.clauses))


def from_2qbf_disruption(q: QbfFormula, target: str = GENERAL_KIND, kind: Kind | str = Kind.BUCHI) -> CoverageGame:
    """Games disrupted iff the exists-forall DNF formula `q` is true.

    `q.prefix` lists the X variables (quantifier 'e') before the Y variables
    ('a'); `q.matrix` holds conjunctive terms.
    """
    if not q.dnf:
        raise GeneratorError("2QBF disruption needs a DNF matrix")
    xs = [v for qq, v in q.prefix if qq == "e"]
    ys = [v for qq, v in q.prefix if qq == "a"]
    if not xs:
        raise GeneratorError("the existential block must be nonempty")
    if [qq for qq, _ in q.prefix] != ["e"] * len(xs) + ["a"] * len(ys):
        raise GeneratorError("prefix must be exists-block then forall-block")
    if target == GENERAL_KIND:
        flipped = tuple(("a" if qq == "e" else "e", v) for qq, v in q.prefix)
        return from_qbf(QbfFormula(flipped, negate_dnf(q.matrix)), kind)
    if target != COBUCHI_TWO_AGENT:
        raise GeneratorError(f"unknown target {target}")
    return _cobuchi_two_agent(q, xs, ys)


def _cobuchi_two_agent(q: QbfFormula, xs: list[int], ys: list[int]) -> CoverageGame:
    terms = q.matrix.clauses
    m = len(ys)
    x_lits = [lit for v in xs for lit in (v, -v)]
    y_lits = [lit for v in ys for lit in (v, -v)]
    yi = {v: i + 1 for i, v in enumerate(ys)}  # Y variables get positions 1..m
    b = _Builder()

    def yname(lit: int, copy: str = "") -> str:
        base = f"y_{yi[abs(lit)]}" if lit > 0 else f"ny_{yi[abs(lit)]}"
        return base + (f"@{copy}" if copy else "")

    def ucopy(i: int, copy: str = "") -> str:
        return f"u_{i}" + (f"@{copy}" if copy else "")

    refute = lambda i, j: f"r_{i}_{j}"  # noqa: E731  vertex for the negation of term literal (i, j)

    b.add("v0", C)
    for lit in x_lits:
        b.add(lit_name(lit), C)
    for lit in x_lits:
        tag = lit_name(lit)
        for i in range(1, m + 1):
            b.add(ucopy(i, tag), C)
            b.add(yname(ys[i - 1], tag), C)
            b.add(yname(-ys[i - 1], tag), C)
    for i in range(1, m + 1):
        b.add(ucopy(i), C)
        b.add(yname(ys[i - 1]), C)
        b.add(yname(-ys[i - 1]), C)
    for i in range(1, len(terms) + 1):
        b.add(f"C_{i}", C)
    for i in range(1, len(terms) + 1):
        for j in (1, 2, 3):
            b.add(refute(i, j), C)
    for v in xs:
        b.add(f"v_{v}", D)
    b.add("c", D)

    for v in xs:
        b.edge("v0", f"v_{v}")
    refute_entry = ucopy(1) if m else "c"
    b.edge("v0", refute_entry)
    for v in xs:
        b.edge(f"v_{v}", f"x_{v}")
        b.edge(f"v_{v}", f"nx_{v}")
    for lit in x_lits:
        tag = lit_name(lit)
        if m == 0:
            b.edge(tag, tag)
            continue
        b.edge(tag, ucopy(1, tag))
        for i in range(1, m + 1):
            for ylit in (ys[i - 1], -ys[i - 1]):
                b.edge(ucopy(i, tag), yname(ylit, tag))
                b.edge(yname(ylit, tag), ucopy(i + 1, tag) if i < m else tag)
    for i in range(1, m + 1):
        for ylit in (ys[i - 1], -ys[i - 1]):
            b.edge(ucopy(i), yname(ylit))
            b.edge(yname(ylit), ucopy(i + 1) if i < m else "c")
    for i, term in enumerate(terms, start=1):
        b.edge("c", f"C_{i}")
        for j, lit in enumerate(term, start=1):
            b.edge(f"C_{i}", refute(i, j))
            if abs(lit) in yi:
                b.edge(refute(i, j), refute_entry)
            else:
                b.edge(refute(i, j), refute(i, j))

    refutes = [(refute(i, j), -lit) for i, term in enumerate(terms, start=1) for j, lit in enumerate(term, start=1)]
    x_names = [lit_name(l) for l in x_lits]
    objectives = [("a1", x_names), ("a2", [r for r, _ in refutes])]
    for lit in y_lits:
        vs = [yname(lit)] + [yname(lit, lit_name(xl)) for xl in x_lits]
        vs += [r for r, rl in refutes if rl == lit]
        objectives.append((f"a_{'y' if lit > 0 else 'ny'}_{yi[abs(lit)]}", vs))
    for lit in x_lits:
        vs = [x for x in x_names if x != lit_name(lit)]
        vs += [r for r, rl in refutes if rl == lit]
        objectives.append((f"a_{lit_name(lit)}", vs))
    return b.game("v0", 2, Kind.COBUCHI, objectives)


# -- random instances -------------------------------------------------------

def random_cnf(rng: random.Random, max_vars: int = 4, max_clauses: int = 4) -> CnfFormula:
    n = rng.randint(1, max_vars)
    m = rng.randint(1, max_clauses)
    clauses = []
    for _ in range(m):
        size = rng.randint(1, 3)
        clauses.append([rng.choice((1, -1)) * rng.randint(1, n) for _ in range(size)])
    return CnfFormula.of(n, clauses)


def random_qbf(rng: random.Random, max_vars: int = 3, max_clauses: int = 3) -> QbfFormula:
    phi = random_cnf(rng, max_vars, max_clauses)
    order = list(range(1, phi.n + 1))
    rng.shuffle(order)
    return QbfFormula(tuple((rng.choice("ea"), v) for v in order), phi)


def random_2qbf(rng: random.Random, max_total: int = 4, max_terms: int = 3) -> QbfFormula:
    nx = rng.randint(1, max_total - 1) if max_total > 1 else 1
    ny = rng.randint(0, max_total - nx)
    n = nx + ny
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        size = rng.randint(1, 3)
        terms.append([rng.choice((1, -1)) * rng.randint(1, n) for _ in range(size)])
    phi = CnfFormula.of(n, terms)
    prefix = tuple(("e", v) for v in range(1, nx + 1)) + tuple(("a", v) for v in range(nx + 1, n + 1))
    return QbfFormula(prefix, phi, dnf=True)


def random_game(
    rng: random.Random,
    n_vertices: int,
    n_objectives: int,
    agents: int,
    kind: Kind | str = Kind.BUCHI,
    owners: str = "mixed",
    max_out: int = 3,
) -> CoverageGame:
    """Random total game graph; `owners` is "mixed", "coverer" or "disruptor"."""
    kind = Kind(kind)
    vertices = []
    for v in range(n_vertices):
        if owners == "coverer":
            o = C
        elif owners == "disruptor":
            o = D
        else:
            o = rng.choice((C, D))
        vertices.append((f"q{v}", o))
    edges = []
    for v in range(n_vertices):
        k = rng.randint(1, min(max_out, n_vertices))
        for w in sorted(rng.sample(range(n_vertices), k)):
            edges.append((f"q{v}", f"q{w}"))
    graph = GameGraph.build(vertices, edges, "q0")
    objs = []
    for i in range(n_objectives):
        size = rng.randint(0, n_vertices)
        objs.append(Objective(kind, graph.vset(rng.sample(range(n_vertices), size)), f"a{i + 1}"))
    return CoverageGame(graph, agents, tuple(objs), kind)
