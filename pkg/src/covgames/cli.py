"""covgames command line: solve, analyze, generate and verify coverage games.

stdout carries exactly one JSON document; diagnostics go to stderr.
Exit codes: 0 decided/verified, 2 input error, 3 budget exceeded,
4 cross-check disagreement, 5 strategy refuted.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import coverage, disruption, reductions
from .game import GameError, Kind, bits, game_to_json, load_game, scc_decomposition, to_dot

EXIT_OK, EXIT_INPUT, EXIT_BUDGET, EXIT_DISAGREE, EXIT_REFUTED = 0, 2, 3, 4, 5
FIXED_BETA_LIMIT = 4


class InputError(Exception):
    pass


def _emit(doc) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load(path: str):
    try:
        return load_game(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except GameError as exc:
        raise InputError(f"{path}: {exc}") from None


# -- solve ------------------------------------------------------------------

def cmd_solve(args) -> int:
    game = _load(args.file)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(game))
    start = time.perf_counter()
    stats: dict = {}
    witness_path = None
    disagreements: list[str] = []
    g = game.graph
    if args.problem == "coverage":
        want_tree = bool(args.strategy_out) or args.cross_check
        answer, tree = coverage.solve_coverage(game, synthesize=want_tree, stats=stats)
        if answer and args.strategy_out:
            _write_json(args.strategy_out, coverage.tree_to_json(tree, g))
            witness_path = args.strategy_out
        if args.cross_check:
            regime = coverage.coverage_by_regime(game)
            if regime is not None and regime != answer:
                disagreements.append(f"regime shortcut says {regime}")
            per_vertex = coverage.winning_coverage_set(g, game.agents, game.masks, game.kind)
            if bool(per_vertex >> g.initial & 1) != answer:
                disagreements.append("full-graph winning set disagrees at the initial vertex")
            if answer:
                reason = coverage.check_covering_strategy(tree, game)
                if reason:
                    disagreements.append(f"synthesized strategy fails: {reason}")
    else:
        answer, witness = disruption.solve_disruption(game, args.budget, args.jobs, stats)
        if answer and args.strategy_out:
            _write_json(args.strategy_out, witness.to_json(g))
            witness_path = args.strategy_out
        if args.cross_check:
            if len(game.objectives) <= FIXED_BETA_LIMIT:
                other = disruption.solve_disruption_fixed_beta(game)
                if other != answer:
                    disagreements.append(f"fixed-objective route says {other}")
            else:
                _note(f"cross-check: more than {FIXED_BETA_LIMIT} objectives, fixed-objective route skipped")
            if answer and coverage.solve_coverage(game, synthesize=False)[0]:
                disagreements.append("coverage also holds")
    elapsed = round((time.perf_counter() - start) * 1000)
    doc = {
        "problem": args.problem,
        "answer": answer,
        "witnessPath": witness_path,
        "stats": {
            "subproblemsSolved": stats.get("subproblems", 0),
            "candidatesEnumerated": stats.get("candidates", 0),
        },
    }
    if args.timing:
        doc["stats"]["elapsedMillis"] = elapsed
    else:
        _note(f"elapsed {elapsed} ms")
    if disagreements:
        doc["disagreements"] = disagreements
        _emit(doc)
        for d in disagreements:
            _note(f"cross-check failed: {d}")
        return EXIT_DISAGREE
    _emit(doc)
    return EXIT_OK


# -- analyze ----------------------------------------------------------------

def cmd_analyze(args) -> int:
    game = _load(args.file)
    g = game.graph
    table = coverage.CoverageTable(g, game.masks, game.kind)
    k, objs = game.agents, game.all_objectives
    win = table.win(k, objs)
    if objs:
        d, attr, _ = table.avoid_region(k, objs)
    else:
        d, attr = 0, 0
    avoid = g.full & ~attr
    avoid_edges = [[g.ids[a], g.ids[b]] for a, b in g.edges() if avoid >> a & 1 and avoid >> b & 1]
    winning = [
        {"agents": kk, "objectives": list(bits(oo)), "vertices": g.names(w)}
        for (kk, oo), w in sorted(table._win.items())
    ]
    _emit({
        "decomposable": g.names(d),
        "attractor": g.names(attr),
        "avoid": {"vertices": g.names(avoid), "edges": avoid_edges},
        "sccs": [{"vertices": g.names(c), "trivial": t} for c, t in scc_decomposition(g)],
        "winning": g.names(win),
        "winningSets": winning,
    })
    return EXIT_OK


# -- generate ---------------------------------------------------------------

def parse_dimacs(text: str) -> tuple[reductions.CnfFormula, list[tuple[str, list[int]]]]:
    """DIMACS CNF, optionally with QDIMACS 'a'/'e' prefix lines."""
    n = None
    prefix: list[tuple[str, list[int]]] = []
    clauses: list[list[int]] = []
    pending: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        parts = line.split()
        if parts[0] == "p":
            if len(parts) < 4 or parts[1] != "cnf":
                raise InputError(f"bad header: {line}")
            n = int(parts[2])
            continue
        if parts[0] in ("a", "e"):
            nums = [int(x) for x in parts[1:]]
            if not nums or nums[-1] != 0:
                raise InputError(f"quantifier line must end with 0: {line}")
            prefix.append((parts[0], nums[:-1]))
            continue
        for x in parts:
            lit = int(x)
            if lit == 0:
                clauses.append(pending)
                pending = []
            else:
                pending.append(lit)
    if pending:
        clauses.append(pending)
    if n is None:
        raise InputError("missing 'p cnf' header")
    try:
        return reductions.CnfFormula.of(n, clauses), prefix
    except reductions.GeneratorError as exc:
        raise InputError(str(exc)) from None


def _read(path: str) -> str:
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _qbf(path: str, dnf: bool) -> reductions.QbfFormula:
    phi, blocks = parse_dimacs(_read(path))
    bound = {v for _, vs in blocks for v in vs}
    free = [("e", v) for v in range(1, phi.n + 1) if v not in bound]
    prefix = free + [(q, v) for q, vs in blocks for v in vs]
    try:
        return reductions.QbfFormula(tuple(prefix), phi, dnf=dnf)
    except reductions.GeneratorError as exc:
        raise InputError(str(exc)) from None


SAT_TARGETS = {
    "oneplayer": reductions.ONE_PLAYER_COBUCHI,
    "cover2": reductions.TWO_AGENT_BUCHI_COVERAGE,
    "disrupt2": reductions.TWO_AGENT_BUCHI_DISRUPTION,
}
QBF2_TARGETS = {"general": reductions.GENERAL_KIND, "cobuchi2": reductions.COBUCHI_TWO_AGENT}


def cmd_generate(args) -> int:
    kind = Kind(args.objective)
    label = None
    try:
        if args.family == "undetermined":
            game = reductions.fixture_undetermined(kind)
        elif args.family == "nondecomp":
            game = reductions.fixture_nondecomposable(args.k or 2, kind)
        elif args.family == "partial":
            game = reductions.fixture_partial_decomposable(args.k or 3, args.l or 2, kind)
        elif args.family == "vc":
            if not args.graph:
                raise InputError("vc needs --graph")
            data = json.loads(_read(args.graph))
            ug = reductions.UndirectedGraph.of(data["n"], [tuple(e) for e in data["edges"]])
            k = args.k or 1
            game = reductions.from_vertex_cover(ug, k, kind)
            label = reductions.vertex_cover_brute(ug, k)
        elif args.family == "sat3":
            if not args.cnf:
                raise InputError("sat3 needs --cnf")
            phi, _ = parse_dimacs(_read(args.cnf))
            game = reductions.from_3sat(phi, SAT_TARGETS[args.target or "cover2"])
            label = reductions.sat_brute(phi)
        elif args.family == "qbf":
            if not args.cnf:
                raise InputError("qbf needs --cnf")
            q = _qbf(args.cnf, dnf=False)
            game = reductions.from_qbf(q, kind)
            label = reductions.qbf_brute(q)
        else:
            if not args.cnf:
                raise InputError("qbf2 needs --cnf")
            q = _qbf(args.cnf, dnf=True)
            game = reductions.from_2qbf_disruption(q, QBF2_TARGETS[args.target or "general"], kind)
            label = reductions.qbf_brute(q)
    except (reductions.GeneratorError, KeyError, TypeError, ValueError) as exc:
        raise InputError(f"generate: {exc}") from None
    doc = game_to_json(game)
    if args.out:
        _write_json(args.out, doc)
        result = {"out": args.out}
        if args.label:
            result["oracle"] = label
        _emit(result)
    elif args.label:
        _emit({"game": doc, "oracle": label})
    else:
        _emit(doc)
    if args.dot:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(to_dot(game))
    return EXIT_OK


# -- verify -----------------------------------------------------------------

def cmd_verify(args) -> int:
    game = _load(args.file)
    try:
        tree = coverage.tree_from_json(json.loads(_read(args.strategy)), game.graph)
    except json.JSONDecodeError as exc:
        raise InputError(f"{args.strategy}: invalid JSON: {exc.msg}") from None
    except coverage.TreeFormatError as exc:
        raise InputError(f"{args.strategy}: {exc}") from None
    try:
        reason = coverage.check_covering_strategy(tree, game)
    except coverage.StructuralError as exc:
        reason = f"structural: {exc}"
    _emit({"verified": reason is None, "reason": reason})
    if reason:
        _note(f"refuted: {reason}")
        return EXIT_REFUTED
    return EXIT_OK


# -- entry point ------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="covgames", description="Coverage games with Buchi and co-Buchi objectives.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide coverage or disruption")
    s.add_argument("file")
    s.add_argument("--problem", choices=("coverage", "disruption"), default="coverage")
    s.add_argument("--strategy-out", metavar="PATH")
    s.add_argument("--cross-check", action="store_true", help="run an independent second algorithm")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--budget", type=int, default=None, help="enumeration cap for disruption")
    s.add_argument("--dot", metavar="PATH", help="also write the game as DOT")
    s.add_argument("--timing", action="store_true", help="include elapsed time in the JSON stats")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("analyze", help="report the sets behind the coverage decision")
    a.add_argument("file")
    a.set_defaults(func=cmd_analyze)

    gen = sub.add_parser("generate", help="write a fixture or reduction instance")
    gen.add_argument("family", choices=("undetermined", "nondecomp", "partial", "vc", "sat3", "qbf", "qbf2"))
    gen.add_argument("--objective", choices=("buchi", "cobuchi"), default="buchi")
    gen.add_argument("--k", type=int)
    gen.add_argument("--l", type=int)
    gen.add_argument("--graph", metavar="PATH", help='vc input: {"n": 3, "edges": [[1, 2], ...]}')
    gen.add_argument("--cnf", metavar="PATH", help="DIMACS CNF; QDIMACS prefix lines for qbf/qbf2")
    gen.add_argument("--target", help="sat3: oneplayer|cover2|disrupt2; qbf2: general|cobuchi2")
    gen.add_argument("--label", action="store_true", help="report the brute-force oracle answer")
    gen.add_argument("--out", metavar="PATH")
    gen.add_argument("--dot", metavar="PATH")
    gen.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="check a covering strategy tree")
    v.add_argument("file")
    v.add_argument("--strategy", required=True, metavar="PATH")
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        _note(f"error: {exc}")
        return EXIT_INPUT
    except disruption.BudgetExceeded as exc:
        _note(f"budget exceeded: {exc}")
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
