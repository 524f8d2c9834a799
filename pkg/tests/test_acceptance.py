"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

from __future__ import annotations

import functools
import random
import time

import pytest

from covgames.coverage import (
    coverage_by_regime,
    is_decomposable,
    solve_coverage,
    verify_covering_strategy,
)
from covgames.disruption import (
    solve_disruption,
    solve_disruption_buchi,
    solve_disruption_cobuchi,
    solve_disruption_fixed_beta,
)
from covgames.game import Kind, Player
from covgames.oneplayer import (
    coverage_one_player_coverer,
    coverage_one_player_disruptor,
    disruption_one_player_disruptor,
)
from covgames.reductions import (
    COBUCHI_TWO_AGENT,
    GENERAL_KIND,
    ONE_PLAYER_COBUCHI,
    TWO_AGENT_BUCHI_COVERAGE,
    TWO_AGENT_BUCHI_DISRUPTION,
    fixture_nondecomposable,
    fixture_partial_decomposable,
    fixture_undetermined,
    from_2qbf_disruption,
    from_3sat,
    from_qbf,
    qbf_brute,
    random_2qbf,
    random_cnf,
    random_game,
    random_qbf,
    sat_brute,
)
from covgames.solvers import (
    solve_all_buchi,
    solve_buchi,
    solve_cobuchi,
    superset_to_all_buchi,
)

from helpers import all_buchi_oracle, corpus, decomposable_l, profile_winners, superset_holds

KINDS = (Kind.BUCHI, Kind.COBUCHI)
pytestmark = pytest.mark.acceptance


def report(capsys, n: int, ok: bool, what: str, elapsed: float) -> None:
    with capsys.disabled():
        print(f"\n[criterion {n}] {'PASS' if ok else 'FAIL'} {what} ({elapsed:.2f} s)")


@functools.lru_cache(maxsize=None)
def random_corpus():
    return tuple(corpus(seed=20240601, count=600))


@functools.lru_cache(maxsize=None)
def verdicts():
    out = []
    for game in random_corpus():
        out.append((solve_coverage(game, synthesize=False)[0], solve_disruption(game)[0]))
    return tuple(out)


def test_criterion_1_undetermined_fixture(capsys):
    bad = []
    slowest = 0.0
    for kind in KINDS:
        game = fixture_undetermined(kind)
        for name, run in (("coverage", lambda: solve_coverage(game)[0]), ("disruption", lambda: solve_disruption(game)[0])):
            t = time.perf_counter()
            got = run()
            dt = time.perf_counter() - t
            slowest = max(slowest, dt)
            if got is not False or dt >= 1.0:
                bad.append(f"{kind.value} {name}={got} in {dt:.2f}s")
    report(capsys, 1, not bad, f"undetermined fixture, both kinds: neither player wins {bad or ''}", slowest)
    assert not bad


def test_criterion_2_nondecomposable_fixtures(capsys):
    bad = []
    t0 = time.perf_counter()
    for kind in KINDS:
        for k in (2, 3):
            t = time.perf_counter()
            game = fixture_nondecomposable(k, kind)
            verdict, tree = solve_coverage(game)
            decomp = is_decomposable(game, "v0")
            verified = tree is not None and verify_covering_strategy(tree, game)
            dt = time.perf_counter() - t
            if not (verdict and not decomp and verified and dt < 5.0):
                bad.append((kind.value, k, verdict, decomp, verified, round(dt, 2)))
    k2_game = fixture_nondecomposable(2, Kind.BUCHI)
    names = [sorted(k2_game.graph.names(m)) for m in k2_game.masks]
    expected = [
        sorted(["s_2_1", "s_3_1", "s_1_1"]),
        sorted(["s_3_2", "s_1_1", "s_2_1"]),
        sorted(["s_1_2", "s_2_2", "s_3_1"]),
    ]
    if names != expected:
        bad.append(("objective sets", names))
    report(capsys, 2, not bad, f"non-decomposable fixtures k=2,3 both kinds {bad or ''}", time.perf_counter() - t0)
    assert not bad


def test_criterion_3_partial_decomposability(capsys):
    t0 = time.perf_counter()
    bad = []
    for kind in KINDS:
        game = fixture_partial_decomposable(3, 2, kind)
        at2 = decomposable_l(game, game.graph.initial, 2)
        at3 = decomposable_l(game, game.graph.initial, 3)
        if not (at2 and not at3):
            bad.append((kind.value, at2, at3))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 30.0
    report(capsys, 3, ok, f"(k=3,l=2) boundary: l=2 holds, l=3 fails {bad or ''}", dt)
    assert ok


def test_criterion_4_regime_equivalences(capsys):
    t0 = time.perf_counter()
    games = random_corpus()
    bad = []
    k1 = kbig = 0
    for game, (cov, dis) in zip(games, verdicts()):
        g, v0 = game.graph, game.graph.initial
        if game.agents == 1:
            k1 += 1
            if game.kind is Kind.BUCHI:
                direct = bool(solve_all_buchi(g, game.masks, Player.COVERER)[0] >> v0 & 1)
            else:
                union = 0
                for m in game.masks:
                    union |= m
                direct = bool(solve_cobuchi(g, union, Player.COVERER)[0] >> v0 & 1)
            if cov != direct or coverage_by_regime(game) != cov:
                bad.append(("k=1", game))
        if game.agents >= len(game.objectives):
            kbig += 1
            single = solve_buchi if game.kind is Kind.BUCHI else solve_cobuchi
            dual = solve_cobuchi if game.kind is Kind.BUCHI else solve_buchi
            all_single = all(single(g, m, Player.COVERER)[0] >> v0 & 1 for m in game.masks)
            some_dual = any(dual(g, m, Player.DISRUPTOR)[0] >> v0 & 1 for m in game.masks)
            if cov != all_single or dis != some_dual or cov == dis:
                bad.append(("k>=m", game))
    dt = time.perf_counter() - t0
    ok = not bad and len(games) >= 500 and dt < 300
    report(capsys, 4, ok, f"{len(games)} games ({k1} with k=1, {kbig} with k>=|beta|), {len(bad)} disagreements", dt)
    assert ok


def test_criterion_5_consistency_and_monotonicity(capsys):
    t0 = time.perf_counter()
    bad = []
    for game, (cov, dis) in zip(random_corpus(), verdicts()):
        if cov and dis:
            bad.append(("both", game))
        more = game.replace(agents=game.agents + 1)
        if cov and not solve_coverage(more, synthesize=False)[0]:
            bad.append(("coverage not monotone in k", game))
        if solve_disruption(more)[0] and not dis:
            bad.append(("disruption not anti-monotone in k", game))
        if cov:
            for drop in range(len(game.objectives)):
                keep = [i for i in range(len(game.objectives)) if i != drop]
                if not solve_coverage(game.with_objectives(keep), synthesize=False)[0]:
                    bad.append(("coverage not anti-monotone in beta", game))
    dt = time.perf_counter() - t0
    report(capsys, 5, not bad, f"{len(random_corpus())} games, {len(bad)} violations", dt)
    assert not bad


def test_criterion_6_reduction_sweeps(capsys):
    t0 = time.perf_counter()
    rng = random.Random(6)
    bad = []
    n_sat = 500
    for _ in range(n_sat):
        phi = random_cnf(rng, 4, 4)
        truth = sat_brute(phi)
        one = from_3sat(phi, ONE_PLAYER_COBUCHI)
        got = (
            coverage_one_player_coverer(one.graph, one.agents, one.masks, one.kind),
            solve_coverage(from_3sat(phi, TWO_AGENT_BUCHI_COVERAGE), synthesize=False)[0],
            solve_disruption_buchi(from_3sat(phi, TWO_AGENT_BUCHI_DISRUPTION))[0],
        )
        if got != (truth,) * 3:
            bad.append(("3sat", phi, truth, got))
    n_qbf = 300
    for _ in range(n_qbf):
        q = random_qbf(rng, 3, 3)
        truth = qbf_brute(q)
        got = tuple(solve_coverage(from_qbf(q, kind), synthesize=False)[0] for kind in KINDS)
        if got != (truth, truth):
            bad.append(("qbf", q, truth, got))
    n_2qbf = 150
    for _ in range(n_2qbf):
        q = random_2qbf(rng, 4, 3)
        truth = qbf_brute(q)
        got = (
            solve_disruption(from_2qbf_disruption(q, GENERAL_KIND, Kind.BUCHI))[0],
            solve_disruption(from_2qbf_disruption(q, GENERAL_KIND, Kind.COBUCHI))[0],
            solve_disruption(from_2qbf_disruption(q, COBUCHI_TWO_AGENT))[0],
        )
        if got != (truth,) * 3:
            bad.append(("2qbf", q, truth, got))
    dt = time.perf_counter() - t0
    ok = not bad and dt < 900
    report(capsys, 6, ok, f"3SAT {n_sat}, QBF {n_qbf}, 2QBF {n_2qbf} formulas, {len(bad)} disagreements", dt)
    assert ok


def test_criterion_7_disruption_cross_validation(capsys):
    t0 = time.perf_counter()
    bad = []
    counts = {Kind.BUCHI: 0, Kind.COBUCHI: 0}
    for game in random_corpus():
        if len(game.objectives) > 4:
            continue
        counts[game.kind] += 1
        if game.kind is Kind.BUCHI:
            main = solve_disruption_buchi(game)[0]
        else:
            main = solve_disruption_cobuchi(game)[0]
        if main != solve_disruption_fixed_beta(game):
            bad.append(game)
    dt = time.perf_counter() - t0
    report(
        capsys, 7, not bad,
        f"{counts[Kind.BUCHI]} Buchi and {counts[Kind.COBUCHI]} co-Buchi games vs fixed-objective route, {len(bad)} disagreements",
        dt,
    )
    assert not bad


def test_criterion_8_one_player_agreement(capsys):
    t0 = time.perf_counter()
    rng = random.Random(8)
    bad = []
    for side in ("coverer", "disruptor"):
        for i in range(200):
            kind = KINDS[i % 2]
            game = random_game(rng, rng.randint(1, 10), rng.randint(0, 4), rng.randint(1, 4), kind, owners=side)
            g, k, beta = game.graph, game.agents, game.masks
            general_cov = solve_coverage(game, synthesize=False)[0]
            general_dis = solve_disruption(game)[0]
            if side == "coverer":
                routes = (
                    coverage_one_player_coverer(g, k, beta, kind),
                    general_cov,
                    not general_dis,
                    not solve_disruption_fixed_beta(game),
                )
            else:
                routes = (
                    coverage_one_player_disruptor(g, k, beta, kind),
                    not disruption_one_player_disruptor(g, k, beta, kind)[0],
                    general_cov,
                    not general_dis,
                )
            if len(set(routes)) != 1:
                bad.append((side, game, routes))
    dt = time.perf_counter() - t0
    report(capsys, 8, not bad, f"200 games per side, 4 routes each, {len(bad)} disagreements", dt)
    assert not bad


def test_criterion_9_classical_solver_oracles(capsys):
    t0 = time.perf_counter()
    rng = random.Random(9)
    bad = []
    n_games = 300
    for i in range(n_games):
        game = random_game(rng, rng.randint(1, 6), rng.randint(1, 3), 1, KINDS[i % 2])
        g = game.graph
        for player in (Player.COVERER, Player.DISRUPTOR):
            for alpha in game.masks:
                if solve_buchi(g, alpha, player)[0] != profile_winners(g, alpha, player, Kind.BUCHI):
                    bad.append(("buchi", game, player))
                if solve_cobuchi(g, alpha, player)[0] != profile_winners(g, alpha, player, Kind.COBUCHI):
                    bad.append(("cobuchi", game, player))
            if solve_all_buchi(g, game.masks, player)[0] != all_buchi_oracle(g, game.masks, player):
                bad.append(("all-buchi", game, player))
    n_super = 300
    for _ in range(n_super):
        n = rng.randint(1, 6)
        fams = [
            [rng.randrange(1 << n) for _ in range(rng.randint(1, 3))]
            for _ in range(rng.randint(1, 3))
        ]
        targets = superset_to_all_buchi(fams)
        for inf in range(1 << n):
            if superset_holds(inf, fams) != all(inf & t for t in targets):
                bad.append(("superset", fams, inf))
                break
    dt = time.perf_counter() - t0
    report(capsys, 9, not bad, f"{n_games} games vs profile products, {n_super} superset truth tables, {len(bad)} disagreements", dt)
    assert not bad

