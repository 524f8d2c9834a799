from __future__ import annotations

import random

import pytest

from covgames.coverage import solve_coverage
from covgames.disruption import solve_disruption
from covgames.game import CoverageGame, GameGraph, Kind, Player
from covgames.oneplayer import (
    NotOnePlayer,
    coverage_one_player_coverer,
    coverage_one_player_disruptor,
    disruption_one_player_disruptor,
    maximal_satisfiable_sets,
)
from covgames.reductions import (
    ONE_PLAYER_COBUCHI,
    CnfFormula,
    UndirectedGraph,
    from_3sat,
    from_vertex_cover,
    random_game,
)

from helpers import satisfies


def fork(owner: int) -> GameGraph:
    return GameGraph.build(
        [("v0", owner), ("a", owner), ("b", owner)], [("v0", "a"), ("v0", "b"), ("a", "a"), ("b", "b")], "v0"
    )


def test_satisfiable_sets_examples():
    g = fork(1)
    a, b = g.vset(["a"]), g.vset(["b"])
    assert maximal_satisfiable_sets(g, [a, b], Kind.BUCHI).sets == (0b01, 0b10)
    assert maximal_satisfiable_sets(g, [a, b], Kind.COBUCHI).sets == (0b01, 0b10)
    ring = GameGraph.build([("x", 1), ("y", 1)], [("x", "y"), ("y", "x")], "x")
    assert maximal_satisfiable_sets(ring, [ring.vset(["x"]), ring.vset(["y"])], Kind.BUCHI).sets == (0b11,)


def test_not_one_player():
    with pytest.raises(NotOnePlayer):
        maximal_satisfiable_sets(fork(2), [], Kind.BUCHI)
    with pytest.raises(NotOnePlayer):
        disruption_one_player_disruptor(fork(1), 1, [], Kind.BUCHI)


def test_vertex_cover_triangle():
    k3 = UndirectedGraph.of(3, [(0, 1), (1, 2), (0, 2)])
    for kind in (Kind.BUCHI, Kind.COBUCHI):
        game = from_vertex_cover(k3, 2, kind)
        assert coverage_one_player_coverer(game.graph, 2, game.masks, kind)
        assert not coverage_one_player_coverer(game.graph, 1, game.masks, kind)


def test_single_literal_formula():
    game = from_3sat(CnfFormula.of(1, [[1, 1, 1]]), ONE_PLAYER_COBUCHI)
    assert coverage_one_player_coverer(game.graph, 2, game.masks, game.kind)


def test_empty_beta():
    assert coverage_one_player_coverer(fork(1), 1, [], Kind.BUCHI)
    assert coverage_one_player_disruptor(fork(2), 1, [], Kind.COBUCHI)


def test_disruptor_examples():
    g = fork(2)
    a, b = g.vset(["a"]), g.vset(["b"])
    ok, lasso = disruption_one_player_disruptor(g, 1, [a], Kind.BUCHI)
    assert ok and lasso.inf() == b and lasso.is_valid(g)
    assert not disruption_one_player_disruptor(g, 1, [a | b], Kind.BUCHI)[0]
    ok, lasso = disruption_one_player_disruptor(g, 1, [a], Kind.COBUCHI)
    assert ok and lasso.inf() == a
    assert not coverage_one_player_disruptor(g, 1, [a], Kind.BUCHI)
    assert coverage_one_player_disruptor(g, 1, [a | b], Kind.BUCHI)
    assert not coverage_one_player_disruptor(g, 1, [a], Kind.COBUCHI)


def _one_player_games(seed: int, count: int, owners: str):
    rng = random.Random(seed)
    for i in range(count):
        kind = (Kind.BUCHI, Kind.COBUCHI)[i % 2]
        yield random_game(rng, rng.randint(1, 10), rng.randint(1, 4), rng.randint(1, 3), kind, owners)


def test_four_way_agreement():
    for owners in ("coverer", "disruptor"):
        for game in _one_player_games(9100 + len(owners), 100, owners):
            g, k, beta, kind = game.graph, game.agents, game.masks, game.kind
            if owners == "coverer":
                special_cov = coverage_one_player_coverer(g, k, beta, kind)
            else:
                special_cov = coverage_one_player_disruptor(g, k, beta, kind)
            dis = disruption_one_player_disruptor(g, k, beta, kind)[0] if owners == "disruptor" else None
            general_cov = solve_coverage(game, synthesize=False)[0]
            general_dis = solve_disruption(game)[0]
            assert special_cov == general_cov != general_dis
            if dis is not None:
                assert dis == general_dis


def test_witness_lassos():
    for game in _one_player_games(9200, 200, "coverer"):
        g, beta, kind = game.graph, game.masks, game.kind
        found = maximal_satisfiable_sets(g, beta, kind)
        for s in found.sets:
            assert not any(s != t and s & t == s for t in found.sets)
        for sigma, lasso in zip(found.sets, found.witnesses):
            assert lasso.is_valid(g)
            assert all(satisfies(lasso.inf(), beta[i], kind) for i in range(len(beta)) if sigma >> i & 1)
            assert len(lasso) <= len(g.ids) * max(1, len(beta))


def test_disruptor_lasso_violates():
    for game in _one_player_games(9300, 200, "disruptor"):
        g, beta, kind = game.graph, game.masks, game.kind
        ok, lasso = disruption_one_player_disruptor(g, game.agents, beta, kind)
        if ok:
            assert lasso.is_valid(g)
            assert not all(satisfies(lasso.inf(), m, kind) for m in beta)
            assert len(lasso) <= len(g.ids) * max(1, len(beta))
