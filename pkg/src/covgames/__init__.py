"""Multi-agent coverage games with Buchi and co-Buchi objectives."""

from __future__ import annotations

from .game import (
    CoverageGame,
    GameError,
    GameFormatError,
    GameGraph,
    Kind,
    LassoPath,
    Objective,
    Player,
    game_from_json,
    game_to_json,
    load_game,
    validate,
)

__all__ = [
    "CoverageGame",
    "GameError",
    "GameFormatError",
    "GameGraph",
    "Kind",
    "LassoPath",
    "Objective",
    "Player",
    "game_from_json",
    "game_to_json",
    "load_game",
    "validate",
]
