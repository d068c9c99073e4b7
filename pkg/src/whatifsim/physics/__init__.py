"""Impulse-based rigid body simulation on primitive shapes."""

from .engine import (
    DEFAULT_PARAMS,
    DT,
    GRAVITY,
    BodyState,
    ContactEvent,
    EngineParams,
    SimulationDiverged,
    SimulationResult,
    UnknownActionTarget,
    World,
    downsample_30hz,
    pair_penetration,
    settle,
    simulate,
    table_penetration,
)

__all__ = [
    "BodyState",
    "ContactEvent",
    "DEFAULT_PARAMS",
    "DT",
    "EngineParams",
    "GRAVITY",
    "SimulationDiverged",
    "SimulationResult",
    "UnknownActionTarget",
    "World",
    "downsample_30hz",
    "pair_penetration",
    "settle",
    "simulate",
    "table_penetration",
]
