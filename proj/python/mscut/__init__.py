"""Unfitted concurrent multiscale elasticity on a single background mesh."""

from ._mscut import (
    LevelSet,
    Mesh,
    MscutError,
    RunResult,
    Scenario,
    cond_estimate,
    condstudy,
    cut_measures,
    generate_rect,
    load_scenario,
    mixing_alpha,
    mmt_effective,
    mmt_step,
    parse_scenario,
    project_p1,
    refine_near,
    run,
    validate_geometry,
    write_outputs,
)

__all__ = [
    "LevelSet",
    "Mesh",
    "MscutError",
    "RunResult",
    "Scenario",
    "cond_estimate",
    "condstudy",
    "cut_measures",
    "generate_rect",
    "load_scenario",
    "mixing_alpha",
    "mmt_effective",
    "mmt_step",
    "parse_scenario",
    "project_p1",
    "refine_near",
    "run",
    "validate_geometry",
    "write_outputs",
]
