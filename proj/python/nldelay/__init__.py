"""Delayed non-local traffic model: LF and HW finite-volume solvers with invariant checks."""

from ._core import (
    ConfigError,
    Scenario,
    StepError,
    compare_schemes,
    l1_norm,
    load_scenario,
    log_tv_factor,
    parse_scenario,
    preset,
    preset_names,
    run_scenario,
    simulate,
    single_step,
    tau_sweep,
    total_variation,
    tv_bound,
)

__all__ = [
    "ConfigError",
    "Scenario",
    "StepError",
    "compare_schemes",
    "l1_norm",
    "load_scenario",
    "log_tv_factor",
    "parse_scenario",
    "preset",
    "preset_names",
    "run_scenario",
    "simulate",
    "single_step",
    "tau_sweep",
    "total_variation",
    "tv_bound",
]
