"""ISAC beamforming and time allocation for edge learning."""

import json

from ._core import (
    ErrorModel,
    InfeasibleTaskError,
    IsacError,
    Scenario,
    SystemConfig,
    TaskSpec,
    classification_error,
    comm_sinr,
    db_to_linear,
    dbm_to_watts,
    fit_error_model,
    grid_oracle,
    isac_gain_analytic,
    linear_to_db,
    load_scenario,
    parse_scenario,
    rate,
    remark_surface,
    sensing_sinr,
    solve_beamforming,
    solve_report,
    solve_time_allocation,
    sweep_csv,
    watts_to_dbm,
    zf_oracle,
)


def solve(scenario, mode="equal_samples"):
    """Run the pipeline on a Scenario (or a path to one) and return the report as a dict."""
    if isinstance(scenario, str):
        scenario = load_scenario(scenario)
    return json.loads(solve_report(scenario, mode))


__all__ = [name for name in dir() if not name.startswith("_")]
