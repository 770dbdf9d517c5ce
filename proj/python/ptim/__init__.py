"""Python access to the ptim simulation core."""

import json

from ._core import (
    CapExceededError,
    GridNetwork,
    InputError,
    ModelDomainError,
    TrafficParams,
    assimilate,
    build_grid,
    delay_variance,
    expected_delay,
    hazard_reduction,
    priority_benefit,
    run_policy_json,
    sample_params,
    stochastic_delay,
    stochastic_delay_variance,
)


def run_policy(scenario, policy="proactive"):
    """Run a scenario (dict) under one policy and return the result as a dict."""
    return json.loads(run_policy_json(json.dumps(scenario), policy))


__all__ = [
    "CapExceededError",
    "GridNetwork",
    "InputError",
    "ModelDomainError",
    "TrafficParams",
    "assimilate",
    "build_grid",
    "delay_variance",
    "expected_delay",
    "hazard_reduction",
    "priority_benefit",
    "run_policy",
    "run_policy_json",
    "sample_params",
    "stochastic_delay",
    "stochastic_delay_variance",
]
