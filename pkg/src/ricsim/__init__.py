"""Discrete-event simulator of a Near-RT RIC running two slice-allocation xApps,
with a Central Controller that detects and resolves their direct conflicts."""

from .domain import (CellConfig, ControlDecision, ControlTarget, E2ControlMessage, PrbAllocation,
                     RanSnapshot, ScenarioError, validate_allocation)
from .scenario import RunResult, Scenario, compare, two_slice_scenario, run, run_replications

__all__ = [
    "CellConfig", "ControlDecision", "ControlTarget", "E2ControlMessage", "PrbAllocation",
    "RanSnapshot", "ScenarioError", "validate_allocation",
    "RunResult", "Scenario", "compare", "two_slice_scenario", "run", "run_replications",
]
