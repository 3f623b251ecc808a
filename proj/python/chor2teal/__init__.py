"""Compile BPMN choreographies to TEAL and estimate their Algorand costs."""

import json

from ._core import (
    EmissionError,
    Error,
    ParseError,
    Process,
    SimulationError,
    ValidationError,
    alg_opcode_cost,
    compile,
    crossovers,
    min_balance_storage,
    min_balance_total,
    multi_instance_curve,
    simulate,
)
from ._core import bench as _bench


def bench(process, count=2000, seed=0):
    """Run the oracle/simulator comparison; returns the report as a dict."""
    return json.loads(_bench(process, count, seed))


__all__ = [
    "EmissionError",
    "Error",
    "ParseError",
    "Process",
    "SimulationError",
    "ValidationError",
    "alg_opcode_cost",
    "bench",
    "compile",
    "crossovers",
    "min_balance_storage",
    "min_balance_total",
    "multi_instance_curve",
    "simulate",
]
