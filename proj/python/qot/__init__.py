"""Quantum optimal transport with the swap-symmetric cost."""

import json

from ._qot import (
    DensityMatrix,
    QotError,
    bures_distance,
    classical_cost,
    diagonal_state,
    fidelity,
    geometry_cost,
    is_pure,
    maximally_mixed,
    qubit_cost,
    qubit_state,
    random_density,
    random_pure,
    root_infidelity,
    simplex_cost,
    solve,
    swap_fidelity,
    trace_distance,
    transport_cost,
)
from . import _qot


def scan(name, dim=2, order=2.0, exponent=0.0, geometry="simplex", samples=1000, seed=1,
         threads=0, measure="hilbert-schmidt", tolerance=-1.0, expect_violation=False):
    """Runs a seeded inequality scan and returns the report as a dict."""
    return json.loads(_qot._scan(name, dim, order, exponent, geometry, samples, seed, threads,
                                 measure, tolerance, expect_violation))


__all__ = [
    "DensityMatrix", "QotError", "bures_distance", "classical_cost", "diagonal_state",
    "fidelity", "geometry_cost", "is_pure", "maximally_mixed", "qubit_cost", "qubit_state",
    "random_density", "random_pure", "root_infidelity", "scan", "simplex_cost", "solve",
    "swap_fidelity", "trace_distance", "transport_cost",
]
