"""Cheating probabilities, dual certificates and point games for BCCF coin-flipping protocols."""

import json
from fractions import Fraction

from ._core import (
    AliceDual,
    BccfError,
    BobDual,
    DimensionError,
    DomainError,
    InfeasibleDualError,
    NonConvergenceError,
    NormalizationError,
    ParseError,
    Party,
    PointGame,
    PointGameError,
    Protocol,
    QuantumResult,
    SolveOptions,
    TheoremViolation,
    Variant,
    build_classical_game,
    build_quantum_game,
    classical_alice_dual,
    classical_bob_dual,
    classical_cheat,
    eval_dual_alice,
    eval_dual_bob,
    fidelity,
    solve_quantum,
    three_quarters_protocol,
    trace_distance,
)
from ._core import _bias_report_json, _classical_cheat_exact


def classical_cheat_exact(protocol, party, outcome):
    num, den = _classical_cheat_exact(protocol, party, outcome)
    return Fraction(num, den)


def bias_report(protocol, mode="both", options=None):
    """The analysis report as a dict (same layout as the CLI's --json output)."""
    return json.loads(_bias_report_json(protocol, mode, options or SolveOptions()))


__all__ = [name for name in dir() if not name.startswith("_")]
