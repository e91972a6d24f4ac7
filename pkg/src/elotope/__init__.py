"""Elo rating dynamics, combinatorial Hodge decomposition and an intransitivity measure."""

from ._backend import BACKEND
from .chain import ChainConfig, ChainState, Trajectory, expected_step, init_chain, make_rng, run_chain, step_chain
from .game import (
    LOGISTIC,
    AdvantageMatrix,
    MatchRecord,
    PayoffMatrix,
    SelectionMatrix,
    SigmoidLink,
    ValidationError,
    advantage_from_payoff,
    estimate_payoff,
    payoff_from_advantage,
    tree_selection,
    uniform_selection,
)
from .hodge import div, frobenius_norm, grad, hodge_decompose, is_stacm, rot
from .intransitivity import IntransitivityReport, measure_from_records, measure_intransitivity
from .solver import (
    ElotopeSample,
    NotConverged,
    SolveReport,
    sample_elotope,
    solve_final_score,
    stability_residual,
    tree_final_score,
)

__version__ = "0.1.0"
