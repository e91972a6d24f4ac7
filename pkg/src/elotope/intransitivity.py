"""Intransitivity measure: ``(1 + ||cyclic||_F) / (1 + ||transitive||_F)`` of the advantage matrix."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from .game import (
    LOGISTIC,
    AdvantageMatrix,
    MatchRecord,
    SigmoidLink,
    advantage_from_payoff,
    estimate_payoff,
    payoff_from_counts,
)
from .hodge import frobenius_norm, hodge_decompose


class Classification(str, Enum):
    PREDOMINANTLY_TRANSITIVE = "predominantly_transitive"
    BALANCED = "balanced"
    EFFECTIVELY_INTRANSITIVE = "effectively_intransitive"


@dataclass(frozen=True)
class IntransitivityReport:
    measure: float
    transitive_norm: float
    cyclic_norm: float
    classification: Classification

    def as_dict(self) -> dict:
        d = asdict(self)
        d["classification"] = self.classification.value
        return d


def classify(measure: float) -> Classification:
    if measure < 1.0:
        return Classification.PREDOMINANTLY_TRANSITIVE
    if measure > 1.0:
        return Classification.EFFECTIVELY_INTRANSITIVE
    return Classification.BALANCED


def measure_intransitivity(advantage) -> IntransitivityReport:
    """Accepts an :class:`AdvantageMatrix` or any finite skew-symmetric array.

    Norms are not normalised by the number of players, so values for
    different ``m`` are not comparable.
    """
    a = advantage.values if isinstance(advantage, AdvantageMatrix) else advantage
    transitive, cyclic = hodge_decompose(a)
    t_norm = frobenius_norm(transitive)
    c_norm = frobenius_norm(cyclic)
    measure = (1.0 + c_norm) / (1.0 + t_norm)
    return IntransitivityReport(measure, t_norm, c_norm, classify(measure))


def measure_from_records(records: Sequence[MatchRecord], m: int, smoothing: float = 0.5,
                         link: SigmoidLink = LOGISTIC) -> IntransitivityReport:
    payoff = estimate_payoff(records, m, smoothing)
    return measure_intransitivity(advantage_from_payoff(payoff, link))


def measure_from_counts(wins: np.ndarray, smoothing: float = 0.5,
                        link: SigmoidLink = LOGISTIC) -> IntransitivityReport:
    """Same as :func:`measure_from_records` but from a win-count matrix."""
    return measure_intransitivity(advantage_from_payoff(payoff_from_counts(wins, smoothing), link))
