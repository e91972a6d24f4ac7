"""Rock-Paper-Scissors players with mixed strategies: ground truth and simulated tournaments.

Strategies are indexed rock=0, paper=1, scissors=2. A profile ``B`` is a 3 x m
column-stochastic matrix whose column ``i`` is player ``i``'s mixed strategy.
"""

from __future__ import annotations

from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass
from enum import Enum

import numpy as np

from .chain import make_rng
from .game import LOGISTIC, MatchRecord, PayoffMatrix, SigmoidLink, ValidationError, advantage_from_payoff
from .intransitivity import measure_from_counts, measure_intransitivity

ROCK, PAPER, SCISSORS = 0, 1, 2

# row strategy's chance of beating the column strategy; draws count as 1/2
BASE_GAME = np.array([
    [0.5, 0.0, 1.0],
    [1.0, 0.5, 0.0],
    [0.0, 1.0, 0.5],
])
BASE_GAME.setflags(write=False)


class Family(str, Enum):
    ROCK_SCISSORS = "rs"
    ROCK_PAPER_SCISSORS = "rps"


@dataclass(frozen=True)
class StrategyProfile:
    pmfs: np.ndarray

    def __post_init__(self):
        b = np.array(self.pmfs, dtype=float)
        if b.ndim != 2 or b.shape[0] != 3 or b.shape[1] < 1:
            raise ValidationError(f"profile must be 3 x m, got shape {b.shape}")
        if (b < 0).any() or (b > 1).any():
            raise ValidationError("profile entries must lie in [0, 1]")
        err = np.max(np.abs(b.sum(axis=0) - 1.0))
        if err > 1e-12:
            raise ValidationError(f"profile columns must sum to 1 (max error {err:.3g})")
        b.setflags(write=False)
        object.__setattr__(self, "pmfs", b)

    @property
    def players(self) -> int:
        return self.pmfs.shape[1]


def _check_t(t: float) -> float:
    t = float(t)
    if not 0.0 <= t < 1.0:
        raise ValidationError(f"t must lie in [0, 1), got {t!r}")
    return t


def rs_family(t: float) -> StrategyProfile:
    """Three players on the rock/scissors edge: rock with probability (1+t)/2, 1/2, (1-t)/2."""
    t = _check_t(t)
    rock = np.array([(1 + t) / 2, 0.5, (1 - t) / 2])
    return StrategyProfile(np.vstack([rock, np.zeros(3), 1.0 - rock]))


def rps_family(t: float) -> StrategyProfile:
    """Player ``i`` mixes uniform play with pure strategy ``i``: ``(1-t)/3 + t * e_i``."""
    t = _check_t(t)
    return StrategyProfile((1 - t) * np.full((3, 3), 1.0 / 3.0) + t * np.eye(3))


FAMILIES = {Family.ROCK_SCISSORS: rs_family, Family.ROCK_PAPER_SCISSORS: rps_family}


def family_profile(family: Family | str, t: float) -> StrategyProfile:
    return FAMILIES[Family(family)](t)


def ground_truth_payoff(profile: StrategyProfile) -> PayoffMatrix:
    """``B^T M B`` with the lower triangle written as the complement of the upper."""
    b = profile.pmfs
    x = b.T @ BASE_GAME @ b
    m = profile.players
    iu, ju = np.triu_indices(m, k=1)
    p = np.full((m, m), 0.5)
    p[iu, ju] = x[iu, ju]
    p[ju, iu] = 1.0 - x[iu, ju]
    return PayoffMatrix(p)


def ground_truth_advantage(profile: StrategyProfile, link: SigmoidLink = LOGISTIC):
    return advantage_from_payoff(ground_truth_payoff(profile), link)


def ground_truth_measure(family: Family | str, t: float, link: SigmoidLink = LOGISTIC) -> float:
    return measure_intransitivity(ground_truth_advantage(family_profile(family, t), link)).measure


def _play(pmf_i: np.ndarray, pmf_j: np.ndarray, n: int, rng: np.random.Generator) -> np.ndarray:
    """Boolean array: did player i win each of ``n`` games (draws settled by a fair coin)."""
    u = rng.random((n, 3))
    si = np.minimum(np.searchsorted(np.cumsum(pmf_i), u[:, 0], side="right"), 2)
    sj = np.minimum(np.searchsorted(np.cumsum(pmf_j), u[:, 1], side="right"), 2)
    outcome = BASE_GAME[si, sj]
    return np.where(outcome == 0.5, u[:, 2] < 0.5, outcome == 1.0)


def simulate_win_counts(profile: StrategyProfile, games_per_pair: int,
                        rng: np.random.Generator) -> np.ndarray:
    """Win-count matrix for ``games_per_pair`` games between every pair (pairs in ``i < j`` order)."""
    if games_per_pair < 1:
        raise ValidationError("games_per_pair must be at least 1")
    m = profile.players
    b = profile.pmfs
    wins = np.zeros((m, m), dtype=np.int64)
    for i, j in zip(*np.triu_indices(m, k=1)):
        won = int(_play(b[:, i], b[:, j], games_per_pair, rng).sum())
        wins[i, j] = won
        wins[j, i] = games_per_pair - won
    return wins


def simulate_matches(profile: StrategyProfile, games_per_pair: int, seed: int = 0) -> list[MatchRecord]:
    """Match records for a full round of ``games_per_pair`` games per pair; deterministic in ``seed``."""
    if games_per_pair < 1:
        raise ValidationError("games_per_pair must be at least 1")
    rng = make_rng(seed)
    b = profile.pmfs
    records = []
    for i, j in zip(*np.triu_indices(profile.players, k=1)):
        i, j = int(i), int(j)
        for won in _play(b[:, i], b[:, j], games_per_pair, rng):
            records.append(MatchRecord(i, j, i if won else j, len(records)))
    return records


@dataclass(frozen=True)
class ExperimentRow:
    family: str
    t: float
    games_per_pair: int
    trial: int
    i_truth: float
    i_hat: float


@dataclass(frozen=True)
class TruthRow:
    family: str
    t: float
    i_truth: float


EXPERIMENT_HEADER = ("family", "t", "games_per_pair", "trial", "i_truth", "i_hat")
TRUTH_HEADER = ("family", "t", "i_truth")


def truth_curve(family: Family | str, t_values: Sequence[float],
                link: SigmoidLink = LOGISTIC) -> list[TruthRow]:
    family = Family(family)
    return [TruthRow(family.value, float(t), ground_truth_measure(family, t, link)) for t in t_values]


def run_experiment(family: Family | str, t_values: Sequence[float], games_schedule: Sequence[int],
                   trials: int, seed: int = 0, smoothing: float = 0.5,
                   link: SigmoidLink = LOGISTIC, workers: int = 1) -> list[ExperimentRow]:
    """Ground-truth vs empirical intransitivity for each ``(t, n, trial)``.

    Trial ``k`` at grid position ``(a, b)`` uses the sub-seed ``(seed, a, b, k)``,
    so rows do not depend on ``workers``. Rows come back sorted by ``(t, n, trial)``.
    """
    family = Family(family)
    if not games_schedule:
        raise ValidationError("games schedule must not be empty")
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    profiles = [family_profile(family, t) for t in t_values]
    truths = [measure_intransitivity(advantage_from_payoff(ground_truth_payoff(p), link)).measure
              for p in profiles]

    def one(job):
        a, b, k = job
        rng = make_rng(seed, a, b, k)
        wins = simulate_win_counts(profiles[a], int(games_schedule[b]), rng)
        i_hat = measure_from_counts(wins, smoothing, link).measure
        return ExperimentRow(family.value, float(t_values[a]), int(games_schedule[b]), k, truths[a], i_hat)

    jobs = [(a, b, k) for a in range(len(t_values)) for b in range(len(games_schedule)) for k in range(trials)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, jobs))
    else:
        rows = [one(job) for job in jobs]
    return sorted(rows, key=lambda r: (r.family, r.t, r.games_per_pair, r.trial))


def as_tuples(rows) -> list[tuple]:
    return [astuple(r) for r in rows]
