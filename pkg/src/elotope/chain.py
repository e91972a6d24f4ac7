"""The Elo rating Markov chain.

Each step draws one unordered pair from the selection matrix, one Bernoulli
outcome from the payoff matrix, and moves the two ratings by a single shared
delta in opposite directions, so the rating sum is conserved.

Randomness comes from ``numpy``'s counter-based Philox generator. Every step
consumes exactly two uniforms, ``(u_pair, u_win)``, in that order, which is
what lets :func:`run_chain` batch the draws for the compiled loop while
staying bit-identical to repeated :func:`step_chain` calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .game import LOGISTIC, MatchRecord, PayoffMatrix, SelectionMatrix, SigmoidLink, ValidationError
from .hodge import div, grad

CHUNK = 1 << 16


def make_rng(seed: int, *key: int) -> np.random.Generator:
    """Philox generator for ``seed``; ``key`` derives independent sub-streams by index."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class ChainConfig:
    payoff: PayoffMatrix
    selection: SelectionMatrix
    gain: float = 0.1
    link: SigmoidLink = LOGISTIC
    seed: int = 0

    def __post_init__(self):
        if self.payoff.dim != self.selection.dim:
            raise ValidationError(
                f"payoff is {self.payoff.dim}x{self.payoff.dim} but selection is "
                f"{self.selection.dim}x{self.selection.dim}"
            )
        if not self.gain > 0:
            raise ValidationError("gain must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")
        if self.dim < 2:
            raise ValidationError("the chain needs at least two players")

    @property
    def dim(self) -> int:
        return self.payoff.dim


@dataclass(frozen=True)
class ChainState:
    step: int
    ratings: np.ndarray


class PairSampler:
    """Inverse-CDF sampler over the unordered pairs ``i < j`` weighted by ``Q[i, j]``."""

    def __init__(self, selection: SelectionMatrix):
        self.i, self.j, w = selection.pairs()
        self.cdf = np.cumsum(w)
        self.cdf /= self.cdf[-1]

    def __call__(self, u):
        k = np.searchsorted(self.cdf, u, side="right")
        k = np.minimum(k, len(self.cdf) - 1)
        return self.i[k], self.j[k]


def _score(link: SigmoidLink, x: float) -> float:
    if link is LOGISTIC:
        # must match the compiled kernel's arithmetic exactly
        return 1.0 / (1.0 + math.exp(-x))
    return float(link.forward(x))


def elo_update(ratings: np.ndarray, i: int, j: int, i_won: bool, gain: float,
               link: SigmoidLink = LOGISTIC) -> np.ndarray:
    """Return the ratings after one game between ``i`` and ``j``."""
    r = np.array(ratings, dtype=float)
    delta = gain * ((1.0 if i_won else 0.0) - _score(link, r[i] - r[j]))
    r[i] = r[i] + delta
    r[j] = r[j] - delta
    return r


def init_chain(config: ChainConfig) -> ChainState:
    return ChainState(0, np.zeros(config.dim))


def step_chain(state: ChainState, config: ChainConfig,
               rng: np.random.Generator) -> tuple[ChainState, MatchRecord]:
    u_pair, u_win = rng.random(2)
    i, j = (int(x) for x in PairSampler(config.selection)(u_pair))
    i_won = u_win < config.payoff.probs[i, j]
    ratings = elo_update(state.ratings, i, j, i_won, config.gain, config.link)
    record = MatchRecord(i, j, i if i_won else j, state.step)
    return ChainState(state.step + 1, ratings), record


def expected_step(r: np.ndarray, config: ChainConfig) -> np.ndarray:
    """Conditional mean of the next state, ``r + gain * sum_j Q_ij (P_ij - sigma(r_i - r_j))``.

    Written through the Hodge operators this is ``r + m * gain * div(Q * (P - sigma(grad r)))``.
    """
    r = np.asarray(r, dtype=float)
    q = config.selection.weights
    gap = config.payoff.probs - config.link.forward(grad(r))
    return r + config.dim * config.gain * div(q * gap)


def sample_transitions(state: ChainState, config: ChainConfig, n: int,
                       rng: np.random.Generator) -> np.ndarray:
    """``n`` independent one-step successors of ``state``, as an ``(n, m)`` array."""
    u = rng.random((n, 2))
    pi, pj = PairSampler(config.selection)(u[:, 0])
    i_won = u[:, 1] < config.payoff.probs[pi, pj]
    r = state.ratings
    delta = config.gain * (i_won - config.link.forward(r[pi] - r[pj]))
    out = np.tile(r, (n, 1))
    rows = np.arange(n)
    out[rows, pi] += delta
    out[rows, pj] -= delta
    return out


@dataclass
class Trajectory:
    """Recorded states (every ``stride`` steps, starting at step 0) plus the full match log."""

    stride: int
    steps: np.ndarray
    ratings: np.ndarray
    pair_i: np.ndarray
    pair_j: np.ndarray
    winners: np.ndarray
    backend: str = field(default="", compare=False)

    @property
    def states(self) -> list[ChainState]:
        return [ChainState(int(t), r) for t, r in zip(self.steps, self.ratings)]

    @property
    def matches(self) -> list[MatchRecord]:
        return [
            MatchRecord(int(i), int(j), int(w), t)
            for t, (i, j, w) in enumerate(zip(self.pair_i, self.pair_j, self.winners))
        ]


def _generic_updates(ratings, pair_i, pair_j, u_win, probs, gain, stride, start_step, out, row,
                     winners, link):
    for t in range(len(pair_i)):
        i, j = int(pair_i[t]), int(pair_j[t])
        i_won = u_win[t] < probs[i, j]
        winners[t] = i if i_won else j
        ratings[:] = elo_update(ratings, i, j, i_won, gain, link)
        if (start_step + t + 1) % stride == 0:
            out[row] = ratings
            row += 1
    return row


def run_chain(config: ChainConfig, steps: int, record_stride: int = 1,
              backend: str | None = None) -> Trajectory:
    """Run the chain from the origin for ``steps`` steps; deterministic in ``config.seed``.

    ``backend`` is ``"compiled"``, ``"pure"`` or ``None`` for whichever was loaded.
    """
    if steps < 0:
        raise ValidationError("steps must be nonnegative")
    if record_stride < 1:
        raise ValidationError("record_stride must be at least 1")
    if backend is None:
        update, backend = _backend.run_updates, _backend.BACKEND
    elif backend == "pure":
        update = _backend.pure_run_updates
    elif backend == "compiled":
        if _backend.compiled_run_updates is None:
            raise RuntimeError("compiled kernel is not available")
        update = _backend.compiled_run_updates
    else:
        raise ValueError(f"unknown backend {backend!r}")
    if config.link is not LOGISTIC:
        def update(*args):
            return _generic_updates(*args, config.link)
        backend = "generic"

    m = config.dim
    rng = make_rng(config.seed)
    sampler = PairSampler(config.selection)
    probs = np.ascontiguousarray(config.payoff.probs)
    ratings = np.zeros(m)
    n_rows = steps // record_stride + 1
    out = np.empty((n_rows, m))
    out[0] = ratings
    pair_i = np.empty(steps, dtype=np.int64)
    pair_j = np.empty(steps, dtype=np.int64)
    winners = np.empty(steps, dtype=np.int64)
    row = 1
    for start in range(0, steps, CHUNK):
        stop = min(start + CHUNK, steps)
        u = rng.random((stop - start, 2))
        pi, pj = sampler(u[:, 0])
        pair_i[start:stop] = pi
        pair_j[start:stop] = pj
        row = update(ratings, pair_i[start:stop], pair_j[start:stop],
                     np.ascontiguousarray(u[:, 1]), probs, float(config.gain),
                     record_stride, start, out, row, winners[start:stop])
    assert row == n_rows
    return Trajectory(
        stride=record_stride,
        steps=np.arange(n_rows, dtype=np.int64) * record_stride,
        ratings=out,
        pair_i=pair_i,
        pair_j=pair_j,
        winners=winners,
        backend=backend,
    )
