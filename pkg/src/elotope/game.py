"""Payoff, advantage and selection matrices, the sigmoid link, and match records."""

from __future__ import annotations

from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt
from scipy import special

from .hodge import SKEW_TOL, check_skew

PAYOFF_TOL = 1e-12
SELECTION_TOL = 1e-12


class ValidationError(ValueError):
    """An input violates one of the documented matrix or record invariants."""


@dataclass(frozen=True)
class SigmoidLink:
    """A named strictly increasing link with ``forward(0) == 0.5`` and ``forward(x) + forward(-x) == 1``."""

    name: str
    forward: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    inverse: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    derivative: Callable[[np.ndarray], np.ndarray] = field(repr=False)


def _logistic_derivative(x):
    s = special.expit(x)
    return s * (1.0 - s)


LOGISTIC = SigmoidLink("logistic", special.expit, special.logit, _logistic_derivative)

LINKS = {"logistic": LOGISTIC}


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def _square(rows: npt.ArrayLike, what: str) -> np.ndarray:
    a = np.asarray(rows, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"{what}: expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError(f"{what}: non-finite entries")
    return a


@dataclass(frozen=True)
class PayoffMatrix:
    """Win probabilities ``P[i, j]`` with ``P + P^T == 1`` and off-diagonal entries in (0, 1)."""

    probs: np.ndarray

    def __post_init__(self):
        p = _square(self.probs, "payoff")
        m = p.shape[0]
        err = np.max(np.abs(p + p.T - 1.0))
        if err > PAYOFF_TOL:
            raise ValidationError(f"payoff: P + P^T != 1 (max error {err:.3g})")
        off = ~np.eye(m, dtype=bool)
        bad = off & ((p <= 0.0) | (p >= 1.0))
        if bad.any():
            i, j = np.argwhere(bad)[0]
            raise ValidationError(
                f"payoff: entry ({i},{j}) = {p[i, j]!r} is not strictly inside (0, 1)"
            )
        p = p.copy()
        np.fill_diagonal(p, 0.5)
        object.__setattr__(self, "probs", _frozen(p))

    @property
    def dim(self) -> int:
        return self.probs.shape[0]


@dataclass(frozen=True)
class AdvantageMatrix:
    """Skew-symmetric ``A = link^-1(P)``."""

    values: np.ndarray

    def __post_init__(self):
        a = _square(self.values, "advantage")
        try:
            a = check_skew(a, SKEW_TOL)
        except ValueError as exc:
            raise ValidationError(f"advantage: {exc}") from None
        object.__setattr__(self, "values", _frozen(a))

    @property
    def dim(self) -> int:
        return self.values.shape[0]


def _components(adjacency: np.ndarray) -> int:
    m = adjacency.shape[0]
    seen = np.zeros(m, dtype=bool)
    count = 0
    for start in range(m):
        if seen[start]:
            continue
        count += 1
        stack = [start]
        seen[start] = True
        while stack:
            u = stack.pop()
            for v in np.flatnonzero(adjacency[u] & ~seen):
                seen[v] = True
                stack.append(v)
    return count


@dataclass(frozen=True)
class SelectionMatrix:
    """Pair-selection weights: symmetric, nonnegative, zero diagonal, total 2, connected.

    The upper triangle is a probability mass function over unordered pairs.
    """

    weights: np.ndarray

    def __post_init__(self):
        q = _square(self.weights, "selection")
        m = q.shape[0]
        if (q < 0).any():
            raise ValidationError("selection: negative weight")
        if np.max(np.abs(q - q.T)) > SELECTION_TOL:
            raise ValidationError("selection: matrix is not symmetric")
        if np.any(np.diag(q) != 0):
            raise ValidationError("selection: diagonal must be zero")
        if m > 1 and abs(q.sum() - 2.0) > SELECTION_TOL:
            raise ValidationError(f"selection: weights sum to {q.sum()!r}, expected 2")
        n = _components(q > 0)
        if n != 1:
            raise ValidationError(f"selection: graph has {n} connected components, expected 1")
        object.__setattr__(self, "weights", _frozen(q))

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def pairs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Unordered pairs ``i < j`` with positive weight and their probabilities."""
        iu, ju = np.triu_indices(self.dim, k=1)
        w = self.weights[iu, ju]
        keep = w > 0
        return iu[keep], ju[keep], w[keep]


@dataclass(frozen=True)
class MatchRecord:
    player_i: int
    player_j: int
    winner: int
    sequence_number: int = 0

    def __post_init__(self):
        if self.player_i == self.player_j:
            raise ValidationError(f"match {self.sequence_number}: player plays itself")
        if self.winner not in (self.player_i, self.player_j):
            raise ValidationError(
                f"match {self.sequence_number}: winner {self.winner} is neither "
                f"{self.player_i} nor {self.player_j}"
            )
        if min(self.player_i, self.player_j) < 0 or self.sequence_number < 0:
            raise ValidationError(f"match {self.sequence_number}: negative index")


def advantage_from_payoff(payoff: PayoffMatrix, link: SigmoidLink = LOGISTIC) -> AdvantageMatrix:
    a = np.asarray(link.inverse(payoff.probs), dtype=float)
    np.fill_diagonal(a, 0.0)
    return AdvantageMatrix(a)


def payoff_from_advantage(advantage: AdvantageMatrix, link: SigmoidLink = LOGISTIC) -> PayoffMatrix:
    a = advantage.values
    upper = np.triu(np.asarray(link.forward(a), dtype=float), k=1)
    # fill the lower triangle as the exact complement
    p = upper + np.tril(1.0 - upper.T, k=-1)
    np.fill_diagonal(p, 0.5)
    return PayoffMatrix(p)


def win_counts(records: Iterable[MatchRecord], m: int) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(wins, games)`` where ``wins[i, j]`` counts i's wins over j."""
    wins = np.zeros((m, m), dtype=np.int64)
    for rec in records:
        if max(rec.player_i, rec.player_j) >= m:
            raise ValidationError(
                f"match {rec.sequence_number}: player index out of range for m={m}"
            )
        loser = rec.player_j if rec.winner == rec.player_i else rec.player_i
        wins[rec.winner, loser] += 1
    return wins, wins + wins.T


def payoff_from_counts(wins: np.ndarray, smoothing: float = 0.5) -> PayoffMatrix:
    """Smoothed empirical payoff ``(wins + s) / (games + 2 s)`` from a win-count matrix."""
    if not smoothing > 0:
        raise ValidationError("smoothing must be positive")
    wins = np.asarray(wins)
    m = wins.shape[0]
    games = wins + wins.T
    iu, ju = np.triu_indices(m, k=1)
    missing = [(int(i), int(j)) for i, j in zip(iu, ju) if games[i, j] == 0]
    if missing:
        listed = ", ".join(f"({i},{j})" for i, j in missing)
        raise ValidationError(f"no games recorded for pairs: {listed}")
    p = np.full((m, m), 0.5)
    upper = (wins[iu, ju] + smoothing) / (games[iu, ju] + 2.0 * smoothing)
    p[iu, ju] = upper
    p[ju, iu] = 1.0 - upper
    return PayoffMatrix(p)


def estimate_payoff(
    records: Sequence[MatchRecord], m: int, smoothing: float = 0.5
) -> PayoffMatrix:
    """Empirical payoff from match records; every pair must have been played at least once."""
    if m < 1:
        raise ValidationError("m must be positive")
    wins, _ = win_counts(records, m)
    return payoff_from_counts(wins, smoothing)


def uniform_selection(m: int) -> SelectionMatrix:
    if m < 2:
        raise ValidationError("uniform selection needs at least 2 players")
    q = np.full((m, m), 2.0 / (m * (m - 1)))
    np.fill_diagonal(q, 0.0)
    return SelectionMatrix(q)


def check_tree(edges: Sequence[tuple[int, int]], m: int) -> list[tuple[int, int]]:
    """Validate that ``edges`` is a spanning tree on ``range(m)``; return them as int pairs."""
    edges = [(int(i), int(j)) for i, j in edges]
    if len(edges) != m - 1:
        raise ValidationError(f"not a spanning tree: {len(edges)} edges for m={m} (need {m - 1})")
    parent = list(range(m))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i, j in edges:
        if not (0 <= i < m and 0 <= j < m) or i == j:
            raise ValidationError(f"not a spanning tree: bad edge ({i},{j})")
        ri, rj = find(i), find(j)
        if ri == rj:
            raise ValidationError(f"not a spanning tree: edge ({i},{j}) closes a cycle")
        parent[ri] = rj
    return edges


def tree_selection(edges: Sequence[tuple[int, int]], m: int) -> SelectionMatrix:
    """Weighted adjacency of a spanning tree, each edge ``1/(m-1)``."""
    edges = check_tree(edges, m)
    q = np.zeros((m, m))
    for i, j in edges:
        q[i, j] = q[j, i] = 1.0 / (m - 1)
    return SelectionMatrix(q)
