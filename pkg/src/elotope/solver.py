"""Final Elo scores: sum-zero roots of the stability equation.

The stability residual is ``div(Q * sigma(grad r)) - div(Q * P)``. It is the
gradient of the convex potential

    Phi(r) = (1/m) * sum_{i<j} Q_ij * softplus(r_i - r_j) - c . r

so Newton steps are descent directions for ``Phi`` and an Armijo line search on
``Phi`` makes the iteration globally convergent on a connected ``Q``.
"""

from __future__ import annotations

import logging
from collections import deque
from collections.abc import Sequence
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .chain import make_rng
from .game import (
    LOGISTIC,
    PayoffMatrix,
    SelectionMatrix,
    SigmoidLink,
    check_tree,
    tree_selection,
)
from .hodge import center, div, grad
from .trees import Edge, all_spanning_trees, count_spanning_trees, random_connected_graph, random_spanning_tree

log = logging.getLogger(__name__)

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100
FALLBACK_MAX_ITER = 100_000
# longest Newton step (inf-norm); far from the root sigma' is tiny and raw steps explode
MAX_STEP = 2.0


class Method(str, Enum):
    NEWTON = "newton"
    DAMPED_FIXED_POINT = "damped_fixed_point"
    TREE_CLOSED_FORM = "tree_closed_form"


@dataclass
class SolveReport:
    solution: np.ndarray
    residual_norm: float
    iterations: int
    method: Method
    converged: bool = True

    def as_dict(self) -> dict:
        return {
            "solution": [float(x) for x in self.solution],
            "residual_norm": float(self.residual_norm),
            "iterations": int(self.iterations),
            "method": self.method.value,
            "converged": bool(self.converged),
        }


class NotConverged(RuntimeError):
    def __init__(self, report: SolveReport):
        super().__init__(
            f"no convergence after {report.iterations} iterations "
            f"(best residual {report.residual_norm:.3g})"
        )
        self.report = report


def stability_residual(r, payoff: PayoffMatrix, selection: SelectionMatrix,
                       link: SigmoidLink = LOGISTIC) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if not (r.shape[0] == payoff.dim == selection.dim):
        raise ValueError("dimension mismatch between ratings, payoff and selection")
    q = selection.weights
    return div(q * link.forward(grad(r))) - div(q * payoff.probs)


def _jacobian(r, q, link):
    """``(1/m) * L(r)``, the weighted Laplacian with edge weights ``Q_ij * sigma'(r_i - r_j)``."""
    w = q * link.derivative(grad(r))
    lap = np.diag(w.sum(axis=1)) - w
    return lap / len(r)


class _Potential:
    def __init__(self, payoff, selection):
        m = payoff.dim
        self.m = m
        self.iu, self.ju = np.triu_indices(m, k=1)
        q = selection.weights
        self.qu = q[self.iu, self.ju]
        self.c = div(q * payoff.probs) - np.tril(q, k=-1).sum(axis=1) / m

    def __call__(self, r):
        d = r[self.iu] - r[self.ju]
        return float(np.sum(self.qu * np.logaddexp(0.0, d)) / self.m - self.c @ r)


def _newton(r, payoff, selection, link, tol, max_iter):
    m = payoff.dim
    q = selection.weights
    phi = _Potential(payoff, selection) if link is LOGISTIC else None
    aug = np.zeros((m + 1, m + 1))
    aug[:m, m] = aug[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    res = stability_residual(r, payoff, selection, link)
    best = (np.max(np.abs(res)), r)
    for it in range(1, max_iter + 1):
        aug[:m, :m] = _jacobian(r, q, link)
        rhs[:m] = -res
        try:
            step = np.linalg.solve(aug, rhs)[:m]
        except np.linalg.LinAlgError:
            return best, it, False
        step -= step.mean()
        longest = np.max(np.abs(step))
        if longest > MAX_STEP:
            step *= MAX_STEP / longest
        # a step is taken if it lowers the residual; otherwise Armijo backtracking on the
        # potential (the residual alone can stall far from the root when sigma' is tiny)
        n0 = np.max(np.abs(res))
        f0 = phi(r) if phi is not None else None
        slope = float(res @ step)
        alpha = 1.0
        while True:
            r_new = center(r + alpha * step)
            res_new = stability_residual(r_new, payoff, selection, link)
            norm = np.max(np.abs(res_new))
            if norm < n0:
                break
            if phi is not None and phi(r_new) <= f0 + 1e-4 * alpha * slope:
                break
            alpha *= 0.5
            if alpha <= 1e-12:
                return best, it, False
        r, res = r_new, res_new
        if norm <= best[0]:
            best = (norm, r)
        if norm <= tol:
            # one polishing step: quadratic convergence usually lands at rounding level
            aug[:m, :m] = _jacobian(r, q, link)
            rhs[:m] = -res
            polished = center(r + np.linalg.solve(aug, rhs)[:m])
            pnorm = np.max(np.abs(stability_residual(polished, payoff, selection, link)))
            if pnorm <= norm:
                best = (pnorm, polished)
            return best, it, True
    return best, max_iter, False


def _damped_fixed_point(r, payoff, selection, link, tol, max_iter):
    eta = 1.0
    res = stability_residual(r, payoff, selection, link)
    norm = np.max(np.abs(res))
    for it in range(1, max_iter + 1):
        if norm <= tol:
            return (norm, r), it - 1, True
        r_new = center(r - eta * res)
        res_new = stability_residual(r_new, payoff, selection, link)
        norm_new = np.max(np.abs(res_new))
        if norm_new > norm:
            eta *= 0.5
            if eta < 1e-16:
                return (norm, r), it, bool(norm <= tol)
            continue
        r, res, norm = r_new, res_new, norm_new
    return (norm, r), max_iter, bool(norm <= tol)


def solve_final_score(payoff: PayoffMatrix, selection: SelectionMatrix,
                      link: SigmoidLink = LOGISTIC, tol: float = DEFAULT_TOL,
                      max_iter: int = DEFAULT_MAX_ITER, start=None) -> SolveReport:
    """Newton iteration on the sum-zero subspace, with a damped fixed-point fallback.

    Raises :class:`NotConverged` (carrying the best report) if neither reaches ``tol``.
    """
    if payoff.dim != selection.dim:
        raise ValueError(f"payoff is {payoff.dim}x{payoff.dim}, selection is {selection.dim}x{selection.dim}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    m = payoff.dim
    if m == 1:
        return SolveReport(np.zeros(1), 0.0, 0, Method.NEWTON)
    r = center(np.zeros(m) if start is None else np.asarray(start, dtype=float))
    norm0 = np.max(np.abs(stability_residual(r, payoff, selection, link)))
    if norm0 <= tol:
        return SolveReport(r, float(norm0), 0, Method.NEWTON)

    (norm, r_best), iters, ok = _newton(r, payoff, selection, link, tol, max_iter)
    if ok:
        return SolveReport(r_best, float(norm), iters, Method.NEWTON)
    log.info("Newton stalled at residual %.3g after %d iterations; falling back", norm, iters)
    (norm_fp, r_fp), iters_fp, ok = _damped_fixed_point(
        r_best, payoff, selection, link, tol, FALLBACK_MAX_ITER)
    report = SolveReport(r_fp, float(norm_fp), iters + iters_fp, Method.DAMPED_FIXED_POINT, ok)
    if not ok:
        raise NotConverged(report)
    return report


def tree_final_score(payoff: PayoffMatrix, tree_edges: Sequence[Edge],
                     link: SigmoidLink = LOGISTIC, root: int = 0) -> np.ndarray:
    """Closed-form final score when ``Q`` is a spanning tree.

    Walks out from ``root`` so that ``r_i - r_j = link^-1(P_ij)`` on every tree
    edge, then recentres to mean zero.
    """
    m = payoff.dim
    edges = check_tree(tree_edges, m)
    adv = np.asarray(link.inverse(payoff.probs), dtype=float)
    nbrs: list[list[int]] = [[] for _ in range(m)]
    for i, j in edges:
        nbrs[i].append(j)
        nbrs[j].append(i)
    r = np.zeros(m)
    seen = np.zeros(m, dtype=bool)
    seen[root] = True
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if not seen[v]:
                seen[v] = True
                r[v] = r[u] - adv[u, v]
                queue.append(v)
    return center(r)


@dataclass
class ElotopeSample:
    points: list[np.ndarray] = field(default_factory=list)
    sources: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.points)

    def as_array(self, m: int) -> np.ndarray:
        return np.array(self.points).reshape(len(self.points), m)


def describe_tree(edges: Sequence[Edge]) -> str:
    return "tree:" + ";".join(f"{i}-{j}" for i, j in edges)


def random_selection(m: int, rng: np.random.Generator) -> SelectionMatrix:
    """Random positive weights on a random connected graph, normalised to total 2."""
    adj = random_connected_graph(m, rng)
    w = np.triu(np.where(adj, rng.uniform(0.1, 1.0, size=(m, m)), 0.0), k=1)
    w = w + w.T
    return SelectionMatrix(2.0 * w / w.sum())


def sample_elotope(payoff: PayoffMatrix, link: SigmoidLink = LOGISTIC, tree_budget: int = 0,
                   random_q_budget: int = 0, seed: int = 0, tol: float = DEFAULT_TOL) -> ElotopeSample:
    """Final scores under many selection matrices for one payoff.

    All spanning trees are enumerated when there are at most ``tree_budget`` of
    them; otherwise ``tree_budget`` uniform random trees are drawn. Then
    ``random_q_budget`` random connected ``Q`` are solved with Newton. Sample
    ``k`` of each kind uses its own sub-seed ``(seed, kind, k)``.
    """
    if tree_budget < 0 or random_q_budget < 0:
        raise ValueError("budgets must be nonnegative")
    m = payoff.dim
    sample = ElotopeSample()
    if m < 2:
        return sample
    if tree_budget > 0:
        if count_spanning_trees(m) <= tree_budget:
            trees = list(all_spanning_trees(m))
        else:
            trees = [random_spanning_tree(m, make_rng(seed, 0, k)) for k in range(tree_budget)]
        for edges in trees:
            sample.points.append(tree_final_score(payoff, edges, link))
            sample.sources.append(describe_tree(edges))
    for k in range(random_q_budget):
        q = random_selection(m, make_rng(seed, 1, k))
        report = solve_final_score(payoff, q, link, tol=tol)
        sample.points.append(report.solution)
        sample.sources.append(f"random_q:{seed}:{k}")
    return sample


def tree_solution_report(payoff: PayoffMatrix, tree_edges: Sequence[Edge],
                         link: SigmoidLink = LOGISTIC) -> SolveReport:
    """:func:`tree_final_score` wrapped as a report, with its residual under the tree's ``Q``."""
    r = tree_final_score(payoff, tree_edges, link)
    q = tree_selection(tree_edges, payoff.dim)
    res = np.max(np.abs(stability_residual(r, payoff, q, link)))
    return SolveReport(r, float(res), 0, Method.TREE_CLOSED_FORM)
