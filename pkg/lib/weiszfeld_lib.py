#!/usr/bin/env python3
"""
Geometric Median Library

Weiszfeld's iteratively reweighted averaging for the point minimizing the
sum of Euclidean distances to a finite point set in R^k.

Coincident input points are merged into weights. Every merged point
("anchor") is tested for optimality first: x_j is the minimizer iff the
weighted sum of unit vectors from the other points towards x_j has norm at
most w_j. When no anchor is optimal the iteration runs from the weighted
centroid; an iterate that lands on an anchor is pushed off along the descent
direction (Vardi-Zhang step). Reweighting crawls when the minimizer sits next
to an anchor without being one, so every few hundred iterations damped Newton
steps are tried from the current iterate. A result is only flagged
``converged`` with a certificate: the anchor test, or a small gradient at an
interior point.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

# an iterate closer than this to an anchor counts as landing on it
ANCHOR_SNAP = 1e-12
# slack on the anchor optimality test
ANCHOR_SLACK = 1e-9
# plain iterations between Newton polish attempts
POLISH_EVERY = 200


@dataclass(frozen=True)
class WeiszfeldResult:
    """Geometric median of a point set together with its optimality evidence."""

    minimizer: Tuple[float, ...]
    value: float
    iterations: int
    converged: bool
    anchor: Optional[int] = None
    gradient_norm: float = 0.0
    restarts: int = 0
    notes: Tuple[str, ...] = field(default_factory=tuple)


def objective(points: np.ndarray, weights: np.ndarray, y: np.ndarray) -> float:
    return float((weights * np.linalg.norm(points - y, axis=1)).sum())


def _pull(points: np.ndarray, weights: np.ndarray, j: int) -> Tuple[np.ndarray, float]:
    """Weighted sum of unit vectors from x_j towards the other points, and sum of w_i/d_ij."""
    diff = points - points[j]
    dist = np.linalg.norm(diff, axis=1)
    mask = dist > 0
    pull = (weights[mask, None] * diff[mask] / dist[mask, None]).sum(axis=0)
    return pull, float((weights[mask] / dist[mask]).sum())


def gradient(points: np.ndarray, weights: np.ndarray, y: np.ndarray) -> np.ndarray:
    diff = y - points
    dist = np.linalg.norm(diff, axis=1)
    mask = dist > 0
    return (weights[mask, None] * diff[mask] / dist[mask, None]).sum(axis=0)


def _newton_polish(
    points: np.ndarray, weights: np.ndarray, y: np.ndarray, target: float, max_steps: int = 60
) -> Tuple[np.ndarray, int]:
    """
    Damped Newton steps on the smooth objective away from the anchors.

    Stops at gradient norm ``target``, on a singular Hessian, or when no
    backtracked step decreases the objective.
    """
    dim = points.shape[1]
    value = objective(points, weights, y)
    steps = 0
    for steps in range(1, max_steps + 1):
        diff = y - points
        dist = np.linalg.norm(diff, axis=1)
        if dist.min() < ANCHOR_SNAP:
            break
        unit = diff / dist[:, None]
        grad = (weights[:, None] * unit).sum(axis=0)
        if np.linalg.norm(grad) <= target:
            break
        scale = weights / dist
        hessian = scale.sum() * np.eye(dim) - np.einsum("i,ij,ik->jk", scale, unit, unit)
        try:
            direction = np.linalg.solve(hessian, grad)
        except np.linalg.LinAlgError:
            break
        t = 1.0
        while t > 1e-12:
            candidate = y - t * direction
            candidate_value = objective(points, weights, candidate)
            if candidate_value < value:
                y, value = candidate, candidate_value
                break
            t *= 0.5
        else:
            break
    return y, steps


def geometric_median(
    points: Sequence[Sequence[float]],
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> WeiszfeldResult:
    """
    Minimize sum_i ||x_i - y|| over y in R^k.

    Args:
        points: one or more points of equal dimension
        tol: displacement tolerance (relative to 1 + ||y||)
        max_iter: iteration cap; hitting it without a certificate returns
            ``converged=False``

    Raises:
        ValueError: no points, ragged input, non-finite coordinates or tol <= 0
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    raw = np.asarray([[float(c) for c in p] for p in points], dtype=float)
    if raw.ndim != 2 or raw.shape[0] == 0:
        raise ValueError("need at least one point of fixed dimension")
    if not np.all(np.isfinite(raw)):
        raise ValueError("coordinates must be finite")

    anchors, first_index, counts = np.unique(raw, axis=0, return_index=True, return_counts=True)
    weights = counts.astype(float)
    total = float(weights.sum())

    if len(anchors) == 1:
        return WeiszfeldResult(
            minimizer=tuple(float(c) for c in anchors[0]),
            value=0.0, iterations=0, converged=True, anchor=int(first_index[0]),
        )

    # an optimal anchor is returned exactly
    pulls = []
    for j in range(len(anchors)):
        pull, inverse_sum = _pull(anchors, weights, j)
        pulls.append((pull, inverse_sum))
        if np.linalg.norm(pull) <= weights[j] * (1.0 + ANCHOR_SLACK):
            return WeiszfeldResult(
                minimizer=tuple(float(c) for c in anchors[j]),
                value=objective(anchors, weights, anchors[j]),
                iterations=0,
                converged=True,
                anchor=int(first_index[j]),
                gradient_norm=max(0.0, float(np.linalg.norm(pull) - weights[j])),
                notes=("anchor optimality test",),
            )

    def displaced(j: int) -> np.ndarray:
        pull, inverse_sum = pulls[j]
        norm = np.linalg.norm(pull)
        step = (norm - weights[j]) / inverse_sum
        return anchors[j] + step * pull / norm

    y = (weights[:, None] * anchors).sum(axis=0) / total
    restarts = 0
    grad_norm = float("inf")
    certificate = np.sqrt(tol) * total
    iterations = 0
    polish_steps = 0
    converged = False
    notes: Tuple[str, ...] = ()

    for iterations in range(1, max_iter + 1):
        dist = np.linalg.norm(anchors - y, axis=1)
        near = int(np.argmin(dist))
        if dist[near] < ANCHOR_SNAP:
            y = displaced(near)
            restarts += 1
            continue
        inverse = weights / dist
        y_next = (inverse[:, None] * anchors).sum(axis=0) / inverse.sum()
        moved = float(np.linalg.norm(y_next - y))
        y = y_next
        if moved <= tol * (1.0 + float(np.linalg.norm(y))):
            grad_norm = float(np.linalg.norm(gradient(anchors, weights, y)))
            if grad_norm <= certificate:
                converged = True
                break
        if iterations % POLISH_EVERY == 0 or iterations == max_iter:
            y, steps = _newton_polish(anchors, weights, y, target=tol * total)
            polish_steps += steps
            grad_norm = float(np.linalg.norm(gradient(anchors, weights, y)))
            if grad_norm <= certificate:
                converged = True
                notes = ("newton polish",)
                break

    iterations += polish_steps
    if not converged:
        notes = ("iteration cap reached without certificate",)

    return WeiszfeldResult(
        minimizer=tuple(float(c) for c in y),
        value=objective(anchors, weights, y),
        iterations=iterations,
        converged=converged,
        anchor=None,
        gradient_norm=grad_norm,
        restarts=restarts,
        notes=notes,
    )
