"""Composite 4-point Gauss-Legendre quadrature on radial partitions.

Every radial integral in the package runs through this module: plain
integrals over a partition, cumulative integrals evaluated at the
partition points, and one-panel integrals between paired endpoints
(used for sub-cell evaluation of cumulative quantities).  The 4-point
rule is exact through polynomial degree 7, which covers the piecewise
polynomial integrands of the builtin load family exactly.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

# Nodes and weights of the 4-point Gauss-Legendre rule on [-1, 1].
_A = np.sqrt(3.0 / 7.0 - 2.0 / 7.0 * np.sqrt(6.0 / 5.0))
_B = np.sqrt(3.0 / 7.0 + 2.0 / 7.0 * np.sqrt(6.0 / 5.0))
_WA = (18.0 + np.sqrt(30.0)) / 36.0
_WB = (18.0 - np.sqrt(30.0)) / 36.0

GL4_NODES = np.array([-_B, -_A, _A, _B])
GL4_WEIGHTS = np.array([_WB, _WA, _WA, _WB])


def panel_points(partition: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Map the 4-point rule onto every cell of a partition.

    Parameters
    ----------
    partition : ndarray, shape (m+1,)
        Strictly increasing cell edges.

    Returns
    -------
    points, weights : ndarray, shape (m, 4)
        Quadrature points and weights per cell; summing
        ``weights * f(points)`` over a row integrates f over that cell.
    """
    edges = np.asarray(partition, dtype=float)
    if edges.ndim != 1 or edges.size < 2:
        raise ValueError("partition must be a 1-d array with at least two edges")
    if np.any(np.diff(edges) <= 0.0):
        raise ValueError("partition edges must be strictly increasing")
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    points = mid[:, None] + half[:, None] * GL4_NODES[None, :]
    weights = half[:, None] * GL4_WEIGHTS[None, :]
    return points, weights


def integrate(func: Callable[[np.ndarray], np.ndarray], partition: np.ndarray) -> float:
    """Integral of ``func`` over the full partition, one 4-point panel per cell."""
    points, weights = panel_points(partition)
    return float(np.sum(weights * func(points)))


def cumulative(func: Callable[[np.ndarray], np.ndarray], partition: np.ndarray) -> np.ndarray:
    """Cumulative integral of ``func`` from ``partition[0]`` to every partition point.

    Returns an array of the same length as ``partition`` whose first entry
    is exactly 0; entry j is the sum of the per-cell panel integrals up to
    edge j, so the values are consistent with :func:`integrate` on any
    prefix of the partition.
    """
    points, weights = panel_points(partition)
    cells = np.sum(weights * func(points), axis=1)
    out = np.empty(points.shape[0] + 1)
    out[0] = 0.0
    np.cumsum(cells, out=out[1:])
    return out


def between(func: Callable[[np.ndarray], np.ndarray], a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """One-panel integrals of ``func`` from a[i] to b[i], elementwise.

    A single 4-point panel per pair; intended for short spans (sub-cell
    offsets of a cumulative quantity), where one panel already carries
    the full order of the composite rule.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    points = mid[..., None] + half[..., None] * GL4_NODES
    values = func(points)
    return half * np.sum(GL4_WEIGHTS * values, axis=-1)
