"""Algebraic connectivity (second-smallest Laplacian eigenvalue).

``lambda2`` is a matrix-free Lanczos solver that works entirely in the
subspace orthogonal to the all-ones vector, so the trivial zero eigenvalue
never appears and the smallest Ritz value converges to lambda_2 from above.
``lambda2_dense`` is the small-graph oracle used to check it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import CapacityError, DomainError, SolverError
from .graph import PhysicalGraph, is_connected
from .seeding import uniform_from_ids

DEFAULT_TOL = 1e-8
DENSE_MAX_VERTICES = 64
KRYLOV_DIM = 160
CHECK_EVERY = 8


@dataclass(frozen=True)
class SpectralReport:
    lambda2: float
    iterations: int
    residual: float
    connected: bool = True


def laplacian_apply(graph: PhysicalGraph, x) -> np.ndarray:
    """(Lx)_v = deg(v) x_v - sum of x over v's neighbours, with x ordered
    like ``graph.vertices``."""
    x = np.asarray(x, dtype=float)
    _, src, dst, deg = graph.arrays()
    if x.shape != deg.shape:
        raise DomainError(f"vector of shape {x.shape} does not match {len(deg)} vertices")
    return deg * x - np.bincount(src, weights=x[dst], minlength=len(deg))


def lambda2(
    graph: PhysicalGraph,
    tol: float = DEFAULT_TOL,
    max_iter: int | None = None,
    debug: bool = False,
) -> SpectralReport:
    """Second-smallest Laplacian eigenvalue with solver diagnostics.

    Converged when the Ritz residual ||Lx - theta x|| / ||x|| is at most
    ``tol * max(1, theta)``.  Disconnected graphs report exactly 0 with
    ``connected=False``.  ``max_iter`` caps Laplacian products (default
    50 |V|).
    """
    if not 0 < tol <= 1e-2:
        raise DomainError(f"tol must lie in (0, 1e-2], got {tol}")
    n = len(graph)
    if n < 2:
        raise DomainError("lambda2 needs at least 2 vertices")
    if not is_connected(graph):
        return SpectralReport(0.0, 0, 0.0, connected=False)
    budget = 50 * n if max_iter is None else max_iter

    _, src, dst, deg = graph.arrays()

    def apply(v):
        return deg * v - np.bincount(src, weights=v[dst], minlength=n)

    x = uniform_from_ids(graph.vertices)
    x -= x.mean()
    x /= np.linalg.norm(x)
    m = min(n - 1, KRYLOV_DIM)
    iterations = 0
    best = np.inf

    while True:
        basis = np.empty((m, n))
        alpha = np.empty(m)
        beta = np.empty(m)
        basis[0] = x
        k = 0
        for j in range(m):
            w = apply(basis[j])
            iterations += 1
            w -= w.mean()
            alpha[j] = basis[j] @ w
            # two passes of full reorthogonalisation
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
            # rounding re-injects the all-ones direction, which Lanczos amplifies
            w -= w.mean()
            beta[j] = np.linalg.norm(w)
            k = j + 1
            if debug:
                assert abs(basis[j].sum()) < 1e-8 * np.sqrt(n), "iterate left the 1-perp subspace"
            breakdown = beta[j] <= 1e-10 * max(1.0, abs(alpha[j]))
            if breakdown or k == m or iterations >= budget:
                break
            if k % CHECK_EVERY == 0:
                theta, s = _smallest_ritz(alpha[:k], beta[: k - 1])
                if beta[j] * abs(s[-1]) <= 0.5 * tol * max(1.0, theta):
                    break
            basis[j + 1] = w / beta[j]

        theta, s = _smallest_ritz(alpha[:k], beta[: k - 1])
        y = basis[:k].T @ s
        y -= y.mean()
        y /= np.linalg.norm(y)
        residual = float(np.linalg.norm(apply(y) - theta * y))
        best = min(best, residual)
        if residual <= tol * max(1.0, theta):
            return SpectralReport(float(theta), iterations, residual)
        if iterations >= budget:
            raise SolverError(
                f"lambda2 did not converge in {iterations} iterations (residual {best:.3g})",
                best,
            )
        x = y


def _smallest_ritz(alpha, beta):
    if len(alpha) == 1:
        return float(alpha[0]), np.ones(1)
    vals, vecs = eigh_tridiagonal(alpha, beta, select="i", select_range=(0, 0))
    return float(vals[0]), vecs[:, 0]


def laplacian_dense(graph: PhysicalGraph) -> np.ndarray:
    index = {v: i for i, v in enumerate(graph.vertices)}
    n = len(index)
    lap = np.zeros((n, n))
    for u, v in graph.edges():
        i, j = index[u], index[v]
        lap[i, i] += 1.0
        lap[j, j] += 1.0
        lap[i, j] -= 1.0
        lap[j, i] -= 1.0
    return lap


def lambda2_dense(graph: PhysicalGraph) -> float:
    """Second-smallest eigenvalue from a full symmetric eigendecomposition."""
    n = len(graph)
    if n > DENSE_MAX_VERTICES:
        raise CapacityError(f"{n} vertices exceeds the dense cap of {DENSE_MAX_VERTICES}")
    if n < 2:
        raise DomainError("lambda2 needs at least 2 vertices")
    vals = np.linalg.eigvalsh(laplacian_dense(graph))
    return max(float(vals[1]), 0.0)
