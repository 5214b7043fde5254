"""Indicator-matrix subproblem.

Minimizes Tr(F^T Q F) - 2 Tr(F^T C) over orthonormal F, where Q couples the
graph Laplacian with the centering projector and C carries the projected
data. Solved by power iteration on the shifted matrix nu*I - Q, which is
positive definite by choice of nu, so each SVD update cannot increase the
objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import GraphLaplacian
from .linalg import (
    check_dense,
    orthogonal_procrustes,
    spectral_upper_bound,
)


@dataclass(frozen=True)
class FSolverConfig:
    alpha: float
    max_inner_iters: int = 50
    tol: float = 1e-8

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.max_inner_iters < 1:
            raise ValueError("max_inner_iters must be at least 1")


def build_qc(xc, w, lap: GraphLaplacian, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Quadratic and linear coefficients of the indicator subproblem.

    Q = (alpha/2) * L + H with H the centering projector, C = Xc^T W.
    ``xc`` must be column-centered; C then has zero column sums, which keeps
    the centering consistent between the two subproblems.
    """
    xc = check_dense(xc, "xc")
    w = check_dense(w, "w")
    n = xc.shape[1]
    q = 0.5 * alpha * lap.laplacian - np.full((n, n), 1.0 / n)
    q[np.diag_indices_from(q)] += 1.0
    c = xc.T @ w
    return 0.5 * (q + q.T), c


def objective_f(q, c, f) -> float:
    """Tr(F^T Q F) - 2 Tr(F^T C), the quantity the power iteration decreases."""
    return float(np.einsum("ij,ij->", f, q @ f) - 2.0 * np.einsum("ij,ij->", f, c))


def solve_f(q, c, f_init, cfg: FSolverConfig) -> tuple[np.ndarray, np.ndarray]:
    """Relax the indicator matrix for fixed projection and graph.

    Returns the updated orthonormal F together with the per-iteration
    objective values. ``f_init`` must be orthonormal; the outer loop passes
    the previous F so the iteration warm-starts.
    """
    q = check_dense(q, "q")
    c = check_dense(c, "c")
    f = check_dense(f_init, "f_init").copy()
    n = q.shape[0]
    if q.shape[1] != n:
        raise ValueError(f"q must be square, got {q.shape}")
    if f.shape[0] != n or c.shape != f.shape:
        raise ValueError(
            f"shape mismatch: q {q.shape}, c {c.shape}, f_init {f.shape}"
        )
    ortho_dev = np.linalg.norm(f.T @ f - np.eye(f.shape[1]))
    if ortho_dev > 1e-8:
        raise ValueError(f"f_init is not orthonormal (deviation {ortho_dev:.2e})")

    nu = spectral_upper_bound(q)
    q_shift = -q.copy()
    q_shift[np.diag_indices_from(q_shift)] += nu

    objectives = []
    prev = None
    for _ in range(cfg.max_inner_iters):
        e = 2.0 * (q_shift @ f) + 2.0 * c
        f = orthogonal_procrustes(e)
        obj = objective_f(q, c, f)
        objectives.append(obj)
        if prev is not None and abs(prev - obj) <= cfg.tol * max(1.0, abs(prev)):
            break
        prev = obj
    return f, np.asarray(objectives)
