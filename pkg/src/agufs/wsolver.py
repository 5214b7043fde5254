"""Projection-matrix subproblem.

Minimizes the centered regression error plus a row-sparsity penalty and a
graph-smoothness penalty, subject to the extended uncorrelated constraint
``W^T R W = I`` where ``R`` couples the data scatter, the sparsity reweighting
diagonal, and the graph Laplacian. The reweighting diagonal depends on ``W``
itself, so the closed-form update is iterated until the objective settles.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericError
from .graph import GraphLaplacian
from .linalg import (
    check_dense,
    l21_norm,
    orthogonal_procrustes,
    reweight_diag,
    spd_inverse_sqrt,
)


@dataclass(frozen=True)
class WSolverConfig:
    """Knobs for the projection-matrix solve.

    ``lam`` weighs the row-sparsity penalty (must be positive: it keeps the
    constraint matrix positive definite), ``alpha`` weighs the graph terms,
    ``epsilon`` floors the reweighting denominators.
    """

    lam: float
    alpha: float
    epsilon: float = 1e-6
    max_inner_iters: int = 20
    tol: float = 1e-6

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_inner_iters < 1:
            raise ValueError("max_inner_iters must be at least 1")


@dataclass(frozen=True)
class WInnerTrace:
    """Per-iteration objective values and the final constraint residual."""

    objectives: np.ndarray
    constraint_residual: float


def _scatter_plus_graph(xc: np.ndarray, lap: GraphLaplacian, alpha: float) -> np.ndarray:
    base = xc @ xc.T + alpha * (xc @ lap.laplacian @ xc.T)
    return 0.5 * (base + base.T)


def _constraint_matrix(base: np.ndarray, lam: float, dw: np.ndarray) -> np.ndarray:
    rt = base.copy()
    rt[np.diag_indices_from(rt)] += lam * dw
    if not np.isfinite(rt).all():
        raise NumericError("constraint matrix overflowed to non-finite values")
    return rt


def build_rt_prime(xc, dw, lap: GraphLaplacian, cfg: WSolverConfig) -> np.ndarray:
    """Constraint matrix: data scatter + lam * diag(dw) + alpha * graph scatter.

    ``xc`` must already be column-centered so that ``xc @ xc.T`` is the
    total scatter. ``dw`` is the reweighting diagonal as a 1-D vector.
    """
    xc = check_dense(xc, "xc")
    dw = np.asarray(dw, dtype=float)
    if dw.shape != (xc.shape[0],):
        raise ValueError(f"dw must have shape ({xc.shape[0]},), got {dw.shape}")
    base = _scatter_plus_graph(xc, lap, cfg.alpha)
    return _constraint_matrix(base, cfg.lam, dw)


def objective_w(xc, w, f, lap: GraphLaplacian, cfg: WSolverConfig) -> float:
    """Value of the projection subproblem objective at ``w``.

    Sum of the centered regression error, the weighted row-sparsity norm,
    and the weighted graph-smoothness quadratic form on the projected data.
    """
    xc = check_dense(xc, "xc")
    w = check_dense(w, "w")
    f = check_dense(f, "f")
    p = xc.T @ w
    f_centered = f - f.mean(axis=0, keepdims=True)
    fit = float(np.linalg.norm(p - f_centered) ** 2)
    sparsity = cfg.lam * l21_norm(w)
    smooth = cfg.alpha * float(np.einsum("ij,ij->", p, lap.laplacian @ p))
    return fit + sparsity + smooth


def solve_w(
    xc,
    f,
    lap: GraphLaplacian,
    cfg: WSolverConfig,
    w_warm=None,
) -> tuple[np.ndarray, WInnerTrace]:
    """Fit the projection matrix for fixed indicator ``f`` and graph Laplacian.

    Each pass rebuilds the constraint matrix from the current reweighting
    diagonal, maps the problem to a trace maximization through the inverse
    square root, and solves it by SVD. Stops when the relative objective
    change drops below ``cfg.tol`` or after ``cfg.max_inner_iters`` passes.

    ``w_warm`` seeds the reweighting diagonal from a previous solution;
    without it the diagonal starts at the identity.
    """
    xc = check_dense(xc, "xc")
    f = check_dense(f, "f")
    d, n = xc.shape
    if f.shape[0] != n:
        raise ValueError(f"f has {f.shape[0]} rows but xc has {n} columns")

    graph_gram = xc @ lap.laplacian @ xc.T
    scatter = xc @ xc.T
    base = scatter + cfg.alpha * graph_gram
    base = 0.5 * (base + base.T)
    xcf = xc @ f
    f_centered = f - f.mean(axis=0, keepdims=True)

    if w_warm is None:
        dw = np.ones(d)
    else:
        dw = reweight_diag(check_dense(w_warm, "w_warm"), cfg.epsilon)

    w = None
    objectives = []
    prev = None
    for _ in range(cfg.max_inner_iters):
        rt = _constraint_matrix(base, cfg.lam, dw)
        rinv_sqrt, _ = spd_inverse_sqrt(rt)
        a = orthogonal_procrustes(rinv_sqrt @ xcf)
        w = rinv_sqrt @ a
        dw = reweight_diag(w, cfg.epsilon)

        p = xc.T @ w
        obj = (
            float(np.linalg.norm(p - f_centered) ** 2)
            + cfg.lam * l21_norm(w)
            + cfg.alpha * float(np.einsum("ij,ij->", w, graph_gram @ w))
        )
        objectives.append(obj)
        if prev is not None and abs(prev - obj) <= cfg.tol * max(1.0, abs(prev)):
            break
        prev = obj

    # rt still holds the constraint matrix the final w was built from.
    gram = w.T @ rt @ w
    residual = float(np.linalg.norm(gram - np.eye(w.shape[1])))
    trace = WInnerTrace(objectives=np.asarray(objectives), constraint_residual=residual)
    return w, trace
