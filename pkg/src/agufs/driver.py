"""Alternating solver for adaptive-graph unsupervised feature selection.

Cycles projection -> indicator -> similarity updates until the global
objective settles. Features are ranked by the row norms of the final
projection matrix: a feature whose projection row is driven to zero by the
row-sparsity penalty carries no cluster information.
"""

from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSolutionWarning
from .fsolver import FSolverConfig, build_qc, solve_f
from .graph import (
    GraphLaplacian,
    SimilarityGraph,
    build_laplacian,
    combined_affinity_cost,
    pairwise_projected_distances,
    update_similarity,
)
from .linalg import center_columns, check_dense, l21_norm, random_orthonormal
from .wsolver import WSolverConfig, solve_w


@dataclass(frozen=True)
class AgufsConfig:
    """Hyperparameters and iteration budgets for one solver run.

    ``lam`` weighs row sparsity, ``alpha`` the graph coupling, ``k`` the
    neighbor count per similarity row, ``c`` the number of clusters, and
    ``top_t`` how many features to keep. Data-dependent bounds (top_t vs d,
    k vs n) are checked in :func:`run_agufs` where the data is known.
    """

    lam: float
    alpha: float
    k: int
    c: int
    top_t: int
    epsilon: float = 1e-6
    max_outer_iters: int = 30
    outer_tol: float = 1e-5
    w_max_iters: int = 20
    w_tol: float = 1e-6
    f_max_iters: int = 50
    f_tol: float = 1e-8
    seed: int = 0

    def __post_init__(self):
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.alpha < 0:
            raise ValueError(f"alpha must be nonnegative, got {self.alpha}")
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.c < 2:
            raise ValueError(f"c must be at least 2, got {self.c}")
        if self.top_t < 1:
            raise ValueError(f"top_t must be at least 1, got {self.top_t}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if self.max_outer_iters < 1:
            raise ValueError("max_outer_iters must be at least 1")

    def w_config(self) -> WSolverConfig:
        return WSolverConfig(
            lam=self.lam,
            alpha=self.alpha,
            epsilon=self.epsilon,
            max_inner_iters=self.w_max_iters,
            tol=self.w_tol,
        )

    def f_config(self) -> FSolverConfig:
        return FSolverConfig(
            alpha=self.alpha,
            max_inner_iters=self.f_max_iters,
            tol=self.f_tol,
        )


@dataclass
class SolverTrace:
    """Per-outer-iteration diagnostics.

    ``objectives[t]`` is the global objective after outer iteration t, with
    the similarity regularizer weights beta refit in that iteration.
    ``frozen_prev_objectives[t]`` re-evaluates the previous iterate under the
    same beta values, so ``objectives[t] <= frozen_prev_objectives[t]`` is
    the monotonicity guarantee the update order actually provides.
    """

    initial_objective: float = 0.0
    objectives: list = field(default_factory=list)
    frozen_prev_objectives: list = field(default_factory=list)
    w_residuals: list = field(default_factory=list)
    f_residuals: list = field(default_factory=list)
    s_rowsum_devs: list = field(default_factory=list)
    wall_times: list = field(default_factory=list)
    w_inner_objectives: list = field(default_factory=list)
    f_inner_objectives: list = field(default_factory=list)
    converged: bool = False

    @property
    def n_outer(self) -> int:
        return len(self.objectives)


@dataclass(frozen=True)
class FeatureRanking:
    """Feature scores (projection row norms) and the induced ordering.

    ``order`` sorts features by descending score, breaking ties by ascending
    feature index so equal scores rank deterministically. ``selected`` holds
    the first ``top_t`` entries of ``order``.
    """

    scores: np.ndarray
    order: np.ndarray
    selected: np.ndarray


def rank_features(w: np.ndarray, top_t: int) -> FeatureRanking:
    w = check_dense(w, "w")
    if not 1 <= top_t <= w.shape[0]:
        raise ValueError(f"top_t must be in [1, {w.shape[0]}], got {top_t}")
    scores = np.linalg.norm(w, axis=1)
    order = np.lexsort((np.arange(len(scores)), -scores))
    return FeatureRanking(scores=scores, order=order, selected=order[:top_t])


def compute_bias(x_means: np.ndarray, w: np.ndarray, f_means: np.ndarray) -> np.ndarray:
    """Intercept that re-centers projections of raw (uncentered) data.

    With b = f_means - W^T x_means, the map x -> W^T x + b applied to the
    raw data reproduces the centered fit.
    """
    x_means = np.asarray(x_means, dtype=float)
    f_means = np.asarray(f_means, dtype=float)
    return f_means - w.T @ x_means


def global_objective(
    xc: np.ndarray,
    w: np.ndarray,
    f: np.ndarray,
    s: SimilarityGraph,
    betas: np.ndarray,
    cfg: AgufsConfig,
    lap: GraphLaplacian | None = None,
) -> float:
    """Full objective: fit + sparsity + graph smoothness and regularity terms.

    The graph block weighs, at alpha/2 each: projected-space smoothness under
    the directed similarity rows, the per-row ridge with its beta weights, and
    the indicator smoothness through the symmetrized Laplacian.
    """
    p = xc.T @ w
    f_centered = f - f.mean(axis=0, keepdims=True)
    fit = float(np.linalg.norm(p - f_centered) ** 2)
    sparsity = cfg.lam * l21_norm(w)

    smooth_w = 0.0
    ridge = 0.0
    for i in range(s.n):
        idx = s.indices[i]
        wts = s.weights[i]
        diffs = p[idx] - p[i]
        smooth_w += float(wts @ np.einsum("ij,ij->i", diffs, diffs))
        ridge += float(betas[i] * (wts @ wts))
    if lap is None:
        lap = build_laplacian(s)
    smooth_f = float(np.einsum("ij,ij->", f, lap.laplacian @ f))

    return fit + sparsity + 0.5 * cfg.alpha * (smooth_w + ridge + smooth_f)


def run_agufs(
    x: np.ndarray,
    cfg: AgufsConfig,
    f_init: np.ndarray | None = None,
    w_init: np.ndarray | None = None,
) -> tuple[FeatureRanking, np.ndarray, np.ndarray, SimilarityGraph, SolverTrace]:
    """Run the alternating solver on a d x n data matrix (features x samples).

    Returns the feature ranking, final projection W, relaxed indicator F,
    similarity graph S, and the iteration trace. ``f_init`` and ``w_init``
    override the seeded random orthonormal starts, which is how tests pin
    the trajectory.
    """
    x = check_dense(x, "x")
    d, n = x.shape
    if n < 3:
        raise ValueError(f"need at least 3 samples, got {n}")
    if not 2 <= cfg.c <= min(n, d):
        raise ValueError(f"c must be in [2, {min(n, d)}], got {cfg.c}")
    if not 1 <= cfg.k <= n - 2:
        raise ValueError(f"k must be in [1, {n - 2}], got {cfg.k}")
    if not 1 <= cfg.top_t <= d:
        raise ValueError(f"top_t must be in [1, {d}], got {cfg.top_t}")

    if float(x.std(axis=1).max()) == 0.0:
        warnings.warn(
            "every feature has zero variance; ranking will be arbitrary",
            DegenerateSolutionWarning,
        )

    xc = center_columns(x)
    rng = np.random.default_rng(cfg.seed)
    f = random_orthonormal(n, cfg.c, rng) if f_init is None else check_dense(f_init, "f_init").copy()
    w = random_orthonormal(d, cfg.c, rng) if w_init is None else check_dense(w_init, "w_init").copy()

    costs = combined_affinity_cost(pairwise_projected_distances(xc, w), f)
    s, betas = update_similarity(costs, cfg.k)

    w_cfg = cfg.w_config()
    f_cfg = cfg.f_config()
    trace = SolverTrace()
    trace.initial_objective = global_objective(xc, w, f, s, betas, cfg)
    prev_obj = trace.initial_objective

    for t in range(cfg.max_outer_iters):
        tic = time.perf_counter()
        lap = build_laplacian(s)
        prev_w, prev_f, prev_s = w, f, s

        w, w_inner = solve_w(xc, f, lap, w_cfg, w_warm=None if t == 0 else w)
        q, c_mat = build_qc(xc, w, lap, cfg.alpha)
        f, f_objs = solve_f(q, c_mat, f, f_cfg)

        costs = combined_affinity_cost(pairwise_projected_distances(xc, w), f)
        s, betas = update_similarity(costs, cfg.k)

        obj = global_objective(xc, w, f, s, betas, cfg)
        frozen_prev = global_objective(xc, prev_w, prev_f, prev_s, betas, cfg)

        trace.objectives.append(obj)
        trace.frozen_prev_objectives.append(frozen_prev)
        trace.w_residuals.append(w_inner.constraint_residual)
        trace.f_residuals.append(
            float(np.linalg.norm(f.T @ f - np.eye(cfg.c)))
        )
        trace.s_rowsum_devs.append(
            max(abs(float(wts.sum()) - 1.0) for wts in s.weights)
        )
        trace.w_inner_objectives.append(w_inner.objectives)
        trace.f_inner_objectives.append(f_objs)
        trace.wall_times.append(time.perf_counter() - tic)

        if abs(prev_obj - obj) <= cfg.outer_tol * max(1.0, abs(prev_obj)):
            trace.converged = True
            break
        prev_obj = obj

    ranking = rank_features(w, cfg.top_t)
    return ranking, w, f, s, trace
