"""Clustering-based evaluation of a feature selection.

K-means with restarts on the selected feature block, scored against ground
truth labels by best-match accuracy (optimal cluster-to-label assignment)
and normalized mutual information.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .linalg import check_dense


@dataclass(frozen=True)
class ClusteringResult:
    """Cluster ids per sample plus the final inertia.

    ``inertia_path`` records the inertia after every Lloyd sweep; it is
    non-increasing, which the tests rely on.
    """

    assignments: np.ndarray
    inertia: float
    inertia_path: np.ndarray


@dataclass(frozen=True)
class EvalReport:
    acc_mean: float
    acc_std: float
    nmi_mean: float
    nmi_std: float
    restarts: int


def _plus_plus_seeds(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """Greedy k-means++: each new center is the best of 2 + log(k)
    distance-squared-sampled candidates by total potential."""
    n = points.shape[0]
    n_cand = 2 + int(np.log(k)) if k > 1 else 1
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    closest = ((points - centers[0]) ** 2).sum(axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            # all remaining mass at the chosen centers; duplicate any point
            centers[j] = points[rng.integers(n)]
            continue
        candidates = rng.choice(n, size=n_cand, p=closest / total)
        best_idx, best_closest, best_pot = None, None, np.inf
        for idx in candidates:
            trial = np.minimum(closest, ((points - points[idx]) ** 2).sum(axis=1))
            pot = trial.sum()
            if pot < best_pot:
                best_idx, best_closest, best_pot = idx, trial, pot
        centers[j] = points[best_idx]
        closest = best_closest
    return centers


def kmeans(points, k: int, seed: int = 0, max_iters: int = 100) -> ClusteringResult:
    """Lloyd's algorithm with k-means++ seeding.

    An update that empties a cluster re-seeds that centroid at the point
    farthest from its currently assigned centroid, so the result always has
    k clusters.
    """
    points = check_dense(points, "points")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)
    centers = _plus_plus_seeds(points, k, rng)

    assignments = None
    inertia_path = []
    for _ in range(max_iters):
        sq = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_assign = sq.argmin(axis=1)
        point_dist = sq[np.arange(n), new_assign]
        for j in range(k):
            if not (new_assign == j).any():
                far = int(point_dist.argmax())
                centers[j] = points[far]
                sq[:, j] = ((points - centers[j]) ** 2).sum(axis=1)
                new_assign = sq.argmin(axis=1)
                point_dist = sq[np.arange(n), new_assign]
        if assignments is not None and np.array_equal(new_assign, assignments):
            break
        assignments = new_assign
        for j in range(k):
            members = points[assignments == j]
            if len(members):
                centers[j] = members.mean(axis=0)
        inertia = float(
            ((points - centers[assignments]) ** 2).sum()
        )
        inertia_path.append(inertia)
    return ClusteringResult(
        assignments=assignments,
        inertia=inertia_path[-1],
        inertia_path=np.asarray(inertia_path),
    )


def _contingency(truth, pred) -> np.ndarray:
    truth = np.asarray(truth).ravel()
    pred = np.asarray(pred).ravel()
    if truth.shape != pred.shape:
        raise ValueError(f"length mismatch: {truth.shape} vs {pred.shape}")
    _, ti = np.unique(truth, return_inverse=True)
    _, pi = np.unique(pred, return_inverse=True)
    table = np.zeros((pi.max() + 1, ti.max() + 1))
    np.add.at(table, (pi, ti), 1.0)
    return table


def clustering_accuracy(truth, pred) -> float:
    """Best-match accuracy: fraction correct under the optimal one-to-one
    mapping of clusters to labels (assignment problem on the contingency
    table, padded square when the counts differ)."""
    table = _contingency(truth, pred)
    m = max(table.shape)
    padded = np.zeros((m, m))
    padded[: table.shape[0], : table.shape[1]] = table
    rows, cols = linear_sum_assignment(padded, maximize=True)
    return float(padded[rows, cols].sum() / table.sum())


def normalized_mutual_information(truth, pred) -> float:
    """Mutual information over the larger marginal entropy, natural log.

    Degenerate partitions follow limit conventions: both sides a single
    cluster gives 1.0, exactly one side a single cluster gives 0.0.
    """
    table = _contingency(truth, pred)
    n = table.sum()
    p_rows = table.sum(axis=1) / n
    p_cols = table.sum(axis=0) / n
    h_pred = -float(np.sum(p_rows * np.log(p_rows, where=p_rows > 0, out=np.zeros_like(p_rows))))
    h_truth = -float(np.sum(p_cols * np.log(p_cols, where=p_cols > 0, out=np.zeros_like(p_cols))))
    if h_pred <= 0.0 and h_truth <= 0.0:
        return 1.0
    if h_pred <= 0.0 or h_truth <= 0.0:
        return 0.0
    pij = table / n
    outer = np.outer(p_rows, p_cols)
    mask = pij > 0
    mi = float((pij[mask] * np.log(pij[mask] / outer[mask])).sum())
    if mi <= 0.0:
        return 0.0
    return min(1.0, mi / max(h_pred, h_truth))


def evaluate_selection(
    x,
    labels,
    selected,
    k_clusters: int,
    restarts: int = 30,
    seed: int = 0,
) -> EvalReport:
    """Cluster the selected feature block and score against labels.

    ``x`` is d x n (features by samples); ``selected`` indexes its rows.
    Restart r runs K-means with seed ``seed + r``; ACC and NMI are
    aggregated as mean and population standard deviation over restarts.
    """
    x = check_dense(x, "x")
    selected = np.asarray(selected, dtype=int).ravel()
    if selected.size == 0:
        raise ValueError("selected must be non-empty")
    if selected.min() < 0 or selected.max() >= x.shape[0]:
        raise ValueError(f"selected indices out of range [0, {x.shape[0]})")
    labels = np.asarray(labels).ravel()
    if labels.shape[0] != x.shape[1]:
        raise ValueError(f"labels length {labels.shape[0]} != n {x.shape[1]}")
    if restarts < 1:
        raise ValueError("restarts must be at least 1")

    points = x[selected].T
    accs = np.empty(restarts)
    nmis = np.empty(restarts)
    for r in range(restarts):
        result = kmeans(points, k_clusters, seed=seed + r)
        accs[r] = clustering_accuracy(labels, result.assignments)
        nmis[r] = normalized_mutual_information(labels, result.assignments)
    return EvalReport(
        acc_mean=float(accs.mean()),
        acc_std=float(accs.std()),
        nmi_mean=float(nmis.mean()),
        nmi_std=float(nmis.std()),
        restarts=restarts,
    )
