"""Adaptive similarity-graph learning.

A graph row is refit in closed form from a cost vector: the k cheapest
non-self candidates get affine-decreasing weights on the probability simplex,
and the implied regularization strength for that row falls out of the same
sort. The Laplacian of the (symmetrized) graph feeds the projection and
indicator subproblems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import check_dense


@dataclass
class SimilarityGraph:
    """Row-stochastic k-sparse similarity graph over ``n`` samples.

    ``indices[i]`` / ``weights[i]`` hold row i's neighbor ids and weights;
    the diagonal is implicitly zero and each row sums to 1.
    """

    n: int
    k: int
    indices: list[np.ndarray]
    weights: list[np.ndarray]

    def to_dense(self) -> np.ndarray:
        s = np.zeros((self.n, self.n))
        for i, (idx, w) in enumerate(zip(self.indices, self.weights)):
            s[i, idx] = w
        return s


@dataclass(frozen=True)
class GraphLaplacian:
    """Degree vector and dense Laplacian of a symmetrized similarity graph."""

    degree: np.ndarray
    laplacian: np.ndarray


def pairwise_projected_distances(x, w) -> np.ndarray:
    """Squared Euclidean distances between samples after projection by ``w``.

    ``x`` is d-by-n (samples in columns), ``w`` is d-by-c. Entry (i, j) is
    ``||w^T x_i - w^T x_j||^2``; the result is symmetric with zero diagonal.
    """
    x = check_dense(x, "x")
    w = check_dense(w, "w")
    if x.shape[0] != w.shape[0]:
        raise ValueError(f"x has {x.shape[0]} features but w has {w.shape[0]} rows")
    p = x.T @ w
    return _pairwise_sq_dists(p)


def combined_affinity_cost(dist_w, f) -> np.ndarray:
    """Per-pair graph cost: projected distance plus half the indicator distance."""
    dist_w = check_dense(dist_w, "dist_w")
    f = check_dense(f, "f")
    if dist_w.shape[0] != dist_w.shape[1]:
        raise ValueError(f"dist_w must be square, got shape {dist_w.shape}")
    if f.shape[0] != dist_w.shape[0]:
        raise ValueError(
            f"f has {f.shape[0]} rows but dist_w is {dist_w.shape[0]}-by-{dist_w.shape[0]}"
        )
    return dist_w + 0.5 * _pairwise_sq_dists(f)


def _pairwise_sq_dists(rows: np.ndarray) -> np.ndarray:
    sq = np.einsum("ij,ij->i", rows, rows)
    d = sq[:, None] + sq[None, :] - 2.0 * (rows @ rows.T)
    d = 0.5 * (d + d.T)
    np.maximum(d, 0.0, out=d)
    np.fill_diagonal(d, 0.0)
    return d


def update_similarity_row(g_i, i: int, k: int) -> tuple[np.ndarray, np.ndarray, float]:
    """Closed-form refit of one graph row from its cost vector.

    Picks the ``k`` smallest non-self costs (stable sort by value then index)
    and assigns ``s_j = (g_cut - g_j) / (k * g_cut - sum of kept costs)``
    where ``g_cut`` is the (k+1)-th smallest cost. The same quantities give
    the implied per-row regularizer ``beta = (k * g_cut - sum) / 2``.

    Returns ``(neighbor_indices, weights, beta)``. When all candidate costs
    tie, the limit is uniform ``1/k`` with ``beta = 0``. When ``k == n - 1``
    no cut element exists, so the row is fit with ``k - 1`` neighbors.
    """
    g_i = np.asarray(g_i, dtype=float)
    n = g_i.shape[0]
    if not 0 <= i < n:
        raise ValueError(f"row index {i} out of range for n={n}")
    if not 1 <= k <= n - 1:
        raise ValueError(f"k must be in [1, n-1]={n - 1}, got {k}")
    if k == n - 1:
        # The cut cost g_(k+1) must exist among non-self candidates.
        k = n - 2
        if k < 1:
            raise ValueError("need at least 3 samples to fit a graph row")

    candidates = np.concatenate([np.arange(i), np.arange(i + 1, n)])
    order = candidates[np.argsort(g_i[candidates], kind="stable")]
    kept = order[:k]
    g_kept = g_i[kept]
    g_cut = g_i[order[k]]

    denom = k * g_cut - g_kept.sum()
    beta = 0.5 * denom
    if denom <= 0.0:
        # All k+1 leading costs tie; the affine weights degenerate to uniform.
        weights = np.full(k, 1.0 / k)
        return kept, weights, 0.0

    weights = (g_cut - g_kept) / denom
    return kept, weights, beta


def update_similarity(costs, k: int) -> tuple[SimilarityGraph, np.ndarray]:
    """Refit every row of the graph from a dense cost matrix.

    Returns the graph together with the vector of per-row ``beta`` values.
    """
    costs = check_dense(costs, "costs")
    n = costs.shape[0]
    if costs.shape[1] != n:
        raise ValueError(f"costs must be square, got shape {costs.shape}")
    indices: list[np.ndarray] = []
    weights: list[np.ndarray] = []
    betas = np.zeros(n)
    for i in range(n):
        idx, w, beta = update_similarity_row(costs[i], i, k)
        indices.append(idx)
        weights.append(w)
        betas[i] = beta
    return SimilarityGraph(n=n, k=k, indices=indices, weights=weights), betas


def build_laplacian(s: SimilarityGraph) -> GraphLaplacian:
    """Laplacian ``D - (S + S^T)/2`` of the symmetrized graph."""
    dense = s.to_dense()
    sym = 0.5 * (dense + dense.T)
    degree = sym.sum(axis=1)
    lap = np.diag(degree) - sym
    return GraphLaplacian(degree=degree, laplacian=lap)
