"""Synthetic cluster data with known informative features."""

from __future__ import annotations

import numpy as np

from .linalg import check_dense


def make_blobs(
    seed: int,
    sizes=(50, 50, 50),
    n_informative: int = 10,
    n_noise: int = 40,
    separation: float = 5.0,
):
    """Gaussian blobs where only some features carry the cluster structure.

    Each informative feature assigns the clusters a random permutation of an
    evenly spaced ladder of means with step ``separation``; within-cluster
    noise is unit variance, so adjacent clusters sit ``separation`` sigmas
    apart along every informative axis. Noise features are standard Gaussian
    for all samples. Feature order is shuffled.

    Returns (x, labels, informative) with x of shape (d, n) and
    ``informative`` the indices of the informative rows of x.
    """
    if n_informative < 1 or n_noise < 0:
        raise ValueError("need at least one informative feature")
    rng = np.random.default_rng(seed)
    c = len(sizes)
    n = int(sum(sizes))
    d = n_informative + n_noise

    labels = np.repeat(np.arange(c), sizes)
    ladder = separation * (np.arange(c) - (c - 1) / 2.0)
    means = np.empty((n_informative, c))
    for j in range(n_informative):
        means[j] = rng.permutation(ladder)

    x = rng.standard_normal((d, n))
    x[:n_informative] += means[:, labels]

    order = rng.permutation(d)
    x = x[order]
    informative = np.where(order < n_informative)[0]
    return x, labels, informative


def normalize_samples(x) -> np.ndarray:
    """Scale every sample (column) to unit Euclidean norm.

    Zero columns are left untouched.
    """
    x = check_dense(x, "x")
    norms = np.linalg.norm(x, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    return x / safe
