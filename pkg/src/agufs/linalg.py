"""Dense-matrix primitives shared by the solvers.

Everything here is a pure function of its inputs; matrices are plain
``numpy.ndarray`` values and are never mutated in place.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSolutionWarning, NotPositiveDefiniteError

# Eigenvalues below EIG_CLAMP_REL * lambda_max are clamped up to that floor;
# anything below -NPD_TOL_REL * |lambda|_max is treated as a hard failure.
EIG_CLAMP_REL = 1e-12
NPD_TOL_REL = 1e-6

POWER_MAX_STEPS = 100
POWER_TOL = 1e-9


@dataclass(frozen=True)
class SpdFactorization:
    """Eigendecomposition of a symmetric PSD matrix, eigenvalues descending."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def check_dense(a, name: str = "matrix") -> np.ndarray:
    """Validate a 2-D finite float array and return it as float64."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got ndim={a.ndim}")
    if a.size == 0:
        raise ValueError(f"{name} must be non-empty")
    if not np.isfinite(a).all():
        raise ValueError(f"{name} contains NaN or Inf entries")
    return a


def _check_symmetric(m: np.ndarray, name: str) -> None:
    scale = max(1.0, float(np.abs(m).max()))
    if np.abs(m - m.T).max() > 1e-10 * scale:
        raise ValueError(f"{name} must be symmetric")


def center_columns(x) -> np.ndarray:
    """Remove each row's mean so samples (columns) are centered.

    Equivalent to right-multiplying by the centering projector
    ``I - (1/n) 1 1^T`` without materializing it.
    """
    x = check_dense(x, "x")
    return x - x.mean(axis=1, keepdims=True)


def l21_norm(w) -> float:
    """Sum of Euclidean norms of the rows of ``w``."""
    w = np.asarray(w, dtype=float)
    return float(np.linalg.norm(w, axis=1).sum())


def reweight_diag(w, epsilon: float) -> np.ndarray:
    """Diagonal of the smoothed row-norm reweighting matrix.

    Entry i is ``1 / (2 * sqrt(||w_i||^2 + epsilon))``, the weight that turns
    the row-sparsity penalty into a quadratic form on ``w``.

    Returns the diagonal as a 1-D vector of length ``d``.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    w = np.asarray(w, dtype=float)
    row_sq = np.einsum("ij,ij->i", w, w)
    return 1.0 / (2.0 * np.sqrt(row_sq + epsilon))


def spd_inverse_sqrt(m) -> tuple[np.ndarray, SpdFactorization]:
    """Inverse square root of a symmetric positive (semi)definite matrix.

    Returns ``(r, fact)`` where ``r @ m @ r == I`` for well-conditioned ``m``
    and ``fact`` holds the clamped eigendecomposition (descending order).
    Tiny negative eigenvalues from round-off are clamped to a relative floor;
    genuinely negative spectra raise :class:`NotPositiveDefiniteError`.
    """
    m = check_dense(m, "m")
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"m must be square, got shape {m.shape}")
    _check_symmetric(m, "m")

    vals, vecs = np.linalg.eigh(m)
    spectral_norm = float(np.abs(vals).max())
    if vals[0] < -NPD_TOL_REL * spectral_norm:
        raise NotPositiveDefiniteError(
            f"matrix has eigenvalue {vals[0]:.3e} below "
            f"-{NPD_TOL_REL:g} * |lambda|_max = {-NPD_TOL_REL * spectral_norm:.3e}"
        )
    lam_max = float(vals[-1])
    if lam_max <= 0.0:
        raise NotPositiveDefiniteError("matrix has no positive eigenvalues")

    floor = EIG_CLAMP_REL * lam_max
    clamped = np.maximum(vals, floor)

    inv_sqrt_vals = 1.0 / np.sqrt(clamped)
    r = (vecs * inv_sqrt_vals) @ vecs.T
    r = 0.5 * (r + r.T)

    order = np.argsort(clamped)[::-1]
    fact = SpdFactorization(
        eigenvalues=clamped[order], eigenvectors=np.ascontiguousarray(vecs[:, order])
    )
    return r, fact


def orthogonal_procrustes(b) -> np.ndarray:
    """Orthonormal maximizer of ``Tr(A^T B)`` over ``A^T A = I``.

    Computed as ``U V^T`` from the compact SVD of ``b``, with column signs
    fixed so the largest-magnitude entry of each left-singular column is
    positive (deterministic across backends). A rank-deficient ``b`` has a
    non-unique maximizer: the compact-SVD representative is returned and a
    :class:`DegenerateSolutionWarning` is emitted.
    """
    b = check_dense(b, "b")
    p, c = b.shape
    if p < c:
        raise ValueError(f"b must have at least as many rows as columns, got {b.shape}")

    u, s, vt = np.linalg.svd(b, full_matrices=False)

    # Sign convention: flip U and V columns in pairs so B = U S V^T is kept.
    anchor = np.abs(u).argmax(axis=0)
    signs = np.sign(u[anchor, np.arange(c)])
    signs[signs == 0] = 1.0
    u = u * signs
    vt = vt * signs[:, None]

    if s[0] <= 0 or s[-1] <= 1e-12 * s[0]:
        warnings.warn(
            "rank-deficient input: the trace maximizer is not unique",
            DegenerateSolutionWarning,
            stacklevel=2,
        )
    return u @ vt


def spectral_upper_bound(q) -> float:
    """Strict upper bound on the largest eigenvalue of a symmetric matrix.

    Estimates the spectral radius by power iteration (norm-growth estimate,
    at most ``POWER_MAX_STEPS`` steps, tolerance ``POWER_TOL``) and returns
    ``1.01 * estimate + 1e-6`` so the shifted matrix ``nu I - q`` is strictly
    positive definite. Falls back to ``||q||_F + 1`` if the iteration does
    not settle.
    """
    q = check_dense(q, "q")
    if q.shape[0] != q.shape[1]:
        raise ValueError(f"q must be square, got shape {q.shape}")
    _check_symmetric(q, "q")

    rng = np.random.default_rng(0)
    v = rng.standard_normal(q.shape[0])
    v /= np.linalg.norm(v)

    estimate = 0.0
    converged = False
    for _ in range(POWER_MAX_STEPS):
        qv = q @ v
        new_estimate = float(np.linalg.norm(qv))
        if abs(new_estimate - estimate) <= POWER_TOL * max(1.0, new_estimate):
            estimate = new_estimate
            converged = True
            break
        estimate = new_estimate
        if new_estimate == 0.0:
            converged = True
            break
        v = qv / new_estimate

    if not converged:
        return float(np.linalg.norm(q, "fro")) + 1.0
    return 1.01 * estimate + 1e-6


def random_orthonormal(n: int, c: int, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal n x c matrix from the QR of a Gaussian draw."""
    if not 1 <= c <= n:
        raise ValueError(f"need 1 <= c <= n, got c={c}, n={n}")
    q, r = np.linalg.qr(rng.standard_normal((n, c)))
    # Fix the QR sign ambiguity so the draw is a deterministic function of rng.
    return q * np.sign(np.diag(r))
