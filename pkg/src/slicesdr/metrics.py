"""Subspace-recovery quality measures.

r2_single scores one estimated direction against a target subspace; the
squared trace correlation extends this to k-dimensional estimates as the
mean of squared canonical correlations, computed from orthonormalized
bases via the trace of projector products.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import DegenerateSubspace

_RANK_TOL = 1e-10


def _orthonormalize(basis) -> np.ndarray:
    """QR-orthonormalize columns; rank deficiency raises DegenerateSubspace."""
    b = np.asarray(basis, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    if b.shape[0] < b.shape[1]:
        raise DegenerateSubspace(f"basis {b.shape} has more columns than rows")
    q, r = np.linalg.qr(b)
    diag = np.abs(np.diag(r))
    if diag.min() <= _RANK_TOL * max(diag.max(), 1.0):
        raise DegenerateSubspace("basis is rank deficient")
    return q


def r2_single(beta_hat, true_basis, sigma_z=None) -> float:
    """Squared multiple correlation of one direction with a subspace.

    With sigma_z omitted (identity covariance), this is the squared norm of
    the projection of the unit vector beta_hat onto span(true_basis):
    the closed-form maximum of (beta_hat . beta)^2 over unit beta in the
    span.  With a covariance supplied, the displayed ratio
    (b'Σβ)² / (b'Σb · β'Σβ) is maximized over the span via the whitened
    projection.
    """
    b = np.asarray(beta_hat, dtype=float).reshape(-1)
    if not np.any(b != 0.0):
        raise DegenerateSubspace("beta_hat is the zero vector")
    basis = np.asarray(true_basis, dtype=float)
    if basis.ndim == 1:
        basis = basis[:, None]
    if sigma_z is not None:
        root = linalg.sym_sqrt(sigma_z, rel_floor=1e-12)
        b = root @ b
        basis = root @ basis
    q = _orthonormalize(basis)
    proj = q.T @ b
    return float((proj @ proj) / (b @ b))


@dataclass(frozen=True)
class SubspaceMetrics:
    """Overall score plus the per-direction breakdown for k > 1."""

    r2: float
    k: int
    per_direction: np.ndarray  # r2_single of each estimated column


def trace_correlation(basis_hat, true_basis) -> SubspaceMetrics:
    """Mean of squared canonical correlations between two subspaces.

    Computed as trace(P_hat P_true) / k from orthonormalized bases, which
    equals the average squared canonical correlation; for k = 1 it reduces
    to :func:`r2_single` with identity covariance.
    """
    qh = _orthonormalize(basis_hat)
    qt = _orthonormalize(true_basis)
    if qh.shape != qt.shape:
        raise DegenerateSubspace(
            f"bases must share shape, got {qh.shape} vs {qt.shape}"
        )
    k = qh.shape[1]
    cross = qh.T @ qt
    value = float(np.sum(cross * cross) / k)
    per = np.array([r2_single(qh[:, j], qt) for j in range(k)])
    return SubspaceMetrics(r2=value, k=k, per_direction=per)
