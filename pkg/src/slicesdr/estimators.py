"""Kernel-matrix estimators for slicing-based dimension reduction.

Given per-slice statistics of standardized predictors, these build the
candidate p x p matrices whose leading eigenvectors estimate the central
dimension-reduction subspace:

* ``sir_matrix``   -- between-slice means,  sum_h p_h m_h m_h^T
* ``save_matrix``  -- sum_h p_h (I - cov_h)^2
* ``lambda_n``     -- sum_h p_h cov_h^2, the bias-carrying SAVE component
* ``v_n``          -- the within-slice fourth-moment matrix driving that bias
* ``lambda_corrected`` -- the debiased combination of the two
* ``csave_matrix`` -- bias-corrected SAVE: I - 2 sum_h p_h cov_h + corrected

Slice averages use the observed weights p_h = c_h / n; the correction
coefficients use the global slice size c = floor(n / H), since they come
from within-slice pair counts.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .data import StandardizedDataset, directions_to_x_scale
from .errors import AmbiguousDimensionWarning, InvalidSliceSize
from .slicing import SliceAssignment, SliceStats, slice_stats

METHOD_SIR = "sir"
METHOD_SAVE = "save"
METHOD_CSAVE = "csave"
METHOD_LAMBDA_RAW = "lambda_raw"
METHOD_LAMBDA_CORRECTED = "lambda_corrected"
METHOD_V_HAT = "v_hat"

#: Tie tolerance for flagging an ambiguous cut-off dimension.
EIGENGAP_TOL = 1e-10


@dataclass(frozen=True)
class CandidateMatrix:
    """A symmetric candidate kernel matrix with its provenance."""

    matrix: np.ndarray
    method: str
    H: int
    divisor: str


@dataclass(frozen=True)
class CdrBasis:
    """Leading-eigenvector basis in z coordinates and on the x scale."""

    betas_z: np.ndarray      # (p, k), orthonormal columns
    betas_x: np.ndarray      # (p, k), unit columns
    eigenvalues: np.ndarray  # (k,), descending
    ambiguous: bool          # k-th and (k+1)-th eigenvalues tied


def sir_matrix(stats: SliceStats, form: str = "means") -> CandidateMatrix:
    """Estimated Cov(E(z|Y)).

    ``form="means"`` (default) returns the exactly-PSD weighted-means
    matrix sum_h p_h m_h m_h^T.  ``form="identity-minus"`` returns the
    equivalent-target variant I - sum_h p_h cov_h for cross-checking; the
    two agree up to O(1/n) on standardized data and share eigenvectors
    when slice sizes are equal.
    """
    if form == "means":
        m = np.einsum("h,hi,hj->ij", stats.weights, stats.means, stats.means)
    elif form == "identity-minus":
        m = np.eye(stats.p) - np.einsum("h,hij->ij", stats.weights, stats.covs)
    else:
        raise ValueError(f"unknown SIR form {form!r}")
    return CandidateMatrix(
        matrix=linalg.ensure_symmetric(m),
        method=METHOD_SIR,
        H=stats.H,
        divisor=stats.divisor,
    )


def save_matrix(stats: SliceStats) -> CandidateMatrix:
    """Estimated E[(I - Cov(z|Y))^2]: sum_h p_h (I - cov_h)^2."""
    eye = np.eye(stats.p)
    resid = eye[None, :, :] - stats.covs
    m = np.einsum("h,hij,hkj->ik", stats.weights, resid, resid)
    return CandidateMatrix(
        matrix=linalg.ensure_symmetric(m),
        method=METHOD_SAVE,
        H=stats.H,
        divisor=stats.divisor,
    )


def lambda_n(stats: SliceStats) -> CandidateMatrix:
    """Slice average of squared within-slice covariances, sum_h p_h cov_h^2."""
    m = np.einsum("h,hij,hkj->ik", stats.weights, stats.covs, stats.covs)
    return CandidateMatrix(
        matrix=linalg.ensure_symmetric(m),
        method=METHOD_LAMBDA_RAW,
        H=stats.H,
        divisor=stats.divisor,
    )


def v_n(z, assignment: SliceAssignment) -> CandidateMatrix:
    """Within-slice fourth-moment matrix.

    Averages ((z_hj - mean_h)(z_hj - mean_h)^T)^2 over all observations;
    for a deviation d this summand equals ||d||^2 d d^T.  With equal slice
    sizes the normalizer 1/n coincides with 1/(H c).
    """
    z = np.atleast_2d(np.asarray(z, dtype=float))
    stats = slice_stats(z, assignment, divisor="c-1")  # only means are used
    zs = z[assignment.flat_order()]
    dev = zs - np.repeat(stats.means, stats.counts, axis=0)
    sq = np.einsum("ij,ij->i", dev, dev)
    m = dev.T @ (dev * sq[:, None]) / zs.shape[0]
    return CandidateMatrix(
        matrix=linalg.ensure_symmetric(m),
        method=METHOD_V_HAT,
        H=assignment.H,
        divisor="c-1",
    )


def correction_coefficients(c: int) -> tuple[float, float]:
    """Scalar weights (a, b) of the debiased combination a*Lambda - b*V."""
    if c < 2:
        raise InvalidSliceSize(f"bias correction needs c >= 2, got c={c}")
    denom = (c - 1) ** 2 + 1
    return c * (c - 1) / denom, (c - 1) / denom


def lambda_corrected(
    lam: CandidateMatrix, v: CandidateMatrix, c: int
) -> CandidateMatrix:
    """Debiased slice-covariance square: a(c) * Lambda_n - b(c) * V_n."""
    if lam.method != METHOD_LAMBDA_RAW:
        raise ValueError(f"expected a {METHOD_LAMBDA_RAW} matrix, got {lam.method}")
    if v.method != METHOD_V_HAT:
        raise ValueError(f"expected a {METHOD_V_HAT} matrix, got {v.method}")
    if lam.H != v.H:
        raise ValueError(f"slice counts differ: {lam.H} vs {v.H}")
    a, b = correction_coefficients(c)
    m = a * lam.matrix - b * v.matrix
    return CandidateMatrix(
        matrix=linalg.ensure_symmetric(m),
        method=METHOD_LAMBDA_CORRECTED,
        H=lam.H,
        divisor=lam.divisor,
    )


def csave_matrix(stats: SliceStats, z, assignment: SliceAssignment) -> CandidateMatrix:
    """Bias-corrected SAVE: I - 2 sum_h p_h cov_h + corrected Lambda.

    Assembled from the "c-1" covariance convention throughout; the
    correction coefficients use the global c = floor(n / H).  The result is
    symmetric but can be indefinite in finite samples: directions are
    ranked later by algebraically largest eigenvalue, and negative tail
    eigenvalues are surfaced as a diagnostic, not clipped.
    """
    if stats.divisor != "c-1":
        raise ValueError('csave_matrix requires slice stats with divisor "c-1"')
    n = int(stats.counts.sum())
    c = n // stats.H
    lam = lambda_n(stats)
    v = v_n(z, assignment)
    corrected = lambda_corrected(lam, v, c)
    mean_cov = np.einsum("h,hij->ij", stats.weights, stats.covs)
    m = np.eye(stats.p) - 2.0 * mean_cov + corrected.matrix
    return CandidateMatrix(
        matrix=linalg.ensure_symmetric(m),
        method=METHOD_CSAVE,
        H=stats.H,
        divisor=stats.divisor,
    )


def cdr_basis(m: CandidateMatrix, k: int, sd: StandardizedDataset) -> CdrBasis:
    """Top-k eigenvectors of a candidate matrix, also mapped to the x scale.

    Eigenvalues are ranked algebraically (largest first).  If the k-th and
    (k+1)-th eigenvalues are tied within EIGENGAP_TOL, the basis is still
    returned but flagged ambiguous and a warning is issued.
    """
    p = m.matrix.shape[0]
    if not 1 <= k <= p:
        raise ValueError(f"need 1 <= k <= p={p}, got k={k}")
    eig = linalg.sym_eig(m.matrix)
    ambiguous = False
    if k < p and abs(eig.values[k - 1] - eig.values[k]) <= EIGENGAP_TOL:
        ambiguous = True
        warnings.warn(
            f"eigenvalues {k - 1} and {k} tied within {EIGENGAP_TOL:.0e}; "
            "the estimated basis is not unique",
            AmbiguousDimensionWarning,
            stacklevel=2,
        )
    betas_z = eig.vectors[:, :k]
    betas_x = directions_to_x_scale(betas_z, sd.cov_inv_sqrt)
    return CdrBasis(
        betas_z=betas_z,
        betas_x=betas_x,
        eigenvalues=eig.values[:k].copy(),
        ambiguous=ambiguous,
    )


def negative_eigenvalue_count(m: CandidateMatrix, tol_scale: float = 1e-12) -> int:
    """Diagnostic: eigenvalues below -tol_scale * trace (CSAVE indefiniteness)."""
    eig = linalg.sym_eig(m.matrix)
    thresh = -tol_scale * max(abs(float(np.trace(m.matrix))), 1.0)
    return int(np.sum(eig.values < thresh))
