"""Partition observations into slices by the response.

Continuous responses get equal-count slices over the sorted order (the last
slice absorbs any remainder); discrete responses get one slice per distinct
value.  Per-slice means and covariances are computed with a selectable
divisor ("c-1" unbiased, "c" maximum-likelihood), since downstream
estimators need both conventions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateResponse, SingletonSlice, TooManySlices

#: Valid within-slice covariance divisors.
DIVISORS = ("c-1", "c")


@dataclass(frozen=True)
class SliceAssignment:
    """A partition of observation indices into H response-ordered slices."""

    H: int
    slices: tuple  # tuple of 1-d integer index arrays, slice order = y order
    mode: str      # "equal-count" | "discrete"

    def __post_init__(self):
        if self.H != len(self.slices):
            raise ValueError("H does not match the number of slices")
        for idx in self.slices:
            if len(idx) < 2:
                raise SingletonSlice("every slice needs at least 2 members")
        flat = np.concatenate(self.slices)
        covered = np.sort(flat)
        if covered.size != np.unique(covered).size or not np.array_equal(
            covered, np.arange(covered.size)
        ):
            raise ValueError("slices must partition 0..n-1 without overlap")

    @property
    def counts(self) -> np.ndarray:
        return np.array([len(s) for s in self.slices])

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    def flat_order(self) -> np.ndarray:
        """All indices concatenated in slice order."""
        return np.concatenate(self.slices)


def slice_equal_count(y, H: int) -> SliceAssignment:
    """Assign sorted observations to H slices of c = floor(n/H) points.

    Sorting is stable, so ties keep their original order.  Slices 1..H-1
    hold exactly c points; the last slice absorbs the remainder (it can be
    larger than c, never smaller).
    """
    y = np.asarray(y, dtype=float)
    n = y.size
    if H < 1:
        raise TooManySlices(f"H must be >= 1, got {H}")
    if n < 2 * H:
        raise TooManySlices(f"n={n} too small for H={H} slices of >= 2 points")
    order = np.argsort(y, kind="stable")
    c = n // H
    bounds = [h * c for h in range(H)] + [n]
    slices = tuple(order[bounds[h]:bounds[h + 1]] for h in range(H))
    return SliceAssignment(H=H, slices=slices, mode="equal-count")


def slice_discrete(y) -> SliceAssignment:
    """One slice per distinct response value, ordered by ascending value."""
    y = np.asarray(y, dtype=float)
    values, inverse, counts = np.unique(y, return_inverse=True, return_counts=True)
    if values.size < 2:
        raise DegenerateResponse(
            f"discrete slicing needs >= 2 distinct values, got {values.size}"
        )
    thin = values[counts < 2]
    if thin.size:
        raise SingletonSlice(f"response value {thin[0]!r} appears only once")
    order = np.argsort(inverse, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(counts)])
    slices = tuple(order[bounds[k]:bounds[k + 1]] for k in range(values.size))
    return SliceAssignment(H=int(values.size), slices=slices, mode="discrete")


@dataclass(frozen=True)
class SliceStats:
    """Per-slice counts, means, covariances and weights p_h = c_h / n."""

    counts: np.ndarray    # (H,)
    means: np.ndarray     # (H, p)
    covs: np.ndarray      # (H, p, p), each symmetric
    weights: np.ndarray   # (H,), sums to 1
    divisor: str          # "c-1" | "c"
    assignment: SliceAssignment = field(repr=False)

    @property
    def H(self) -> int:
        return int(self.counts.size)

    @property
    def p(self) -> int:
        return int(self.means.shape[1])


def slice_stats(z, assignment: SliceAssignment, divisor: str = "c-1") -> SliceStats:
    """Means and covariances of the rows of z within each slice.

    cov(h) = sum_j (z_hj - mean_h)(z_hj - mean_h)^T / d(c_h) with
    d(c) = c - 1 or c according to ``divisor``.
    """
    if divisor not in DIVISORS:
        raise ValueError(f"divisor must be one of {DIVISORS}, got {divisor!r}")
    z = np.atleast_2d(np.asarray(z, dtype=float))
    counts = assignment.counts
    if counts.min() < 2:
        raise SingletonSlice("every slice needs at least 2 members")
    flat = assignment.flat_order()
    if flat.max() >= z.shape[0]:
        raise ValueError("assignment indices exceed the number of rows")
    zs = z[flat]
    starts = np.concatenate([[0], np.cumsum(counts)[:-1]])
    sums = np.add.reduceat(zs, starts, axis=0)
    means = sums / counts[:, None]
    outer_sums = np.add.reduceat(zs[:, :, None] * zs[:, None, :], starts, axis=0)
    centered = outer_sums - counts[:, None, None] * means[:, :, None] * means[:, None, :]
    denom = counts - 1 if divisor == "c-1" else counts
    covs = centered / denom[:, None, None]
    covs = (covs + covs.transpose(0, 2, 1)) / 2.0
    n = counts.sum()
    return SliceStats(
        counts=counts,
        means=means,
        covs=covs,
        weights=counts / n,
        divisor=divisor,
        assignment=assignment,
    )
