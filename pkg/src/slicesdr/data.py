"""Dataset ingestion and standardization.

A Dataset is a raw predictor matrix plus a response vector.  Standardizing
centers the predictors and whitens them with the inverse square root of the
sample covariance (divisor n-1), so the standardized rows have sample mean
zero and sample covariance exactly the identity.  Directions estimated in
standardized coordinates are mapped back to the original scale with
:func:`directions_to_x_scale`.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import linalg
from .errors import (
    CsvFormatError,
    DegenerateDirection,
    InsufficientData,
)


@dataclass(frozen=True)
class Dataset:
    """Raw predictors x (n rows, p columns) and response y (length n)."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 2:
            raise ValueError("x must be a 2-d array")
        if y.ndim != 1 or y.size != x.shape[0]:
            raise ValueError("y must be 1-d with one entry per row of x")
        if x.shape[0] < 2 or x.shape[1] < 1:
            raise ValueError("need n >= 2 observations and p >= 1 predictors")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite values")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.x.shape[0]

    @property
    def p(self) -> int:
        return self.x.shape[1]


@dataclass(frozen=True)
class StandardizedDataset:
    """Whitened predictors plus the transform that produced them."""

    z: np.ndarray             # (n, p) standardized rows
    mean: np.ndarray          # (p,) sample mean of x
    cov: np.ndarray           # (p, p) sample covariance of x (divisor n-1)
    cov_inv_sqrt: np.ndarray  # (p, p) symmetric inverse square root
    y: np.ndarray             # (n,) response, unchanged

    @property
    def n(self) -> int:
        return self.z.shape[0]

    @property
    def p(self) -> int:
        return self.z.shape[1]


def standardize(d: Dataset, rel_floor: float = 1e-10) -> StandardizedDataset:
    """Map rows to z_i = cov^{-1/2} (x_i - mean).

    Requires n > p so the sample covariance can be nonsingular; raises
    SingularCovariance (from the inverse square root) when it is not.
    """
    if d.n <= d.p:
        raise InsufficientData(f"need n > p to standardize, got n={d.n}, p={d.p}")
    mean = d.x.mean(axis=0)
    xc = d.x - mean
    cov = linalg.ensure_symmetric(xc.T @ xc / (d.n - 1))
    root = linalg.inv_sqrt(cov, rel_floor=rel_floor)
    z = xc @ root  # root is symmetric, so row-wise R (x - mean)
    return StandardizedDataset(z=z, mean=mean, cov=cov, cov_inv_sqrt=root, y=d.y)


def directions_to_x_scale(betas_z, cov_inv_sqrt) -> np.ndarray:
    """Map unit directions from z-coordinates back to the x scale.

    Applies cov^{-1/2} to each column and renormalizes to unit length.
    """
    b = np.asarray(betas_z, dtype=float)
    if b.ndim == 1:
        b = b[:, None]
    out = np.asarray(cov_inv_sqrt, dtype=float) @ b
    norms = np.linalg.norm(out, axis=0)
    if np.any(norms <= 1e-300):
        raise DegenerateDirection("a direction collapsed to zero under cov^{-1/2}")
    return out / norms


def load_csv(path, y_column) -> Dataset:
    """Read a numeric CSV (header row required) into a Dataset.

    ``y_column`` selects the response by header name or zero-based column
    index; every other column becomes a predictor, in file order.  Parse
    problems raise CsvFormatError naming the offending row and column;
    non-finite cells (NaN/inf) are rejected, not imputed.
    """
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as e:
        raise CsvFormatError(f"cannot open {path}: {e}") from e
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CsvFormatError(f"{path}: empty file, header row required") from None
        header = [h.strip() for h in header]
        y_idx = _resolve_column(header, y_column, path)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and row[0].strip() == ""):
                continue  # ignore trailing blank lines
            if len(row) != len(header):
                raise CsvFormatError(
                    f"{path}: row {lineno} has {len(row)} fields, expected {len(header)}"
                )
            parsed = []
            for j, cell in enumerate(row):
                try:
                    value = float(cell)
                except ValueError:
                    raise CsvFormatError(
                        f"{path}: row {lineno}, column {header[j]!r}: "
                        f"non-numeric value {cell.strip()!r}"
                    ) from None
                if not np.isfinite(value):
                    raise CsvFormatError(
                        f"{path}: row {lineno}, column {header[j]!r}: "
                        f"non-finite value {cell.strip()!r}"
                    )
                parsed.append(value)
            rows.append(parsed)
    if len(rows) < 2:
        raise CsvFormatError(f"{path}: need at least 2 data rows, got {len(rows)}")
    table = np.array(rows, dtype=float)
    y = table[:, y_idx]
    x = np.delete(table, y_idx, axis=1)
    if x.shape[1] < 1:
        raise CsvFormatError(f"{path}: no predictor columns besides {header[y_idx]!r}")
    return Dataset(x=x, y=y)


def _resolve_column(header, y_column, path) -> int:
    if isinstance(y_column, int) and not isinstance(y_column, bool):
        idx = y_column
    else:
        name = str(y_column).strip()
        if name in header:
            return header.index(name)
        try:
            idx = int(name)
        except ValueError:
            raise CsvFormatError(
                f"{path}: no column named {name!r}; available: {header}"
            ) from None
    if not 0 <= idx < len(header):
        raise CsvFormatError(
            f"{path}: column index {idx} out of range for {len(header)} columns"
        )
    return idx
