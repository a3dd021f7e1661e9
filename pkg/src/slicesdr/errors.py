"""Exception types raised by the slicesdr library.

Every failure mode that callers are expected to handle gets its own class so
the CLI can map families of errors onto exit codes (usage / data / numerical)
without string matching.
"""


class SlicesdrError(Exception):
    """Base class for all slicesdr errors."""


# -- numerical / linear algebra -------------------------------------------

class InvalidMatrix(SlicesdrError):
    """Input is not a finite symmetric matrix within tolerance."""


class NumericalFailure(SlicesdrError):
    """An iterative numerical routine failed to converge."""


class SingularCovariance(SlicesdrError):
    """A covariance matrix is singular or too ill-conditioned to invert."""


class DegenerateEigenvalue(SlicesdrError):
    """An eigenvalue gap is too small for a perturbation expansion."""


class DegenerateSubspace(SlicesdrError):
    """A basis matrix is rank deficient."""


class DegenerateDirection(SlicesdrError):
    """A direction collapsed to (numerically) zero under a transform."""


# -- data ------------------------------------------------------------------

class InsufficientData(SlicesdrError):
    """Too few observations for the requested operation (e.g. n <= p)."""


class CsvFormatError(SlicesdrError):
    """A CSV file could not be parsed; message carries row/column location."""


# -- slicing ---------------------------------------------------------------

class TooManySlices(SlicesdrError):
    """Requested slice count leaves fewer than two points per slice."""


class SingletonSlice(SlicesdrError):
    """A slice contains fewer than two observations."""


class DegenerateResponse(SlicesdrError):
    """A discrete response with fewer than two distinct values."""


class InvalidSliceSize(SlicesdrError):
    """Per-slice count incompatible with the bias correction (c < 2)."""


class DegenerateDesign(SlicesdrError):
    """A sweep configuration that cannot estimate anything (e.g. H < 2)."""


# -- simulation ------------------------------------------------------------

class SimulationError(SlicesdrError):
    """A Monte Carlo replicate failed; message carries the replicate index."""


class AmbiguousDimensionWarning(UserWarning):
    """Tied eigenvalues at the requested cut-off k; basis not unique."""
