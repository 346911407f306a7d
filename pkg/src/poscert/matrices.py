"""Dense matrices, elementwise interval containers, and positivity predicates.

Matrices and vectors are plain numpy float arrays (2-D row-major and 1-D
respectively); the helpers below validate shape and finiteness at the
boundaries so the numerical routines can assume clean inputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, DomainError, ShapeError

DEFAULT_TOL = 1e-12
ABSCISSA_TOL = 1e-10
ABSCISSA_MAX_ITER = 100_000


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be a 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_vector(a, name: str = "vector") -> np.ndarray:
    arr = np.asarray(a, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise ShapeError(f"{name} must be a 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_square(a, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(a, name)
    if arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {arr.shape}")
    return arr


def is_metzler(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff every off-diagonal entry of the square matrix is >= -tol."""
    arr = as_square(m)
    off = arr - np.diag(np.diag(arr))
    return bool(np.all(off >= -tol))


def is_nonnegative(m, tol: float = DEFAULT_TOL) -> bool:
    """True iff all entries are >= -tol."""
    arr = np.asarray(m, dtype=float)
    return bool(np.all(arr >= -tol))


def metzler_spectral_abscissa(
    m,
    tol: float = ABSCISSA_TOL,
    max_iter: int = ABSCISSA_MAX_ITER,
    metzler_tol: float = DEFAULT_TOL,
) -> float:
    """Largest real part of the eigenvalues of a Metzler matrix.

    Shifts by c = 1 + max|diag| so the matrix becomes nonnegative with a
    strictly positive diagonal, then runs power iteration from the all-ones
    vector.  The shift makes every diagonal entry >= 1, which rules out the
    periodic iterates that stall plain power iteration on imprimitive
    nonnegative matrices.  The Perron root of the shifted matrix minus the
    shift is the spectral abscissa.
    """
    arr = as_square(m)
    if not is_metzler(arr, metzler_tol):
        raise DomainError("spectral abscissa oracle requires a Metzler matrix")
    n = arr.shape[0]
    shift = 1.0 + float(np.max(np.abs(np.diag(arr))))
    shifted = arr + shift * np.eye(n)

    x = np.ones(n)
    lam = shift  # placeholder; overwritten on first pass
    residual = np.inf
    for _ in range(max_iter):
        y = shifted @ x
        lam = float(x @ y) / float(x @ x)
        residual = float(np.max(np.abs(y - lam * x)))
        if residual <= tol * max(abs(lam), 1.0):
            return lam - shift
        norm = float(np.max(np.abs(y)))
        if norm == 0.0:  # nilpotent shifted matrix cannot occur (diag >= 1)
            return lam - shift
        x = y / norm
    raise ConvergenceError(
        f"power iteration did not converge in {max_iter} iterations "
        f"(residual {residual:.3e})",
        residual=residual,
    )


@dataclass(frozen=True)
class IntervalMatrix:
    """Elementwise matrix interval [lower, upper]."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = as_matrix(self.lower, "lower")
        hi = as_matrix(self.upper, "upper")
        if lo.shape != hi.shape:
            raise ShapeError(f"interval bounds differ in shape: {lo.shape} vs {hi.shape}")
        if not np.all(lo <= hi):
            raise ValueError("interval lower bound exceeds upper bound")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def exact(cls, m) -> "IntervalMatrix":
        arr = as_matrix(m)
        return cls(arr, arr.copy())

    @property
    def shape(self):
        return self.lower.shape

    @property
    def is_degenerate(self) -> bool:
        return bool(np.array_equal(self.lower, self.upper))

    @property
    def center(self) -> np.ndarray:
        return 0.5 * (self.lower + self.upper)

    @property
    def radius(self) -> np.ndarray:
        return 0.5 * (self.upper - self.lower)

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        "Uniform elementwise sample from the interval."
        return rng.uniform(self.lower, self.upper)


def interval_contains(im: IntervalMatrix, m) -> bool:
    """True iff lower <= m <= upper elementwise."""
    arr = as_matrix(m)
    if arr.shape != im.shape:
        raise ShapeError(f"shape mismatch: interval {im.shape} vs matrix {arr.shape}")
    return bool(np.all(im.lower <= arr) and np.all(arr <= im.upper))
