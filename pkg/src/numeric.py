"""
Array helpers shared by the float64 and the exact (Decimal) code paths.

Exact arrays are numpy object arrays holding decimal.Decimal values; the
working precision is that of the active decimal context (see exact_context).
Tolerance comparisons always happen in float after the slack is computed.
"""

import decimal
from contextlib import contextmanager
from decimal import Decimal
from fractions import Fraction
from typing import Iterator, Sequence, Union

import numpy as np

from .errors import SingularMatrixError

Scalar = Union[int, float, Fraction, Decimal]


def is_exact(values) -> bool:
    """True for object arrays (the Decimal code path)"""
    return isinstance(values, np.ndarray) and values.dtype == object


def to_decimal(value: Scalar) -> Decimal:
    """Lift a scalar to Decimal; rationals are divided in the active context"""
    if isinstance(value, Decimal):
        return +value
    if isinstance(value, Fraction):
        return Decimal(value.numerator) / Decimal(value.denominator)
    if isinstance(value, (int, np.integer)):
        return Decimal(int(value))
    # shortest repr, so 0.1 becomes Decimal('0.1') rather than its binary expansion
    return Decimal(repr(float(value)))


def as_array(values, exact: bool = False) -> np.ndarray:
    """Dense float64 array, or an object array of Decimals when exact"""
    if not exact:
        return np.asarray(values, dtype=float)
    raw = np.asarray(values, dtype=object)
    lifted = np.empty(raw.shape, dtype=object)
    for index, value in np.ndenumerate(raw):
        lifted[index] = to_decimal(value)
    return lifted


def lift(values, like: np.ndarray) -> np.ndarray:
    """Convert constants to the arithmetic of `like`"""
    return as_array(values, exact=is_exact(like))


def scalar(value: Scalar, like: np.ndarray):
    """Convert one constant to the arithmetic of `like`"""
    return to_decimal(value) if is_exact(like) else float(value)


def to_float(values) -> np.ndarray:
    return np.asarray(values, dtype=float)


def norm(v: np.ndarray):
    """Euclidean norm in the arithmetic of v"""
    if is_exact(v):
        return to_decimal(v.dot(v)).sqrt()
    return float(np.linalg.norm(v))


def inf_norm(v: np.ndarray) -> float:
    if v.size == 0:
        return 0.0
    return float(np.max(np.abs(v)))


def zeros(n: int, exact: bool = False) -> np.ndarray:
    return as_array(np.zeros(n), exact=exact)


def solve(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a square system in the arithmetic of the operands"""
    if is_exact(matrix) or is_exact(rhs):
        return _solve_exact(as_array(matrix, exact=True), as_array(rhs, exact=True))
    try:
        return np.linalg.solve(matrix, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(str(exc)) from exc


def _solve_exact(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    # numpy.linalg has no object-dtype solver; Gauss-Jordan with partial pivoting
    n = matrix.shape[0]
    augmented = np.empty((n, n + 1), dtype=object)
    augmented[:, :n] = matrix
    augmented[:, n] = rhs
    for col in range(n):
        pivot = max(range(col, n), key=lambda row: abs(augmented[row, col]))
        if augmented[pivot, col] == 0:
            raise SingularMatrixError("matrix is singular in exact arithmetic")
        if pivot != col:
            augmented[[col, pivot]] = augmented[[pivot, col]]
        for row in range(n):
            if row != col and augmented[row, col] != 0:
                factor = augmented[row, col] / augmented[col, col]
                augmented[row, col:] = augmented[row, col:] - factor * augmented[col, col:]
    return np.array([augmented[i, n] / augmented[i, i] for i in range(n)], dtype=object)


def matrix_rank(rows: Sequence[Sequence[Scalar]]) -> int:
    """Rank of a constant matrix, always judged in float64"""
    if len(rows) == 0:
        return 0
    return int(np.linalg.matrix_rank(to_float(rows)))


@contextmanager
def exact_context(digits: int) -> Iterator[decimal.Context]:
    """Thread-local decimal context with the given number of significant digits"""
    with decimal.localcontext() as ctx:
        ctx.prec = digits
        yield ctx
