"""
Core types

Compositions, log bases and CLR data as immutable, validated wrappers
around n x p float arrays. Construction is the only place the simplex
and positivity constraints are checked; everything downstream trusts them.

"""

from dataclasses import dataclass

import numpy as np

from hdct.conf import settings
from hdct.errors import (
    NonFiniteEntry,
    NonPositiveEntry,
    RowSumViolation,
    ShapeError,
)


def _as_matrix(raw, min_cols=2):
    """
    Coerce raw input to a read-only 2-D float64 array.
    """
    try:
        values = np.array(raw, dtype=np.float64)
    except (TypeError, ValueError) as err:
        raise ShapeError(f"input is not a rectangular numeric array ({err})")
    if values.ndim == 1:
        values = values.reshape(1, -1)
    if values.ndim != 2:
        raise ShapeError(f"expected a 2-D array, got {values.ndim} dimensions")
    n, p = values.shape
    if n < 1:
        raise ShapeError("need at least one row")
    if p < min_cols:
        raise ShapeError(f"need at least {min_cols} components, got {p}")
    values.setflags(write=False)
    return values


def _first_bad(mask):
    row, col = np.argwhere(mask)[0]
    return int(row), int(col)


@dataclass(frozen=True, eq=False)
class _Matrix:
    values: np.ndarray

    @property
    def n(self):
        return self.values.shape[0]

    @property
    def p(self):
        return self.values.shape[1]

    def __len__(self):
        return self.n

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.values
        return self.values.astype(dtype)


class CompositionMatrix(_Matrix):
    """
    n x p strictly positive rows on the unit simplex.

    Usually built with `validate_composition` or `close`; `pseudocount`
    records whether zeros were replaced on the way in.

    Raises:
        NonFiniteEntry, NonPositiveEntry, RowSumViolation: raw is not on
            the simplex.

    """

    def __init__(self, raw, pseudocount=0.0):
        values = _as_matrix(raw)
        bad = ~np.isfinite(values)
        if bad.any():
            raise NonFiniteEntry(*_first_bad(bad))
        bad = values <= 0
        if bad.any():
            row, col = _first_bad(bad)
            raise NonPositiveEntry(row, col, float(values[row, col]))
        sums = values.sum(axis=1)
        off = np.abs(sums - 1.0) > settings.ROW_SUM_TOL
        if off.any():
            row = int(np.argmax(off))
            raise RowSumViolation(row, float(sums[row]))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "pseudocount", float(pseudocount))


class LogBasisMatrix(_Matrix):
    """
    n x p log basis (log W). Only finiteness is required: a log basis is
    defined up to an additive constant per row.
    """

    def __init__(self, raw):
        values = _as_matrix(raw, min_cols=1)
        bad = ~np.isfinite(values)
        if bad.any():
            raise NonFiniteEntry(*_first_bad(bad))
        object.__setattr__(self, "values", values)


class ClrMatrix(_Matrix):
    """
    n x p centered log-ratio data; every row sums to zero.
    """

    def __init__(self, raw):
        values = _as_matrix(raw)
        bad = ~np.isfinite(values)
        if bad.any():
            raise NonFiniteEntry(*_first_bad(bad), module="clr")
        sums = values.sum(axis=1)
        tol = settings.CLR_ROW_SUM_TOL * values.shape[1]
        off = np.abs(sums) > tol
        if off.any():
            row = int(np.argmax(off))
            raise RowSumViolation(row, float(sums[row]), module="clr")
        object.__setattr__(self, "values", values)


def validate_composition(raw, pseudocount=0.0):
    """
    Wrap raw as a CompositionMatrix if it lies on the simplex.

    Args:
        raw (array-like): n x p real array.
        pseudocount (float): Recorded on the result; set by callers that
            already replaced zeros.

    Returns:
        CompositionMatrix

    Raises:
        NonPositiveEntry: First entry <= 0, by row then column.
        RowSumViolation: First row whose sum is off by more than ROW_SUM_TOL.

    """
    return CompositionMatrix(raw, pseudocount=pseudocount)


def close(raw, pseudocount=0.0):
    """
    Divide every row by its sum.

    Args:
        raw (array-like): n x p strictly positive array (bases or counts).
        pseudocount (float): If > 0, zeros are replaced by this value before
            closing. This departs from the strict simplex model and is
            recorded on the result.

    Returns:
        CompositionMatrix

    """
    values = np.array(_as_matrix(raw), dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        raise NonFiniteEntry(*_first_bad(bad))
    if pseudocount > 0:
        values[values == 0] = pseudocount
    bad = values <= 0
    if bad.any():
        row, col = _first_bad(bad)
        raise NonPositiveEntry(row, col, float(values[row, col]))
    closed = values / values.sum(axis=1, keepdims=True)
    return validate_composition(closed, pseudocount=pseudocount)
