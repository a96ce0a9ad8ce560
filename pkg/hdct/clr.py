"""
Centered log-ratio transform.

The centering operator G = I - 11^T / p is never built; applying it to a
row is the same as subtracting the row mean, which is O(p) per row.

"""

import numpy as np

from hdct.core import ClrMatrix, CompositionMatrix, LogBasisMatrix, _as_matrix


def center_rows(m):
    """
    Subtract each row's arithmetic mean (apply G to every row).

    Args:
        m (array-like): n x p real array, p >= 2.

    Returns:
        numpy.ndarray: n x p array whose rows sum to zero.

    """
    values = _as_matrix(m)
    return values - values.mean(axis=1, keepdims=True)


def clr_transform(x: CompositionMatrix) -> ClrMatrix:
    """
    CLR of a composition: log x minus the row mean of the logs.
    """
    return ClrMatrix(center_rows(np.log(x.values)))


def clr_from_log_basis(w: LogBasisMatrix) -> ClrMatrix:
    """
    CLR straight from a log basis. G log X = G log W, so the closure step
    can be skipped entirely.
    """
    return ClrMatrix(center_rows(w.values))
