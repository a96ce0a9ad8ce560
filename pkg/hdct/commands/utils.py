"""
Command helpers: CSV ingestion, report tables and report formatting.

Input CSV is comma-separated with a decimal point and an optional header.
Row and column positions in errors are 0-based and count data rows only
(the header is not a row) and file columns (the group column included).

"""

import io
import re
from dataclasses import dataclass

import numpy as np
import pandas as pd

from hdct.core import close, validate_composition
from hdct.errors import GroupError, ParseError
from hdct.utils import logger

WIDTH = 78
# None lets pandas write the shortest repr that parses back to the same float
FLOAT_FORMAT = None


@dataclass
class CsvDataset:
    """
    Raw contents of an input CSV: optional header, the numeric matrix and,
    in two-sample files, the group label of every row.
    """

    header: list | None
    rows: np.ndarray
    groups: np.ndarray | None = None
    group_column: str | int | None = None

    def split(self):
        """
        Rows of the first and second group, in order of first appearance.
        """
        if self.groups is None:
            raise GroupError("no group column to split on")
        labels = pd.unique(self.groups)
        if len(labels) != 2:
            raise GroupError(
                f"group column must take exactly two values, found {len(labels)}: "
                + ", ".join(str(label) for label in labels[:5])
            )
        return tuple(self.rows[self.groups == label] for label in labels), tuple(labels)


def _resolve_group_column(frame, group_column, has_header):
    if group_column is None:
        return None
    if has_header and str(group_column) in frame.columns:
        return frame.columns.get_loc(str(group_column))
    try:
        index = int(group_column)
    except (TypeError, ValueError):
        raise GroupError(f"group column {group_column!r} not found")
    if not 0 <= index < frame.shape[1]:
        raise GroupError(f"group column index {index} out of range 0..{frame.shape[1] - 1}")
    return index


def read_csv(path, has_header=False, group_column=None) -> CsvDataset:
    """
    Parse a CSV file into a CsvDataset.

    Raises:
        ParseError: Ragged rows or a cell that is not a number.
        GroupError: Unknown group column.
        OSError: Unreadable file.

    """
    try:
        frame = pd.read_csv(
            path,
            header=0 if has_header else None,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            encoding="utf-8",
        )
    except pd.errors.ParserError as err:
        match = re.search(r"Expected (\d+) fields in line (\d+)", str(err))
        if match:
            row = int(match.group(2)) - 1 - (1 if has_header else 0)
            raise ParseError(row, int(match.group(1)), "row has too many fields")
        raise ParseError(0, 0, str(err))
    except pd.errors.EmptyDataError:
        raise ParseError(0, 0, "file is empty")

    group_index = _resolve_group_column(frame, group_column, has_header)
    groups = None
    numeric_cols = list(range(frame.shape[1]))
    if group_index is not None:
        groups = frame.iloc[:, group_index].astype(str).str.strip().to_numpy()
        numeric_cols.remove(group_index)

    cells = frame.iloc[:, numeric_cols]
    numeric = cells.apply(pd.to_numeric, errors="coerce")
    bad = numeric.isna().to_numpy()
    if bad.any():
        row, pos = np.argwhere(bad)[0]
        raw = cells.iat[row, pos]
        detail = "missing value" if raw is None or raw == "" or raw != raw else f"not a number: {raw!r}"
        raise ParseError(int(row), int(numeric_cols[pos]), detail)

    header = [str(c) for c in frame.columns] if has_header else None
    return CsvDataset(
        header=header,
        rows=numeric.to_numpy(dtype=np.float64),
        groups=groups,
        group_column=group_column,
    )


def to_compositions(rows, auto_close=False, pseudocount=0.0, source=""):
    """
    Turn parsed rows into a CompositionMatrix: closed when `auto_close` or
    a pseudocount is given, validated as-is otherwise.
    """
    if pseudocount > 0:
        zeros = int(np.count_nonzero(rows == 0))
        if zeros:
            logger.log_warn("%s: replaced %d zero(s) by pseudocount %g", source, zeros, pseudocount)
        return close(rows, pseudocount=pseudocount)
    if auto_close:
        logger.log_info("%s: closing rows to the simplex", source)
        return close(rows)
    return validate_composition(rows)


def ingest_csv(path, has_header=False, group_column=None, auto_close=False, pseudocount=0.0):
    """
    Read compositions from a CSV file.

    Args:
        path (str): Input file.
        has_header (bool): First line holds column names.
        group_column (str or int, optional): Column (name or 0-based index)
            splitting rows into two samples.
        auto_close (bool): Close rows (counts or bases) to the simplex.
        pseudocount (float): If > 0, replace zeros by it and close.

    Returns:
        CompositionMatrix, or a pair of them when `group_column` is given.

    """
    dataset = read_csv(path, has_header=has_header, group_column=group_column)
    if group_column is None:
        return to_compositions(dataset.rows, auto_close, pseudocount, source=str(path))
    (first, second), labels = dataset.split()
    logger.log_info("%s: groups %s (%d rows) and %s (%d rows)", path, labels[0], len(first), labels[1], len(second))
    return (
        to_compositions(first, auto_close, pseudocount, source=f"{path}[{labels[0]}]"),
        to_compositions(second, auto_close, pseudocount, source=f"{path}[{labels[1]}]"),
    )


def read_vector(path):
    """
    A single numeric row (for example a hypothesized mean) from a CSV file.
    """
    rows = read_csv(path).rows
    if rows.shape[0] != 1:
        raise ParseError(1, 0, f"expected a single row, found {rows.shape[0]}")
    return rows[0]


# -------------------------------------------------------------
# Reports
# -------------------------------------------------------------


def banner(title):
    return f" {title} ".center(WIDTH, "=")


def rule():
    return "=" * WIDTH


def to_frame(rows):
    return pd.DataFrame.from_records(rows)


def frame_to_csv(frame):
    buf = io.StringIO()
    frame.to_csv(buf, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return buf.getvalue()


def write_csv(frame, out=None):
    """
    Write a report frame to `out`, or return the CSV text when out is None.
    """
    text = frame_to_csv(frame)
    if out is None:
        return text
    with open(out, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)
    return text


def format_outcomes(outcomes, title):
    """
    Fixed-width table of TestOutcomes for the terminal.
    """
    lines = [banner(title)]
    lines.append(f" {'test':<8}{'statistic':>16}{'p-value':>16}{'threshold':>16}  decision")
    lines.append(" " + "-" * (WIDTH - 2))
    for o in outcomes:
        decision = "reject" if o.reject else "fail to reject"
        lines.append(
            f" {o.family.value:<8}{o.statistic:>16.6g}{o.pvalue:>16.6g}{o.threshold:>16.6g}  {decision}"
        )
    first = outcomes[0]
    lines.append(" " + "-" * (WIDTH - 2))
    lines.append(f" alpha {first.alpha:g}   n {first.n_effective}   p {first.p}")
    lines.append(rule())
    return "\n".join(lines)
