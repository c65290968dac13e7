"""
Dataset loader.

Reads and writes dense CSV and sparse LIBSVM point files, and the planted
truth sidecar JSON written by the instance generator.
"""

import json
import re
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import sparse

from ..utils import get_logger, DatasetParseError, detect_format, ensure_parent, file_exists
from .point_set import PointSet, PlantedTruth

logger = get_logger(__name__)

_PANDAS_LINE = re.compile(r'line (\d+)')
TRUTH_SCHEMA = 1


def _first_short_row(path: str | Path, has_header: bool, expected: int) -> tuple[int, int] | None:
    """(line number, field count) of the first non-blank data row with fewer than `expected` fields."""
    lines = Path(path).read_text(encoding='utf-8-sig').splitlines()
    rows = [(number, line) for number, line in enumerate(lines, start=1) if line.strip()]
    for number, line in rows[1 if has_header else 0:]:
        fields = line.count(',') + 1
        if fields < expected:
            return number, fields
    return None


def load_dense(path: str | Path, has_header: bool = False) -> PointSet:
    """
    Load a comma-separated file of equal-length numeric rows.

    Args:
        path: CSV file path.
        has_header: Skip the first line as a header.

    Returns:
        PointSet with one point per data row.

    Raises:
        DatasetParseError: On ragged rows, non-numeric cells or an empty file.
    """
    first_data_line = 2 if has_header else 1
    try:
        frame = pd.read_csv(
            path,
            header=0 if has_header else None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
            encoding='utf-8-sig',
        )
    except pd.errors.EmptyDataError as e:
        raise DatasetParseError("empty file") from e
    except pd.errors.ParserError as e:
        match = _PANDAS_LINE.search(str(e))
        line = int(match.group(1)) if match else None
        raise DatasetParseError(f"ragged row: more fields than the first row ({e})", line=line) from e

    if frame.shape[0] == 0:
        raise DatasetParseError("no data rows")

    # pandas pads short rows, so count the fields on the raw lines
    short = _first_short_row(path, has_header, frame.shape[1])
    if short is not None:
        line, fields = short
        raise DatasetParseError(f"ragged row: expected {frame.shape[1]} columns, found {fields}", line=line)

    numeric = frame.apply(lambda col: pd.to_numeric(col.str.strip(), errors='coerce'))
    values = numeric.to_numpy(dtype=np.float64)
    bad = ~np.isfinite(values)
    if bad.any():
        row, col = np.argwhere(bad)[0]
        raise DatasetParseError(
            f"non-numeric cell {frame.iat[row, col]!r} in column {col + 1}",
            line=int(row) + first_data_line
        )

    points = PointSet(values)
    logger.info(f"Loaded dense dataset {path}: n={points.n}, d={points.d}")
    return points


def load_sparse(path: str | Path) -> tuple[PointSet, list[int]]:
    """
    Load a LIBSVM file ("label idx:val idx:val ...", 1-based indices).

    Args:
        path: LIBSVM file path.

    Returns:
        (points, labels): d is the largest index seen.

    Raises:
        DatasetParseError: On malformed tokens, non-ascending indices or an
            empty file.
    """
    text = Path(path).read_text(encoding='utf-8-sig')

    labels: list[int] = []
    data: list[float] = []
    indices: list[int] = []
    indptr: list[int] = [0]
    max_index = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split('#', 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        try:
            labels.append(int(float(tokens[0])))
        except ValueError as e:
            raise DatasetParseError(f"bad label {tokens[0]!r}", line=line_no) from e

        previous = 0
        for token in tokens[1:]:
            index_text, sep, value_text = token.partition(':')
            if not sep:
                raise DatasetParseError(f"expected idx:val, got {token!r}", line=line_no)
            try:
                index = int(index_text)
                value = float(value_text)
            except ValueError as e:
                raise DatasetParseError(f"bad entry {token!r}", line=line_no) from e
            if index < 1:
                raise DatasetParseError(f"index {index} is not 1-based", line=line_no)
            if index <= previous:
                raise DatasetParseError(
                    f"non-ascending index {index} after {previous}", line=line_no
                )
            if not np.isfinite(value):
                raise DatasetParseError(f"non-finite value in {token!r}", line=line_no)
            previous = index
            indices.append(index - 1)
            data.append(value)
        max_index = max(max_index, previous)
        indptr.append(len(indices))

    if not labels:
        raise DatasetParseError("empty file")
    if max_index == 0:
        raise DatasetParseError("no feature entries in file")

    matrix = sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64), np.asarray(indptr)),
        shape=(len(labels), max_index)
    )
    points = PointSet(matrix)
    logger.info(
        f"Loaded sparse dataset {path}: n={points.n}, d={points.d}, nnz={points.nnz}"
    )
    return points, labels


def save_dense(points: PointSet, path: str | Path) -> None:
    """Write points as CSV with full float precision."""
    frame = pd.DataFrame(points.dense)
    frame.to_csv(ensure_parent(path), header=False, index=False, float_format='%.17g')
    logger.info(f"Saved dense dataset to {path}")


def save_sparse(points: PointSet, labels: list[int], path: str | Path) -> None:
    """Write points and labels in LIBSVM format."""
    if len(labels) != points.n:
        raise ValueError(f"expected {points.n} labels, got {len(labels)}")
    lines = []
    for i, label in enumerate(labels):
        entries = ' '.join(f"{j + 1}:{v:.17g}" for j, v in points.row_pairs(i))
        lines.append(f"{int(label):+d} {entries}".rstrip())
    ensure_parent(path).write_text('\n'.join(lines) + '\n', encoding='utf-8')
    logger.info(f"Saved sparse dataset to {path}")


def save_truth(truth: PlantedTruth, gamma: float, path: str | Path, params: dict | None = None) -> None:
    """Write the planted-truth sidecar JSON."""
    payload = {
        'schema': TRUTH_SCHEMA,
        'gamma': float(gamma),
        'params': params or {},
        **truth.to_dict(),
    }
    ensure_parent(path).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding='utf-8')
    logger.info(f"Saved truth sidecar to {path}")


def load_truth(path: str | Path) -> tuple[PlantedTruth, float]:
    """Read a sidecar written by save_truth(); returns (truth, gamma)."""
    payload = json.loads(Path(path).read_text(encoding='utf-8'))
    return PlantedTruth.from_dict(payload), float(payload.get('gamma', 0.0))


class DatasetLoader:
    """
    Loads a dataset for the command-line tools.

    Wraps load_dense()/load_sparse() with the (success, message) convention
    used by the controllers.
    """

    def __init__(self):
        """Initialize dataset loader."""
        self._path: str = ""
        self._format: str = "dense"
        self._points: PointSet | None = None
        self._labels: list[int] | None = None

    def load(
        self,
        path: str,
        fmt: str | None = None,
        has_header: bool = False
    ) -> tuple[bool, str]:
        """
        Load a dataset file.

        Args:
            path: Dataset path.
            fmt: 'dense' or 'sparse'; guessed from the extension when None.
            has_header: CSV header flag.

        Returns:
            Tuple of (success, message).
        """
        self._path = path
        self._format = fmt or detect_format(path)
        self._points = None
        self._labels = None

        if not file_exists(path):
            msg = f"Dataset not found: {path}"
            logger.error(msg)
            return False, msg

        try:
            if self._format == 'sparse':
                self._points, self._labels = load_sparse(path)
            else:
                self._points = load_dense(path, has_header=has_header)
        except (DatasetParseError, OSError, UnicodeDecodeError) as e:
            msg = f"Failed to load {path}: {e}"
            logger.error(msg)
            return False, msg

        return True, f"Loaded {self._points.n} points in {self._points.d} dimensions"

    @property
    def points(self) -> PointSet | None:
        return self._points

    @property
    def labels(self) -> list[int] | None:
        return self._labels

    @property
    def format(self) -> str:
        return self._format

    def split_by_label(self) -> tuple[np.ndarray, np.ndarray]:
        """
        Index arrays of the two classes: label > 0 first, the rest second.

        Raises:
            ValueError: If no labels were loaded.
        """
        if self._labels is None:
            raise ValueError("dataset has no labels (load a LIBSVM file)")
        labels = np.asarray(self._labels)
        return np.flatnonzero(labels > 0), np.flatnonzero(labels <= 0)
