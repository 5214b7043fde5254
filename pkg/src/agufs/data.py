"""CSV ingestion and feature standardization.

On disk samples are rows; in memory the matrix is d x n (features by
samples), matching the solver convention.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import DegenerateSolutionWarning, ParseError


@dataclass(frozen=True)
class Dataset:
    x: np.ndarray
    feature_names: Optional[list]
    labels: Optional[np.ndarray]
    source_path: str


def _reindex_labels(raw: list) -> np.ndarray:
    ids = {}
    out = np.empty(len(raw), dtype=int)
    for i, label in enumerate(raw):
        if label not in ids:
            ids[label] = len(ids)
        out[i] = ids[label]
    return out


def load_csv(
    path: str,
    has_header: bool = False,
    label_column=None,
    delimiter: str = ",",
) -> Dataset:
    """Read a samples-as-rows CSV into a d x n Dataset.

    label_column is None, "last", or a 0-based column index; the label
    cells may be arbitrary strings and are re-indexed to contiguous ids in
    order of first appearance.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh, delimiter=delimiter))
    if not rows:
        raise ParseError(f"{path}: empty file")

    header = None
    start_line = 1
    if has_header:
        header = rows[0]
        rows = rows[1:]
        start_line = 2
        if not rows:
            raise ParseError(f"{path}: no data rows after header")

    width = len(rows[0])
    for offset, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(
                f"{path}: line {start_line + offset}: expected {width} "
                f"cells, got {len(row)}"
            )

    label_idx = None
    if label_column is not None and label_column != "none":
        label_idx = width - 1 if label_column == "last" else int(label_column)
        if not 0 <= label_idx < width:
            raise ParseError(
                f"{path}: label column {label_idx} out of range for width {width}"
            )
        if width < 2:
            raise ParseError(f"{path}: no feature columns besides the label")

    feature_cols = [j for j in range(width) if j != label_idx]
    n = len(rows)
    x = np.empty((len(feature_cols), n))
    raw_labels = []
    for i, row in enumerate(rows):
        for r, j in enumerate(feature_cols):
            try:
                x[r, i] = float(row[j])
            except ValueError:
                raise ParseError(
                    f"{path}: line {start_line + i}: non-numeric cell "
                    f"{row[j]!r} in column {j}"
                ) from None
        if label_idx is not None:
            raw_labels.append(row[label_idx])

    names = [header[j] for j in feature_cols] if header is not None else None
    labels = _reindex_labels(raw_labels) if label_idx is not None else None
    return Dataset(x=x, feature_names=names, labels=labels, source_path=path)


def save_csv(ds: Dataset, path: str, delimiter: str = ",") -> None:
    """Export samples as rows, 17 significant digits (lossless round-trip)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, delimiter=delimiter)
        if ds.feature_names is not None:
            head = list(ds.feature_names)
            if ds.labels is not None:
                head.append("label")
            writer.writerow(head)
        for i in range(ds.x.shape[1]):
            row = [format(v, ".17g") for v in ds.x[:, i]]
            if ds.labels is not None:
                row.append(str(int(ds.labels[i])))
            writer.writerow(row)


def standardize(ds: Dataset, mode: str = "zscore") -> Dataset:
    """Per-feature z-score with population std; mode "none" passes through.

    Zero-variance features become all zeros and raise a warning.
    """
    if mode == "none":
        return ds
    if mode != "zscore":
        raise ValueError(f"unknown standardization mode {mode!r}")
    mean = ds.x.mean(axis=1, keepdims=True)
    std = ds.x.std(axis=1, keepdims=True)
    dead = std[:, 0] <= 0.0
    if dead.any():
        warnings.warn(
            f"{int(dead.sum())} zero-variance feature(s) set to zero",
            DegenerateSolutionWarning,
        )
    safe = np.where(std > 0, std, 1.0)
    x = (ds.x - mean) / safe
    x[dead] = 0.0
    return replace(ds, x=x)
