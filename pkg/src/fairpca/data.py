"""Dataset generation, CSV ingestion, and preprocessing.

Datasets flow in as CSV tables with one row per sample: every column except
the group column is a numeric feature, and the group column assigns each
sample to a demographic group.  Rows become sample columns of the (d, N)
matrix, re-ordered so each group occupies one contiguous block (groups keep
first-appearance order, samples keep file order within their group).
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from .exceptions import DataError, DimensionError
from .problem import GroupedDataset


@dataclass(frozen=True)
class DatasetMeta:
    """Provenance and preprocessing record carried into run reports."""

    name: str
    d: int
    num_samples: int
    num_groups: int
    group_sizes: tuple[int, ...]
    generator: str | None = None
    seed: int | None = None
    source: str | None = None
    normalized: bool = False
    centered: bool = False
    min_norm_threshold: float = 0.0

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["group_sizes"] = list(self.group_sizes)
        return out


def describe(data: GroupedDataset, **fields: Any) -> DatasetMeta:
    """Meta consistent with data by construction; extra fields pass through."""
    return DatasetMeta(
        name=data.name,
        d=data.d,
        num_samples=data.num_samples,
        num_groups=data.num_groups,
        group_sizes=tuple(data.group_sizes),
        **fields,
    )


def gen_synthetic_gaussian(d: int, n: int, seed: int) -> GroupedDataset:
    """n singleton groups of standard Gaussian samples in R^d (the n = N regime)."""
    if d < 1 or n < 1:
        raise DimensionError(f"need d >= 1 and n >= 1, got d={d}, n={n}")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((d, n))
    return GroupedDataset(X, (1,) * n, name=f"gaussian-d{d}-n{n}-seed{seed}")


def gen_synthetic_blocks(
    d: int,
    group_sizes: Sequence[int],
    seed: int,
    scales: Sequence[float] | None = None,
) -> GroupedDataset:
    """Gaussian block groups with per-group covariance scaling.

    Group i draws N_i columns from N(0, Sigma_i / N_i) with
    Sigma_i = s_i^2 Q_i diag(a_i) Q_i^T: a random eigenbasis Q_i, mild
    anisotropy a_i in [0.7, 1.3), and an overall scale s_i in [0.6, 1.4)
    unless scales pins it.  Dividing by N_i keeps X_i X_i^T close to Sigma_i,
    so group variances stay O(r) while differing across groups; a group with
    scale 0 contributes f_i identically zero.
    """
    sizes = tuple(int(s) for s in group_sizes)
    if d < 1 or len(sizes) == 0 or any(s < 1 for s in sizes):
        raise DimensionError(f"need d >= 1 and positive group sizes, got d={d}, {sizes}")
    if scales is not None and len(scales) != len(sizes):
        raise DimensionError(f"got {len(scales)} scales for {len(sizes)} groups")
    rng = np.random.default_rng(seed)
    blocks = []
    for i, n_i in enumerate(sizes):
        s_i = rng.uniform(0.6, 1.4)
        if scales is not None:
            s_i = float(scales[i])
        A = rng.standard_normal((d, d))
        Q, _, Vt = np.linalg.svd(A)
        basis = Q @ Vt
        aniso = rng.uniform(0.7, 1.3, d)
        G = rng.standard_normal((d, n_i))
        blocks.append((s_i / np.sqrt(n_i)) * (basis @ (np.sqrt(aniso)[:, None] * (basis.T @ G))))
    X = np.concatenate(blocks, axis=1)
    return GroupedDataset(
        X, sizes, name=f"blocks-d{d}-n{len(sizes)}-seed{seed}"
    )


def load_csv_grouped(path, group_column: str = "group") -> GroupedDataset:
    """Read a one-row-per-sample CSV into a GroupedDataset.

    Raises DataError when the group column is missing, any feature value is
    absent or non-numeric or non-finite (reporting the offending rows), or
    the table has no samples or no feature columns.
    """
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        columns = reader.fieldnames
        if columns is None:
            raise DataError(f"{path}: empty file, expected a CSV header")
        if group_column not in columns:
            raise DataError(
                f"{path}: missing group column {group_column!r}; columns are {columns}"
            )
        features = [c for c in columns if c != group_column]
        if not features:
            raise DataError(f"{path}: no feature columns besides {group_column!r}")
        by_group: dict[str, list[list[float]]] = {}
        bad_rows: list[int] = []
        for row_num, row in enumerate(reader, start=1):
            try:
                vec = [float(row[c]) for c in features]
            except (TypeError, ValueError):
                bad_rows.append(row_num)
                continue
            if not all(np.isfinite(vec)):
                bad_rows.append(row_num)
                continue
            key = row.get(group_column)
            if key is None:
                bad_rows.append(row_num)
                continue
            by_group.setdefault(key, []).append(vec)
    if bad_rows:
        shown = ", ".join(str(r) for r in bad_rows[:10])
        suffix = "" if len(bad_rows) <= 10 else f" (+{len(bad_rows) - 10} more)"
        raise DataError(f"{path}: non-numeric or missing values in rows {shown}{suffix}")
    if not by_group:
        raise DataError(f"{path}: no data rows")
    labels = tuple(by_group.keys())
    X = np.concatenate([np.asarray(by_group[g], dtype=float).T for g in labels], axis=1)
    sizes = tuple(len(by_group[g]) for g in labels)
    return GroupedDataset(X, sizes, labels=labels, name=Path(path).stem)


def dataset_csv_text(data: GroupedDataset, group_column: str = "group") -> str:
    """Render a GroupedDataset in the format load_csv_grouped reads.

    Floats are written with repr (shortest round-trip form), so rendering the
    same dataset twice produces identical bytes.
    """
    labels = data.labels or tuple(f"g{i}" for i in range(data.num_groups))
    buffer = io.StringIO()
    writer = csv.writer(buffer)
    writer.writerow([f"feature_{j}" for j in range(data.d)] + [group_column])
    for i in range(data.num_groups):
        block = data.group(i)
        for col in range(block.shape[1]):
            writer.writerow([repr(float(v)) for v in block[:, col]] + [labels[i]])
    return buffer.getvalue()


def save_csv_grouped(data: GroupedDataset, path, group_column: str = "group") -> None:
    """Write a GroupedDataset in the format load_csv_grouped reads."""
    with open(path, "w", newline="") as handle:
        handle.write(dataset_csv_text(data, group_column))


def save_meta(meta: DatasetMeta, path) -> None:
    with open(path, "w") as handle:
        json.dump(meta.to_dict(), handle, indent=2, sort_keys=True)
        handle.write("\n")


def preprocess(
    data: GroupedDataset,
    *,
    normalize: bool = False,
    center: bool = False,
    min_norm_threshold: float = 0.0,
    standardize_features: bool = False,
) -> GroupedDataset:
    """Drop tiny samples, then optionally transform the survivors.

    Samples with ||x|| < min_norm_threshold (norms measured on the input) are
    dropped first.  Then, in order: per-feature standardization across the
    dataset (off by default), per-sample centering to zero mean across the
    sample's entries, per-sample scaling to unit norm.  Groups left empty are
    removed with a warning; dropping everything raises DataError.  Re-running
    with the same settings is the identity.
    """
    keep = data.sample_norms() >= float(min_norm_threshold)
    sizes = []
    labels = []
    kept_labels_src = data.labels or tuple(f"g{i}" for i in range(data.num_groups))
    dropped_groups = []
    cols: list[np.ndarray] = []
    for i in range(data.num_groups):
        sl = data.group_slice(i)
        mask = keep[sl]
        n_kept = int(mask.sum())
        if n_kept == 0:
            dropped_groups.append(kept_labels_src[i])
            continue
        cols.append(data.X[:, sl][:, mask])
        sizes.append(n_kept)
        labels.append(kept_labels_src[i])
    if not cols:
        raise DataError("preprocessing dropped every sample")
    if dropped_groups:
        warnings.warn(
            f"groups emptied by the norm threshold and removed: {dropped_groups}",
            stacklevel=2,
        )
    X = np.concatenate(cols, axis=1)
    if standardize_features:
        mean = X.mean(axis=1, keepdims=True)
        std = X.std(axis=1, keepdims=True)
        std[std == 0.0] = 1.0
        X = (X - mean) / std
    if center:
        X = X - X.mean(axis=0, keepdims=True)
    if normalize:
        norms = np.linalg.norm(X, axis=0, keepdims=True)
        norms[norms == 0.0] = 1.0
        X = X / norms
    return GroupedDataset(X, tuple(sizes), labels=tuple(labels), name=data.name)
