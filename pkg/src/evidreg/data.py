"""Dataset loading, standardization, splitting and the synthetic generator.

CSV dialect is deliberately strict: comma-separated, UTF-8, one header
row, '.' decimal, every cell numeric and finite.  Loading errors report
the exact file location instead of guessing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError

__all__ = [
    "Dataset",
    "Standardization",
    "load_csv",
    "save_csv",
    "standardize",
    "apply_standardize",
    "split",
    "synthetic_gen",
]


@dataclass(frozen=True)
class Dataset:
    """Feature matrix (n, p) plus optional response vector of length n."""

    X: np.ndarray
    y: np.ndarray | None = None
    feature_names: tuple[str, ...] | None = None
    response_name: str | None = None

    def __post_init__(self) -> None:
        X = np.asarray(self.X, dtype=float)
        if X.ndim != 2:
            raise InputError(f"feature matrix must be 2-D, got shape {X.shape}")
        if not np.isfinite(X).all():
            raise InputError("feature matrix contains non-finite entries")
        object.__setattr__(self, "X", X)
        if self.y is not None:
            y = np.asarray(self.y, dtype=float)
            if y.shape != (X.shape[0],):
                raise InputError(
                    f"response length {y.shape} does not match {X.shape[0]} rows"
                )
            if not np.isfinite(y).all():
                raise InputError("response contains non-finite entries")
            object.__setattr__(self, "y", y)
        if self.feature_names is not None:
            names = tuple(self.feature_names)
            if len(names) != X.shape[1]:
                raise InputError("feature_names length does not match feature count")
            object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx)
        return Dataset(
            self.X[idx],
            None if self.y is None else self.y[idx],
            self.feature_names,
            self.response_name,
        )

    def require_response(self) -> np.ndarray:
        if self.y is None:
            raise InputError("this operation needs labeled data (no response column)")
        return self.y


@dataclass(frozen=True)
class Standardization:
    """Per-feature location/scale fitted on training data."""

    mean: np.ndarray
    std: np.ndarray

    def transform(self, X: np.ndarray) -> np.ndarray:
        return (np.asarray(X, dtype=float) - self.mean) / self.std


def load_csv(path: str, response_column: str | None = None) -> Dataset:
    """Parse a strict numeric CSV; ``response_column`` (if given) becomes y.

    Extra columns are kept as features.  Every failure names the file
    line and column it came from.
    """
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        raise InputError(f"no such file: {path}") from None
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    if not rows:
        raise InputError(f"{path}: empty file")
    header = [name.strip() for name in rows[0]]
    if response_column is not None and response_column not in header:
        raise InputError(
            f"{path}: response column {response_column!r} not found "
            f"(columns: {', '.join(header)})"
        )
    values = np.empty((len(rows) - 1, len(header)), dtype=float)
    for i, row in enumerate(rows[1:]):
        line = i + 2
        if len(row) != len(header):
            raise InputError(
                f"{path}:{line}: expected {len(header)} cells, got {len(row)}"
            )
        for j, cell in enumerate(row):
            try:
                v = float(cell)
            except ValueError:
                raise InputError(
                    f"{path}:{line}: column {header[j]!r}: "
                    f"non-numeric value {cell.strip()!r}"
                ) from None
            if not math.isfinite(v):
                raise InputError(
                    f"{path}:{line}: column {header[j]!r}: non-finite value {cell.strip()!r}"
                )
            values[i, j] = v
    if response_column is None:
        return Dataset(values, None, tuple(header), None)
    r = header.index(response_column)
    keep = [j for j in range(len(header)) if j != r]
    if not keep:
        raise InputError(f"{path}: no feature columns besides the response")
    names = tuple(header[j] for j in keep)
    return Dataset(values[:, keep], values[:, r], names, response_column)


def save_csv(data: Dataset, path: str) -> None:
    """Write a Dataset back out in the same strict dialect (full precision)."""
    names = list(data.feature_names or (f"x{j + 1}" for j in range(data.p)))
    if data.y is not None:
        names.append(data.response_name or "y")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(names)
        for i in range(data.n):
            row = [repr(float(v)) for v in data.X[i]]
            if data.y is not None:
                row.append(repr(float(data.y[i])))
            writer.writerow(row)


def standardize(train: Dataset) -> tuple[Dataset, Standardization]:
    """Center/scale features to mean 0, std 1; the response is untouched.

    Returns the transformed data and the statistics for reuse on held-out
    data.  Constant features are rejected rather than silently dropped.
    """
    mean = train.X.mean(axis=0)
    std = train.X.std(axis=0)
    bad = np.flatnonzero(std <= 0.0)
    if bad.size:
        names = train.feature_names or tuple(f"x{j + 1}" for j in range(train.p))
        listed = ", ".join(names[j] for j in bad)
        raise InputError(f"constant feature(s) cannot be standardized: {listed}")
    stats = Standardization(mean, std)
    return apply_standardize(stats, train), stats


def apply_standardize(stats: Standardization, data: Dataset) -> Dataset:
    if data.p != stats.mean.shape[0]:
        raise InputError(
            f"feature count {data.p} does not match standardization "
            f"statistics ({stats.mean.shape[0]} features)"
        )
    return Dataset(stats.transform(data.X), data.y, data.feature_names, data.response_name)


def split(data: Dataset, fraction: float = 2.0 / 3.0, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Seeded shuffle split; floor(n * fraction) rows go to the first part."""
    if data.n < 3:
        raise InputError(f"need at least 3 rows to split, got {data.n}")
    if not 0.0 < fraction < 1.0:
        raise InputError(f"split fraction must lie in (0, 1), got {fraction}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(data.n)
    n_train = int(math.floor(data.n * fraction))
    return data.subset(np.sort(perm[:n_train])), data.subset(np.sort(perm[n_train:]))


def synthetic_gen(n: int, seed: int = 0) -> Dataset:
    """Benchmark generator: bimodal input, sinusoid trend, split-level noise.

    x ~ 0.5 Unif(-3,-1) + 0.5 Unif(1,4); y = x + sin(3x) + eta with
    Var(eta) = 0.01 for x < 0 and 0.3 otherwise.  The input gap (-1, 1)
    contains no data, which is what makes the epistemic-width behaviour
    of the model visible.
    """
    if n < 1:
        raise InputError(f"need n >= 1, got {n}")
    rng = np.random.default_rng(seed)
    left = rng.random(n) < 0.5
    u = rng.random(n)
    x = np.where(left, -3.0 + 2.0 * u, 1.0 + 3.0 * u)
    noise_sd = np.where(x < 0.0, math.sqrt(0.01), math.sqrt(0.3))
    y = x + np.sin(3.0 * x) + noise_sd * rng.standard_normal(n)
    return Dataset(x[:, None], y, ("x",), "y")
