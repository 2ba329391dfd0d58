"""Datasets: synthetic generators, CSV ingestion, k-fold splits, standardization.

All synthetic inputs live in [0, 1]^k and targets are noiseless, so the
derivative structure of each generator is known exactly.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

SYNTHETIC_GENERATORS = (
    "friedman1",
    "regression1",
    "regression10",
    "sparse_uncorrelated",
    "swiss_roll",
)

# feature count per generator
_GENERATOR_DIMS = {
    "friedman1": 10,
    "regression1": 1,
    "regression10": 10,
    "sparse_uncorrelated": 10,
    "swiss_roll": 3,
}


@dataclass
class Dataset:
    """A named regression dataset: inputs (n, k) and targets (n,)."""

    name: str
    inputs: np.ndarray
    targets: np.ndarray
    kind: str = "synthetic"  # "synthetic" or "real"

    def __post_init__(self):
        self.inputs = np.asarray(self.inputs, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64)
        if self.inputs.ndim != 2:
            raise ValueError("inputs must be a 2-D array")
        n, k = self.inputs.shape
        if n < 2:
            raise ValueError("fewer than 2 rows")
        if k < 1:
            raise ValueError("need at least one feature column")
        if self.targets.shape != (n,):
            raise ValueError(
                f"targets length {self.targets.shape} does not match {n} input rows"
            )
        if not np.all(np.isfinite(self.inputs)):
            raise ValueError("non-finite value in inputs")
        if not np.all(np.isfinite(self.targets)):
            raise ValueError("non-finite value in targets")
        if self.kind not in ("synthetic", "real"):
            raise ValueError(f"unknown dataset kind {self.kind!r}")

    @property
    def n(self) -> int:
        return self.inputs.shape[0]

    @property
    def k(self) -> int:
        return self.inputs.shape[1]


def generate_synthetic(generator: str, n: int, seed: int) -> Dataset:
    """Generate a noiseless synthetic dataset with inputs uniform in [0, 1]^k.

    Supported generators and their target functions:

    * ``friedman1``           y = 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5, k=10
    * ``regression1``         y = c . x with fixed random coefficients, k=1
    * ``regression10``        same linear map with k=10
    * ``sparse_uncorrelated`` y = x1 + 2 x2 - 2 x3 - 1.5 x4, k=10
    * ``swiss_roll``          inputs are the rolled surface (t cos t, 21 u, t sin t)
                              min-max rescaled per column into [0, 1]; target is the
                              roll parameter t = 1.5 pi (1 + 2 s), k=3

    Deterministic: identical (generator, n, seed) gives bit-identical data.
    """
    if generator not in SYNTHETIC_GENERATORS:
        raise ValueError(
            f"unknown generator {generator!r}; expected one of {SYNTHETIC_GENERATORS}"
        )
    if n < 2:
        raise ValueError("n must be at least 2")

    rng = np.random.default_rng(seed)
    k = _GENERATOR_DIMS[generator]

    if generator == "swiss_roll":
        s = rng.uniform(size=n)
        u = rng.uniform(size=n)
        t = 1.5 * np.pi * (1.0 + 2.0 * s)
        raw = np.column_stack([t * np.cos(t), 21.0 * u, t * np.sin(t)])
        lo = raw.min(axis=0)
        span = raw.max(axis=0) - lo
        span[span == 0.0] = 1.0
        inputs = (raw - lo) / span
        targets = t
    else:
        inputs = rng.uniform(size=(n, k))
        if generator == "friedman1":
            targets = (
                10.0 * np.sin(np.pi * inputs[:, 0] * inputs[:, 1])
                + 20.0 * (inputs[:, 2] - 0.5) ** 2
                + 10.0 * inputs[:, 3]
                + 5.0 * inputs[:, 4]
            )
        elif generator in ("regression1", "regression10"):
            coef = 100.0 * rng.standard_normal(k)
            targets = inputs @ coef
        else:  # sparse_uncorrelated
            targets = (
                inputs[:, 0] + 2.0 * inputs[:, 1] - 2.0 * inputs[:, 2] - 1.5 * inputs[:, 3]
            )

    return Dataset(name=generator, inputs=inputs, targets=targets, kind="synthetic")


def load_csv(
    path: str,
    target: str = "y",
    features: list[str] | None = None,
    policy: str = "strict",
    name: str | None = None,
) -> Dataset:
    """Load a real dataset from a UTF-8 comma-separated file with a header row.

    ``target`` names the target column; ``features`` names the input columns
    (default: every other column, in file order). ``policy`` controls rows with
    missing or non-numeric cells: ``"strict"`` rejects the file with an error
    naming the row and column, ``"skip"`` drops the offending rows.
    """
    if policy not in ("strict", "skip"):
        raise ValueError(f"unknown policy {policy!r}; expected 'strict' or 'skip'")

    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, no header row") from None
        header = [h.strip() for h in header]
        if len(set(header)) != len(header):
            raise ValueError(f"{path}: duplicate column names in header")
        if target not in header:
            raise ValueError(f"{path}: target column {target!r} not in header")
        if features is None:
            features = [h for h in header if h != target]
        if not features:
            raise ValueError(f"{path}: no feature columns")
        missing = [c for c in features if c not in header]
        if missing:
            raise ValueError(f"{path}: feature columns not in header: {missing}")

        cols = [header.index(c) for c in features] + [header.index(target)]
        rows = []
        for lineno, record in enumerate(reader, start=2):
            if not record or all(cell.strip() == "" for cell in record):
                continue
            if len(record) != len(header):
                raise ValueError(
                    f"{path}: row {lineno} has {len(record)} cells, header has {len(header)}"
                )
            parsed = np.empty(len(cols))
            bad = None
            for out_idx, col_idx in enumerate(cols):
                cell = record[col_idx].strip()
                try:
                    value = float(cell)
                except ValueError:
                    value = math.nan
                if not math.isfinite(value):
                    bad = (lineno, header[col_idx], cell)
                    break
                parsed[out_idx] = value
            if bad is not None:
                if policy == "strict":
                    raise ValueError(
                        f"{path}: non-numeric cell {bad[2]!r} at row {bad[0]}, "
                        f"column {bad[1]!r}"
                    )
                continue
            rows.append(parsed)

    if len(rows) < 2:
        raise ValueError(f"{path}: fewer than 2 rows")
    table = np.vstack(rows)
    return Dataset(
        name=name if name is not None else path,
        inputs=table[:, :-1],
        targets=table[:, -1],
        kind="real",
    )


def write_csv(dataset: Dataset, path: str) -> None:
    """Write a dataset as CSV with header ``x1..xk,y`` (17 significant digits)."""
    header = [f"x{j + 1}" for j in range(dataset.k)] + ["y"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for xi, yi in zip(dataset.inputs, dataset.targets):
            writer.writerow([f"{v:.17g}" for v in xi] + [f"{yi:.17g}"])


@dataclass
class FoldSplit:
    """Assignment of each row index to one of ``fold_count`` folds."""

    fold_count: int
    assignments: np.ndarray

    def train_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments != fold)

    def val_rows(self, fold: int) -> np.ndarray:
        return np.flatnonzero(self.assignments == fold)


def make_folds(n: int, fold_count: int, seed: int) -> FoldSplit:
    """Randomly partition ``range(n)`` into folds whose sizes differ by at most 1."""
    if fold_count < 2:
        raise ValueError("fold_count must be at least 2")
    if n < fold_count:
        raise ValueError(f"n={n} is smaller than fold_count={fold_count}")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(n)
    assignments = np.empty(n, dtype=np.int64)
    # first (n % fold_count) folds get the extra row
    sizes = np.full(fold_count, n // fold_count)
    sizes[: n % fold_count] += 1
    start = 0
    for fold, size in enumerate(sizes):
        assignments[perm[start : start + size]] = fold
        start += size
    return FoldSplit(fold_count=fold_count, assignments=assignments)


@dataclass
class Standardizer:
    """Per-feature and target z-score transform fitted on training rows only.

    Uses the population standard deviation; columns with zero spread get
    std 1.0 so the transform stays defined.
    """

    input_means: np.ndarray
    input_stds: np.ndarray
    target_mean: float
    target_std: float

    def transform_inputs(self, X: np.ndarray) -> np.ndarray:
        return (X - self.input_means) / self.input_stds

    def transform_targets(self, y: np.ndarray) -> np.ndarray:
        return (y - self.target_mean) / self.target_std

    def invert_inputs(self, X: np.ndarray) -> np.ndarray:
        return X * self.input_stds + self.input_means

    def invert_targets(self, y: np.ndarray) -> np.ndarray:
        return y * self.target_std + self.target_mean


def fit_standardizer(dataset: Dataset, train_rows: np.ndarray) -> Standardizer:
    """Fit z-score statistics on the given training rows (validation rows unseen)."""
    train_rows = np.asarray(train_rows)
    if train_rows.size == 0:
        raise ValueError("train_rows is empty")
    X = dataset.inputs[train_rows]
    y = dataset.targets[train_rows]
    input_stds = X.std(axis=0)
    input_stds[input_stds == 0.0] = 1.0
    target_std = float(y.std())
    if target_std == 0.0:
        target_std = 1.0
    return Standardizer(
        input_means=X.mean(axis=0),
        input_stds=input_stds,
        target_mean=float(y.mean()),
        target_std=target_std,
    )
