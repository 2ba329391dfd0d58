"""Tuple selection and cached slope estimates between pairs of training rows.

Each tuple pairs a training row i with a partner j and caches the midpoint,
difference vector, its norm, and the slope (y_j - y_i) / ||x_j - x_i||, i.e.
a finite-difference estimate of the target's directional derivative.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .kdtree import KdTree

# pairs closer than this are treated as duplicates: the slope is undefined
ZERO_NORM_THRESHOLD = 1e-12

_MAX_REDRAWS = 16


@dataclass
class DerivativeTuple:
    i: int
    j: int
    midpoint: np.ndarray
    direction: np.ndarray
    norm: float
    data_derivative: float


@dataclass
class TupleSet:
    """Struct-of-arrays view of all selected tuples for one training set."""

    i: np.ndarray            # (T,) first row of each tuple
    j: np.ndarray            # (T,) partner row
    midpoints: np.ndarray    # (T, k) (x_i + x_j) / 2
    directions: np.ndarray   # (T, k) x_j - x_i
    norms: np.ndarray        # (T,) ||x_j - x_i||
    data_derivatives: np.ndarray  # (T,) (y_j - y_i) / norm
    selection: str           # "nearest_neighbour" or "random"
    l: int

    def __len__(self) -> int:
        return len(self.i)

    def __getitem__(self, s: int) -> DerivativeTuple:
        return DerivativeTuple(
            i=int(self.i[s]),
            j=int(self.j[s]),
            midpoint=self.midpoints[s],
            direction=self.directions[s],
            norm=float(self.norms[s]),
            data_derivative=float(self.data_derivatives[s]),
        )

    def unit_directions(self) -> np.ndarray:
        return self.directions / self.norms[:, None]


def data_derivative(x_i, y_i, x_j, y_j):
    """Slope of the target between two rows, evaluated at their midpoint.

    Returns (midpoint, direction, norm, derivative) with
    derivative = (y_j - y_i) / ||x_j - x_i||.
    """
    x_i = np.asarray(x_i, dtype=np.float64)
    x_j = np.asarray(x_j, dtype=np.float64)
    direction = x_j - x_i
    norm = float(np.linalg.norm(direction))
    if norm <= ZERO_NORM_THRESHOLD:
        raise ValueError("zero direction norm: the two points coincide")
    midpoint = (x_i + x_j) / 2.0
    return midpoint, direction, norm, (y_j - y_i) / norm


def _assemble(X, y, ii, jj, selection, l):
    ii = np.asarray(ii, dtype=np.int64)
    jj = np.asarray(jj, dtype=np.int64)
    directions = X[jj] - X[ii]
    norms = np.linalg.norm(directions, axis=1)
    return TupleSet(
        i=ii,
        j=jj,
        midpoints=(X[ii] + X[jj]) / 2.0,
        directions=directions,
        norms=norms,
        data_derivatives=(y[jj] - y[ii]) / norms,
        selection=selection,
        l=l,
    )


def select_nearest(X: np.ndarray, y: np.ndarray, tree: KdTree, l: int) -> TupleSet:
    """For each row, pair it with its ``l`` nearest neighbours.

    Zero-distance neighbours (duplicate rows) are skipped and replaced by the
    next nearest; a row contributes fewer than ``l`` tuples only when the
    training set does not hold enough distinct partners.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(X)
    if n <= l:
        raise ValueError(f"need more than l={l} rows, got n={n}")
    ii, jj = [], []
    for i in range(n):
        m = l
        while True:
            nbrs = tree.knn(i, m)
            dist = np.linalg.norm(X[nbrs] - X[i], axis=1)
            valid = nbrs[dist > ZERO_NORM_THRESHOLD]
            if len(valid) >= l or m == n - 1:
                break
            m = min(n - 1, l + (len(nbrs) - len(valid)))
        for j in valid[:l]:
            ii.append(i)
            jj.append(int(j))
    return _assemble(X, y, ii, jj, "nearest_neighbour", l)


def select_random(X: np.ndarray, y: np.ndarray, l: int, seed: int) -> TupleSet:
    """For each row, pair it with ``l`` distinct partners drawn uniformly.

    Partners are sampled without replacement from the other rows. Pairs that
    land on a duplicate row (zero distance) are redrawn a bounded number of
    times and dropped if no distinct-coordinate partner turns up.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(X)
    if n <= l:
        raise ValueError(f"need more than l={l} rows, got n={n}")
    rng = np.random.default_rng(seed)
    rows = np.arange(n)
    partners = np.empty((n, l), dtype=np.int64)
    for col in range(l):
        draw = rng.integers(0, n - 1, size=n)
        draw += draw >= rows  # uniform over the other indices
        while col > 0:
            clash = (draw[:, None] == partners[:, :col]).any(axis=1)
            if not clash.any():
                break
            redraw = rng.integers(0, n - 1, size=int(clash.sum()))
            redraw += redraw >= rows[clash]
            draw[clash] = redraw
        partners[:, col] = draw

    ii = np.repeat(rows, l)
    jj = partners.reshape(-1)
    norms = np.linalg.norm(X[jj] - X[ii], axis=1)
    keep = np.ones(len(ii), dtype=bool)
    for pos in np.flatnonzero(norms <= ZERO_NORM_THRESHOLD):
        i = int(ii[pos])
        for _ in range(_MAX_REDRAWS):
            j = int(rng.integers(0, n - 1))
            j += j >= i
            if j in partners[i]:
                continue
            if np.linalg.norm(X[j] - X[i]) > ZERO_NORM_THRESHOLD:
                jj[pos] = j
                partners[i, pos - i * l] = j
                break
        else:
            keep[pos] = False
    return _assemble(X, y, ii[keep], jj[keep], "random", l)


def write_tuples_csv(tuple_set: TupleSet, path: str) -> None:
    """Dump a tuple set as ``i,j,norm,data_derivative`` rows for inspection."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["i", "j", "norm", "data_derivative"])
        for s in range(len(tuple_set)):
            writer.writerow(
                [
                    int(tuple_set.i[s]),
                    int(tuple_set.j[s]),
                    f"{tuple_set.norms[s]:.17g}",
                    f"{tuple_set.data_derivatives[s]:.17g}",
                ]
            )
