"""Exact k-nearest-neighbour search with a median-split kd-tree.

Build is O(n log n) (median by partial sort, split axis cycles through the
dimensions); queries are exact under the Euclidean metric. Distance ties are
broken by ascending point index so neighbour lists are reproducible.
"""

from __future__ import annotations

import heapq

import numpy as np

_LEAF_SIZE = 16


class KdTree:
    """Balanced spatial partition over a fixed (n, k) point matrix.

    The point matrix is referenced, not copied; nodes store a permutation of
    the row indices plus (split dimension, split value, child ranges).
    """

    def __init__(self, points: np.ndarray):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[0] == 0:
            raise ValueError("points must be a non-empty (n, k) matrix")
        if not np.all(np.isfinite(points)):
            raise ValueError("points must be finite")
        self.points = points
        self.n, self.k = points.shape

        # flat node arrays; children indexed into these, -1 marks a leaf
        self._split_dim: list[int] = []
        self._split_val: list[float] = []
        self._left: list[int] = []
        self._right: list[int] = []
        self._start: list[int] = []
        self._end: list[int] = []
        self._perm = np.arange(self.n)
        self._root = self._build(0, self.n, 0)

    def _new_node(self, start, end):
        self._split_dim.append(-1)
        self._split_val.append(0.0)
        self._left.append(-1)
        self._right.append(-1)
        self._start.append(start)
        self._end.append(end)
        return len(self._split_dim) - 1

    def _build(self, start, end, depth):
        node = self._new_node(start, end)
        count = end - start
        if count <= _LEAF_SIZE:
            return node
        axis = depth % self.k
        idx = self._perm[start:end]
        mid = count // 2
        order = np.argpartition(self.points[idx, axis], mid)
        self._perm[start:end] = idx[order]
        self._split_dim[node] = axis
        self._split_val[node] = float(self.points[self._perm[start + mid], axis])
        self._left[node] = self._build(start, start + mid, depth + 1)
        self._right[node] = self._build(start + mid, end, depth + 1)
        return node

    def knn(self, query_index: int, l: int) -> np.ndarray:
        """Return the ``l`` nearest neighbours of point ``query_index``.

        The query point itself is excluded. Results are ordered by ascending
        Euclidean distance, ties by ascending index, and match a brute-force
        scan under the same tie rule.
        """
        if not 0 <= query_index < self.n:
            raise ValueError(f"query_index {query_index} out of range")
        if l < 1 or l > self.n - 1:
            raise ValueError(f"l={l} must be in [1, n-1] with n={self.n}")
        q = self.points[query_index]
        # max-heap of the current best (d2, idx); root is the worst kept pair
        heap: list[tuple[float, int]] = []
        self._search(self._root, q, query_index, l, heap)
        best = sorted((-d2, -idx) for d2, idx in heap)
        return np.array([idx for _, idx in best], dtype=np.int64)

    def _search(self, node, q, skip, l, heap):
        if self._split_dim[node] < 0:
            idx = self._perm[self._start[node] : self._end[node]]
            idx = idx[idx != skip]
            if idx.size == 0:
                return
            d2 = ((self.points[idx] - q) ** 2).sum(axis=1)
            for dist2, i in zip(d2, idx):
                cand = (-dist2, -int(i))
                if len(heap) < l:
                    heapq.heappush(heap, cand)
                elif cand > heap[0]:
                    heapq.heapreplace(heap, cand)
            return
        axis = self._split_dim[node]
        delta = q[axis] - self._split_val[node]
        near, far = (
            (self._left[node], self._right[node])
            if delta <= 0.0
            else (self._right[node], self._left[node])
        )
        self._search(near, q, skip, l, heap)
        # the far side can still hold candidates at plane distance delta;
        # on equal distance it may win the index tie, so prune strictly
        if len(heap) < l or delta * delta <= -heap[0][0]:
            self._search(far, q, skip, l, heap)

    def leaf_ranges(self):
        """Yield (indices, constraints) per leaf; constraints are ancestor
        half-spaces as (dim, bound, side) with side -1 for <= and +1 for >=."""
        stack = [(self._root, [])]
        while stack:
            node, constraints = stack.pop()
            if self._split_dim[node] < 0:
                yield self._perm[self._start[node] : self._end[node]], constraints
                continue
            dim, val = self._split_dim[node], self._split_val[node]
            stack.append((self._left[node], constraints + [(dim, val, -1)]))
            stack.append((self._right[node], constraints + [(dim, val, +1)]))


def build(points: np.ndarray) -> KdTree:
    return KdTree(points)


def knn(tree: KdTree, query_index: int, l: int) -> np.ndarray:
    return tree.knn(query_index, l)


def brute_force_knn(points: np.ndarray, query_index: int, l: int) -> np.ndarray:
    """Reference k-NN by full distance sort with the same tie rule."""
    points = np.asarray(points, dtype=np.float64)
    d2 = ((points - points[query_index]) ** 2).sum(axis=1)
    order = np.lexsort((np.arange(len(points)), d2))
    order = order[order != query_index]
    return order[:l].astype(np.int64)
