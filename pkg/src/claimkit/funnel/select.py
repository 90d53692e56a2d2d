"""Representative subset selection over unit-norm claim embeddings.

The main selector greedily maximizes the facility-location objective
f(S) = sum_i max_{j in S} <c_i, c_j> with a lazy heap; ties on marginal
gain break toward the lowest id, and the lazy path recomputes exact gains
before committing, so its output is element-wise identical to the naive
quadratic greedy. Random and farthest-point baselines share the interface.
"""

from __future__ import annotations

import heapq
from typing import Sequence

import numpy as np


def _check(X: np.ndarray, k: int, ids: Sequence) -> list:
    n = X.shape[0]
    if len(ids) != n:
        raise ValueError("ids must align with embedding rows")
    if not 0 < k <= n:
        raise ValueError(f"budget k={k} out of range for {n} points")
    return list(ids)


def _gain(sim_col: np.ndarray, coverage: np.ndarray) -> float:
    """Marginal facility-location gain of adding the point with this column.

    Coverage starts at the zero baseline, so gains are non-negative and
    non-increasing across rounds (the lazy-heap invariant).
    """
    return float(np.sum(np.maximum(sim_col - coverage, 0.0)))


def naive_greedy(X: np.ndarray, k: int, ids: Sequence | None = None) -> list:
    """Reference quadratic greedy; returns selected ids in selection order."""
    ids = _check(X, k, ids if ids is not None else list(range(X.shape[0])))
    S = X @ X.T
    order = sorted(range(len(ids)), key=lambda r: ids[r])
    coverage = np.zeros(S.shape[0])
    selected: list[int] = []
    chosen = set()
    for _ in range(k):
        best_row, best_gain = None, None
        for row in order:
            if row in chosen:
                continue
            g = _gain(S[:, row], coverage)
            if best_gain is None or g > best_gain:
                best_row, best_gain = row, g
        chosen.add(best_row)
        selected.append(best_row)
        coverage = np.maximum(coverage, S[:, best_row])
    return [ids[r] for r in selected]


def lazy_greedy(X: np.ndarray, k: int, ids: Sequence | None = None) -> list:
    """Heap-accelerated greedy; identical output to naive_greedy by contract."""
    ids = _check(X, k, ids if ids is not None else list(range(X.shape[0])))
    S = X @ X.T
    n = len(ids)
    coverage = np.zeros(n)
    # heap entries: (-gain, id, row, stamp); stamp = |selected| when computed
    heap = [(-_gain(S[:, row], coverage), ids[row], row, 0) for row in range(n)]
    heapq.heapify(heap)
    selected: list[int] = []
    while len(selected) < k:
        neg_gain, rid, row, stamp = heapq.heappop(heap)
        if stamp != len(selected):
            fresh = _gain(S[:, row], coverage)
            heapq.heappush(heap, (-fresh, rid, row, len(selected)))
            continue
        selected.append(row)
        coverage = np.maximum(coverage, S[:, row])
    return [ids[r] for r in selected]


def facility_location_value(X: np.ndarray, rows: Sequence[int]) -> float:
    """f(S) for a selected row set against the zero baseline; empty S scores 0."""
    if not rows:
        return 0.0
    S = X @ X.T
    return float(np.sum(np.maximum(np.max(S[:, list(rows)], axis=1), 0.0)))


def alt_select(
    X: np.ndarray,
    k: int,
    strategy: str,
    seed: int,
    ids: Sequence | None = None,
) -> list:
    """Baseline selectors: seeded uniform sample, or greedy farthest-point
    (seed with the max-total-similarity point, then repeatedly add the point
    with the largest min cosine distance to the selected set)."""
    ids = _check(X, k, ids if ids is not None else list(range(X.shape[0])))
    n = len(ids)
    if strategy == "random":
        rng = np.random.default_rng(seed)
        order = sorted(range(n), key=lambda r: ids[r])
        rows = rng.choice(n, size=k, replace=False)
        return [ids[order[r]] for r in rows]
    if strategy == "farthest_point":
        S = X @ X.T
        order = sorted(range(n), key=lambda r: ids[r])
        totals = S.sum(axis=0)
        first = min(order, key=lambda r: (-totals[r], ids[r]))
        selected = [first]
        chosen = {first}
        min_dist = 1.0 - S[:, first]
        while len(selected) < k:
            nxt = min(
                (r for r in order if r not in chosen),
                key=lambda r: (-min_dist[r], ids[r]),
            )
            selected.append(nxt)
            chosen.add(nxt)
            min_dist = np.minimum(min_dist, 1.0 - S[:, nxt])
        return [ids[r] for r in selected]
    raise ValueError(f"unknown selection strategy {strategy!r}")
