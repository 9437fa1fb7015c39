"""Reference k-segmentation algorithms: merge, split, window, and exact DP.

Four classic strategies plus one hybrid:

* ``botup`` greedily merges small uniform cells until k segments remain.
* ``lm_botup`` refines a mid-sized uniform layout first, then merges the
  refined cells down to k; the refinement step gives the merge loop far
  fewer, better-placed cells to work with.
* ``binseg`` greedily splits, evaluating every candidate split with a fresh
  pointwise 1-segment fit over the raw slice.  This is the textbook
  quadratic procedure; it deliberately does not reuse the prefix-sum
  shortcuts, so its runtime grows as N^2 per level while the values it
  computes agree with the O(d) interval queries.
* ``window_sliding`` scores each index by the cost drop of splitting a
  centered window there, then picks peaks greedily with suppression.
* ``segment_neighborhood`` is the exact dynamic program; everything else is
  benchmarked against its globally optimal cost.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleSegmentationError, PeakSelectionError
from .lm import LmConfig, lm_refine, lm_uniform
from .signal import (
    KSegment,
    PrefixStats,
    Signal,
    _interval_cost_arr,
    _rss_from_raw,
    interval_cost,
    segments_from_boundaries,
)


@dataclass(frozen=True)
class BotUpConfig:
    """Initial cell size for bottom-up merging; the signal starts as
    floor(n / delta) uniform cells."""

    delta: int = 2

    def __post_init__(self):
        if self.delta < 1:
            raise ValueError("delta must be >= 1")


@dataclass(frozen=True)
class WindowConfig:
    """Window width for the sliding discrepancy score."""

    w: int = 50

    def __post_init__(self):
        if self.w < 2:
            raise ValueError("w must be >= 2")


def _check_feasible(n: int, k: int, gamma: int = 1) -> None:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k * gamma > n:
        raise InfeasibleSegmentationError(
            f"cannot split {n} points into {k} segments of >= {gamma} points"
        )


def _merge_to_k(stats: PrefixStats, bounds: np.ndarray, k: int) -> np.ndarray:
    """Merge adjacent cells of a partition until k remain.

    Each interior boundary is scored by the cost increase its removal would
    cause: cost(merged) - cost(left) - cost(right).  The cheapest removal
    wins each round, ties going to the smaller left-cell start.  A heap with
    lazy invalidation keeps this O(m log m): stale entries are recognized by
    comparing against the boundary's latest recorded score.
    """
    bounds = [int(b) for b in bounds]
    if len(bounds) - 1 <= k:
        return np.asarray(bounds, dtype=np.intp)
    prev = {b: a for a, b in zip(bounds, bounds[1:])}
    nxt = {a: b for a, b in zip(bounds, bounds[1:])}
    n = bounds[-1]

    def score(j):
        i, l = prev[j], nxt[j]
        return (
            interval_cost(stats, i, l)
            - interval_cost(stats, i, j)
            - interval_cost(stats, j, l)
        )

    latest: dict[int, tuple[float, int]] = {}
    heap = []
    for j in bounds[1:-1]:
        entry = (score(j), prev[j])
        latest[j] = entry
        heap.append((*entry, j))
    heapq.heapify(heap)

    remaining = len(bounds) - 1
    while remaining > k:
        disc, left, j = heapq.heappop(heap)
        if latest.get(j) != (disc, left):
            continue
        del latest[j]
        i, l = prev[j], nxt[j]
        nxt[i] = l
        prev[l] = i
        del prev[j], nxt[j]
        remaining -= 1
        for nb in (i, l):
            if 0 < nb < n:
                entry = (score(nb), prev[nb])
                latest[nb] = entry
                heapq.heappush(heap, (*entry, nb))
    out = [0]
    while out[-1] != n:
        out.append(nxt[out[-1]])
    return np.asarray(out, dtype=np.intp)


def botup(
    signal: Signal,
    stats: PrefixStats,
    k: int,
    config: BotUpConfig = BotUpConfig(),
) -> KSegment:
    """Bottom-up merging from floor(n / delta) uniform cells down to k."""
    n = signal.n
    m0 = n // config.delta
    if m0 < k:
        raise InfeasibleSegmentationError(
            f"{m0} initial cells (delta={config.delta}) cannot yield "
            f"{k} segments"
        )
    cells = np.array([q * n // m0 for q in range(m0 + 1)], dtype=np.intp)
    return segments_from_boundaries(stats, _merge_to_k(stats, cells, k))


def lm_botup(
    signal: Signal,
    stats: PrefixStats,
    k: int,
    lm_config: LmConfig = LmConfig(),
    botup_config: BotUpConfig = BotUpConfig(),
) -> KSegment:
    """Refine a mid-sized uniform layout, merge its cells down to k, polish.

    The cell count is 5k, capped at n/20 so cells keep a useful length, and
    never below k.  Between refinement and merge, every two-point cell is
    collapsed onto its best single edge: two points fit any line for free,
    so such a cell can sit across a level change without paying for it, and
    the merge would then spend two boundaries bracketing that change while
    dropping a real one elsewhere.  Re-anchoring the cell to whichever of
    its three candidate edges costs least puts the boundary exactly on the
    change it was hiding.  After the merge, one more local refinement pass
    at the caller's settings cleans up whatever the coarse stage misplaced.
    When the capped cell count is no larger than k the whole pipeline
    reduces to local refinement of the uniform k-layout.  ``botup_config``
    is accepted for interface parity with ``botup``; the merge phase here
    starts from the refined cells and needs no initial cell size.
    """
    n = signal.n
    _check_feasible(n, k, lm_config.gamma)
    k_init = max(k, min(5 * k, n // 20))
    k_init = min(k_init, n // lm_config.gamma)
    if k_init <= k:
        result, _ = lm_uniform(signal, stats, k, lm_config)
        return result
    coarse, _ = lm_uniform(signal, stats, k_init, lm_config)
    repaired = _collapse_two_point_cells(stats, coarse.boundaries, k)
    merged = _merge_to_k(stats, repaired, k)
    final, _ = lm_refine(
        signal, stats, segments_from_boundaries(stats, merged), lm_config
    )
    return final


def _collapse_two_point_cells(
    stats: PrefixStats, bounds: np.ndarray, k: int
) -> np.ndarray:
    """Replace each interior two-point cell by its cheapest single edge.

    A cell [a, a+2) is reduced to one boundary chosen from {a, a+1, a+2}
    by the total cost of the two spans it leaves between the surviving
    neighbors.  Ties keep the earliest candidate, so a cell that fits its
    surroundings keeps its left edge.  Cells touching either end of the
    signal stay, as do cells whose removal would leave a span shorter
    than two points or push the boundary count below k+1.

    The pass repeats until nothing changes: collapsing one cell of an
    adjacent run can leave a fresh two-point span between survivors, and
    only a re-scan with the updated neighbors resolves it.  Every pass
    that acts removes a boundary, so the loop always terminates.
    """
    bs = [int(b) for b in bounds]
    budget = len(bs) - 1 - k
    while True:
        out = [bs[0]]
        i = 1
        while i < len(bs):
            collapsible = (
                budget > 0
                and i + 1 <= len(bs) - 2
                and bs[i + 1] - bs[i] == 2
            )
            if collapsible:
                prev, nxt = out[-1], bs[i + 2]
                best_mid, best_cost = None, np.inf
                for mid in (bs[i], bs[i] + 1, bs[i + 1]):
                    if mid - prev < 2 or nxt - mid < 2:
                        continue
                    cost = interval_cost(stats, prev, mid) + interval_cost(
                        stats, mid, nxt
                    )
                    if cost < best_cost:
                        best_mid, best_cost = mid, cost
                if best_mid is not None:
                    out.append(best_mid)
                    budget -= 1
                    i += 2
                    continue
            out.append(bs[i])
            i += 1
        if len(out) == len(bs):
            break
        bs = out
    return np.asarray(out, dtype=np.intp)


def _element_moments(signal: Signal) -> np.ndarray:
    """Per-point moment columns [t, t^2, |x|^2, x, t*x], shape (n, 2d+3)."""
    t, x = signal.times, signal.values
    return np.column_stack(
        [t, t * t, (x * x).sum(axis=1), x, t[:, np.newaxis] * x]
    )


def _slice_split_costs(
    moments: np.ndarray, times: np.ndarray, d: int, i: int, l: int, gamma: int
) -> tuple[np.ndarray, np.ndarray]:
    """Cost of every feasible 2-way split of [i, l), summed from raw points.

    Each candidate's left and right moments come from a fresh sum over the
    slice, so one sweep is O(span^2 * d).  Returns (splits, costs).
    """
    splits = np.arange(i + gamma, l - gamma + 1)
    costs = np.empty(splits.shape[0])
    for idx, s in enumerate(splits):
        left = moments[i:s].sum(axis=0)
        right = moments[s:l].sum(axis=0)
        costs[idx] = _rss_from_raw(
            s - i, left[0], left[1], left[3 : 3 + d], left[3 + d :],
            left[2], times[i],
        ) + _rss_from_raw(
            l - s, right[0], right[1], right[3 : 3 + d], right[3 + d :],
            right[2], times[s],
        )
    return splits, costs


def binseg(
    signal: Signal, stats: PrefixStats, k: int, gamma: int = 2
) -> KSegment:
    """Greedy top-down splitting until k segments exist.

    Each round evaluates every feasible (segment, split) pair and performs
    the split with the largest cost reduction; ties go to the smallest
    segment start, then the smallest split index.  Final segment lines come
    from the closed-form interval fit, so a k=2 result is identical to the
    exact DP's.
    """
    n = signal.n
    _check_feasible(n, k, gamma)
    moments = _element_moments(signal)
    times = signal.times
    d = signal.d

    def best_split(i, l):
        if l - i < 2 * gamma:
            return None
        splits, costs = _slice_split_costs(moments, times, d, i, l, gamma)
        whole = interval_cost(stats, i, l)
        idx = int(np.argmin(costs))
        return whole - costs[idx], int(splits[idx])

    segments = [(0, n)]
    candidates: dict[tuple[int, int], tuple[float, int] | None] = {}
    while len(segments) < k:
        best = None
        for seg in segments:
            if seg not in candidates:
                candidates[seg] = best_split(*seg)
            cand = candidates[seg]
            if cand is None:
                continue
            if best is None or cand[0] > best[1][0]:
                best = (seg, cand)
        if best is None:
            raise InfeasibleSegmentationError(
                f"no segment of >= {2 * gamma} points left to split "
                f"({len(segments)} of {k} segments placed)"
            )
        (i, l), (_, s) = best
        pos = segments.index((i, l))
        segments[pos : pos + 1] = [(i, s), (s, l)]
        del candidates[(i, l)]
    bounds = np.array([0] + sorted(s for _, s in segments), dtype=np.intp)
    return segments_from_boundaries(stats, bounds)


def window_sliding(
    signal: Signal,
    stats: PrefixStats,
    k: int,
    config: WindowConfig = WindowConfig(),
) -> KSegment:
    """Change points from discrepancy peaks of a sliding centered window.

    Index s scores cost(a, b) - cost(a, s) - cost(s, b) over the window
    [a, b) = [s - w/2, s + w/2) clipped to the signal.  The k-1 change
    points are chosen highest score first; after each pick, indices closer
    than w/2 to it are suppressed.  Raises an error naming how many points
    were found if suppression leaves fewer than k-1 candidates.
    """
    n = signal.n
    w = config.w
    if n <= w:
        raise ValueError(f"signal length {n} must exceed window size {w}")
    if k < 1:
        raise ValueError("k must be >= 1")
    half = w // 2
    s = np.arange(1, n)
    a = np.maximum(0, s - half)
    b = np.minimum(n, s + half)
    scores = (
        _interval_cost_arr(stats, a, b)
        - _interval_cost_arr(stats, a, s)
        - _interval_cost_arr(stats, s, b)
    )
    picked: list[int] = []
    for idx in np.argsort(-scores, kind="stable"):
        if len(picked) == k - 1:
            break
        cand = int(s[idx])
        if all(abs(cand - p) >= half for p in picked):
            picked.append(cand)
    if len(picked) < k - 1:
        raise PeakSelectionError(len(picked), k - 1)
    bounds = np.array([0] + sorted(picked) + [n], dtype=np.intp)
    return segments_from_boundaries(stats, bounds)


def segment_neighborhood(
    signal: Signal, stats: PrefixStats, k: int, gamma: int = 2
) -> KSegment:
    """Globally optimal k-segmentation by dynamic programming.

    ``best[m, j]`` is the least cost of fitting m segments to the first j
    points; each j computes its interval costs to every admissible start
    once and reuses them across all m.  Ties take the smallest boundary.
    O(n^2 (d + k)) time, O(n k) memory.
    """
    n = signal.n
    _check_feasible(n, k, gamma)
    best = np.full((k + 1, n + 1), np.inf)
    back = np.zeros((k + 1, n + 1), dtype=np.intp)
    for j in range(gamma, n + 1):
        starts = np.arange(0, j - gamma + 1)
        cost_to_j = _interval_cost_arr(stats, starts, j)
        best[1, j] = cost_to_j[0]
        for m in range(2, min(k, j // gamma) + 1):
            lo = (m - 1) * gamma
            cand = best[m - 1, lo : j - gamma + 1] + cost_to_j[lo:]
            idx = int(np.argmin(cand))
            best[m, j] = cand[idx]
            back[m, j] = lo + idx
    if not np.isfinite(best[k, n]):
        raise InfeasibleSegmentationError(
            f"no feasible {k}-segmentation of {n} points with gamma={gamma}"
        )
    bounds = [n]
    for m in range(k, 1, -1):
        bounds.append(int(back[m, bounds[-1]]))
    bounds.append(0)
    return segments_from_boundaries(stats, np.array(bounds[::-1], dtype=np.intp))
