"""Agreement metrics between predicted and true change points.

Both metrics compare two partitions of [0, n) given by their interior
boundary indices.  The covering score weights each true block by its size
and credits the best Jaccard overlap among predicted blocks; it is not
symmetric.  The Rand index counts point pairs on whose together/apart
status the two partitions agree; it is symmetric and computed from block
overlaps, never by enumerating the n^2 pairs.
"""

from __future__ import annotations

import numpy as np


def as_change_points(boundaries, n: int) -> np.ndarray:
    """Validate interior boundary indices for an n-point signal.

    Accepts any sequence; returns a sorted intp array.  Boundaries must be
    strictly increasing integers in (0, n).  An empty set (single block) is
    valid.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    b = np.asarray(boundaries, dtype=np.intp).reshape(-1)
    if b.size and (np.any(np.diff(b) <= 0) or b[0] <= 0 or b[-1] >= n):
        raise ValueError(
            f"boundaries must be strictly increasing within (0, {n})"
        )
    return b


def _block_edges(boundaries: np.ndarray, n: int) -> np.ndarray:
    return np.concatenate(([0], boundaries, [n]))


def covering_score(truth, pred, n: int) -> float:
    """Size-weighted best-overlap score of ``pred`` against ``truth``.

    For every true block, take the largest Jaccard index against any
    predicted block; average these, weighting by true block size.  Returns
    1.0 exactly when the partitions coincide.  Asymmetric: swapping the
    arguments changes which side is iterated.
    """
    tb = _block_edges(as_change_points(truth, n), n)
    pb = _block_edges(as_change_points(pred, n), n)
    ps, pe = pb[:-1], pb[1:]
    total = 0.0
    for a, b in zip(tb[:-1], tb[1:]):
        inter = np.minimum(b, pe) - np.maximum(a, ps)
        np.clip(inter, 0, None, out=inter)
        union = (b - a) + (pe - ps) - inter
        total += int(b - a) * float(np.max(inter / union))
    return total / n


def rand_index(truth, pred, n: int) -> float:
    """Pair-counting agreement between two contiguous partitions.

    The fraction of point pairs that are either together in both
    partitions or apart in both.  Computed from the block-overlap counts:
    agreements = C(n,2) - sum_i C(a_i,2) - sum_j C(b_j,2) + 2 sum_ij C(o_ij,2),
    where o_ij are overlaps of true block i with predicted block j; for
    contiguous blocks the nonzero o_ij come from a linear two-pointer merge.
    All counting is exact integer arithmetic.
    """
    if n < 2:
        raise ValueError("rand index needs n >= 2 points")
    tb = _block_edges(as_change_points(truth, n), n)
    pb = _block_edges(as_change_points(pred, n), n)

    def c2(v):
        return v * (v - 1) // 2

    overlap_pairs = 0
    i = j = 0
    while i < tb.size - 1 and j < pb.size - 1:
        o = min(tb[i + 1], pb[j + 1]) - max(tb[i], pb[j])
        if o > 0:
            overlap_pairs += c2(int(o))
        if tb[i + 1] <= pb[j + 1]:
            i += 1
        else:
            j += 1
    true_pairs = sum(c2(int(v)) for v in np.diff(tb))
    pred_pairs = sum(c2(int(v)) for v in np.diff(pb))
    pairs = c2(n)
    agree = pairs - true_pairs - pred_pairs + 2 * overlap_pairs
    return agree / pairs


def deficit_cdf(scores) -> list[tuple[float, float]]:
    """Cumulative distribution of 1 - score, as sorted (deficit, fraction).

    The fraction at each distinct deficit is the share of scores with a
    deficit no larger than it; the last fraction is 1.0.  Empty input gives
    an empty list.
    """
    s = np.asarray(scores, dtype=np.float64).reshape(-1)
    if s.size == 0:
        return []
    if np.any((s < 0.0) | (s > 1.0)) or not np.all(np.isfinite(s)):
        raise ValueError("scores must lie in [0, 1]")
    deficits, counts = np.unique(1.0 - s, return_counts=True)
    frac = np.cumsum(counts) / s.size
    return [(float(d), float(f)) for d, f in zip(deficits, frac)]
