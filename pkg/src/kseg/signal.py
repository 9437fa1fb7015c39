"""Signal container, closed-form line fits, and O(d) interval cost queries.

A signal is an N x d dataset indexed by strictly increasing timestamps.  A
k-segmentation partitions it into k contiguous index intervals, each carrying
the least-squares line of its points.  Everything downstream (the refinement
heuristic, the merge/split baselines, the exact dynamic program) is built on
the interval queries defined here, which answer "best line" and "residual sum
of squares" for any half-open index range [i, j) in O(d) time from cumulative
moment sums.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Signal:
    """Time-ordered dataset of N points in d dimensions.

    Parameters
    ----------
    times : array-like of shape (n,)
        Strictly increasing timestamps, arbitrary units.
    values : array-like of shape (n, d) or (n,)
        Feature vectors per timestamp.  A 1-D input is treated as d=1.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        times = np.asarray(self.times, dtype=np.float64).reshape(-1).copy()
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim == 1:
            values = values[:, np.newaxis]
        if values.ndim != 2:
            raise ValueError("values must be 1-D or 2-D")
        values = np.ascontiguousarray(values)
        if times.shape[0] != values.shape[0]:
            raise ValueError(
                f"times ({times.shape[0]}) and values ({values.shape[0]}) "
                f"must have equal length"
            )
        if times.shape[0] < 1:
            raise ValueError("signal must contain at least one point")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(values)):
            raise ValueError("times and values must be finite")
        if times.shape[0] > 1 and not np.all(np.diff(times) > 0):
            raise ValueError("times must be strictly increasing")
        object.__setattr__(self, "times", _readonly(times))
        object.__setattr__(self, "values", _readonly(values.copy()))

    @property
    def n(self) -> int:
        return self.times.shape[0]

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True, eq=False)
class LinearSegment:
    """One linear piece: value(t) = intercept + t * slope on [start_idx, end_idx).

    Indices are 0-based positions in the owning signal; ``end_idx`` is
    exclusive.
    """

    intercept: np.ndarray
    slope: np.ndarray
    start_idx: int
    end_idx: int

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.intercept, dtype=np.float64)).copy()
        m = np.atleast_1d(np.asarray(self.slope, dtype=np.float64)).copy()
        if c.shape != m.shape or c.ndim != 1:
            raise ValueError("intercept and slope must be 1-D of equal length")
        if not (0 <= self.start_idx < self.end_idx):
            raise ValueError(
                f"invalid index range [{self.start_idx}, {self.end_idx})"
            )
        object.__setattr__(self, "intercept", _readonly(c))
        object.__setattr__(self, "slope", _readonly(m))
        object.__setattr__(self, "start_idx", int(self.start_idx))
        object.__setattr__(self, "end_idx", int(self.end_idx))

    def predict(self, times) -> np.ndarray:
        """Evaluate the line at the given time(s); returns shape (..., d)."""
        t = np.asarray(times, dtype=np.float64)
        return self.intercept + t[..., np.newaxis] * self.slope


@dataclass(frozen=True, eq=False)
class KSegment:
    """Ordered, contiguous list of linear segments covering an index range.

    The first segment starts at index 0 and each segment begins where its
    predecessor ends.  Interior boundaries are the change points.
    """

    segments: tuple[LinearSegment, ...] = field()

    def __post_init__(self):
        segs = tuple(self.segments)
        if len(segs) < 1:
            raise ValueError("a k-segmentation needs at least one segment")
        if segs[0].start_idx != 0:
            raise ValueError("first segment must start at index 0")
        for a, b in zip(segs, segs[1:]):
            if a.end_idx != b.start_idx:
                raise ValueError(
                    f"segments not contiguous at index {a.end_idx}"
                )
        object.__setattr__(self, "segments", segs)

    @property
    def k(self) -> int:
        return len(self.segments)

    @property
    def n(self) -> int:
        return self.segments[-1].end_idx

    @property
    def change_points(self) -> np.ndarray:
        """Interior boundary indices (exclusive ends of all but the last)."""
        return np.array([s.end_idx for s in self.segments[:-1]], dtype=np.intp)

    @property
    def boundaries(self) -> np.ndarray:
        """All k+1 boundary indices including 0 and n."""
        return np.array(
            [s.start_idx for s in self.segments] + [self.n], dtype=np.intp
        )

    def project(self, times: np.ndarray) -> np.ndarray:
        """Piecewise-linear reconstruction at the signal's own timestamps.

        ``times`` must have length ``self.n``; point q is projected with the
        parameters of the segment that owns index q.
        """
        t = np.asarray(times, dtype=np.float64)
        if t.shape[0] != self.n:
            raise ValueError("times length does not match segmentation span")
        out = np.empty((self.n, self.segments[0].intercept.shape[0]))
        for s in self.segments:
            out[s.start_idx:s.end_idx] = s.predict(t[s.start_idx:s.end_idx])
        return out

    def labels(self) -> np.ndarray:
        """Segment index per point, shape (n,)."""
        lab = np.empty(self.n, dtype=np.intp)
        for q, s in enumerate(self.segments):
            lab[s.start_idx:s.end_idx] = q
        return lab


@dataclass(frozen=True, eq=False)
class PrefixStats:
    """Cumulative moment sums of a signal, one leading zero entry each.

    ``sum_t[j] - sum_t[i]`` is the sum of timestamps over [i, j), and likewise
    for the other four arrays; this is what makes every interval query O(d).
    The source timestamps are kept so queries can shift times to the
    interval's first timestamp before forming covariances (raw second moments
    grow as n * t_max^2 and would destroy precision on long signals).
    """

    times: np.ndarray
    sum_t: np.ndarray
    sum_tt: np.ndarray
    sum_x: np.ndarray
    sum_tx: np.ndarray
    sum_xx: np.ndarray

    @property
    def n(self) -> int:
        return self.times.shape[0]

    @property
    def d(self) -> int:
        return self.sum_x.shape[1]


def build_prefix_stats(signal: Signal) -> PrefixStats:
    """Compute all cumulative moment arrays in one pass, O(n d)."""
    t, x = signal.times, signal.values
    n, d = x.shape
    sum_t = np.zeros(n + 1)
    sum_tt = np.zeros(n + 1)
    sum_x = np.zeros((n + 1, d))
    sum_tx = np.zeros((n + 1, d))
    sum_xx = np.zeros(n + 1)
    np.cumsum(t, out=sum_t[1:])
    np.cumsum(t * t, out=sum_tt[1:])
    np.cumsum(x, axis=0, out=sum_x[1:])
    np.cumsum(t[:, np.newaxis] * x, axis=0, out=sum_tx[1:])
    np.cumsum((x * x).sum(axis=1), out=sum_xx[1:])
    return PrefixStats(
        times=signal.times,
        sum_t=_readonly(sum_t),
        sum_tt=_readonly(sum_tt),
        sum_x=_readonly(sum_x),
        sum_tx=_readonly(sum_tx),
        sum_xx=_readonly(sum_xx),
    )


def _check_interval(n: int, i: int, j: int) -> None:
    if not (0 <= i < j <= n):
        raise ValueError(f"invalid interval ({i}, {j}] for n={n}")


def _centered_from_raw(n, st, stt, sx, stx, sxx, t0):
    """Shift times by t0 and center all raw interval moments.

    ``n``, ``st``, ``stt``, ``sxx``, ``t0`` share an arbitrary broadcast
    shape S; ``sx`` and ``stx`` have shape S + (d,).  Returns
    (su, suu, sux, sxx_c): centered first/second moments of shifted time,
    the time/value cross moment, and the centered squared norm.  Shifting
    before centering is what keeps the cancellation in suu and sux bounded
    by the interval's own time span rather than the absolute epoch.
    """
    n = np.asarray(n, dtype=np.float64)
    t0 = np.asarray(t0, dtype=np.float64)
    su = st - n * t0
    suu = (stt - (2.0 * t0) * st + n * t0 * t0) - su * su / n
    sux = (stx - t0[..., np.newaxis] * sx) - su[..., np.newaxis] * (
        sx / n[..., np.newaxis]
    )
    sxx_c = sxx - (sx * sx).sum(axis=-1) / n
    return su, suu, sux, sxx_c


def _rss_from_raw(n, st, stt, sx, stx, sxx, t0):
    """Least-squares residual sum of squares from raw interval moments.

    Broadcasts like ``_centered_from_raw``.  Intervals where the time
    variance vanishes (single point) fall back to the centered norm, and
    round-off below zero is clamped.
    """
    n = np.asarray(n, dtype=np.float64)
    _, suu, sux, sxx_c = _centered_from_raw(n, st, stt, sx, stx, sxx, t0)
    with np.errstate(divide="ignore", invalid="ignore"):
        rss = sxx_c - (sux * sux).sum(axis=-1) / suu
    degenerate = (n <= 1.0) | (suu <= 0.0)
    rss = np.where(degenerate, sxx_c, rss)
    return np.maximum(rss, 0.0)


def _centered_moments(stats: PrefixStats, i, j):
    """Shifted and centered interval moments; broadcasts over i and/or j.

    Returns (n, su, suu, sx, sux, sxx_c, t0) for intervals [i, j).
    """
    i = np.asarray(i, dtype=np.intp)
    j = np.asarray(j, dtype=np.intp)
    n = (j - i).astype(np.float64)
    t0 = stats.times[i]
    st = stats.sum_t[j] - stats.sum_t[i]
    stt = stats.sum_tt[j] - stats.sum_tt[i]
    sx = stats.sum_x[j] - stats.sum_x[i]
    stx = stats.sum_tx[j] - stats.sum_tx[i]
    sxx = stats.sum_xx[j] - stats.sum_xx[i]
    su, suu, sux, sxx_c = _centered_from_raw(n, st, stt, sx, stx, sxx, t0)
    return n, su, suu, sx, sux, sxx_c, t0


# Interval costs computed from prefix differences carry round-off from the
# global cumulative sums, so an interval whose true residual is zero can come
# back as ~1e-13 and, worse, differently sized fuzz can reorder merges that
# are mathematically tied.  Residuals below this fraction of the signal's
# total energy are therefore snapped to exactly 0.0 (measured fuzz tops out
# near 3e-15 of total energy; 1e-12 keeps a wide margin while staying far
# below any cost a comparison could meaningfully resolve).
RSS_SNAP_REL = 1e-12


def _interval_cost_arr(stats: PrefixStats, i, j) -> np.ndarray:
    """Residual sums of squares for intervals [i, j); broadcasts over i, j.

    Values indistinguishable from zero at the prefix representation's
    resolution are returned as exact 0.0 so that tied comparisons (merge
    ordering, DP tie-breaks) see the true tie structure.
    """
    i = np.asarray(i, dtype=np.intp)
    j = np.asarray(j, dtype=np.intp)
    n = (j - i).astype(np.float64)
    rss = _rss_from_raw(
        n,
        stats.sum_t[j] - stats.sum_t[i],
        stats.sum_tt[j] - stats.sum_tt[i],
        stats.sum_x[j] - stats.sum_x[i],
        stats.sum_tx[j] - stats.sum_tx[i],
        stats.sum_xx[j] - stats.sum_xx[i],
        stats.times[i],
    )
    return np.where(rss <= RSS_SNAP_REL * stats.sum_xx[-1], 0.0, rss)


def fit_1segment(stats: PrefixStats, i: int, j: int) -> LinearSegment:
    """Least-squares line of the sub-signal [i, j) from interval moments.

    Slope is the per-dimension covariance of time and value over the time
    variance; intercept follows from the means.  A single-point interval
    (the only way the time variance can vanish given strictly increasing
    timestamps) gets slope zero and intercept equal to the point.
    """
    _check_interval(stats.n, i, j)
    n, su, suu, sx, sux, _, t0 = _centered_moments(stats, i, j)
    mean_x = sx / n
    if n <= 1.0 or suu <= 0.0:
        slope = np.zeros_like(mean_x)
        intercept = mean_x
    else:
        slope = sux / suu
        intercept = mean_x - (su / n + t0) * slope
    return LinearSegment(intercept, slope, int(i), int(j))


def interval_cost(stats: PrefixStats, i: int, j: int) -> float:
    """Residual sum of squares of [i, j) about its least-squares line.

    Computed in O(d) from interval moments; tiny negative round-off is
    clamped to 0 so downstream argmin comparisons never see -1e-15.
    """
    _check_interval(stats.n, i, j)
    return float(_interval_cost_arr(stats, i, j))


def _piecewise_cost(
    times: np.ndarray,
    values: np.ndarray,
    bounds: np.ndarray,
    intercepts: np.ndarray,
    slopes: np.ndarray,
) -> float:
    """Pointwise squared-distance cost of a piecewise line given as arrays."""
    total = 0.0
    for q in range(len(bounds) - 1):
        lo, hi = bounds[q], bounds[q + 1]
        r = values[lo:hi] - (
            intercepts[q] + times[lo:hi, np.newaxis] * slopes[q]
        )
        total += float((r * r).sum())
    return total


def ksegment_cost(signal: Signal, f: KSegment) -> float:
    """Total squared distance of every point to its segment's stored line.

    Uses each segment's stored (intercept, slope) as-is; segments are not
    refit.  ``f`` must span the signal exactly.
    """
    if f.n != signal.n:
        raise ValueError(
            f"segmentation spans {f.n} points, signal has {signal.n}"
        )
    bounds = f.boundaries
    intercepts = np.stack([s.intercept for s in f.segments])
    slopes = np.stack([s.slope for s in f.segments])
    return _piecewise_cost(signal.times, signal.values, bounds, intercepts, slopes)


def segments_from_boundaries(stats: PrefixStats, bounds) -> KSegment:
    """Fit the least-squares line of every piece of a boundary partition."""
    bounds = np.asarray(bounds, dtype=np.intp)
    if bounds[0] != 0 or bounds[-1] != stats.n:
        raise ValueError("boundaries must start at 0 and end at n")
    return KSegment(
        tuple(
            fit_1segment(stats, int(a), int(b))
            for a, b in zip(bounds, bounds[1:])
        )
    )
