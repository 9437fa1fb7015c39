"""Alternating boundary/fit refinement for k-segmentation.

The refinement loop mirrors the two-phase structure of Lloyd-style
clustering: holding segment lines fixed, each interior boundary is moved to
the split that minimizes the pointwise cost of assigning window points to
one of the two adjacent lines; then, holding boundaries fixed, every segment
is refit to its least-squares line.  Both phases are non-increasing in total
cost, so the per-iteration cost trace descends monotonically and the loop
stops once the relative decrease falls below a tolerance.

Entry points: ``lm_refine`` polishes a caller-supplied initial segmentation,
``lm_uniform`` starts from an even split, and ``lm_multi_init`` races the
uniform start against seeded random restarts and keeps the cheapest result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InfeasibleSegmentationError
from .signal import (
    KSegment,
    LinearSegment,
    PrefixStats,
    Signal,
    _piecewise_cost,
    fit_1segment,
)


@dataclass(frozen=True)
class LmConfig:
    """Knobs of the refinement loop.

    Attributes
    ----------
    r_max : int
        Iteration cap.
    gamma : int
        Minimum points per segment; every boundary move respects it.
    epsilon : float
        Stop once an iteration fails to shave off at least this relative
        fraction of the cost.
    rng_seed : int
        Seed for the per-iteration shuffle of boundary visit order (and for
        random restarts in ``lm_multi_init``).
    """

    r_max: int = 30
    gamma: int = 2
    epsilon: float = 1e-6
    rng_seed: int = 0

    def __post_init__(self):
        if self.r_max < 1:
            raise ValueError("r_max must be >= 1")
        if self.gamma < 1:
            raise ValueError("gamma must be >= 1")
        if not (0.0 <= self.epsilon < 1.0):
            raise ValueError("epsilon must lie in [0, 1)")


@dataclass(frozen=True)
class LmTrace:
    """Cost history of one refinement run.

    ``costs[0]`` is the cost of the initial segmentation; ``costs[r]`` the
    cost after iteration r.  The sequence never increases.  ``converged`` is
    True when the relative-decrease test stopped the loop, False when the
    iteration cap did.
    """

    costs: np.ndarray
    iterations_run: int
    converged: bool

    def __post_init__(self):
        c = np.asarray(self.costs, dtype=np.float64).copy()
        c.flags.writeable = False
        object.__setattr__(self, "costs", c)


def _check_feasible(n: int, k: int, gamma: int) -> None:
    if k < 1:
        raise ValueError("k must be >= 1")
    if k * gamma > n:
        raise InfeasibleSegmentationError(
            f"cannot split {n} points into {k} segments of >= {gamma} points"
        )


def _refine(
    signal: Signal,
    stats: PrefixStats,
    init: KSegment,
    config: LmConfig,
    rng: np.random.Generator,
) -> tuple[KSegment, LmTrace]:
    k = init.k
    t, x = signal.times, signal.values
    bounds = init.boundaries.copy()
    intercepts = np.stack([s.intercept for s in init.segments])
    slopes = np.stack([s.slope for s in init.segments])

    costs = [_piecewise_cost(t, x, bounds, intercepts, slopes)]
    iterations = 0
    converged = False
    gamma = config.gamma
    for r in range(1, config.r_max + 1):
        iterations = r
        for q in rng.permutation(k - 1):
            # Window spanned by segments q and q+1; lines stay fixed, only
            # the shared boundary moves.
            l, m = int(bounds[q]), int(bounds[q + 2])
            tw = t[l:m, np.newaxis]
            r0 = x[l:m] - (intercepts[q] + tw * slopes[q])
            r1 = x[l:m] - (intercepts[q + 1] + tw * slopes[q + 1])
            c0 = (r0 * r0).sum(axis=1)
            c1 = (r1 * r1).sum(axis=1)
            # Splitting at s costs sum(c1) + cumsum(c0 - c1)[s - l - 1]; the
            # constant term drops out of the argmin.
            cum = np.cumsum(c0 - c1)
            lo, hi = l + gamma, m - gamma
            bounds[q + 1] = lo + int(np.argmin(cum[lo - l - 1 : hi - l]))
        for q in range(k):
            seg = fit_1segment(stats, int(bounds[q]), int(bounds[q + 1]))
            intercepts[q] = seg.intercept
            slopes[q] = seg.slope
        costs.append(_piecewise_cost(t, x, bounds, intercepts, slopes))
        if costs[-1] >= (1.0 - config.epsilon) * costs[-2]:
            converged = True
            break

    result = KSegment(
        tuple(
            LinearSegment(
                intercepts[q], slopes[q], int(bounds[q]), int(bounds[q + 1])
            )
            for q in range(k)
        )
    )
    return result, LmTrace(np.array(costs), iterations, converged)


def lm_refine(
    signal: Signal,
    stats: PrefixStats,
    init: KSegment,
    config: LmConfig = LmConfig(),
) -> tuple[KSegment, LmTrace]:
    """Refine an initial k-segmentation to a local cost minimum.

    ``init`` must span the signal and already satisfy the minimum segment
    size; the returned segmentation has the same number of segments.
    """
    if init.n != signal.n:
        raise ValueError(
            f"initial segmentation spans {init.n} points, signal has {signal.n}"
        )
    if stats.n != signal.n:
        raise ValueError("prefix stats do not match the signal")
    _check_feasible(signal.n, init.k, config.gamma)
    for seg in init.segments:
        if seg.end_idx - seg.start_idx < config.gamma:
            raise ValueError(
                f"initial segment [{seg.start_idx}, {seg.end_idx}) is "
                f"shorter than gamma={config.gamma}"
            )
    return _refine(
        signal, stats, init, config, np.random.default_rng(config.rng_seed)
    )


def uniform_boundaries(n: int, k: int) -> np.ndarray:
    """Even k-way split of n points; piece sizes differ by at most one."""
    return np.array([i * n // k for i in range(k + 1)], dtype=np.intp)


def lm_uniform(
    signal: Signal,
    stats: PrefixStats,
    k: int,
    config: LmConfig = LmConfig(),
) -> tuple[KSegment, LmTrace]:
    """Refine starting from an evenly spaced boundary layout."""
    _check_feasible(signal.n, k, config.gamma)
    init = _fit_boundaries(stats, uniform_boundaries(signal.n, k))
    return lm_refine(signal, stats, init, config)


def _fit_boundaries(stats: PrefixStats, bounds: np.ndarray) -> KSegment:
    return KSegment(
        tuple(
            fit_1segment(stats, int(a), int(b))
            for a, b in zip(bounds, bounds[1:])
        )
    )


def _random_boundaries(
    n: int, k: int, gamma: int, rng: np.random.Generator
) -> np.ndarray:
    """Uniform sample from all boundary sets with segments of >= gamma points.

    Feasible layouts biject onto (k-1)-subsets of a lattice of size
    n - k*gamma + k - 1: subtracting gamma*i from the i-th boundary and i-1
    from the i-th sorted pick turns "every gap >= gamma" into "strictly
    increasing", so a plain without-replacement draw is exact and needs no
    rejection loop.
    """
    slack = n - k * gamma
    picks = np.sort(rng.choice(slack + k - 1, size=k - 1, replace=False))
    interior = picks - np.arange(k - 1) + gamma * np.arange(1, k)
    return np.concatenate(([0], interior, [n])).astype(np.intp)


def lm_multi_init(
    signal: Signal,
    stats: PrefixStats,
    k: int,
    q: int = 20,
    config: LmConfig = LmConfig(),
) -> tuple[KSegment, LmTrace]:
    """Race q refinement runs and keep the cheapest converged result.

    Run 0 starts from the uniform split with the configured seed, so q=1
    reproduces ``lm_uniform`` bit for bit.  Runs 1..q-1 start from random
    feasible boundary layouts, each with an independent stream derived from
    (rng_seed, run index).  The winner is the run with the smallest final
    cost; ties go to the earlier run.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    _check_feasible(signal.n, k, config.gamma)
    n = signal.n
    best: tuple[KSegment, LmTrace] | None = None
    for run in range(q):
        if run == 0:
            init = _fit_boundaries(stats, uniform_boundaries(n, k))
            rng = np.random.default_rng(config.rng_seed)
        else:
            rng = np.random.default_rng([config.rng_seed, run])
            init = _fit_boundaries(
                stats, _random_boundaries(n, k, config.gamma, rng)
            )
        result, trace = _refine(signal, stats, init, config, rng)
        if best is None or trace.costs[-1] < best[1].costs[-1]:
            best = (result, trace)
    return best
