"""Seeded generator of piecewise near-linear benchmark signals.

Each segment is a random line over its own normalized time (so slopes stay
comparable across segment lengths), optionally bent by small high-degree
polynomial terms and decorated with three kinds of noise: white Gaussian,
a high-frequency sinusoid, and sparse large impulses.  All randomness
flows from one seeded generator in a fixed draw order, so a spec is fully
reproducible, and the same seed yields the same boundaries and lines
whether or not the perturbations are enabled (zeroed scales simply add
zero).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .lm import _random_boundaries
from .signal import Signal


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic signal.

    ``nonlinear_scale`` bounds the polynomial bend relative to each
    segment's linear swing; ``noise_trig_freq_range`` is in cycles per
    segment; ``impulse_prob`` applies independently per point and
    dimension; ``min_segment_frac`` sets the minimum segment length as a
    fraction of the average length n/k (floored at 2 points).

    ``jump_min`` forces a visible level change at every boundary: each
    segment's parameters are redrawn until its starting intercept sits at
    least that far (euclidean) from the previous segment's line endpoint.
    The check uses only the intercept and slope draws, so turning noise
    terms on or off never changes the accepted layout.  Set it to 0 to
    allow seamless joins.
    """

    n: int
    d: int
    k: int
    poly_degree_max: int = 4
    nonlinear_scale: float = 0.2
    noise_gaussian_sigma: float = 0.5
    noise_trig_amp: float = 0.3
    noise_trig_freq_range: tuple[float, float] = (10.0, 50.0)
    impulse_prob: float = 0.005
    impulse_amp: float = 2.5
    min_segment_frac: float = 0.3
    jump_min: float = 2.0
    rng_seed: int = 0

    def __post_init__(self):
        if self.d < 1 or self.k < 1:
            raise ValueError("d and k must be >= 1")
        if not (2 <= self.poly_degree_max <= 4):
            raise ValueError("poly_degree_max must lie in [2, 4]")
        if not (0.0 <= self.impulse_prob <= 1.0):
            raise ValueError("impulse_prob must lie in [0, 1]")
        if not (0.0 <= self.min_segment_frac <= 1.0):
            raise ValueError("min_segment_frac must lie in [0, 1]")
        lo, hi = self.noise_trig_freq_range
        if lo > hi or lo < 0:
            raise ValueError("bad trig frequency range")
        for name in ("nonlinear_scale", "noise_gaussian_sigma",
                     "noise_trig_amp", "impulse_amp", "jump_min"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.n < self.k * self.min_segment_len:
            raise ValueError(
                f"n={self.n} cannot hold {self.k} segments of >= "
                f"{self.min_segment_len} points"
            )

    @property
    def min_segment_len(self) -> int:
        return max(2, int(self.min_segment_frac * self.n / self.k))


def generate(spec: SynthSpec) -> tuple[Signal, np.ndarray]:
    """Build one signal; returns it with the true interior boundaries."""
    rng = np.random.default_rng(spec.rng_seed)
    n, d, k = spec.n, spec.d, spec.k
    bounds = _random_boundaries(n, k, spec.min_segment_len, rng)
    t = np.arange(n, dtype=np.float64)
    x = np.empty((n, d))
    degrees = np.arange(2, spec.poly_degree_max + 1)
    two_pi = 2.0 * np.pi
    prev_end = None
    for a, b in zip(bounds, bounds[1:]):
        u = (t[a:b] - t[a]) / (t[b - 1] - t[a])
        uc = u[:, np.newaxis]
        # Draw the whole per-segment block each attempt so the sequence of
        # rng calls stays fixed; only the intercept/slope pair decides
        # acceptance, keeping layouts identical under any noise settings.
        for _ in range(1000):
            intercept = rng.uniform(-10.0, 10.0, size=d)
            slope = rng.uniform(-5.0, 5.0, size=d)
            coefs = rng.uniform(-1.0, 1.0, size=(degrees.shape[0], d))
            freq = rng.uniform(*spec.noise_trig_freq_range, size=d)
            phase = rng.uniform(0.0, two_pi, size=d)
            if prev_end is None:
                break
            if np.linalg.norm(intercept - prev_end) >= spec.jump_min:
                break
        else:
            raise RuntimeError(
                f"could not place a boundary jump of at least "
                f"{spec.jump_min} after 1000 redraws"
            )
        x[a:b] = intercept + uc * slope
        # Polynomial bend: coefficient budget split across the degrees so
        # the total bend stays within nonlinear_scale of the linear swing.
        budget = spec.nonlinear_scale * np.abs(slope) / degrees.shape[0]
        for i, p in enumerate(degrees):
            x[a:b] += coefs[i] * budget * uc**p
        x[a:b] += spec.noise_trig_amp * np.sin(two_pi * freq * uc + phase)
        prev_end = intercept + slope
    x += rng.normal(0.0, spec.noise_gaussian_sigma, size=(n, d))
    hits = rng.random(size=(n, d)) < spec.impulse_prob
    signs = rng.choice(np.array([-1.0, 1.0]), size=(n, d))
    x += np.where(hits, signs * spec.impulse_amp, 0.0)
    return Signal(t, x), np.asarray(bounds[1:-1], dtype=np.intp)


def generate_corpus(
    base: SynthSpec,
    count: int,
    size_range: tuple[int, int],
    k_range: tuple[int, int],
    d_range: tuple[int, int],
    seed: int = 0,
) -> list[tuple[Signal, np.ndarray, SynthSpec]]:
    """Draw ``count`` signals with n log-uniform and k, d uniform in range.

    Item i gets its own seed derived from (seed, i), so corpora are
    reproducible and items could be generated independently.  Each entry
    is (signal, true change points, the fully resolved per-item spec).
    """
    for lo, hi in (size_range, k_range, d_range):
        if lo > hi or lo < 1:
            raise ValueError(f"empty range ({lo}, {hi})")
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        n = int(
            np.clip(
                round(np.exp(rng.uniform(*np.log(size_range)))),
                *size_range,
            )
        )
        k = int(rng.integers(k_range[0], k_range[1] + 1))
        d = int(rng.integers(d_range[0], d_range[1] + 1))
        item_seed = int(
            np.random.SeedSequence([seed, i]).generate_state(1, np.uint64)[0]
        )
        spec = replace(base, n=n, d=d, k=k, rng_seed=item_seed)
        signal, truth = generate(spec)
        out.append((signal, truth, spec))
    return out
