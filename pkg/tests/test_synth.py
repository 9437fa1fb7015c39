"""Generator tests: determinism, noise calibration, boundary feasibility."""

from dataclasses import replace

import numpy as np
import pytest

from kseg.baselines import segment_neighborhood
from kseg.signal import build_prefix_stats, interval_cost, segments_from_boundaries, ksegment_cost
from kseg.synth import SynthSpec, generate, generate_corpus


def _clean(n, d, k, seed):
    """Spec with every perturbation zeroed: exact piecewise-linear output."""
    return SynthSpec(
        n=n, d=d, k=k,
        nonlinear_scale=0.0,
        noise_gaussian_sigma=0.0,
        noise_trig_amp=0.0,
        impulse_prob=0.0,
        rng_seed=seed,
    )


class TestSpecValidation:
    def test_rejects_overfull(self):
        with pytest.raises(ValueError, match="cannot hold"):
            SynthSpec(n=10, d=1, k=6)

    def test_rejects_bad_degree(self):
        with pytest.raises(ValueError, match="poly_degree_max"):
            SynthSpec(n=100, d=1, k=2, poly_degree_max=5)

    def test_rejects_negative_scale(self):
        with pytest.raises(ValueError, match=">= 0"):
            SynthSpec(n=100, d=1, k=2, noise_gaussian_sigma=-1.0)

    def test_min_segment_len(self):
        assert SynthSpec(n=100, d=1, k=2).min_segment_len == 15
        # Fraction so small the two-point floor kicks in.
        assert SynthSpec(
            n=100, d=1, k=2, min_segment_frac=0.01
        ).min_segment_len == 2


class TestGenerate:
    def test_deterministic(self):
        spec = SynthSpec(n=300, d=3, k=4, rng_seed=11)
        s1, b1 = generate(spec)
        s2, b2 = generate(spec)
        np.testing.assert_array_equal(b1, b2)
        np.testing.assert_array_equal(s1.values, s2.values)
        np.testing.assert_array_equal(s1.times, s2.times)

    def test_timestamps_are_indices(self):
        s, _ = generate(SynthSpec(n=50, d=1, k=2, rng_seed=0))
        np.testing.assert_array_equal(s.times, np.arange(50.0))

    def test_boundaries_respect_min_length(self):
        for seed in range(30):
            spec = SynthSpec(n=200, d=2, k=5, rng_seed=seed)
            _, b = generate(spec)
            edges = np.concatenate(([0], b, [200]))
            assert np.all(np.diff(edges) >= spec.min_segment_len)
            assert b.size == 4

    def test_noise_free_is_exactly_piecewise_linear(self):
        s, b = generate(_clean(400, 2, 3, seed=7))
        stats = build_prefix_stats(s)
        fit = segments_from_boundaries(
            stats, np.concatenate(([0], b, [400]))
        )
        assert ksegment_cost(s, fit) <= 1e-18

    def test_noise_free_recovered_by_exact_dp(self):
        for seed in (1, 2, 3):
            s, b = generate(_clean(250, 2, 4, seed=seed))
            stats = build_prefix_stats(s)
            out = segment_neighborhood(s, stats, 4)
            np.testing.assert_array_equal(out.change_points, b)
            assert ksegment_cost(s, out) <= 1e-18

    def test_same_seed_same_layout_with_or_without_noise(self):
        # Perturbation scales only multiply draws, so disabling them must
        # not shift the boundaries or the underlying lines.
        noisy, nb = generate(SynthSpec(n=300, d=2, k=3, rng_seed=21))
        clean, cb = generate(_clean(300, 2, 3, seed=21))
        np.testing.assert_array_equal(nb, cb)

    def test_gaussian_noise_calibration(self):
        # With only Gaussian noise, the expected residual of the per-segment
        # line fit is sigma^2 * d * (len - 2); check the Monte-Carlo mean
        # over 100 seeds within +-30 percent.
        sigma, d, n, k = 0.7, 2, 300, 3
        ratio_sum = 0.0
        for seed in range(100):
            spec = SynthSpec(
                n=n, d=d, k=k,
                nonlinear_scale=0.0,
                noise_gaussian_sigma=sigma,
                noise_trig_amp=0.0,
                impulse_prob=0.0,
                rng_seed=seed,
            )
            s, b = generate(spec)
            stats = build_prefix_stats(s)
            edges = np.concatenate(([0], b, [n]))
            got = sum(
                interval_cost(stats, int(a), int(bb))
                for a, bb in zip(edges, edges[1:])
            )
            want = sum(
                sigma**2 * d * (bb - a - 2) for a, bb in zip(edges, edges[1:])
            )
            ratio_sum += got / want
        assert ratio_sum / 100 == pytest.approx(1.0, abs=0.3)

    def test_nonlinear_bend_stays_within_budget(self):
        # Regenerating with the bend zeroed isolates the polynomial part;
        # per dimension it must stay within nonlinear_scale of the segment's
        # linear swing.
        scale = 0.25
        bent, b = generate(
            SynthSpec(
                n=200, d=2, k=2,
                nonlinear_scale=scale,
                noise_gaussian_sigma=0.0,
                noise_trig_amp=0.0,
                impulse_prob=0.0,
                rng_seed=33,
            )
        )
        flat, _ = generate(_clean(200, 2, 2, seed=33))
        edges = np.concatenate(([0], b, [200]))
        for a, bb in zip(edges, edges[1:]):
            swing = np.abs(flat.values[bb - 1] - flat.values[a])
            bend = np.abs(bent.values[a:bb] - flat.values[a:bb])
            assert np.all(bend <= scale * swing + 1e-9)

    def test_impulses_appear_at_expected_rate(self):
        spec = SynthSpec(
            n=4000, d=4, k=2,
            nonlinear_scale=0.0,
            noise_gaussian_sigma=0.0,
            noise_trig_amp=0.0,
            impulse_prob=0.02,
            impulse_amp=9.0,
            rng_seed=5,
        )
        noisy, _ = generate(spec)
        clean, _ = generate(replace(spec, impulse_prob=0.0))
        delta = noisy.values - clean.values
        hits = np.abs(delta) > 8.99
        rate = hits.mean()
        assert rate == pytest.approx(0.02, rel=0.2)
        np.testing.assert_allclose(np.abs(delta[hits]), 9.0)


class TestGenerateCorpus:
    def test_counts_and_ranges(self):
        base = SynthSpec(n=100, d=2, k=2)
        corpus = generate_corpus(
            base, 25, size_range=(50, 2000), k_range=(2, 10),
            d_range=(2, 16), seed=9,
        )
        assert len(corpus) == 25
        for s, b, _ in corpus:
            assert 50 <= s.n <= 2000
            assert 2 <= s.d <= 16
            assert 1 <= b.size + 1 <= 10

    def test_reproducible(self):
        base = SynthSpec(n=100, d=2, k=2)
        a = generate_corpus(base, 5, (50, 400), (2, 4), (1, 3), seed=2)
        b = generate_corpus(base, 5, (50, 400), (2, 4), (1, 3), seed=2)
        for (sa, ba, _), (sb, bb, _) in zip(a, b):
            np.testing.assert_array_equal(sa.values, sb.values)
            np.testing.assert_array_equal(ba, bb)

    def test_size_spread_is_log_scaled(self):
        # Over a wide range a log-uniform draw puts roughly half the mass
        # below the geometric midpoint.
        base = SynthSpec(n=100, d=1, k=2)
        corpus = generate_corpus(
            base, 120, (100, 10000), (2, 2), (1, 1), seed=4
        )
        sizes = np.array([s.n for s, _, _ in corpus])
        mid = int(np.sqrt(100 * 10000))
        frac_below = (sizes < mid).mean()
        assert 0.3 <= frac_below <= 0.7

    def test_rejects_empty_range(self):
        base = SynthSpec(n=100, d=1, k=2)
        with pytest.raises(ValueError, match="range"):
            generate_corpus(base, 5, (2000, 50), (2, 4), (1, 3), seed=0)
