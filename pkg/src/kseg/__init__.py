"""Offline k-segmentation of multi-dimensional signals into linear pieces."""

from .baselines import (
    BotUpConfig,
    WindowConfig,
    binseg,
    botup,
    lm_botup,
    segment_neighborhood,
    window_sliding,
)
from .estimator import KSegmenter
from .exceptions import (
    InfeasibleSegmentationError,
    PeakSelectionError,
    SignalFormatError,
)
from .lm import LmConfig, LmTrace, lm_multi_init, lm_refine, lm_uniform
from .metrics import covering_score, deficit_cdf, rand_index
from .registry import ALGORITHM_NAMES, RunOptions, run_algorithm
from .signal import (
    KSegment,
    LinearSegment,
    PrefixStats,
    Signal,
    build_prefix_stats,
    fit_1segment,
    interval_cost,
    ksegment_cost,
    segments_from_boundaries,
)
from .synth import SynthSpec, generate, generate_corpus

__all__ = [
    "ALGORITHM_NAMES",
    "BotUpConfig",
    "InfeasibleSegmentationError",
    "KSegment",
    "KSegmenter",
    "LinearSegment",
    "LmConfig",
    "LmTrace",
    "PeakSelectionError",
    "PrefixStats",
    "RunOptions",
    "Signal",
    "SignalFormatError",
    "SynthSpec",
    "WindowConfig",
    "binseg",
    "botup",
    "build_prefix_stats",
    "covering_score",
    "deficit_cdf",
    "fit_1segment",
    "generate",
    "generate_corpus",
    "interval_cost",
    "ksegment_cost",
    "lm_botup",
    "lm_multi_init",
    "lm_refine",
    "lm_uniform",
    "rand_index",
    "run_algorithm",
    "segment_neighborhood",
    "segments_from_boundaries",
    "window_sliding",
]

__version__ = "0.1.0"
