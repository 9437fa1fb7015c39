"""Name-based dispatch over the segmentation algorithms.

The CLI and the benchmark harness refer to algorithms by short names; this
module maps those names onto the library calls, collecting every tunable
in one options bag so callers can thread flags through without caring
which algorithm consumes which knob.
"""

from __future__ import annotations

from dataclasses import dataclass

from .baselines import (
    BotUpConfig,
    WindowConfig,
    binseg,
    botup,
    lm_botup,
    segment_neighborhood,
    window_sliding,
)
from .lm import LmConfig, lm_multi_init, lm_uniform
from .signal import KSegment, PrefixStats, Signal


@dataclass(frozen=True)
class RunOptions:
    """Union of all algorithm tunables; each algorithm reads its own."""

    gamma: int = 2
    epsilon: float = 1e-6
    r_max: int = 30
    rng_seed: int = 0
    delta: int = 2
    window: int = 50
    q: int = 20

    def lm_config(self) -> LmConfig:
        return LmConfig(
            r_max=self.r_max,
            gamma=self.gamma,
            epsilon=self.epsilon,
            rng_seed=self.rng_seed,
        )


def _run_lm(signal, stats, k, opt):
    result, _ = lm_uniform(signal, stats, k, opt.lm_config())
    return result


def _run_lm_multi(signal, stats, k, opt):
    result, _ = lm_multi_init(signal, stats, k, opt.q, opt.lm_config())
    return result


def _run_lm_botup(signal, stats, k, opt):
    return lm_botup(
        signal, stats, k, opt.lm_config(), BotUpConfig(delta=opt.delta)
    )


def _run_botup(signal, stats, k, opt):
    return botup(signal, stats, k, BotUpConfig(delta=opt.delta))


def _run_binseg(signal, stats, k, opt):
    return binseg(signal, stats, k, gamma=opt.gamma)


def _run_ws(signal, stats, k, opt):
    return window_sliding(signal, stats, k, WindowConfig(w=opt.window))


def _run_sn(signal, stats, k, opt):
    return segment_neighborhood(signal, stats, k, gamma=opt.gamma)


_DISPATCH = {
    "lm": _run_lm,
    "lm-20inits": _run_lm_multi,
    "lm-botup": _run_lm_botup,
    "botup": _run_botup,
    "binseg": _run_binseg,
    "ws": _run_ws,
    "sn": _run_sn,
}

ALGORITHM_NAMES = tuple(_DISPATCH)


def run_algorithm(
    name: str,
    signal: Signal,
    stats: PrefixStats,
    k: int,
    options: RunOptions = RunOptions(),
) -> KSegment:
    """Run the named algorithm; raises KeyError-style ValueError on typos."""
    try:
        fn = _DISPATCH[name]
    except KeyError:
        known = ", ".join(ALGORITHM_NAMES)
        raise ValueError(f"unknown algorithm {name!r} (known: {known})")
    return fn(signal, stats, k, options)
