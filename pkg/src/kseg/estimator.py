"""Estimator-style front end over the segmentation algorithms.

``KSegmenter`` follows the scikit-learn conventions: constructor stores
hyperparameters untouched, ``fit`` does the work and sets trailing-underscore
attributes, ``get_params``/``set_params`` (inherited) make it clonable. After
fitting, ``predict`` maps timestamps to segment labels and ``transform``
evaluates the fitted piecewise line at given timestamps.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .registry import ALGORITHM_NAMES, RunOptions, run_algorithm
from .signal import Signal, build_prefix_stats, ksegment_cost


class KSegmenter(BaseEstimator):
    """Fit a k-piece piecewise-linear model to a multivariate series.

    Parameters mirror :class:`~kseg.registry.RunOptions`; ``algorithm`` is any
    registry name (``lm``, ``lm-20inits``, ``lm-botup``, ``botup``, ``binseg``,
    ``ws``, ``sn``).
    """

    def __init__(
        self,
        k: int = 2,
        algorithm: str = "lm-botup",
        gamma: int = 2,
        epsilon: float = 1e-6,
        r_max: int = 30,
        rng_seed: int = 0,
        delta: int = 2,
        window: int = 50,
        q: int = 20,
    ):
        self.k = k
        self.algorithm = algorithm
        self.gamma = gamma
        self.epsilon = epsilon
        self.r_max = r_max
        self.rng_seed = rng_seed
        self.delta = delta
        self.window = window
        self.q = q

    def _options(self) -> RunOptions:
        return RunOptions(
            gamma=self.gamma,
            epsilon=self.epsilon,
            r_max=self.r_max,
            rng_seed=self.rng_seed,
            delta=self.delta,
            window=self.window,
            q=self.q,
        )

    def fit(self, X, t=None):
        """Segment ``X``; rows are observations in time order.

        ``X`` may be a :class:`Signal` (then ``t`` must be omitted) or an
        array of shape (n,) or (n, d) with timestamps ``t`` defaulting to
        0..n-1.
        """
        if isinstance(X, Signal):
            if t is not None:
                raise ValueError("t must be None when X is already a Signal")
            signal = X
        else:
            values = np.asarray(X, dtype=np.float64)
            if values.ndim == 1:
                values = values[:, np.newaxis]
            if values.ndim != 2:
                raise ValueError("X must be 1-D or 2-D")
            times = (
                np.arange(values.shape[0], dtype=np.float64)
                if t is None
                else np.asarray(t, dtype=np.float64)
            )
            signal = Signal(times=times, values=values)
        if self.algorithm not in ALGORITHM_NAMES:
            raise ValueError(
                f"unknown algorithm {self.algorithm!r}; "
                f"known: {', '.join(ALGORITHM_NAMES)}"
            )
        stats = build_prefix_stats(signal)
        seg = run_algorithm(
            self.algorithm, signal, stats, self.k, self._options()
        )
        self.n_features_in_ = signal.d
        self.segmentation_ = seg
        self.change_points_ = seg.change_points
        self.change_times_ = signal.times[seg.change_points]
        self.labels_ = seg.labels()
        self.cost_ = ksegment_cost(signal, seg)
        self._signal = signal
        return self

    def _check_fitted(self):
        if not hasattr(self, "segmentation_"):
            raise RuntimeError("KSegmenter is not fitted; call fit first")

    def predict(self, t) -> np.ndarray:
        """Segment index for each timestamp; boundaries belong to the
        right-hand segment, matching the fitted labeling."""
        self._check_fitted()
        t = np.asarray(t, dtype=np.float64)
        return np.searchsorted(self.change_times_, t, side="right").astype(
            np.intp
        )

    def transform(self, t) -> np.ndarray:
        """Evaluate the fitted piecewise-linear model at timestamps ``t``."""
        self._check_fitted()
        t = np.asarray(t, dtype=np.float64)
        labels = self.predict(t)
        out = np.empty((t.shape[0], self.n_features_in_), dtype=np.float64)
        for s, piece in enumerate(self.segmentation_.segments):
            sel = labels == s
            if np.any(sel):
                out[sel] = piece.predict(t[sel])
        return out

    def fit_predict(self, X, t=None) -> np.ndarray:
        """Fit and return the per-observation segment labels."""
        return self.fit(X, t=t).labels_
