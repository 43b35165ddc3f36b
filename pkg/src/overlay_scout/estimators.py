"""scikit-learn style wrappers around the analysis functions.

Each estimator takes its configuration in ``__init__`` (so ``get_params``,
``set_params`` and ``clone`` work), learns state in ``fit`` and stores it in
trailing-underscore attributes.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .anomaly import (
    AnomalyConfig,
    detect_anomalies,
    rank_relays,
    top_set_frequencies,
)
from .diversity import degree_distribution, degree_distribution_from_degrees
from .exceptions import ValidationError
from .validation import check_positive, check_series_collection


def _map(func, items, n_jobs):
    if n_jobs is None or n_jobs == 1 or len(items) < 2:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(func, items))


class KSigmaDetector(BaseEstimator):
    """Flag epochs whose delay exceeds the trailing-window mean by ``k`` sigmas.

    Parameters
    ----------
    k : float
        Threshold multiplier. 3 models performance failures, 10 outages.
    window : int
        Number of preceding epochs in the baseline.
    n_jobs : int or None
        Threads used across series; results do not depend on it.
    """

    def __init__(self, k=3.0, window=60, n_jobs=None):
        self.k = k
        self.window = window
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        self.config_ = AnomalyConfig(k=self.k, window=self.window)
        self.series_ = check_series_collection(X)
        self.events_ = self._detect(self.series_)
        return self

    def _detect(self, series_map):
        per_series = _map(
            lambda s: detect_anomalies(s, self.config_),
            [series_map[p] for p in sorted(series_map)],
            self.n_jobs,
        )
        events = [e for chunk in per_series for e in chunk]
        events.sort(key=lambda e: e.key)
        return events

    def predict(self, X):
        """Events found in ``X``, sorted by (epoch, src, dst)."""
        check_is_fitted(self, "config_")
        return self._detect(check_series_collection(X))

    def fit_predict(self, X, y=None):
        return self.fit(X).events_


class RelaySelector(BaseEstimator):
    """Learn which overlay hosts most often rank among the best relays during degradations.

    ``fit`` detects degradations, ranks relays for each one by delay gain and
    aggregates top-set membership frequencies. ``predict`` then recommends,
    for each requested pair, the ``top_set_size`` most frequently useful
    relays without any fresh measurement.
    """

    def __init__(self, k=3.0, window=60, top_set_size=5, n_jobs=None):
        self.k = k
        self.window = window
        self.top_set_size = top_set_size
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        config = AnomalyConfig(k=self.k, window=self.window, top_set_size=self.top_set_size)
        detector = KSigmaDetector(k=config.k, window=config.window, n_jobs=self.n_jobs).fit(X)
        series_map = detector.series_
        self.hosts_ = sorted({h for pair in series_map for h in pair})
        self.events_ = detector.events_
        self.rankings_ = _map(
            lambda e: rank_relays(e, series_map, self.hosts_), self.events_, self.n_jobs
        )
        self.topset_ = top_set_frequencies(self.rankings_, config.top_set_size, self.hosts_)
        self.frequencies_ = dict(self.topset_.f)
        return self

    def predict(self, pairs):
        """Recommended relays for each ``(src, dst)`` pair, most useful first."""
        check_is_fitted(self, "topset_")
        out = []
        for src, dst in pairs:
            ranked = [h for h in self.topset_.order if h not in (src, dst)]
            out.append(tuple(ranked[: self.top_set_size]))
        return out


class RankDegreeRegressor(BaseEstimator):
    """Least-squares fit of ``log(degree) = intercept + exponent * log(rank)``.

    ``fit`` accepts either undirected ``(a, b)`` adjacencies or an
    ``{asn: degree}`` mapping.
    """

    def fit(self, X, y=None):
        if isinstance(X, dict):
            dist = degree_distribution_from_degrees(X)
        else:
            dist = degree_distribution(X)
        if dist.fitted_R is None:
            raise ValidationError("need at least two ASes with positive degree to fit a rank exponent")
        self.distribution_ = dist
        self.exponent_ = dist.fitted_R
        self.intercept_ = dist.intercept
        return self

    def predict(self, ranks):
        check_is_fitted(self, "exponent_")
        ranks = np.asarray(ranks, dtype=float)
        if np.any(ranks <= 0):
            raise ValidationError("ranks must be positive")
        return np.exp(self.intercept_) * ranks**self.exponent_

    def score(self, X, y=None):
        """R^2 of the log-log fit on the distribution derived from ``X``."""
        check_is_fitted(self, "exponent_")
        dist = degree_distribution_from_degrees(X) if isinstance(X, dict) else degree_distribution(X)
        d = dist.degrees.astype(float)
        if d.size < 2:
            raise ValidationError("need at least two ASes to score")
        log_d = np.log(d)
        pred = self.intercept_ + self.exponent_ * np.log(dist.ranks)
        ss_res = float(np.sum((log_d - pred) ** 2))
        ss_tot = float(np.sum((log_d - log_d.mean()) ** 2))
        return 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0


def threads_from_env(env, default=None):
    """Parse a thread cap such as ``OVERLAY_SCOUT_THREADS``; None when unset."""
    value = env.get("OVERLAY_SCOUT_THREADS")
    if value is None or value == "":
        return default
    try:
        n = int(value)
    except ValueError:
        raise ValidationError(f"OVERLAY_SCOUT_THREADS must be an integer, got {value!r}") from None
    return check_positive(n, "OVERLAY_SCOUT_THREADS", integer=True)
