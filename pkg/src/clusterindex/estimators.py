"""Disjoint and sliding blocks estimators of cluster indices, the tail
empirical process, and empirical diagnostics for the anticlustering (DH),
summability (S) and small-jump (ANSJB) conditions."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Iterable

import numpy as np

from .functionals import FunctionalSpec, disjoint_sum, sliding_sum
from .series import (
    BlockScheme,
    Series,
    SchemeError,
    Threshold,
    exceedance_count,
    exceeds,
    order_statistic,
)

MODES = ("disjoint", "sliding", "sliding-pseudo", "sliding-quasi")


class DegenerateThresholdError(ValueError):
    """No observation exceeds the threshold, so nothing can be normalised."""


class ParameterError(ValueError):
    pass


@dataclass(frozen=True)
class EstimateResult:
    value: float
    functional: FunctionalSpec
    scheme: BlockScheme
    threshold: Threshold
    mode: str
    exceedance_count_observed: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "functional": str(self.functional),
            "mode": self.mode,
            "scheme": {**asdict(self.scheme), "m_n": self.scheme.m_n, "q_n": self.scheme.q_n},
            "threshold": asdict(self.threshold),
            "exceedance_count_observed": self.exceedance_count_observed,
        }


def _order_threshold(series: Series, scheme: BlockScheme) -> Threshold:
    if scheme.n != series.n:
        raise SchemeError(f"scheme is for n = {scheme.n}, series has n = {series.n}")
    thr = order_statistic(series.norms, scheme.k)
    if not thr.value > 0:
        raise DegenerateThresholdError(
            f"order statistic ||X||_(n-k:n) is {thr.value}; at most k of the norms are positive"
        )
    return thr


def estimate_disjoint(series: Series, functional: FunctionalSpec, scheme: BlockScheme) -> EstimateResult:
    """(1/k) sum over disjoint blocks of H(block / ||X||_(n-k:n))."""
    thr = _order_threshold(series, scheme)
    value = disjoint_sum(functional, series, scheme, thr.value) / scheme.k
    return EstimateResult(value, functional, scheme, thr, "disjoint",
                          exceedance_count(series.norms, thr.value))


def estimate_sliding(series: Series, functional: FunctionalSpec, scheme: BlockScheme) -> EstimateResult:
    """(1/(r_n k)) sum over all sliding windows of H(window / ||X||_(n-k:n))."""
    thr = _order_threshold(series, scheme)
    value = sliding_sum(functional, series, scheme, thr.value) / (scheme.r_n * scheme.k)
    return EstimateResult(value, functional, scheme, thr, "sliding",
                          exceedance_count(series.norms, thr.value))


def _fixed_threshold_scheme(series: Series, r_n: int, c: float) -> tuple[BlockScheme, int]:
    if not c > 0:
        raise ParameterError(f"threshold c must be > 0, got {c}")
    n = series.n
    if not 1 <= r_n <= n:
        raise SchemeError(f"r_n must be in [1, {n}], got {r_n}")
    observed = exceedance_count(series.norms, c)
    # k is informational here: the number of exceedances of c, at least 1
    return BlockScheme(n, int(r_n), max(1, min(observed, n - 1))), observed


def estimate_sliding_pseudo(series: Series, functional: FunctionalSpec, r_n: int, c: float,
                            p: float) -> EstimateResult:
    """Sliding estimator with a known threshold ``c`` and tail probability
    ``p = P(||X_0|| > c)``: divides by q_n r_n p."""
    if not 0 < p < 1:
        raise ParameterError(f"p must lie in (0, 1), got {p}")
    scheme, observed = _fixed_threshold_scheme(series, r_n, c)
    value = sliding_sum(functional, series, scheme, c) / (scheme.q_n * scheme.r_n * p)
    return EstimateResult(value, functional, scheme, Threshold(float(c), "user-supplied"),
                          "sliding-pseudo", observed)


def estimate_sliding_quasi(series: Series, functional: FunctionalSpec, r_n: int,
                           c: float) -> EstimateResult:
    """Sliding estimator normalised by the observed number of exceedances of
    ``c`` among X_1..X_{q_n}."""
    scheme, observed = _fixed_threshold_scheme(series, r_n, c)
    count = exceedance_count(series.norms[:scheme.q_n], c)
    if count == 0:
        raise DegenerateThresholdError(f"no exceedance of c = {c} among the first q_n = {scheme.q_n} points")
    value = sliding_sum(functional, series, scheme, c) / (scheme.r_n * count)
    return EstimateResult(value, functional, scheme, Threshold(float(c), "user-supplied"),
                          "sliding-quasi", observed)


def tail_empirical_process(series: Series, scheme: BlockScheme,
                           s_grid: Iterable[float]) -> list[tuple[float, float]]:
    """(s, T_n(s)) with T_n(s) = (1/k) #{j <= q_n : ||X_j|| > s ||X||_(n-k:n)}."""
    grid = [float(s) for s in s_grid]
    if not grid:
        raise ParameterError("empty s grid")
    if any(not s > 0 for s in grid):
        raise ParameterError("grid points must be positive")
    thr = _order_threshold(series, scheme)
    scaled = series.norms[:scheme.q_n] / thr.value
    return [(s, np.count_nonzero(scaled > s) / scheme.k) for s in grid]


def _require_exceedances(series: Series, c: float) -> float:
    if not c > 0:
        raise ParameterError(f"threshold c must be > 0, got {c}")
    rate = exceedance_count(series.norms, c) / series.n
    if rate == 0:
        raise DegenerateThresholdError(f"no exceedance of c = {c}")
    return rate


def dh_diagnostic(series: Series, c: float, x: float, y: float, k_grid: Iterable[int],
                  r_n: int) -> list[tuple[int, float]]:
    """Estimate P(max_{k<=|j|<=r_n} ||X_j|| > c x | ||X_0|| > c y) for each k.

    Anchors are the positions t with r_n < t <= n - r_n (1-based) where
    ||X_t|| > c y, so both sides of every anchor are fully observed.
    """
    ks = [int(k) for k in k_grid]
    n = series.n
    if any(not 1 <= k <= r_n for k in ks):
        raise ParameterError(f"k grid must lie in [1, r_n = {r_n}]")
    if not c > 0 or not x > 0 or not y > 0:
        raise ParameterError("c, x and y must be positive")
    norms = series.norms
    anchors = np.flatnonzero(exceeds(norms, c * y))
    anchors = anchors[(anchors >= r_n) & (anchors < n - r_n)]
    if anchors.size == 0:
        raise DegenerateThresholdError("no anchor exceedance with a full window on both sides")
    hit = exceeds(norms, c * x)
    lag = np.arange(1, r_n + 1)
    right = hit[anchors[:, None] + lag]          # [a, j-1] -> lag +j
    left = hit[anchors[:, None] - lag]
    either = right | left
    # far[a, k-1] = any exceedance at |j| in [k, r_n]
    far = np.flip(np.logical_or.accumulate(np.flip(either, axis=1), axis=1), axis=1)
    return [(k, float(far[:, k - 1].mean())) for k in ks]


def s_condition_diagnostic(series: Series, c: float, s: float, t: float, m_grid: Iterable[int],
                           r_n: int) -> list[tuple[int, float]]:
    """Estimate sum_{j=m}^{r_n} P(||X_0|| > cs, ||X_j|| > ct) / P(||X_0|| > c)."""
    ms = [int(m) for m in m_grid]
    if any(m < 0 for m in ms):
        raise ParameterError("m grid must be nonnegative")
    p = _require_exceedances(series, c)
    n = series.n
    a = exceeds(series.norms, c * s)
    b = exceeds(series.norms, c * t)
    lags = min(r_n, n - 1)
    pair = np.array([np.count_nonzero(a[:n - j] & b[j:]) / (n - j) for j in range(lags + 1)])
    tail = np.concatenate((np.cumsum(pair[::-1])[::-1], [0.0])) / p
    return [(m, float(tail[min(m, lags + 1)])) for m in ms]


def ansjb_diagnostic(series: Series, c: float, eta: float, epsilon_grid: Iterable[float],
                     r_n: int) -> list[tuple[float, float]]:
    """Estimate P(sum_{j<=r_n} ||X_j|| 1{||X_j|| <= eps c} > eta c) / (r_n P(||X_0|| > c))
    over disjoint blocks."""
    eps_grid = [float(e) for e in epsilon_grid]
    if any(not 0 < e <= 1 for e in eps_grid):
        raise ParameterError("epsilon grid must lie in (0, 1]")
    if not eta > 0:
        raise ParameterError(f"eta must be > 0, got {eta}")
    p = _require_exceedances(series, c)
    m = series.n // r_n
    if m == 0:
        raise SchemeError(f"r_n = {r_n} exceeds n = {series.n}")
    blocks = (series.norms[:m * r_n] / c).reshape(m, r_n)
    out = []
    for e in eps_grid:
        small = np.where(blocks <= e, blocks, 0.0).sum(axis=1)
        out.append((e, np.count_nonzero(small > eta) / m / (r_n * p)))
    return out
