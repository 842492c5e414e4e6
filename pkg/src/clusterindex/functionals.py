"""Cluster functionals H evaluated on scaled blocks.

Every functional is evaluated as H(x / s): the block is divided by the scale
first and the functional is then applied at level 1. Sliding and disjoint
sums run in O(n) total and reproduce the per-window evaluation exactly.
"""

from __future__ import annotations

import math
import sys
from collections import deque
from dataclasses import dataclass

import numpy as np

from .series import DataError, Series, compute_norms, exceeds

EXC = "exc"
EXTREMAL = "extremal"
CLUSTER_SIZE = "cluster-size"
STOP_LOSS = "stop-loss"
LARGE_DEV = "large-dev"
RUIN = "ruin"

KINDS = (EXC, EXTREMAL, CLUSTER_SIZE, STOP_LOSS, LARGE_DEV, RUIN)
CLASS_A = frozenset({EXTREMAL, CLUSTER_SIZE, STOP_LOSS})
CLASS_B = frozenset({LARGE_DEV, RUIN})
UNIVARIATE = frozenset({STOP_LOSS, LARGE_DEV, RUIN})

_EPS = sys.float_info.epsilon


class DimensionError(ValueError):
    """A univariate functional was applied to a multivariate series."""


class ScaleError(ValueError):
    """Non-positive scale."""


@dataclass(frozen=True)
class FunctionalSpec:
    """Which cluster functional, with its parameter where it has one.

    ``m`` is the cluster size for ``cluster-size``; ``eta`` the stop-loss level.
    """

    kind: str
    m: int | None = None
    eta: float | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown functional {self.kind!r}; expected one of {KINDS}")
        if self.kind == CLUSTER_SIZE:
            if self.m is None or int(self.m) != self.m or self.m < 1:
                raise ValueError(f"cluster-size needs an integer m >= 1, got {self.m!r}")
            object.__setattr__(self, "m", int(self.m))
        elif self.m is not None:
            raise ValueError(f"{self.kind} takes no m parameter")
        if self.kind == STOP_LOSS:
            if self.eta is None or not self.eta > 0 or not math.isfinite(self.eta):
                raise ValueError(f"stop-loss needs eta > 0, got {self.eta!r}")
            object.__setattr__(self, "eta", float(self.eta))
        elif self.eta is not None:
            raise ValueError(f"{self.kind} takes no eta parameter")

    @property
    def requires_univariate(self) -> bool:
        return self.kind in UNIVARIATE

    @property
    def functional_class(self) -> str:
        """``"A"`` (support separated from zero), ``"B"`` (1{K > 1}) or ``"exc"``."""
        if self.kind in CLASS_A:
            return "A"
        if self.kind in CLASS_B:
            return "B"
        return "exc"

    @property
    def requires_ansjb(self) -> bool:
        """Class-B functionals need negligible small jumps for valid inference."""
        return self.kind in CLASS_B

    @property
    def is_indicator(self) -> bool:
        return self.kind != EXC

    def __str__(self) -> str:
        if self.kind == CLUSTER_SIZE:
            return f"{CLUSTER_SIZE}:m={self.m}"
        if self.kind == STOP_LOSS:
            return f"{STOP_LOSS}:eta={self.eta:g}"
        return self.kind


def parse_functional(text: str) -> FunctionalSpec:
    """Parse ``exc``, ``extremal``, ``cluster-size:m=3``, ``stop-loss:eta=1.5``,
    ``large-dev`` or ``ruin``."""
    text = text.strip()
    kind, _, params = text.partition(":")
    kw: dict[str, float | int] = {}
    if params:
        for item in params.split(","):
            key, eq, val = item.partition("=")
            key = key.strip()
            if not eq or key not in ("m", "eta"):
                raise ValueError(f"bad functional parameter {item!r} in {text!r}")
            kw[key] = int(val) if key == "m" else float(val)
    return FunctionalSpec(kind.strip(), **kw)


@dataclass(frozen=True)
class ScaledBlock:
    """Window X_{start+1..start+length} of a series, divided by ``scale``."""

    series: Series
    start: int
    length: int
    scale: float = 1.0

    def __post_init__(self):
        if not self.scale > 0:
            raise ScaleError(f"scale must be > 0, got {self.scale}")
        if self.start < 0 or self.length < 1 or self.start + self.length > self.series.n:
            raise ValueError(
                f"block [{self.start}, {self.start + self.length}) outside series of length {self.series.n}"
            )


# -- kernels at scale 1 -----------------------------------------------------

def _neumaier_cumsum(values) -> np.ndarray:
    """Prefix sums with Neumaier compensation; ``out[0] = 0``."""
    out = np.empty(len(values) + 1)
    out[0] = 0.0
    total = 0.0
    comp = 0.0
    for i, v in enumerate(values.tolist() if isinstance(values, np.ndarray) else values):
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t
        out[i + 1] = total + comp
    return out


def _ruin_level(values) -> float:
    """sup_i (sum_{j<=i} x_j)_+ over a finite block."""
    partial = _neumaier_cumsum(values)
    return max(0.0, float(partial[1:].max()))


def _apply(functional: FunctionalSpec, norms: np.ndarray, values: np.ndarray | None) -> float:
    kind = functional.kind
    if kind == EXC:
        return float(np.count_nonzero(norms > 1.0))
    if kind == EXTREMAL:
        return float(norms.max() > 1.0)
    if kind == CLUSTER_SIZE:
        return float(np.count_nonzero(norms > 1.0) == functional.m)
    if kind == STOP_LOSS:
        return float(math.fsum(np.maximum(values - 1.0, 0.0)) > functional.eta)
    if kind == LARGE_DEV:
        return float(max(math.fsum(values), 0.0) > 1.0)
    return float(_ruin_level(values) > 1.0)


def _check_dims(functional: FunctionalSpec, dim: int) -> None:
    if functional.requires_univariate and dim != 1:
        raise DimensionError(f"{functional} is defined for univariate series only, got d = {dim}")


def evaluate(functional: FunctionalSpec, block, scale: float | None = None,
             norm_kind: str = "euclidean") -> float:
    """H(block / scale).

    ``block`` is a :class:`ScaledBlock` (its own scale is used) or an array of
    points: 1-d for univariate values, ``(r, d)`` otherwise.
    """
    if isinstance(block, ScaledBlock):
        if scale is not None:
            raise ValueError("a ScaledBlock carries its own scale")
        s = block.scale
        sl = slice(block.start, block.start + block.length)
        norms = block.series.norms[sl]
        dim = block.series.dim
        values = block.series.points[sl, 0] if dim == 1 else None
    else:
        s = 1.0 if scale is None else float(scale)
        arr = np.asarray(block, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        dim = arr.shape[1]
        norms = compute_norms(arr, norm_kind)
        values = arr[:, 0] if dim == 1 else None
    if not s > 0:
        raise ScaleError(f"scale must be > 0, got {s}")
    _check_dims(functional, dim)
    return _apply(functional, norms / s, None if values is None else values / s)


def evaluate_paths(functional: FunctionalSpec, paths: np.ndarray) -> np.ndarray:
    """Vectorised H at scale 1 on the rows of a ``(batch, length)`` array of
    univariate sequences (zero padding implied outside the rows)."""
    paths = np.asarray(paths, dtype=float)
    kind = functional.kind
    norms = np.abs(paths)
    if kind == EXC:
        return np.count_nonzero(norms > 1.0, axis=1).astype(float)
    if kind == EXTREMAL:
        return (norms.max(axis=1) > 1.0).astype(float)
    if kind == CLUSTER_SIZE:
        return (np.count_nonzero(norms > 1.0, axis=1) == functional.m).astype(float)
    if kind == STOP_LOSS:
        return (np.maximum(paths - 1.0, 0.0).sum(axis=1) > functional.eta).astype(float)
    return (k_functional(functional, paths) > 1.0).astype(float)


def k_functional(functional: FunctionalSpec, paths: np.ndarray) -> np.ndarray:
    """The 1-homogeneous K behind a class-B functional H = 1{K > 1}."""
    paths = np.asarray(paths, dtype=float)
    if functional.kind == LARGE_DEV:
        return np.maximum(paths.sum(axis=1), 0.0)
    if functional.kind == RUIN:
        return np.maximum(np.cumsum(paths, axis=1).max(axis=1), 0.0)
    raise ValueError(f"{functional} is not a class-B functional")


# -- O(n) sliding machinery ------------------------------------------------

def sliding_max(values, width: int) -> np.ndarray:
    """Maximum of every window of ``width`` consecutive values (monotonic deque)."""
    vals = np.asarray(values, dtype=float).tolist()
    n = len(vals)
    if not 1 <= width <= n:
        raise ValueError(f"width must be in [1, {n}], got {width}")
    out = np.empty(n - width + 1)
    dq: deque[int] = deque()
    for i, v in enumerate(vals):
        while dq and vals[dq[-1]] <= v:
            dq.pop()
        dq.append(i)
        if dq[0] <= i - width:
            dq.popleft()
        if i >= width - 1:
            out[i - width + 1] = vals[dq[0]]
    return out


def _window_counts(mask: np.ndarray, width: int) -> np.ndarray:
    c = np.concatenate(([0], np.cumsum(mask, dtype=np.int64)))
    return c[width:] - c[:-width]


def _window_sums(values: np.ndarray, width: int) -> np.ndarray:
    """Running window sums with Neumaier compensation, O(n)."""
    vals = values.tolist()
    q = len(vals) - width + 1
    out = np.empty(q)
    total = 0.0
    comp = 0.0

    def add(v):
        nonlocal total, comp
        t = total + v
        if abs(total) >= abs(v):
            comp += (total - t) + v
        else:
            comp += (v - t) + total
        total = t

    for j in range(width):
        add(vals[j])
    out[0] = total + comp
    for i in range(1, q):
        add(vals[i + width - 1])
        add(-vals[i - 1])
        out[i] = total + comp
    return out


def _resolve(approx: np.ndarray, target: float, tol: float, exact) -> np.ndarray:
    """Indicators approx > target; windows within ``tol`` of the target are
    re-evaluated with ``exact(i)``."""
    hits = approx > target
    for i in np.flatnonzero(np.abs(approx - target) <= tol):
        hits[i] = exact(int(i)) > 0
    return hits


def _block_length(scheme) -> int:
    return int(getattr(scheme, "r_n", scheme))


def _prepare(functional: FunctionalSpec, series: Series, scheme, s: float) -> int:
    if not s > 0:
        raise ScaleError(f"scale must be > 0, got {s}")
    _check_dims(functional, series.dim)
    r = _block_length(scheme)
    if not 1 <= r <= series.n:
        raise ValueError(f"block length must be in [1, {series.n}], got {r}")
    return r


def sliding_sum(functional: FunctionalSpec, series: Series, scheme, s: float) -> float:
    """Sum of H(X_{i+1..i+r}/s) over all q_n = n - r + 1 windows, in O(n).

    ``scheme`` is a :class:`~clusterindex.series.BlockScheme` or a block length.
    """
    r = _prepare(functional, series, scheme, s)
    n = series.n
    kind = functional.kind
    if kind in (EXC, CLUSTER_SIZE):
        counts = _window_counts(exceeds(series.norms, s), r)
        if kind == EXC:
            return float(counts.sum())
        return float(np.count_nonzero(counts == functional.m))
    if kind == EXTREMAL:
        return float(np.count_nonzero(sliding_max(series.norms / s, r) > 1.0))

    x = series.values / s

    def exact(i):
        return evaluate(functional, x[i:i + r])

    total_abs = math.fsum(np.abs(x))
    slack = 8 * n * _EPS * _EPS * total_abs
    if kind == STOP_LOSS:
        sums = _window_sums(np.maximum(x - 1.0, 0.0), r)
        tol = 16 * _EPS * (functional.eta + 1.0) + slack
        return float(np.count_nonzero(_resolve(sums, functional.eta, tol, exact)))
    if kind == LARGE_DEV:
        sums = _window_sums(x, r)
        tol = 16 * _EPS * 2.0 + slack
        return float(np.count_nonzero(_resolve(sums, 1.0, tol, exact)))
    # ruin: max over the window of prefix sums, minus the prefix before it
    prefix = _neumaier_cumsum(x)
    levels = sliding_max(prefix[1:], r) - prefix[:n - r + 1]
    tol = 32 * _EPS * (float(np.abs(prefix).max()) + 1.0) + slack
    return float(np.count_nonzero(_resolve(levels, 1.0, tol, exact)))


def disjoint_sum(functional: FunctionalSpec, series: Series, scheme, s: float) -> float:
    """Sum of H over the m_n = floor(n/r) disjoint blocks; the tail is dropped."""
    r = _prepare(functional, series, scheme, s)
    m = series.n // r
    kind = functional.kind
    if kind in (EXC, CLUSTER_SIZE, EXTREMAL):
        norms = (series.norms[:m * r] / s).reshape(m, r)
        if kind == EXTREMAL:
            return float(np.count_nonzero(norms.max(axis=1) > 1.0))
        counts = np.count_nonzero(norms > 1.0, axis=1)
        if kind == EXC:
            return float(counts.sum())
        return float(np.count_nonzero(counts == functional.m))
    x = series.values[:m * r] / s
    return float(sum(_apply(functional, None, x[i * r:(i + 1) * r]) for i in range(m)))


def window_weights(n: int, r_n: int) -> np.ndarray:
    """Number of sliding windows containing each position j = 1..n."""
    q = n - r_n + 1
    j = np.arange(1, n + 1)
    return np.minimum(j, q) - np.maximum(1, j - r_n + 1) + 1
