"""Tail-process models with analytic and Monte Carlo cluster indices.

A model describes the spectral tail process Theta of a positive stationary
series built from Pareto(alpha) innovations. Paths are stored on the lags
-L..L as rows of a ``(batch, 2L + 1)`` array whose middle column is lag 0;
the tail process is Y = R * Theta with R standard Pareto(alpha) independent
of Theta.

Monte Carlo work is split into fixed-size chunks, each drawing from its own
stream ``SeedSequence([seed, stream, chunk])``, so results depend only on
``(model, samples, seed)``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterator

import numpy as np

from .functionals import (
    CLUSTER_SIZE,
    EXC,
    EXTREMAL,
    LARGE_DEV,
    RUIN,
    FunctionalSpec,
    evaluate_paths,
    k_functional,
)
from .simulate import ProcessSpec, generate_values, pareto_sample, parse_model

CHUNK = 20_000

# stream identifiers; distinct ids give independent random streams
_S_THETA, _S_Q, _S_NU, _S_PI, _S_SUM, _S_VAR, _S_EXC, _S_RATIO = 1, 2, 3, 4, 5, 6, 7, 8
_S_IDENTITY = 100


class UnsupportedFunctionalError(ValueError):
    pass


class PathologicalModelError(RuntimeError):
    """Rejection sampling accepts too rarely to be useful."""


class InsufficientSampleError(RuntimeError):
    pass


def lag_truncation(kind: str, alpha: float, rho: float | None = None,
                   coeffs: tuple[float, ...] | None = None) -> int:
    """Half-width L of the stored lag window.

    For AR(1), rho^L < 1e-9 and the mass of sum_j P(|Y_j| > 1) beyond lag L,
    2 rho^(alpha(L+1)) / (1 - rho^alpha), is below 1e-9.
    """
    if kind == "iid":
        return 1
    if kind == "ma":
        return max(1, len(coeffs) - 1)
    decay = rho ** alpha
    lag = 1
    while rho ** lag >= 1e-9 or 2 * decay ** (lag + 1) / (1 - decay) >= 1e-9:
        lag += 1
    return lag


@dataclass(frozen=True)
class TailProcessModel:
    kind: str
    alpha: float
    rho: float | None = None
    coeffs: tuple[float, ...] | None = None
    lag: int = field(init=False)

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.kind == "ar1":
            if self.rho is None or not 0 < self.rho < 1:
                raise ValueError(f"ar1 needs 0 < rho < 1, got {self.rho}")
        elif self.kind == "ma":
            if not self.coeffs or self.coeffs[0] != 1 or any(c < 0 for c in self.coeffs):
                raise ValueError(f"ma needs nonnegative coeffs with coeffs[0] = 1, got {self.coeffs}")
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        elif self.kind != "iid":
            raise ValueError(f"unknown model kind {self.kind!r}")
        object.__setattr__(self, "lag", lag_truncation(self.kind, self.alpha, self.rho, self.coeffs))

    @classmethod
    def parse(cls, text: str) -> "TailProcessModel":
        return cls(**parse_model(text))

    @property
    def width(self) -> int:
        return 2 * self.lag + 1

    def process(self, n: int, seed: int = 0) -> ProcessSpec:
        """The simulable series whose tail process this model describes."""
        return ProcessSpec(self.kind, self.alpha, n=n, rho=self.rho, coeffs=self.coeffs, seed=seed)

    def describe(self) -> str:
        return self.process(1).describe()


@dataclass(frozen=True)
class MCEstimate:
    estimate: float
    stderr: float
    samples: int
    analytic: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


# -- samplers -----------------------------------------------------------------

def _ma_templates(coeffs: tuple[float, ...], lag: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """One spectral path per innovation position k (the big shock sits at
    time -k), with its probability c_k^alpha / sum_i c_i^alpha."""
    c = np.asarray(coeffs)
    q = len(c) - 1
    weights = c ** alpha
    weights = weights / weights.sum()
    templates = np.zeros((q + 1, 2 * lag + 1))
    for k in range(q + 1):
        if c[k] == 0:
            continue
        for t in range(-k, q - k + 1):
            templates[k, lag + t] = c[t + k] / c[k]
    return templates, weights


def sample_spectral_paths(model: TailProcessModel, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` draws of (Theta_{-L}, ..., Theta_L)."""
    lag = model.lag
    theta = np.zeros((size, 2 * lag + 1))
    if model.kind == "iid":
        theta[:, lag] = 1.0
    elif model.kind == "ar1":
        rho = model.rho
        theta[:, lag:] = rho ** np.arange(lag + 1)
        # backward: Theta_{-j} = rho^{-j} while a survival event of probability
        # rho^alpha per step holds; depth D has P(D >= j) = rho^(alpha j)
        u = 1.0 - rng.random(size)
        depth = np.minimum(np.floor(np.log(u) / (model.alpha * math.log(rho))), lag)
        j = np.arange(1, lag + 1)
        back = np.where(j[None, :] <= depth[:, None], rho ** (-j.astype(float)), 0.0)
        theta[:, lag - j] = back
    else:
        templates, weights = _ma_templates(model.coeffs, lag, model.alpha)
        theta[:] = templates[rng.choice(len(weights), size=size, p=weights)]
    return theta


def sample_tail_paths(model: TailProcessModel, size: int, rng: np.random.Generator
                      ) -> tuple[np.ndarray, np.ndarray]:
    """``size`` tail process paths Y and their spectral parts Theta."""
    radius = pareto_sample(model.alpha, rng, size)
    theta = sample_spectral_paths(model, size, rng)
    return radius[:, None] * theta, theta


def sample_tail_path(model: TailProcessModel, rng: np.random.Generator) -> np.ndarray:
    """One path (Y_{-L}, ..., Y_L)."""
    return sample_tail_paths(model, 1, rng)[0][0]


def _stream(seed: int, stream: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(stream), int(chunk)]))


def _chunks(model: TailProcessModel, samples: int, seed: int, stream: int
            ) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    done = 0
    index = 0
    while done < samples:
        size = min(CHUNK, samples - done)
        yield sample_tail_paths(model, size, _stream(seed, stream, index))
        done += size
        index += 1


def _collect(model: TailProcessModel, samples: int, seed: int, stream: int,
             stat: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> np.ndarray:
    """Per-path statistic(s) over ``samples`` paths, concatenated in chunk order."""
    return np.concatenate([stat(y, theta) for y, theta in _chunks(model, samples, seed, stream)])


def _mean(values: np.ndarray) -> tuple[float, float]:
    n = values.shape[0]
    mean = float(values.mean())
    se = float(values.std(ddof=1) / math.sqrt(n)) if n > 1 else math.inf
    return mean, se


# -- anchors ------------------------------------------------------------------

def infargmax(path, origin: int | None = None) -> int:
    """First index at which the norm of ``path`` attains its maximum,
    relative to ``origin`` (default: the middle element)."""
    arr = np.asarray(path, dtype=float)
    norms = np.abs(arr) if arr.ndim == 1 else np.linalg.norm(arr, axis=1)
    if norms.size == 0 or not norms.max() > 0:
        raise ValueError("infargmax is undefined for an all-zero path")
    if origin is None:
        origin = norms.size // 2
    return int(np.argmax(norms)) - origin


def _anchored(y: np.ndarray, lag: int) -> np.ndarray:
    return np.argmax(np.abs(y), axis=1) == lag


def _first_exceedance_at_zero(y: np.ndarray, lag: int) -> np.ndarray:
    """Y*_{-inf,-1} <= 1."""
    return np.abs(y[:, :lag]).max(axis=1) <= 1.0


def _exc(y: np.ndarray) -> np.ndarray:
    return np.count_nonzero(np.abs(y) > 1.0, axis=1).astype(float)


# -- analytic values ----------------------------------------------------------

def analytic_theta(model: TailProcessModel) -> float:
    """P(sup_{j>=1} |Y_j| <= 1) in closed form."""
    if model.kind == "iid":
        return 1.0
    if model.kind == "ar1":
        return 1.0 - model.rho ** model.alpha
    templates, weights = _ma_templates(model.coeffs, model.lag, model.alpha)
    forward = templates[:, model.lag + 1:].max(axis=1)
    return float(np.sum(weights * (1.0 - np.minimum(1.0, forward ** model.alpha))))


def analytic_sum_exceedance(model: TailProcessModel) -> float:
    """sum_j P(|Y_j| > 1) = sum_j E[min(1, |Theta_j|^alpha)]."""
    if model.kind == "iid":
        return 1.0
    if model.kind == "ar1":
        d = model.rho ** model.alpha
        return (1.0 + d) / (1.0 - d)
    templates, weights = _ma_templates(model.coeffs, model.lag, model.alpha)
    return float(np.sum(weights * np.minimum(1.0, templates ** model.alpha).sum(axis=1)))


def analytic_cluster_size(model: TailProcessModel, m: int) -> float | None:
    """pi(m) = P(exc(Y) = m | Y*_{-inf,-1} <= 1) where a closed form is known."""
    if model.kind == "iid":
        return 1.0 if m == 1 else 0.0
    if model.kind == "ar1":
        # no backward path; exc counts j >= 0 with R rho^j > 1
        d = model.rho ** model.alpha
        return d ** (m - 1) * (1.0 - d)
    return None


def _analytic_exc_prob(model: TailProcessModel, m: int) -> float | None:
    """P(exc(Y) = m) for the unconditioned tail process."""
    if model.kind == "iid":
        return 1.0 if m == 1 else 0.0
    if model.kind == "ar1":
        # backward depth D and forward count are independent geometrics
        d = model.rho ** model.alpha
        return m * d ** (m - 1) * (1.0 - d) ** 2
    return None


def analytic_cluster_index(model: TailProcessModel, functional: FunctionalSpec) -> float | None:
    kind = functional.kind
    if kind == EXC:
        return 1.0
    theta = analytic_theta(model)
    if kind == EXTREMAL:
        return theta
    if kind == CLUSTER_SIZE:
        pi = analytic_cluster_size(model, functional.m)
        return None if pi is None else theta * pi
    if kind in (LARGE_DEV, RUIN):
        # positive paths: both K reduce to the forward sum
        a = model.alpha
        if model.kind == "iid":
            return 1.0
        if model.kind == "ar1":
            rho = model.rho
            return (1.0 - rho ** a) / (1.0 - rho) ** a
        templates, weights = _ma_templates(model.coeffs, model.lag, a)
        head = templates[:, model.lag:].sum(axis=1) ** a
        tail = templates[:, model.lag + 1:].sum(axis=1) ** a
        return float(np.sum(weights * (head - tail)))
    return None


def analytic_limiting_variance(model: TailProcessModel, functional: FunctionalSpec) -> float | None:
    if functional.kind == EXC:
        return 0.0
    nu = analytic_cluster_index(model, functional)
    total = analytic_sum_exceedance(model)
    if functional.kind == EXTREMAL:
        return nu * nu * total - nu
    if functional.kind == CLUSTER_SIZE and nu is not None:
        prob = _analytic_exc_prob(model, functional.m)
        if prob is not None:
            return nu * (1.0 - 2.0 * prob) + nu * nu * total
    return None


# -- Monte Carlo oracles ------------------------------------------------------

def candidate_extremal_index(model: TailProcessModel, samples: int = 100_000, seed: int = 0) -> MCEstimate:
    """theta = P(sup_{j>=1} |Y_j| <= 1)."""
    lag = model.lag
    hits = _collect(model, samples, seed, _S_THETA,
                    lambda y, th: (np.abs(y[:, lag + 1:]).max(axis=1) <= 1.0).astype(float))
    mean, se = _mean(hits)
    return MCEstimate(mean, se, samples, analytic_theta(model))


@dataclass(frozen=True)
class QSample:
    paths: np.ndarray
    draws: int
    accepted: int

    @property
    def acceptance_rate(self) -> float:
        return self.accepted / self.draws


def sample_Q_batch(model: TailProcessModel, size: int, rng: np.random.Generator,
                   max_draws: int = 1_000_000) -> QSample:
    """Rejection sampler for the Q-sequence: draw Y, keep it when its
    infargmax is 0, return Y / |Y_0|."""
    lag = model.lag
    kept: list[np.ndarray] = []
    accepted = 0
    draws = 0
    while accepted < size:
        batch = min(CHUNK, max(1000, 2 * (size - accepted)))
        y, _ = sample_tail_paths(model, batch, rng)
        draws += batch
        mask = _anchored(y, lag)
        if mask.any():
            sel = y[mask]
            kept.append(sel / np.abs(sel[:, lag])[:, None])
            accepted += int(mask.sum())
        if draws >= max_draws and accepted / draws < 1e-3:
            raise PathologicalModelError(f"acceptance rate {accepted / draws:.2e} after {draws} draws")
    paths = np.concatenate(kept)[:size]
    return QSample(paths, draws, accepted)


def sample_Q(model: TailProcessModel, rng: np.random.Generator) -> np.ndarray:
    """One Q path (Q_{-L}, ..., Q_L); max_j |Q_j| = |Q_0| = 1."""
    return sample_Q_batch(model, 1, rng).paths[0]


def cluster_index_mc(model: TailProcessModel, functional: FunctionalSpec, samples: int = 100_000,
                     seed: int = 0) -> MCEstimate:
    """nu*(H) by Monte Carlo.

    Class A: E[H(Y) 1{infargmax(Y) = 0}]. Class B with 1-homogeneous K:
    E[K_+^alpha(Theta_{0,inf}) - K_+^alpha(Theta_{1,inf})]. ``exc``: exactly 1.
    """
    analytic = analytic_cluster_index(model, functional)
    cls = functional.functional_class
    if cls == "exc":
        return MCEstimate(1.0, 0.0, samples, 1.0)
    lag = model.lag
    if cls == "A":
        def stat(y, th):
            return evaluate_paths(functional, y) * _anchored(y, lag)
    elif cls == "B":
        a = model.alpha

        def stat(y, th):
            return (k_functional(functional, th[:, lag:]) ** a
                    - k_functional(functional, th[:, lag + 1:]) ** a)
    else:  # pragma: no cover - FunctionalSpec restricts the kinds
        raise UnsupportedFunctionalError(str(functional))
    mean, se = _mean(_collect(model, samples, seed, _S_NU, stat))
    return MCEstimate(mean, se, samples, analytic)


@dataclass(frozen=True)
class ClusterSizeLaw:
    """pi(1..m_max) with standard errors, plus the size moments used by the
    cluster-tail identities."""

    pi: np.ndarray
    stderr: np.ndarray
    tail_mass: float
    draws: int
    accepted: int
    mean_size: float
    mean_size_stderr: float
    second_moment: float
    second_moment_stderr: float
    analytic: np.ndarray | None = None

    @property
    def theta(self) -> float:
        return self.accepted / self.draws

    def to_dict(self) -> dict:
        return {
            "pi": self.pi.tolist(),
            "stderr": self.stderr.tolist(),
            "analytic": None if self.analytic is None else self.analytic.tolist(),
            "tail_mass": self.tail_mass,
            "draws": self.draws,
            "accepted": self.accepted,
            "mean_size": self.mean_size,
            "mean_size_stderr": self.mean_size_stderr,
            "second_moment": self.second_moment,
            "second_moment_stderr": self.second_moment_stderr,
        }


def _sizes_given_first_exceedance(model, samples, seed, stream) -> np.ndarray:
    lag = model.lag
    sizes = _collect(model, samples, seed, stream,
                     lambda y, th: np.where(_first_exceedance_at_zero(y, lag), _exc(y), np.nan))
    accepted = np.count_nonzero(~np.isnan(sizes))
    if samples >= 1_000_000 and accepted / samples < 1e-3:
        raise PathologicalModelError(f"acceptance rate {accepted / samples:.2e}")
    return sizes[~np.isnan(sizes)]


def cluster_size_distribution(model: TailProcessModel, m_max: int = 10, samples: int = 100_000,
                              seed: int = 0) -> ClusterSizeLaw:
    """pi(m) = P(exc(Y) = m | Y*_{-inf,-1} <= 1) by rejection on the
    conditioning event."""
    sizes = _sizes_given_first_exceedance(model, samples, seed, _S_PI)
    n_acc = sizes.shape[0]
    if n_acc < 2:
        raise PathologicalModelError(f"only {n_acc} accepted paths out of {samples}")
    ms = np.arange(1, m_max + 1)
    pi = np.array([np.count_nonzero(sizes == m) for m in ms]) / n_acc
    se = np.sqrt(pi * (1 - pi) / n_acc)
    mean, mean_se = _mean(sizes)
    second, second_se = _mean(sizes ** 2)
    analytic = [analytic_cluster_size(model, int(m)) for m in ms]
    return ClusterSizeLaw(
        pi=pi, stderr=se, tail_mass=float(np.count_nonzero(sizes > m_max) / n_acc),
        draws=samples, accepted=n_acc, mean_size=mean, mean_size_stderr=mean_se,
        second_moment=second, second_moment_stderr=second_se,
        analytic=None if analytic[0] is None else np.array(analytic),
    )


def sum_exceedance_probabilities(model: TailProcessModel, samples: int = 100_000,
                                 seed: int = 0) -> MCEstimate:
    """sum_j P(|Y_j| > 1) = E[exc(Y)]."""
    mean, se = _mean(_collect(model, samples, seed, _S_SUM, lambda y, th: _exc(y)))
    return MCEstimate(mean, se, samples, analytic_sum_exceedance(model))


def limiting_variance(model: TailProcessModel, functional: FunctionalSpec, samples: int = 100_000,
                      seed: int = 0) -> MCEstimate:
    """sigma^2 = nu*(H^2) - 2 nu*(H) E[H(Y)] + nu*(H)^2 sum_j P(|Y_j| > 1)
    for indicator H (so nu*(H^2) = nu*(H)).

    All three ingredients come from one sample of paths; the standard error
    is the delta-method propagation of their joint sample covariance.
    """
    if functional.kind == EXC:
        # nu*(exc^2) = sum_j P, nu*(exc) = 1, nu*(exc exc) = E[exc(Y)] = sum_j P
        return MCEstimate(0.0, 0.0, samples, 0.0)
    if not functional.is_indicator:  # pragma: no cover
        raise UnsupportedFunctionalError(str(functional))
    lag = model.lag
    a_exp = model.alpha
    cls = functional.functional_class

    def stat(y, th):
        h = evaluate_paths(functional, y)
        if cls == "A":
            nu = h * _anchored(y, lag)
        else:
            nu = (k_functional(functional, th[:, lag:]) ** a_exp
                  - k_functional(functional, th[:, lag + 1:]) ** a_exp)
        return np.column_stack((nu, h, _exc(y)))

    data = _collect(model, samples, seed, _S_VAR, stat)
    a, b, c = data.mean(axis=0)
    sigma2 = a - 2 * a * b + a * a * c
    grad = np.array([1 - 2 * b + 2 * a * c, -2 * a, a * a])
    cov = np.cov(data, rowvar=False)
    se = math.sqrt(max(float(grad @ cov @ grad), 0.0) / samples)
    return MCEstimate(float(sigma2), se, samples, analytic_limiting_variance(model, functional))


def exceedance_count_probability(model: TailProcessModel, m: int, samples: int = 100_000,
                                 seed: int = 0) -> MCEstimate:
    """P(exc(Y) = m) for the unconditioned tail process."""
    mean, se = _mean(_collect(model, samples, seed, _S_EXC, lambda y, th: (_exc(y) == m).astype(float)))
    return MCEstimate(mean, se, samples, _analytic_exc_prob(model, m))


def _ratio_variance(means: np.ndarray) -> float:
    """Limiting variance of nu*(H_m)/theta from the six tail-process means
    (nu*(H_m), theta, E H_m(Y), E H_1(Y), nu*(H_m H_1), sum_j P(|Y_j| > 1))."""
    a2, a1, b2, b1, d, c = means
    var2 = a2 - 2 * a2 * b2 + a2 * a2 * c
    var1 = a1 - 2 * a1 * b1 + a1 * a1 * c
    cov = d - a2 * b1 - a1 * b2 + a1 * a2 * c
    pi = a2 / a1
    return (var2 - 2 * pi * cov + pi * pi * var1) / (a1 * a1)


def cluster_size_ratio_variance(model: TailProcessModel, m: int, samples: int = 100_000,
                                seed: int = 0) -> MCEstimate:
    """Limiting variance of sqrt(k)(pi_hat(m) - pi(m)) for the ratio estimator
    pi_hat(m) = nu_hat*(cluster-size m) / theta_hat.

    Delta method on the joint limit of the two cluster index estimators, whose
    covariance has the same structure as the variance in
    :func:`limiting_variance`. The standard error propagates the sample
    covariance of the six per-path ingredients through a numerical gradient.
    """
    lag = model.lag
    size = FunctionalSpec(CLUSTER_SIZE, m=m)
    extremal = FunctionalSpec(EXTREMAL)

    def stat(y, th):
        anchored = _anchored(y, lag)
        h2 = evaluate_paths(size, y)
        h1 = evaluate_paths(extremal, y)
        return np.column_stack((h2 * anchored, h1 * anchored, h2, h1, h2 * h1 * anchored, _exc(y)))

    data = _collect(model, samples, seed, _S_RATIO, stat)
    means = data.mean(axis=0)
    value = _ratio_variance(means)
    grad = np.empty(6)
    for i in range(6):
        step = 1e-6 * max(1.0, abs(means[i]))
        up, down = means.copy(), means.copy()
        up[i] += step
        down[i] -= step
        grad[i] = (_ratio_variance(up) - _ratio_variance(down)) / (2 * step)
    se = math.sqrt(max(float(grad @ np.cov(data, rowvar=False) @ grad), 0.0) / samples)

    analytic = None
    theta, pi, prob = analytic_theta(model), analytic_cluster_size(model, m), _analytic_exc_prob(model, m)
    if pi is not None and prob is not None:
        # H_m implies H_1 and every tail path exceeds one at lag 0
        a2 = theta * pi
        analytic = float(_ratio_variance(np.array([a2, theta, prob, 1.0, a2, analytic_sum_exceedance(model)])))
    return MCEstimate(float(value), se, samples, analytic)


def block_maxima_comparison(theta: float, sum_exceed: float) -> tuple[float, float]:
    """Limiting variances of the disjoint-blocks extremal index estimator with
    a peaks-over-threshold level (sigma_1^2) and a block-maxima level (sigma_3^2)."""
    if not 0 < theta <= 1:
        raise ValueError(f"theta must lie in (0, 1], got {theta}")
    if not sum_exceed >= 1:
        raise ValueError(f"sum of exceedance probabilities must be >= 1, got {sum_exceed}")
    pot = -theta + theta * theta * sum_exceed
    e = math.exp(-theta)
    bm = e * (1 - e) - 2 * theta * e + theta * theta * sum_exceed
    return pot, bm


def frechet_indicator_constants() -> tuple[float, float]:
    """Var f(Z) and the sliding-blocks constant C(f) for f = 1{z > 1}, Z
    standard Frechet."""
    return math.exp(-1) - math.exp(-2), 2 * math.exp(-1) - 4 * math.exp(-2)


@dataclass(frozen=True)
class IdentityCheck:
    name: str
    lhs: float
    lhs_stderr: float
    rhs: float
    rhs_stderr: float

    @property
    def combined_stderr(self) -> float:
        return math.hypot(self.lhs_stderr, self.rhs_stderr)

    @property
    def passed(self) -> bool:
        return abs(self.lhs - self.rhs) <= 3 * self.combined_stderr + 1e-12

    def to_dict(self) -> dict:
        return {**asdict(self), "combined_stderr": self.combined_stderr, "passed": self.passed}


IDENTITY_FUNCTIONALS = (
    FunctionalSpec(EXTREMAL),
    FunctionalSpec(CLUSTER_SIZE, m=1),
    FunctionalSpec("stop-loss", eta=1.0),
)


def identity_suite(model: TailProcessModel, samples: int = 100_000, seed: int = 0) -> list[IdentityCheck]:
    """Both sides of each cluster-measure identity from independent streams."""
    lag = model.lag
    stream = iter(range(_S_IDENTITY, _S_IDENTITY + 1000))

    def mc(stat):
        return _mean(_collect(model, samples, seed, next(stream), stat))

    checks = []
    lhs = mc(lambda y, th: _exc(y) * _anchored(y, lag))
    checks.append(IdentityCheck("nu*(exc) = 1", *lhs, 1.0, 0.0))

    lhs = mc(lambda y, th: _exc(y) ** 2 * _anchored(y, lag))
    total = mc(lambda y, th: _exc(y))
    checks.append(IdentityCheck("nu*(exc^2) = sum_j P(|Y_j| > 1)", *lhs, *total))

    for h in IDENTITY_FUNCTIONALS:
        lhs = mc(lambda y, th, h=h: evaluate_paths(h, y) * _exc(y) * _anchored(y, lag))
        rhs = mc(lambda y, th, h=h: evaluate_paths(h, y))
        checks.append(IdentityCheck(f"nu*({h} * exc) = E[{h}(Y)]", *lhs, *rhs))

    sizes = _sizes_given_first_exceedance(model, samples, seed, next(stream))
    theta, theta_se = mc(lambda y, th: (np.abs(y[:, lag + 1:]).max(axis=1) <= 1.0).astype(float))
    total2, total2_se = mc(lambda y, th: _exc(y))
    checks.append(IdentityCheck("sum_m m pi(m) = 1/theta", *_mean(sizes),
                                1.0 / theta, theta_se / theta ** 2))
    ratio = total2 / theta
    ratio_se = math.hypot(total2_se / theta, total2 * theta_se / theta ** 2)
    checks.append(IdentityCheck("sum_m m^2 pi(m) = sum_j P(|Y_j| > 1)/theta", *_mean(sizes ** 2),
                                ratio, ratio_se))
    return checks


@dataclass(frozen=True)
class ClusterOracleReport:
    model: str
    theta: MCEstimate
    nu_star: dict[str, MCEstimate]
    pi: ClusterSizeLaw
    sum_exceed_prob: MCEstimate
    variances: dict[str, MCEstimate]

    def to_dict(self) -> dict:
        return {
            "model": self.model,
            "theta": self.theta.to_dict(),
            "nu_star": {k: v.to_dict() for k, v in self.nu_star.items()},
            "pi": self.pi.to_dict(),
            "sum_exceed_prob": self.sum_exceed_prob.to_dict(),
            "variances": {k: v.to_dict() for k, v in self.variances.items()},
        }


def oracle_report(model: TailProcessModel, functionals, samples: int = 100_000, seed: int = 0,
                  m_max: int = 10) -> ClusterOracleReport:
    nu = {str(f): cluster_index_mc(model, f, samples, seed) for f in functionals}
    var = {str(f): limiting_variance(model, f, samples, seed) for f in functionals}
    return ClusterOracleReport(
        model=model.describe(),
        theta=candidate_extremal_index(model, samples, seed),
        nu_star=nu,
        pi=cluster_size_distribution(model, m_max, samples, seed),
        sum_exceed_prob=sum_exceedance_probabilities(model, samples, seed),
        variances=var,
    )


# -- conditional simulation oracle -------------------------------------------

@dataclass(frozen=True)
class EmpiricalTailPaths:
    """Windows x^{-1}(X_{t-h}, ..., X_{t+h}) around every |X_t| > x."""

    paths: np.ndarray
    threshold: float
    horizon: int

    def frequency(self, event: Callable[[np.ndarray], np.ndarray]) -> tuple[float, float]:
        """Empirical probability of ``event(paths)`` (a boolean row mask) and
        its binomial standard error."""
        hits = np.asarray(event(self.paths), dtype=float)
        p = float(hits.mean())
        return p, math.sqrt(p * (1 - p) / hits.size)

    def lag(self, j: int) -> np.ndarray:
        return self.paths[:, self.horizon + j]


def conditional_simulation_oracle(process: ProcessSpec, x_threshold: float, horizon: int,
                                  min_exceedances: int = 200) -> EmpiricalTailPaths:
    """Empirical law of the rescaled series around large values, the defining
    limit of the tail process; used to validate the samplers above."""
    x = generate_values(process)
    n = x.shape[0]
    idx = np.flatnonzero(np.abs(x) > x_threshold)
    idx = idx[(idx >= horizon) & (idx < n - horizon)]
    if idx.size < min_exceedances:
        raise InsufficientSampleError(
            f"only {idx.size} exceedances of {x_threshold} (need {min_exceedances})"
        )
    windows = x[idx[:, None] + np.arange(-horizon, horizon + 1)] / x_threshold
    return EmpiricalTailPaths(windows, float(x_threshold), horizon)
