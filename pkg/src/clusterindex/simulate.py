"""Seedable generators of regularly varying stationary processes driven by
standard Pareto innovations."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import lfilter

from .series import Series

PROCESS_KINDS = ("iid", "ar1", "ma")


def pareto_from_uniform(u, alpha: float):
    """Inverse-CDF transform U^(-1/alpha) of uniforms in (0, 1]."""
    return np.asarray(u, dtype=float) ** (-1.0 / alpha) if np.ndim(u) else float(u) ** (-1.0 / alpha)


def pareto_sample(alpha: float, rng: np.random.Generator, size=None):
    """Standard Pareto(alpha) draw(s), support [1, inf)."""
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    # 1 - U lies in (0, 1], avoiding an infinite draw at U = 0
    u = 1.0 - rng.random(size)
    return pareto_from_uniform(u, alpha)


def default_burn_in(rho: float) -> int:
    """Smallest B with rho^B < 1e-12."""
    b = math.ceil(math.log(1e-12) / math.log(rho))
    while rho ** b >= 1e-12:
        b += 1
    return b


@dataclass(frozen=True)
class ProcessSpec:
    """A stationary process X_t built from iid Pareto(alpha) innovations Z_t.

    ``iid``: X_t = Z_t. ``ar1``: X_t = rho X_{t-1} + Z_t. ``ma``:
    X_t = sum_i coeffs[i] Z_{t-i} with coeffs[0] = 1.
    """

    kind: str
    alpha: float
    n: int = 1000
    rho: float | None = None
    coeffs: tuple[float, ...] | None = None
    burn_in: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in PROCESS_KINDS:
            raise ValueError(f"unknown process kind {self.kind!r}")
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.kind == "ar1":
            if self.rho is None or not 0 < self.rho < 1:
                raise ValueError(f"ar1 needs 0 < rho < 1, got {self.rho}")
            minimum = default_burn_in(self.rho)
            if self.burn_in is None:
                object.__setattr__(self, "burn_in", minimum)
            elif self.burn_in < minimum:
                raise ValueError(f"burn_in must be >= {minimum} for rho = {self.rho}")
        if self.kind == "ma":
            if not self.coeffs or self.coeffs[0] != 1 or any(c < 0 for c in self.coeffs):
                raise ValueError(f"ma needs nonnegative coeffs with coeffs[0] = 1, got {self.coeffs}")
            object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        if self.burn_in is None:
            object.__setattr__(self, "burn_in", 0)

    def with_(self, **changes) -> "ProcessSpec":
        return replace(self, **changes)

    def describe(self) -> str:
        if self.kind == "iid":
            return f"iid:alpha={self.alpha:g}"
        if self.kind == "ar1":
            return f"ar1:rho={self.rho:g},alpha={self.alpha:g}"
        if len(self.coeffs) == 2:
            return f"ma1:b={self.coeffs[1]:g},alpha={self.alpha:g}"
        return "ma:coeffs=" + "|".join(f"{c:g}" for c in self.coeffs) + f",alpha={self.alpha:g}"


def parse_model(text: str) -> dict:
    """Parse ``iid:alpha=1``, ``ar1:rho=0.5,alpha=1``, ``ma1:b=0.7,alpha=1.5``
    or ``ma:coeffs=1|0.5|0.25,alpha=1`` into keyword arguments."""
    kind, _, params = text.strip().partition(":")
    kind = kind.strip()
    raw: dict[str, str] = {}
    for item in filter(None, params.split(",")):
        key, eq, val = item.partition("=")
        if not eq:
            raise ValueError(f"bad parameter {item!r} in {text!r}")
        raw[key.strip()] = val.strip()
    allowed = {"iid": {"alpha"}, "ar1": {"rho", "alpha"}, "ma1": {"b", "alpha"},
               "ma": {"coeffs", "alpha"}}
    if kind not in allowed:
        raise ValueError(f"unknown model kind {kind!r}")
    extra = set(raw) - allowed[kind]
    if extra:
        raise ValueError(f"unexpected parameters {sorted(extra)} for {kind}")
    out: dict = {"alpha": float(raw.get("alpha", 1.0))}
    if kind == "iid":
        out["kind"] = "iid"
    elif kind == "ar1":
        if "rho" not in raw:
            raise ValueError("ar1 needs rho")
        out.update(kind="ar1", rho=float(raw["rho"]))
    elif kind == "ma1":
        if "b" not in raw:
            raise ValueError("ma1 needs b")
        out.update(kind="ma", coeffs=(1.0, float(raw["b"])))
    else:
        out.update(kind="ma", coeffs=tuple(float(c) for c in raw["coeffs"].split("|")))
    return out


def parse_process(text: str, n: int = 1000, seed: int = 0, burn_in: int | None = None) -> ProcessSpec:
    return ProcessSpec(n=n, seed=seed, burn_in=burn_in, **parse_model(text))


def generate_values(spec: ProcessSpec, rng: np.random.Generator | None = None) -> np.ndarray:
    """The n post-burn-in values of the process as a float array."""
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    if spec.kind == "iid":
        return pareto_sample(spec.alpha, rng, spec.n)
    if spec.kind == "ar1":
        z = pareto_sample(spec.alpha, rng, spec.n + spec.burn_in)
        x = lfilter([1.0], [1.0, -spec.rho], z)
        return x[spec.burn_in:]
    q = len(spec.coeffs) - 1
    z = pareto_sample(spec.alpha, rng, spec.n + q + spec.burn_in)
    x = np.convolve(z, np.asarray(spec.coeffs), mode="valid")
    return x[spec.burn_in:]


def generate(spec: ProcessSpec, rng: np.random.Generator | None = None) -> Series:
    """Simulate the process; deterministic given ``spec.seed`` (or ``rng``)."""
    return Series.from_values(generate_values(spec, rng))
