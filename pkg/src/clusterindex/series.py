"""Time series container, norms, order statistics and block schemes."""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

NORM_KINDS = ("euclidean", "sup", "l1")


class SchemeError(ValueError):
    """Invalid combination of sample size, block length and exceedance count."""


class DataError(ValueError):
    """Malformed or non-finite input data."""


class SchemeWarning(UserWarning):
    """Block scheme is valid but far from the asymptotic regime."""


def compute_norms(points, norm_kind: str = "euclidean") -> np.ndarray:
    """Norm of every point of an ``(n, d)`` (or ``(n,)``) array.

    Raises
    ------
    DataError
        If a coordinate is not finite; the message names the first bad row.
    """
    if norm_kind not in NORM_KINDS:
        raise ValueError(f"unknown norm {norm_kind!r}, expected one of {NORM_KINDS}")
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2:
        raise DataError(f"expected a 1-d or 2-d array, got shape {arr.shape}")
    finite = np.isfinite(arr).all(axis=1)
    if not finite.all():
        bad = int(np.flatnonzero(~finite)[0])
        raise DataError(f"non-finite coordinate in point {bad}")
    if arr.shape[1] == 1:
        return np.abs(arr[:, 0])
    if norm_kind == "euclidean":
        return np.sqrt(np.einsum("ij,ij->i", arr, arr))
    if norm_kind == "sup":
        return np.abs(arr).max(axis=1)
    return np.abs(arr).sum(axis=1)


@dataclass(frozen=True)
class Series:
    """Immutable sample X_1..X_n of d-dimensional points with cached norms.

    Indices are 0-based throughout the package; ``points[t]`` is X_{t+1}.
    """

    points: np.ndarray
    norm_kind: str = "euclidean"
    norms: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DataError(f"need at least one point, got shape {pts.shape}")
        norms = compute_norms(pts, self.norm_kind)
        pts.flags.writeable = False
        norms.flags.writeable = False
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "norms", norms)

    @classmethod
    def from_values(cls, values: Sequence[float], norm_kind: str = "euclidean") -> "Series":
        return cls(np.asarray(values, dtype=float)[:, None], norm_kind)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def values(self) -> np.ndarray:
        """Signed values of a univariate series."""
        if self.dim != 1:
            raise DataError(f"series is {self.dim}-dimensional, signed values need d = 1")
        return self.points[:, 0]

    def __len__(self) -> int:
        return self.n


def read_csv(path, norm_kind: str = "euclidean") -> Series:
    """Load one point per row, one column per dimension.

    A first row that does not parse as numbers is treated as a header.
    """
    rows: list[list[float]] = []
    width = None
    with open(Path(path), newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if not row or all(not c.strip() for c in row):
                continue
            try:
                parsed = [float(c) for c in row]
            except ValueError:
                if lineno == 1:
                    continue
                raise DataError(f"line {lineno}: cannot parse {row!r}") from None
            if width is None:
                width = len(parsed)
            elif len(parsed) != width:
                raise DataError(f"line {lineno}: expected {width} columns, got {len(parsed)}")
            rows.append(parsed)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return Series(np.array(rows), norm_kind)


def write_csv(series: Series, path_or_file) -> None:
    close = False
    if isinstance(path_or_file, (str, Path)):
        fh = open(path_or_file, "w", newline="")
        close = True
    else:
        fh = path_or_file
    try:
        writer = csv.writer(fh, lineterminator="\n")
        for p in series.points:
            writer.writerow([repr(float(v)) for v in p])
    finally:
        if close:
            fh.close()


@dataclass(frozen=True)
class BlockScheme:
    n: int
    r_n: int
    k: int

    @property
    def m_n(self) -> int:
        """Number of complete disjoint blocks."""
        return self.n // self.r_n

    @property
    def q_n(self) -> int:
        """Number of sliding windows of length r_n."""
        return self.n - self.r_n + 1


@dataclass(frozen=True)
class Threshold:
    value: float
    origin: str  # "order-statistic" or "user-supplied"
    k: int | None = None


def validate_scheme(n: int, r_n: int, k: int) -> BlockScheme:
    """Check ``1 <= r_n <= n`` and ``1 <= k < n``.

    Warns (``SchemeWarning``) when the scheme looks far from the regime
    r_n -> inf, r_n/n -> 0, r_n k/n -> 0 that the asymptotics need.
    """
    n, r_n, k = int(n), int(r_n), int(k)
    if n < 1:
        raise SchemeError(f"n must be >= 1, got {n}")
    if r_n < 1:
        raise SchemeError(f"r_n must be >= 1, got {r_n}")
    if r_n > n:
        raise SchemeError(f"r_n = {r_n} exceeds n = {n}")
    if not 1 <= k < n:
        raise SchemeError(f"k must satisfy 1 <= k < n, got k = {k}, n = {n}")
    if r_n / n > 0.1:
        warnings.warn(f"r_n/n = {r_n / n:.3g} > 0.1", SchemeWarning, stacklevel=2)
    if k < 20:
        warnings.warn(f"k = {k} < 20 upper order statistics", SchemeWarning, stacklevel=2)
    if r_n * k / n > 5:
        warnings.warn(f"r_n*k/n = {r_n * k / n:.3g} > 5", SchemeWarning, stacklevel=2)
    return BlockScheme(n, r_n, k)


def order_statistic(norms, k: int) -> Threshold:
    """The (n-k)-th smallest norm, ``||X||_(n-k:n)``.

    Uses introselect (``np.partition``), expected O(n).
    """
    arr = np.asarray(norms, dtype=float)
    n = arr.shape[0]
    if not 1 <= k < n:
        raise SchemeError(f"k must satisfy 1 <= k < n, got k = {k}, n = {n}")
    idx = n - k - 1
    value = float(np.partition(arr, idx)[idx])
    return Threshold(value, "order-statistic", int(k))


def exceeds(norms, s: float) -> np.ndarray:
    """Boolean mask of ``||x|| / s > 1``.

    Every exceedance test in the package goes through this comparison so that
    scaled and unscaled evaluations agree bit for bit.
    """
    with np.errstate(over="ignore"):
        return np.asarray(norms, dtype=float) / s > 1.0


def exceedance_count(norms, threshold: float) -> int:
    return int(np.count_nonzero(exceeds(norms, threshold)))
