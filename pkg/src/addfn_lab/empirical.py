"""Exact empirical moments of f(m) over m = 1..n under the uniform measure.

One streaming pass factorizes [2, n] window by window (see
``sieve.window_prime_powers``). Each window is reduced to (count, mean,
sum of squared deviations, max |f(m)|/ln m); windows are merged strictly
in ascending order with the pairwise update of Chan, Golub and LeVeque,
so the result does not depend on how many worker processes produced the
window summaries.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .functions import AdditiveFunctionSpec
from .sieve import (
    DEFAULT_SEGMENT_SIZE,
    HARD_CAP,
    ResourceLimitError,
    iroot,
    iter_prime_blocks,
    small_primes,
    window_bounds,
    window_prime_powers,
)
from .sums import moment_sums


@dataclass(frozen=True)
class EmpiricalMoments:
    n: int
    mean: float
    variance: float

    @property
    def count(self) -> int:
        return self.n


@dataclass(frozen=True)
class _Summary:
    count: int
    mean: float
    m2: float
    growth: float  # max |f(m)|/ln m over the window, m >= 2

    def merge(self, other: "_Summary") -> "_Summary":
        if other.count == 0:
            return self
        if self.count == 0:
            return other
        total = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * (other.count / total)
        m2 = math.fsum(
            [self.m2, other.m2, delta * delta * (self.count * other.count / total)]
        )
        return _Summary(total, mean, m2, max(self.growth, other.growth))


# f(1) = 0 contributes to counts; it has no ln m to divide by
_ONE = _Summary(1, 0.0, 0.0, 0.0)


def window_values(spec: AdditiveFunctionSpec, lo: int, hi: int, base: np.ndarray) -> np.ndarray:
    """f(m) for every m in [lo, hi]; ``base`` covers the primes <= sqrt(hi)."""
    vals = np.zeros(hi - lo + 1, dtype=np.float64)
    for p, offs, alpha in window_prime_powers(lo, hi, base):
        if offs.size:
            vals[offs] += np.asarray(spec.rule(p, alpha), dtype=np.float64)
    return vals


def _summarize(task: Tuple[AdditiveFunctionSpec, int, int, np.ndarray]) -> _Summary:
    spec, lo, hi, base = task
    vals = window_values(spec, lo, hi, base)
    count = len(vals)
    mean = math.fsum(vals) / count
    m2 = math.fsum((vals - mean) ** 2)
    logs = np.log(np.arange(lo, hi + 1, dtype=np.float64))
    growth = float(np.max(np.abs(vals) / logs))
    return _Summary(count, mean, m2, growth)


def _check_n(n: int, cap: int) -> None:
    if n < 1:
        raise ValueError(f"need n >= 1, got {n}")
    if n > cap:
        raise ResourceLimitError(f"n = {n} exceeds cap {cap}")


def _scan(
    spec: AdditiveFunctionSpec,
    points: Sequence[int],
    workers: int = 1,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> List[_Summary]:
    """Cumulative summaries of m = 1..n for every n in ``points`` (ascending)."""
    n_max = points[-1]
    _check_n(n_max, cap)
    windows = window_bounds(n_max, segment_size, points)
    base = small_primes(iroot(n_max, 2))
    tasks = [(spec, lo, hi, base) for lo, hi in windows]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            summaries = list(pool.map(_summarize, tasks))
    else:
        summaries = [_summarize(t) for t in tasks]

    out: List[_Summary] = []
    acc = _ONE
    k = 0
    while k < len(points) and points[k] < 2:
        out.append(acc)
        k += 1
    for (lo, hi), s in zip(windows, summaries):
        acc = acc.merge(s)
        while k < len(points) and points[k] == hi:
            out.append(acc)
            k += 1
    return out


def empirical_grid(
    spec: AdditiveFunctionSpec,
    grid: Sequence[int],
    workers: int = 1,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> List[EmpiricalMoments]:
    """Empirical mean and population variance at every grid point, in one pass."""
    points = [int(n) for n in grid]
    return [
        EmpiricalMoments(n, s.mean, max(s.m2 / s.count, 0.0))
        for n, s in zip(points, _scan(spec, points, workers, segment_size, cap))
    ]


def empirical_moments(
    spec: AdditiveFunctionSpec,
    n: int,
    workers: int = 1,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> EmpiricalMoments:
    return empirical_grid(spec, [n], workers, segment_size, cap)[0]


def growth_series(
    spec: AdditiveFunctionSpec,
    grid: Sequence[int],
    workers: int = 1,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> np.ndarray:
    """max_{2 <= m <= n} |f(m)| / ln m at every grid point (needs grid[0] >= 2)."""
    points = [int(n) for n in grid]
    if points[0] < 2:
        raise ValueError("growth series starts at n = 2")
    return np.array([s.growth for s in _scan(spec, points, workers, segment_size, cap)])


def mean_via_counts(spec: AdditiveFunctionSpec, n: int, cap: int = HARD_CAP) -> float:
    """(1/n) sum_{m<=n} f(m) without factorizing anything.

    Uses sum_{m<=n} f(m) = sum_{p^a<=n} (f(p^a) - f(p^(a-1))) * floor(n / p^a)
    with f(p^0) = 0.
    """
    _check_n(n, cap)
    if n < 2:
        return 0.0
    rule = spec.rule
    parts = []
    for block in iter_prime_blocks(n, cap=cap):
        f1 = np.asarray(rule(block, np.ones_like(block)), dtype=np.float64)
        parts.append(math.fsum(f1 * (n // block)))
    ps = small_primes(iroot(n, 2))
    for alpha in range(2, n.bit_length()):
        top = iroot(n, alpha)
        if top < 2:
            break
        q = ps[ps <= top]
        jump = np.asarray(rule(q, np.full_like(q, alpha)), dtype=np.float64) - np.asarray(
            rule(q, np.full_like(q, alpha - 1)), dtype=np.float64
        )
        counts = np.array([n // int(p) ** alpha for p in q], dtype=np.float64)
        parts.append(math.fsum(jump * counts))
    return math.fsum(parts) / n


@dataclass(frozen=True)
class NormalizedHistogram:
    bin_edges: np.ndarray
    masses: np.ndarray
    centering: float
    scaling: float

    def rows(self) -> List[dict]:
        return [
            {"bin_lo": float(a), "bin_hi": float(b), "mass": float(m)}
            for a, b, m in zip(self.bin_edges[:-1], self.bin_edges[1:], self.masses)
        ]


def normalized_histogram(
    spec: AdditiveFunctionSpec,
    n: int,
    bins: int = 41,
    centering_source: str = "theoretical",
    edges: Optional[Sequence[float]] = None,
    span: Tuple[float, float] = (-4.0, 4.0),
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> NormalizedHistogram:
    """Distribution of (f(m) - A) / sqrt(D) over m = 1..n.

    ``centering_source`` picks A, D from the prime-power sums
    (``"theoretical"``) or from the exact empirical moments
    (``"empirical"``). Values outside the outer edges are counted in the
    first or last bin.
    """
    _check_n(n, cap)
    if centering_source == "theoretical":
        sg = moment_sums(spec, [max(n, 2)], segment_size, cap)
        center, var = float(sg.A[0]), float(sg.D[0])
    elif centering_source == "empirical":
        em = empirical_moments(spec, n, segment_size=segment_size, cap=cap)
        center, var = em.mean, em.variance
    else:
        raise ValueError(f"centering_source must be 'theoretical' or 'empirical', got {centering_source!r}")
    if not var > 0:
        raise ValueError(f"{spec.name}: zero variance at n = {n}, cannot normalize")
    if edges is None:
        if bins < 2:
            raise ValueError("need at least 2 bins")
        edges_arr = np.linspace(span[0], span[1], bins + 1)
    else:
        edges_arr = np.asarray(edges, dtype=np.float64)
        if len(edges_arr) < 3 or np.any(np.diff(edges_arr) <= 0):
            raise ValueError("edges must be strictly ascending with at least 2 bins")
    scale = math.sqrt(var)
    counts = np.zeros(len(edges_arr) - 1, dtype=np.int64)

    def add(z: np.ndarray) -> None:
        z = np.clip(z, edges_arr[0], edges_arr[-1])
        counts[:] += np.histogram(z, bins=edges_arr)[0]

    add(np.array([(0.0 - center) / scale]))
    if n >= 2:
        base = small_primes(iroot(n, 2))
        for lo, hi in window_bounds(n, segment_size):
            add((window_values(spec, lo, hi, base) - center) / scale)
    return NormalizedHistogram(edges_arr, counts / n, center, scale)
