"""Heuristic membership tests: class S, the class-H proxy, and O(ln m) growth.

None of these properties is decidable from finitely many terms. Each check
returns a verdict string together with the full evidence series; the
verdict is a pure function of the series and the thresholds.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .empirical import growth_series
from .functions import AdditiveFunctionSpec, strong_projection
from .sieve import DEFAULT_SEGMENT_SIZE, HARD_CAP
from .sums import SumGrid, geometric_grid, moment_sums

BOUNDED = "bounded"
UNBOUNDED = "unbounded"
INCONCLUSIVE = "inconclusive"
PROXY_SATISFIED = "proxy-satisfied"
PROXY_VIOLATED = "proxy-violated"

DEFAULT_TAIL_THRESHOLD = 0.05
DEFAULT_PROXY_LOW = 0.5
DEFAULT_PROXY_HIGH = 1.0
DEFAULT_GROWTH_TOLERANCE = 0.01
LOOKBACK = 100  # compare the last grid point against n_max / LOOKBACK


def _decades(points: Sequence[int]) -> float:
    return math.log10(points[-1] / points[0])


def _with_lookback(points: Sequence[int]) -> Tuple[List[int], int]:
    """Grid plus the point n_max / LOOKBACK, and the index of that point."""
    back = max(2, int(round(points[-1] / LOOKBACK)))
    merged = sorted(set(int(n) for n in points) | {back})
    return merged, merged.index(back)


def _non_decreasing_increments(series: np.ndarray, intervals: int = 3) -> bool:
    inc = np.diff(series[-(intervals + 1):])
    return bool(np.all(np.diff(inc) >= 0))


def tail_verdict(
    delta_A: Sequence[float],
    delta_D: Sequence[float],
    back: int,
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
) -> str:
    """Verdict from Delta series; ``back`` indexes the n_max / 100 point.

    The change over the last two decades is measured relative to
    max(1, |Delta(n_max)|). A tail that keeps growing like c*ln ln n moves
    by about 10% of its value per two decades near 10^8 whatever c is,
    while a convergent tail of any size moves by far less.
    """
    verdicts = []
    for series in (np.asarray(delta_A, float), np.asarray(delta_D, float)):
        scale = max(1.0, abs(series[-1]))
        change = abs(series[-1] - series[back]) / scale
        if change < tail_threshold:
            verdicts.append(BOUNDED)
        elif change > 4 * tail_threshold and _non_decreasing_increments(series):
            verdicts.append(UNBOUNDED)
        else:
            verdicts.append(INCONCLUSIVE)
    if UNBOUNDED in verdicts:
        return UNBOUNDED
    if all(v == BOUNDED for v in verdicts):
        return BOUNDED
    return INCONCLUSIVE


def class_s_check(
    spec: AdditiveFunctionSpec,
    grid: Sequence[int],
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
    sums: Optional[SumGrid] = None,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> Tuple[str, Dict[str, list]]:
    """Bounded A - A* and D - D* along the grid means f and f* share moments."""
    points = [int(n) for n in grid]
    if _decades(points) < 3:
        raise ValueError("class S check needs a grid spanning at least 3 decades")
    merged, back = _with_lookback(points)
    if sums is None or list(sums.points) != merged:
        sums = moment_sums(spec, merged, segment_size, cap)
    dA, dD = sums.delta_A, sums.delta_D
    verdict = tail_verdict(dA, dD, back, tail_threshold)
    keep = [merged.index(n) for n in points]
    return verdict, {
        "grid": points,
        "delta_A": [float(dA[i]) for i in keep],
        "delta_D": [float(dD[i]) for i in keep],
    }


def proxy_verdict(
    series: Sequence[Optional[float]],
    low: float = DEFAULT_PROXY_LOW,
    high: float = DEFAULT_PROXY_HIGH,
) -> str:
    vals = np.array([v for v in series if v is not None], dtype=float)
    if len(vals) < 3:
        return INCONCLUSIVE
    last = vals[-3:]
    if np.all(np.diff(last) < 0) and last[-1] < low:
        return PROXY_SATISFIED
    # ratio ln D / ln ln n sitting above 1 is not heading to 0
    if np.all(last > high):
        return PROXY_VIOLATED
    return INCONCLUSIVE


def class_h_proxy_check(
    spec: AdditiveFunctionSpec,
    grid: Sequence[int],
    low: float = DEFAULT_PROXY_LOW,
    high: float = DEFAULT_PROXY_HIGH,
    sums: Optional[SumGrid] = None,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> Tuple[str, Dict[str, list]]:
    """ln D*(n) / ln ln n along the grid, D* the variance sum of the strong projection.

    Points where D* <= 1 or ln ln n <= 0 are skipped (None in the series)
    and listed under ``skipped``.
    """
    points = [int(n) for n in grid]
    if _decades(points) < 3:
        raise ValueError("class H proxy check needs a grid spanning at least 3 decades")
    if sums is None or list(sums.points) != points:
        sums = moment_sums(strong_projection(spec), points, segment_size, cap)
    series: List[Optional[float]] = []
    skipped = []
    for n, d in zip(points, sums.D_star):
        lln = math.log(math.log(n))
        if d > 1 and lln > 0:
            series.append(math.log(d) / lln)
        else:
            series.append(None)
            skipped.append(n)
    return proxy_verdict(series, low, high), {"grid": points, "h_proxy": series, "skipped": skipped}


def growth_verdict(series: Sequence[float], back: int, tolerance: float = DEFAULT_GROWTH_TOLERANCE) -> str:
    s = np.asarray(series, dtype=float)
    if s[-1] <= s[back] * (1 + tolerance):
        return BOUNDED
    if s[-1] > s[back] * (1 + 4 * tolerance) and _non_decreasing_increments(s):
        return UNBOUNDED
    return INCONCLUSIVE


def growth_check(
    spec: AdditiveFunctionSpec,
    n_max: int,
    grid: Optional[Sequence[int]] = None,
    tolerance: float = DEFAULT_GROWTH_TOLERANCE,
    workers: int = 1,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> Tuple[str, Dict[str, list]]:
    """Plateau test for M(n) = max_{2<=m<=n} |f(m)| / ln m."""
    if n_max < 10:
        raise ValueError(f"growth check needs n_max >= 10, got {n_max}")
    if grid is None:
        grid = geometric_grid(10, n_max, max(3, 2 * int(math.ceil(math.log10(n_max / 10))) + 1))
    points = [int(n) for n in grid if n <= n_max]
    merged, back = _with_lookback(points)
    series = growth_series(spec, merged, workers, segment_size, cap)
    keep = [merged.index(n) for n in points]
    return growth_verdict(series, back, tolerance), {
        "grid": points,
        "growth": [float(series[i]) for i in keep],
    }


@dataclass
class ClassReport:
    spec: str
    grid: List[int]
    delta_A: List[float]
    delta_D: List[float]
    s_verdict: str
    h_proxy: List[Optional[float]]
    h_verdict: str
    growth: List[float]
    growth_verdict: str
    thresholds: Dict[str, float] = field(default_factory=dict)
    h_skipped: List[int] = field(default_factory=list)

    def to_json(self) -> dict:
        return asdict(self)


def classify(
    spec: AdditiveFunctionSpec,
    grid: Sequence[int],
    tail_threshold: float = DEFAULT_TAIL_THRESHOLD,
    proxy_low: float = DEFAULT_PROXY_LOW,
    proxy_high: float = DEFAULT_PROXY_HIGH,
    growth_tolerance: float = DEFAULT_GROWTH_TOLERANCE,
    with_growth: bool = True,
    workers: int = 1,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> ClassReport:
    points = [int(n) for n in grid]
    merged, _ = _with_lookback(points)
    sums = moment_sums(spec, merged, segment_size, cap)
    s_verdict, s_ev = class_s_check(spec, points, tail_threshold, sums)
    star = moment_sums(strong_projection(spec), points, segment_size, cap)
    h_verdict, h_ev = class_h_proxy_check(spec, points, proxy_low, proxy_high, star)
    if with_growth:
        g_verdict, g_ev = growth_check(
            spec, points[-1], points, growth_tolerance, workers, segment_size, cap
        )
        growth = g_ev["growth"]
    else:
        g_verdict, growth = INCONCLUSIVE, []
    return ClassReport(
        spec=spec.name,
        grid=points,
        delta_A=s_ev["delta_A"],
        delta_D=s_ev["delta_D"],
        s_verdict=s_verdict,
        h_proxy=h_ev["h_proxy"],
        h_verdict=h_verdict,
        growth=growth,
        growth_verdict=g_verdict,
        thresholds={
            "tail_threshold": tail_threshold,
            "proxy_low": proxy_low,
            "proxy_high": proxy_high,
            "growth_tolerance": growth_tolerance,
            "lookback": LOOKBACK,
        },
        h_skipped=h_ev["skipped"],
    )
