"""Truncated prime-power sums: mean/variance main terms and Mertens-type references.

For an additive f and a grid of cut-offs n this computes

    A(n)  = sum_{p^a <= n} f(p^a) / p^a         D(n)  = sum_{p^a <= n} f(p^a)^2 / p^a
    A*(n) = sum_{p <= n}   f(p)   / p           D*(n) = sum_{p <= n}   f(p)^2   / p

keeping the a >= 2 contributions separately (``tails``). All sums go
through ``math.fsum``, so the result is the correctly rounded value of the
exact partial sums no matter how many primes are involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .functions import AdditiveFunctionSpec, builtin
from .sieve import (
    DEFAULT_SEGMENT_SIZE,
    HARD_CAP,
    build_primes,
    iroot,
    iter_prime_blocks,
)

REFERENCE_KINDS = (
    "recip_primes",
    "logp_over_p",
    "log2p_over_p",
    "logpp_over_pp",
    "log2pp_over_pp",
)


def geometric_grid(n_min: float = 1e2, n_max: float = 1e8, points: int = 13) -> List[int]:
    """Integer grid spaced evenly in log n, endpoints included, duplicates dropped."""
    if points < 2:
        raise ValueError("a grid needs at least 2 points")
    if not 2 <= n_min <= n_max:
        raise ValueError(f"need 2 <= n_min <= n_max, got {n_min}, {n_max}")
    raw = np.logspace(math.log10(n_min), math.log10(n_max), points)
    out = sorted({int(round(x)) for x in raw})
    out[0], out[-1] = int(round(n_min)), int(round(n_max))
    return out


def _check_grid(grid: Sequence[int]) -> List[int]:
    pts = [int(n) for n in grid]
    if not pts:
        raise ValueError("empty grid")
    if pts[0] < 2:
        raise ValueError(f"grid must start at n >= 2, got {pts[0]}")
    if any(b <= a for a, b in zip(pts, pts[1:])):
        raise ValueError("grid must be strictly ascending")
    return pts


@dataclass
class SumGrid:
    spec_name: str
    points: List[int]
    A: np.ndarray
    D: np.ndarray
    A_star: np.ndarray
    D_star: np.ndarray
    # alpha -> (mean tail, variance tail) per grid point
    tails: Dict[int, Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict)

    @property
    def delta_A(self) -> np.ndarray:
        return self.A_tail_total

    @property
    def delta_D(self) -> np.ndarray:
        return self.D_tail_total

    @property
    def A_tail_total(self) -> np.ndarray:
        return _fsum_columns([t[0] for t in self.tails.values()], len(self.points))

    @property
    def D_tail_total(self) -> np.ndarray:
        return _fsum_columns([t[1] for t in self.tails.values()], len(self.points))

    def rows(self) -> List[dict]:
        dA, dD = self.delta_A, self.delta_D
        return [
            {
                "n": n,
                "A": float(self.A[i]),
                "D": float(self.D[i]),
                "A_star": float(self.A_star[i]),
                "D_star": float(self.D_star[i]),
                "delta_A": float(dA[i]),
                "delta_D": float(dD[i]),
            }
            for i, n in enumerate(self.points)
        ]


def _fsum_columns(arrays: Sequence[np.ndarray], size: int) -> np.ndarray:
    if not arrays:
        return np.zeros(size)
    stacked = np.vstack(arrays)
    return np.array([math.fsum(stacked[:, j]) for j in range(size)])


def _prime_sums_on_grid(
    terms: Sequence[Callable[[np.ndarray], np.ndarray]],
    points: Sequence[int],
    segment_size: int,
    cap: int,
) -> List[np.ndarray]:
    """For each term g, the cumulative sum_{p <= n} g(p) at every grid point.

    Primes are streamed block by block; each block is cut at the grid
    points and each piece is fsum'ed, then pieces are fsum'ed cumulatively.
    """
    grid = np.asarray(points, dtype=np.int64)
    pieces: List[List[List[float]]] = [[[] for _ in points] for _ in terms]
    for block in iter_prime_blocks(int(grid[-1]), segment_size, cap):
        cuts = np.searchsorted(block, grid, side="right")
        values = [np.asarray(g(block), dtype=np.float64) for g in terms]
        start = 0
        for k, stop in enumerate(cuts):
            if stop > start:
                for t, v in enumerate(values):
                    pieces[t][k].append(math.fsum(v[start:stop]))
            start = max(start, stop)
    out = []
    for per_point in pieces:
        acc: List[float] = []
        col = []
        for chunk in per_point:
            acc.extend(chunk)
            col.append(math.fsum(acc))
        out.append(np.array(col))
    return out


def moment_sums(
    spec: AdditiveFunctionSpec,
    grid: Sequence[int],
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> SumGrid:
    points = _check_grid(grid)
    n_max = points[-1]
    rule = spec.rule

    def first(p):
        return np.asarray(rule(p, np.ones_like(p)), dtype=np.float64)

    A_star, D_star = _prime_sums_on_grid(
        [lambda p: first(p) / p, lambda p: first(p) ** 2 / p],
        points,
        segment_size,
        cap,
    )

    # a strongly additive function's mean/variance are the prime sums alone;
    # its prime powers carry no separate information
    tails: Dict[int, Tuple[np.ndarray, np.ndarray]] = {}
    root = iroot(n_max, 2)
    if root >= 2 and not spec.is_strongly_additive:
        small = build_primes(root, cap=cap).primes
        for alpha in range(2, n_max.bit_length()):
            top = iroot(n_max, alpha)
            if top < 2:
                break
            ps = small[small <= top]
            fv = np.asarray(rule(ps, np.full_like(ps, alpha)), dtype=np.float64)
            pa = np.array([float(int(p) ** alpha) for p in ps])
            ta, td = fv / pa, fv**2 / pa
            bounds = np.searchsorted(ps, [iroot(n, alpha) for n in points], side="right")
            tails[alpha] = (
                np.array([math.fsum(ta[:b]) for b in bounds]),
                np.array([math.fsum(td[:b]) for b in bounds]),
            )

    A = _fsum_columns([A_star] + [t[0] for t in tails.values()], len(points))
    D = _fsum_columns([D_star] + [t[1] for t in tails.values()], len(points))
    return SumGrid(spec.name, points, A, D, A_star, D_star, tails)


def delta_series(
    spec: AdditiveFunctionSpec,
    grid: Sequence[int],
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> Tuple[np.ndarray, np.ndarray]:
    """(A - A*, D - D*) on the grid, computed directly as the alpha >= 2 tails."""
    sg = moment_sums(spec, grid, segment_size, cap)
    return sg.delta_A, sg.delta_D


@dataclass
class ReferenceSumSeries:
    kind: str
    points: List[int]
    value: np.ndarray
    main_term: np.ndarray

    @property
    def remainder(self) -> np.ndarray:
        return self.value - self.main_term

    def rows(self) -> List[dict]:
        rem = self.remainder
        return [
            {
                "kind": self.kind,
                "n": n,
                "value": float(self.value[i]),
                "main_term": float(self.main_term[i]),
                "remainder": float(rem[i]),
            }
            for i, n in enumerate(self.points)
        ]


def reference_sum(
    kind: str,
    grid: Sequence[int],
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> ReferenceSumSeries:
    """Mertens-type sums and their conjectured main terms.

    ``recip_primes``     sum_{p<=n} 1/p             vs ln ln n
    ``logp_over_p``      sum_{p<=n} ln p / p        vs ln n
    ``log2p_over_p``     sum_{p<=n} ln^2 p / p      vs ln^2 n / 2
    ``logpp_over_pp``    sum_{p^a<=n} ln p^a / p^a  vs ln n
    ``log2pp_over_pp``   sum_{p^a<=n} ln^2 p^a / p^a  vs ln^2 n / 2
    """
    if kind not in REFERENCE_KINDS:
        raise ValueError(f"unknown reference kind {kind!r}; expected one of {REFERENCE_KINDS}")
    points = _check_grid(grid)
    spec = builtin("omega" if kind == "recip_primes" else "log")
    sg = moment_sums(spec, points, segment_size, cap)
    value = {
        "recip_primes": sg.A_star,
        "logp_over_p": sg.A_star,
        "log2p_over_p": sg.D_star,
        "logpp_over_pp": sg.A,
        "log2pp_over_pp": sg.D,
    }[kind]
    logs = np.log(np.asarray(points, dtype=np.float64))
    if kind == "recip_primes":
        main = np.log(logs)
    elif kind in ("logp_over_p", "logpp_over_pp"):
        main = logs
    else:
        main = 0.5 * logs**2
    return ReferenceSumSeries(kind, points, np.array(value, dtype=np.float64), main)


def transform_sum(
    g: Callable[[np.ndarray], np.ndarray],
    phi_inverse_threshold: Callable[[float], float],
    x: float,
    cap: int = HARD_CAP,
) -> float:
    """sum over primes p with phi(p) <= x of g(p), for strictly increasing phi.

    The caller passes the inverse of phi as a threshold map; the sum runs
    over p <= floor(phi_inverse_threshold(x)).
    """
    bound = math.floor(phi_inverse_threshold(x))
    if bound < 2:
        return 0.0
    parts = []
    for block in iter_prime_blocks(int(bound), cap=cap):
        vals = np.broadcast_to(np.asarray(g(block), dtype=np.float64), block.shape)
        parts.append(math.fsum(vals))
    return math.fsum(parts)


def prime_sum(g: Callable[[np.ndarray], np.ndarray], n: int, cap: int = HARD_CAP) -> float:
    """sum_{p <= n} g(p)."""
    return transform_sum(g, lambda x: x, n, cap)


def pi(n: int, cap: int = HARD_CAP) -> int:
    """Prime counting function."""
    return sum(len(b) for b in iter_prime_blocks(int(n), cap=cap)) if n >= 2 else 0


def iter_reference(kinds: Iterable[str], grid: Sequence[int], **kw) -> List[ReferenceSumSeries]:
    return [reference_sum(k, grid, **kw) for k in kinds]
