"""Primes, prime powers and windowed smallest-prime-factor tables.

Everything here is segmented: the full range [2, n] is never held in memory
at once, only one window of ``segment_size`` integers plus the base primes
up to sqrt(n).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt
from typing import Iterator, List, Sequence, Tuple

import numpy as np

DEFAULT_SEGMENT_SIZE = 1 << 22
HARD_CAP = 10**8
UINT64_MAX = (1 << 64) - 1


class ResourceLimitError(RuntimeError):
    """Requested range is larger than the configured cap."""


def iroot(n: int, k: int) -> int:
    """Largest integer r with r**k <= n (exact, no float rounding)."""
    if n < 0 or k < 1:
        raise ValueError("iroot needs n >= 0 and k >= 1")
    if n < 2 or k == 1:
        return n
    if k == 2:
        return isqrt(n)
    r = int(round(n ** (1.0 / k)))
    # float guess can be off by one either way near perfect powers
    while r > 0 and r**k > n:
        r -= 1
    while (r + 1) ** k <= n:
        r += 1
    return r


def _check_cap(limit: int, cap: int) -> None:
    if limit > cap:
        raise ResourceLimitError(f"limit {limit} exceeds cap {cap}")


def small_primes(limit: int) -> np.ndarray:
    """Plain sieve of Eratosthenes; only meant for limit around sqrt(n)."""
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def iter_prime_blocks(
    limit: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> Iterator[np.ndarray]:
    """Yield the primes <= limit in ascending blocks, one per segment."""
    _check_cap(limit, cap)
    if limit < 2:
        return
    base = small_primes(isqrt(limit))
    lo = 2
    while lo <= limit:
        hi = min(lo + segment_size - 1, limit)
        mask = np.ones(hi - lo + 1, dtype=bool)
        for p in base:
            p = int(p)
            if p * p > hi:
                break
            start = max(p * p, -(-lo // p) * p)
            mask[start - lo :: p] = False
        yield np.flatnonzero(mask).astype(np.int64) + lo
        lo = hi + 1


@dataclass(frozen=True)
class PrimeTable:
    limit: int
    primes: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.primes)

    def upto(self, x: int) -> np.ndarray:
        """Primes <= x (x may exceed limit only if limit covers it)."""
        if x > self.limit:
            raise ValueError(f"table only covers primes <= {self.limit}")
        return self.primes[: np.searchsorted(self.primes, x, side="right")]


def build_primes(
    limit: int,
    segment_size: int = DEFAULT_SEGMENT_SIZE,
    cap: int = HARD_CAP,
) -> PrimeTable:
    if limit < 2:
        raise ValueError(f"build_primes needs limit >= 2, got {limit}")
    blocks = list(iter_prime_blocks(limit, segment_size, cap))
    return PrimeTable(limit, np.concatenate(blocks))


@dataclass(frozen=True, order=True)
class PrimePower:
    p: int
    alpha: int
    value: int = field(init=False, compare=False)

    def __post_init__(self) -> None:
        if self.alpha < 1:
            raise ValueError("exponent must be >= 1")
        value = self.p**self.alpha
        if value > UINT64_MAX:
            raise OverflowError(f"{self.p}^{self.alpha} does not fit in 64 bits")
        object.__setattr__(self, "value", value)


def prime_power_groups(n: int, cap: int = HARD_CAP) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield ``(alpha, primes p with p**alpha <= n)`` for alpha = 1, 2, ...

    The alpha = 1 group is the full prime table up to n; for bulk work
    over large n prefer :func:`iter_prime_blocks` for that group.
    """
    if n < 2:
        return
    table = build_primes(n, cap=cap)
    for alpha in range(1, n.bit_length()):
        bound = iroot(n, alpha)
        if bound < 2:
            break
        yield alpha, table.upto(bound)


def prime_powers_up_to(n: int, cap: int = HARD_CAP) -> List[PrimePower]:
    """All prime powers p**alpha <= n, grouped by alpha, then ascending p."""
    if n < 2:
        raise ValueError(f"prime_powers_up_to needs n >= 2, got {n}")
    return [
        PrimePower(int(p), alpha)
        for alpha, ps in prime_power_groups(n, cap)
        for p in ps
    ]


@dataclass(frozen=True)
class Factorization:
    m: int
    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self) -> None:
        prod = 1
        last = 1
        for p, a in self.factors:
            if p <= last or a < 1:
                raise ValueError(f"malformed factorization of {self.m}: {self.factors}")
            last = p
            prod *= p**a
        if prod != self.m:
            raise ValueError(f"factors {self.factors} do not multiply to {self.m}")


@dataclass(frozen=True)
class SpfSegment:
    """Smallest prime factor for every integer in [lo, hi]."""

    lo: int
    hi: int
    spf: np.ndarray = field(repr=False)

    def smallest_factor(self, m: int) -> int:
        if not self.lo <= m <= self.hi:
            raise IndexError(f"{m} outside window [{self.lo}, {self.hi}]")
        return int(self.spf[m - self.lo])

    def factorization(self, m: int) -> Factorization:
        # only the first prime comes from the table; the cofactor m / p^a is
        # usually outside the window so the rest goes by trial division over
        # primes >= spf (cheap: cofactor has no prime factor below spf)
        p = self.smallest_factor(m)
        factors = []
        rest = m
        while rest > 1:
            a = 0
            while rest % p == 0:
                rest //= p
                a += 1
            factors.append((p, a))
            if rest == 1:
                break
            if self.lo <= rest <= self.hi:
                p = int(self.spf[rest - self.lo])
                continue
            q = p + 1
            while q * q <= rest and rest % q:
                q += 1
            p = q if q * q <= rest else rest
        return Factorization(m, tuple(factors))


def _aux_covers(aux: PrimeTable, hi: int) -> None:
    if aux.limit < isqrt(hi):
        raise ValueError(
            f"auxiliary prime table up to {aux.limit} does not cover sqrt({hi})"
        )


def factorize_window(lo: int, hi: int, aux: PrimeTable | None = None) -> SpfSegment:
    if not 2 <= lo <= hi:
        raise ValueError(f"need 2 <= lo <= hi, got [{lo}, {hi}]")
    if aux is None:
        aux = PrimeTable(max(isqrt(hi), 2), small_primes(max(isqrt(hi), 2)))
    _aux_covers(aux, hi)
    spf = np.zeros(hi - lo + 1, dtype=np.int64)
    for p in aux.primes:
        p = int(p)
        if p * p > hi:
            break
        start = max(p, -(-lo // p) * p)
        view = spf[start - lo :: p]
        view[view == 0] = p
    unset = spf == 0
    spf[unset] = np.arange(lo, hi + 1, dtype=np.int64)[unset]
    return SpfSegment(lo, hi, spf)


def window_prime_powers(
    lo: int, hi: int, base: Sequence[int] | np.ndarray
) -> Iterator[Tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """Vectorized factorization of every integer in [lo, hi].

    Yields chunks ``(p, offsets, alpha)`` meaning p[i]**alpha[i] exactly
    divides ``lo + offsets[i]``. ``base`` must hold every prime <= sqrt(hi).
    Within one chunk offsets are distinct, so scatter-adds need no
    ``np.add.at``.
    """
    rem = np.arange(lo, hi + 1, dtype=np.int64)
    for p in base:
        p = int(p)
        if p * p > hi:
            break
        start = -(-lo // p) * p
        if start > hi:
            continue
        offs = np.arange(start - lo, hi - lo + 1, p, dtype=np.int64)
        vals = rem[offs] // p
        alpha = np.ones(len(offs), dtype=np.int64)
        idx = np.flatnonzero(vals % p == 0)
        while idx.size:
            vals[idx] //= p
            alpha[idx] += 1
            idx = idx[vals[idx] % p == 0]
        rem[offs] = vals
        yield np.full(len(offs), p, dtype=np.int64), offs, alpha
    # what is left above 1 is a single prime > sqrt(hi), to the first power
    big = np.flatnonzero(rem > 1)
    yield rem[big], big, np.ones(len(big), dtype=np.int64)


def window_bounds(
    n: int, segment_size: int = DEFAULT_SEGMENT_SIZE, breakpoints: Sequence[int] = ()
) -> List[Tuple[int, int]]:
    """Split [2, n] into windows of at most segment_size, also cut after each breakpoint."""
    cuts = sorted({b for b in breakpoints if 2 <= b < n} | {n})
    out = []
    lo = 2
    for c in cuts:
        while lo <= c:
            hi = min(lo + segment_size - 1, c)
            out.append((lo, hi))
            lo = hi + 1
    return out
