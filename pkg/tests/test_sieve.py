import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from addfn_lab.sieve import (
    Factorization,
    PrimePower,
    PrimeTable,
    ResourceLimitError,
    build_primes,
    factorize_window,
    iroot,
    iter_prime_blocks,
    prime_powers_up_to,
    window_bounds,
    window_prime_powers,
)
from conftest import trial_division_primes


def test_build_primes_small_examples():
    assert build_primes(2).primes.tolist() == [2]
    assert build_primes(20).primes.tolist() == [2, 3, 5, 7, 11, 13, 17, 19]
    assert len(build_primes(100)) == len(trial_division_primes(100)) == 25


def test_build_primes_matches_trial_division(small_primes_list):
    assert build_primes(10**4).primes.tolist() == small_primes_list


@pytest.mark.parametrize("segment", [7, 64, 1000, 1 << 22])
def test_segment_size_does_not_change_primes(segment, small_primes_list):
    got = np.concatenate(list(iter_prime_blocks(10**4, segment)))
    assert got.tolist() == small_primes_list


def test_build_primes_errors():
    with pytest.raises(ValueError):
        build_primes(1)
    with pytest.raises(ResourceLimitError):
        build_primes(10**6, cap=10**5)


def test_prime_table_upto():
    t = build_primes(100)
    assert t.upto(10).tolist() == [2, 3, 5, 7]
    with pytest.raises(ValueError):
        t.upto(101)


def brute_prime_powers(n):
    ps = trial_division_primes(n)
    return {(p, a) for p in ps for a in range(1, 64) if p**a <= n}


def test_prime_powers_examples():
    assert {(q.p, q.alpha) for q in prime_powers_up_to(3)} == {(2, 1), (3, 1)}
    ten = prime_powers_up_to(10)
    assert [q.value for q in ten] == [2, 3, 5, 7, 4, 9, 8]
    assert PrimePower(2, 4) in prime_powers_up_to(16)


def test_prime_powers_grouped_by_alpha_then_p():
    pp = prime_powers_up_to(1000)
    keys = [(q.alpha, q.p) for q in pp]
    assert keys == sorted(keys)
    assert max(q.alpha for q in pp) == int(math.log2(1000))


@pytest.mark.parametrize("n", [2, 10, 16, 17, 127, 128, 999, 1024, 4096, 10**4])
def test_prime_power_count_matches_enumeration(n):
    pp = prime_powers_up_to(n)
    assert {(q.p, q.alpha) for q in pp} == brute_prime_powers(n)
    pi = lambda x: len(trial_division_primes(x))
    assert len(pp) == sum(pi(iroot(n, k)) for k in range(1, n.bit_length() + 1))


def test_prime_power_rejects_overflow():
    assert PrimePower(2, 63).value == 2**63
    with pytest.raises(OverflowError):
        PrimePower(2, 64)
    with pytest.raises(ValueError):
        PrimePower(3, 0)


@given(st.integers(min_value=0, max_value=2**80), st.integers(min_value=1, max_value=40))
def test_iroot_is_exact(n, k):
    r = iroot(n, k)
    assert r**k <= n < (r + 1) ** k


@pytest.mark.parametrize("p,k", [(10**4 - 3, 2), (97, 4), (2, 26), (3, 16), (46337, 2)])
def test_iroot_at_perfect_powers(p, k):
    assert iroot(p**k, k) == p
    assert iroot(p**k - 1, k) == p - 1


def test_factorization_invariants():
    assert Factorization(1, ()).factors == ()
    with pytest.raises(ValueError):
        Factorization(12, ((3, 1), (2, 2)))
    with pytest.raises(ValueError):
        Factorization(12, ((2, 1), (3, 1)))


def test_factorize_window_examples():
    assert factorize_window(2, 2).smallest_factor(2) == 2
    assert factorize_window(12, 12).factorization(12).factors == ((2, 2), (3, 1))
    assert factorize_window(360, 360).factorization(360).factors == ((2, 3), (3, 2), (5, 1))


def test_factorize_window_needs_enough_primes():
    with pytest.raises(ValueError):
        factorize_window(1000, 2000, PrimeTable(10, np.array([2, 3, 5, 7])))
    with pytest.raises(ValueError):
        factorize_window(1, 10)


def test_spf_is_least_prime_divisor():
    seg = factorize_window(10**6, 10**6 + 5000)
    for m in range(seg.lo, seg.hi + 1):
        p = seg.smallest_factor(m)
        assert m % p == 0
        assert all(m % d for d in range(2, min(p, math.isqrt(m) + 1)))


def test_exhaustive_factorization_up_to_1e5():
    seg = factorize_window(2, 10**5)
    for m in range(2, 10**5 + 1):
        prod = 1
        for p, a in seg.factorization(m).factors:
            prod *= p**a
        assert prod == m


def test_window_prime_powers_reconstructs_every_integer():
    lo, hi = 2, 10**5
    base = build_primes(iroot(hi, 2)).primes
    prod = np.ones(hi - lo + 1, dtype=np.int64)
    for p, offs, alpha in window_prime_powers(lo, hi, base):
        assert len(np.unique(offs)) == len(offs)
        prod[offs] *= p**alpha
    assert np.array_equal(prod, np.arange(lo, hi + 1))


def test_window_bounds_cover_range_and_cut_at_breakpoints():
    w = window_bounds(1000, 128, [100, 500])
    assert w[0][0] == 2 and w[-1][1] == 1000
    assert all(b[0] == a[1] + 1 for a, b in zip(w, w[1:]))
    ends = {hi for _, hi in w}
    assert {100, 500, 1000} <= ends
    assert max(hi - lo + 1 for lo, hi in w) <= 128
