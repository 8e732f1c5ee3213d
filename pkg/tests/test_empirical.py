import math

import numpy as np
import pytest

from addfn_lab.empirical import (
    empirical_grid,
    empirical_moments,
    growth_series,
    mean_via_counts,
    normalized_histogram,
    window_values,
)
from addfn_lab.functions import builtin, strong_projection
from addfn_lab.sieve import ResourceLimitError, small_primes
from addfn_lab.sums import moment_sums, pi

BUILTINS = [
    ("zero", {}),
    ("omega", {}),
    ("big_omega", {}),
    ("log", {}),
    ("log_pow", {"u": 2.0}),
    ("log_phi", {}),
]

OMEGA_1_TO_10 = [0, 1, 1, 1, 1, 2, 1, 1, 1, 2]


def brute_values(spec, n):
    return [0.0] + [spec(m) for m in range(2, n + 1)]


def test_omega_examples():
    em = empirical_moments(builtin("omega"), 10)
    assert em.mean == pytest.approx(np.mean(OMEGA_1_TO_10), rel=1e-15)
    assert em.mean == pytest.approx(1.1, rel=1e-15)
    assert em.variance == pytest.approx(np.var(OMEGA_1_TO_10), rel=1e-12)
    assert em.variance == pytest.approx(0.29, rel=1e-12)
    assert em.count == 10


def test_zero_moments_exact():
    for n in (1, 10, 12345):
        em = empirical_moments(builtin("zero"), n)
        assert em.mean == 0.0 and em.variance == 0.0


def test_n_equal_one():
    em = empirical_moments(builtin("log"), 1)
    assert (em.mean, em.variance) == (0.0, 0.0)


@pytest.mark.parametrize("name,params", BUILTINS)
def test_moments_match_brute_force(name, params):
    spec = builtin(name, **params)
    n = 3000
    vals = brute_values(spec, n)
    # tiny segments exercise the window merge
    em = empirical_moments(spec, n, segment_size=97)
    assert em.mean == pytest.approx(math.fsum(vals) / n, rel=1e-12, abs=1e-15)
    assert em.variance == pytest.approx(np.var(vals), rel=1e-10, abs=1e-15)


def test_window_values_match_pointwise():
    spec = builtin("log_phi")
    lo, hi = 10**6, 10**6 + 300
    vals = window_values(spec, lo, hi, small_primes(1001))
    assert vals.tolist() == pytest.approx([spec(m) for m in range(lo, hi + 1)], rel=1e-13)


def test_count_identity_examples():
    assert mean_via_counts(builtin("omega"), 10) == pytest.approx((5 + 3 + 2 + 1) / 10, rel=1e-15)
    assert mean_via_counts(builtin("big_omega"), 10) == pytest.approx(1.5, rel=1e-15)
    assert mean_via_counts(builtin("zero"), 10**4) == 0.0


@pytest.mark.parametrize("name,params", BUILTINS)
@pytest.mark.parametrize("n", [10**3, 10**4, 10**5])
def test_oracle_equivalence(name, params, n):
    spec = builtin(name, **params)
    em = empirical_moments(spec, n)
    assert abs(em.mean - mean_via_counts(spec, n)) <= 1e-9 * (1 + abs(em.mean))


def test_grid_and_single_point_agree():
    spec = builtin("big_omega")
    points = [10, 100, 1000, 10**4, 10**5]
    grid = empirical_grid(spec, points, segment_size=5000)
    for n, em in zip(points, grid):
        single = empirical_moments(spec, n)
        assert em.mean == pytest.approx(single.mean, rel=1e-13)
        assert em.variance == pytest.approx(single.variance, rel=1e-11)


def test_results_do_not_depend_on_workers():
    spec = builtin("log")
    points = [1000, 50_000, 200_000]
    one = empirical_grid(spec, points, workers=1, segment_size=1 << 14)
    four = empirical_grid(spec, points, workers=4, segment_size=1 << 14)
    assert one == four


@pytest.mark.parametrize("n", [10**4, 10**5, 10**6])
def test_bracketing_for_omega(n):
    om = builtin("omega")
    gap = float(moment_sums(om, [n]).A_star[0]) - empirical_moments(om, n).mean
    assert -1e-9 <= gap <= pi(n) / n + 1e-9


def test_bracketing_for_strongly_additive_log():
    spec = strong_projection(builtin("log"))
    n = 10**5
    gap = float(moment_sums(spec, [n]).A_star[0]) - empirical_moments(spec, n).mean
    ps = small_primes(n)
    upper = math.fsum(np.log(ps.astype(float))) / n
    assert -1e-9 <= gap <= upper + 1e-9


def test_resource_cap():
    with pytest.raises(ResourceLimitError):
        empirical_moments(builtin("omega"), 10**6, cap=10**5)


def test_histogram_example():
    h = normalized_histogram(builtin("omega"), 10, centering_source="empirical", edges=[-4, 0, 4])
    assert h.masses.tolist() == pytest.approx([0.8, 0.2], abs=1e-15)
    assert h.centering == pytest.approx(1.1)
    assert h.scaling == pytest.approx(math.sqrt(0.29))


def test_histogram_zero_variance():
    with pytest.raises(ValueError, match="zero"):
        normalized_histogram(builtin("zero"), 1000)
    with pytest.raises(ValueError, match="zero"):
        normalized_histogram(builtin("zero"), 1000, centering_source="empirical")


@pytest.mark.parametrize("name,params", [b for b in BUILTINS if b[0] != "zero"])
@pytest.mark.parametrize("source", ["theoretical", "empirical"])
def test_histogram_masses_sum_to_one(name, params, source):
    h = normalized_histogram(builtin(name, **params), 20_000, centering_source=source, segment_size=3000)
    assert len(h.masses) == 41
    assert np.all(h.masses >= 0)
    assert abs(h.masses.sum() - 1) <= 1e-12
    assert h.bin_edges[0] == -4 and h.bin_edges[-1] == 4


def test_histogram_edge_bins_collect_outliers():
    spec = builtin("omega")
    h = normalized_histogram(spec, 5000, edges=[-0.1, 0.0, 0.1], centering_source="empirical")
    vals = np.array(brute_values(spec, 5000))
    z = (vals - vals.mean()) / vals.std()
    assert h.masses[0] == pytest.approx(np.mean(z < 0), abs=1e-12)
    assert h.masses[1] == pytest.approx(np.mean(z >= 0), abs=1e-12)


def test_growth_examples():
    grid = [10, 100, 1000, 10**4, 10**5]
    g_phi = growth_series(builtin("log_phi"), grid)
    assert np.all(g_phi < 1)
    g_log = growth_series(builtin("log"), grid)
    assert g_log == pytest.approx(np.ones(5), rel=1e-14)
    g_big = growth_series(builtin("big_omega"), grid)
    assert g_big == pytest.approx(np.full(5, 1 / math.log(2)), rel=1e-14)


def test_growth_series_is_running_max():
    spec = builtin("big_omega")
    n = 2000
    ratios = [abs(spec(m)) / math.log(m) for m in range(2, n + 1)]
    grid = [2, 17, 256, 1000, 2000]
    expect = [max(ratios[: k - 1]) for k in grid]
    assert growth_series(spec, grid, segment_size=100).tolist() == pytest.approx(expect, rel=1e-14)
