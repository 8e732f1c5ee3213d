"""Additive arithmetic functions: prime-power moment sums, empirical moments, class tests."""

from .functions import AdditiveFunctionSpec, builtin, evaluate, parse_function, strong_projection
from .sieve import Factorization, PrimePower, PrimeTable, build_primes, factorize_window, prime_powers_up_to
from .sums import SumGrid, delta_series, geometric_grid, moment_sums, reference_sum, transform_sum
from .empirical import EmpiricalMoments, empirical_moments, mean_via_counts, normalized_histogram
from .classify import ClassReport, class_h_proxy_check, class_s_check, classify, growth_check

__version__ = "0.1.0"
