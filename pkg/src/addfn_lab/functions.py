"""Additive arithmetic functions given by their values on prime powers.

A rule is a callable ``rule(p, alpha)`` that works elementwise on numpy
arrays as well as on plain ints; all builtin rules are small classes rather
than lambdas so specs can be shipped to worker processes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Mapping, Tuple

import numpy as np

from .sieve import Factorization

Rule = Callable[[Any, Any], Any]


class UnknownFunctionError(ValueError):
    pass


class ZeroRule:
    def __call__(self, p, alpha):
        return np.zeros_like(np.asarray(p, dtype=np.float64))


class BigOmegaRule:
    def __call__(self, p, alpha):
        return np.asarray(alpha, dtype=np.float64) + 0.0 * np.asarray(p)


class OmegaRule:
    def __call__(self, p, alpha):
        return np.ones_like(np.asarray(p, dtype=np.float64)) + 0.0 * np.asarray(alpha)


@dataclass(frozen=True)
class LogPowRule:
    """f(p^a) = a*u*ln p, i.e. f(m) = ln(m^u)."""

    u: float = 1.0

    def __call__(self, p, alpha):
        return self.u * np.asarray(alpha, dtype=np.float64) * np.log(np.asarray(p, dtype=np.float64))


class LogPhiRule:
    """f(p^a) = ln(p^a - p^(a-1)) = (a-1) ln p + ln(p-1)."""

    def __call__(self, p, alpha):
        p = np.asarray(p, dtype=np.float64)
        a = np.asarray(alpha, dtype=np.float64)
        return (a - 1.0) * np.log(p) + np.log(p - 1.0)


@dataclass(frozen=True)
class PrimePowerRule:
    """f(p^a) = p^(a-1); f(p) = 1 but the prime-power tails diverge."""

    def __call__(self, p, alpha):
        p = np.asarray(p, dtype=np.float64)
        return p ** (np.asarray(alpha, dtype=np.float64) - 1.0)


@dataclass(frozen=True)
class TableRule:
    """Explicit values for finitely many (p, alpha), ``default`` elsewhere."""

    table: Tuple[Tuple[Tuple[int, int], float], ...]
    default: Rule = field(default_factory=ZeroRule)

    def __call__(self, p, alpha):
        p_arr = np.asarray(p)
        a_arr = np.asarray(alpha)
        out = np.array(self.default(p_arr, a_arr), dtype=np.float64)
        for (tp, ta), v in self.table:
            hit = (p_arr == tp) & (a_arr == ta)
            if out.ndim == 0:
                if hit:
                    out = np.float64(v)
            else:
                out[hit] = v
        return out


@dataclass(frozen=True)
class StrongRule:
    """Strongly additive projection: every power of p gets f(p)."""

    base: Rule

    def __call__(self, p, alpha):
        return self.base(p, np.ones_like(np.asarray(alpha)))


@dataclass(frozen=True)
class AdditiveFunctionSpec:
    name: str
    rule: Rule
    params: Mapping[str, float] = field(default_factory=dict)
    is_strongly_additive: bool = False

    def value(self, p: int, alpha: int) -> float:
        return float(self.rule(p, alpha))

    def __call__(self, m: int) -> float:
        """f(m) by trial division; convenient for small m, not for bulk work."""
        return evaluate(self, trial_factorization(m))


def trial_factorization(m: int) -> Factorization:
    if m < 1:
        raise ValueError(f"need m >= 1, got {m}")
    factors = []
    rest = m
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            a = 0
            while rest % p == 0:
                rest //= p
                a += 1
            factors.append((p, a))
        p += 1 if p == 2 else 2
    if rest > 1:
        factors.append((rest, 1))
    return Factorization(m, tuple(factors))


def evaluate(spec: AdditiveFunctionSpec, fac: Factorization) -> float:
    """f(m) as the sum of f(p^alpha) over the exact prime powers of m."""
    return math.fsum(spec.value(p, a) for p, a in fac.factors)


def strong_projection(spec: AdditiveFunctionSpec) -> AdditiveFunctionSpec:
    if spec.is_strongly_additive:
        return spec
    return AdditiveFunctionSpec(
        name=f"{spec.name}*",
        rule=StrongRule(spec.rule),
        params=dict(spec.params),
        is_strongly_additive=True,
    )


def builtin(name: str, **params: Any) -> AdditiveFunctionSpec:
    """Construct one of the named additive functions.

    Known names: ``big_omega``, ``omega``, ``log``, ``log_pow`` (needs
    ``u > 0``), ``log_phi``, ``zero``, ``prime_power`` (f(p^a) = p^(a-1))
    and ``custom_table`` (``table={(p, a): value}``, optional ``default``
    rule, optional ``strong`` flag).
    """
    if name == "big_omega":
        return AdditiveFunctionSpec("big_omega", BigOmegaRule())
    if name == "omega":
        return AdditiveFunctionSpec("omega", OmegaRule(), is_strongly_additive=True)
    if name == "log":
        return AdditiveFunctionSpec("log", LogPowRule(1.0))
    if name == "log_pow":
        u = float(params.get("u", 1.0))
        if not u > 0:
            raise ValueError(f"log_pow needs u > 0, got {u}")
        return AdditiveFunctionSpec(f"log_pow(u={u:g})", LogPowRule(u), {"u": u})
    if name == "log_phi":
        return AdditiveFunctionSpec("log_phi", LogPhiRule())
    if name == "zero":
        return AdditiveFunctionSpec("zero", ZeroRule(), is_strongly_additive=True)
    if name == "prime_power":
        return AdditiveFunctionSpec("prime_power", PrimePowerRule())
    if name == "custom_table":
        table: Dict[Tuple[int, int], float] = params.get("table", {})
        rule = TableRule(
            tuple(sorted((k, float(v)) for k, v in table.items())),
            params.get("default", ZeroRule()),
        )
        return AdditiveFunctionSpec(
            params.get("label", "custom_table"),
            rule,
            is_strongly_additive=bool(params.get("strong", False)),
        )
    raise UnknownFunctionError(f"unknown additive function {name!r}")


def parse_function(text: str) -> AdditiveFunctionSpec:
    """Parse the CLI mini-language (case-sensitive).

    ``omega``, ``Omega``, ``log``, ``log^u=2.0``, ``logphi``, ``zero``.
    """
    s = text.strip()
    simple = {
        "omega": "omega",
        "Omega": "big_omega",
        "log": "log",
        "logphi": "log_phi",
        "zero": "zero",
    }
    if s in simple:
        return builtin(simple[s])
    if s.startswith("log^"):
        key, _, val = s[4:].partition("=")
        if key != "u" or not val:
            raise UnknownFunctionError(f"expected log^u=<value>, got {text!r}")
        try:
            u = float(val)
        except ValueError:
            raise UnknownFunctionError(f"bad exponent in {text!r}") from None
        return builtin("log_pow", u=u)
    raise UnknownFunctionError(f"unknown function {text!r}")
