# borsuk/bound_engine.py
"""
Exact threshold search: the smallest prime p for which n = 4p gives
alpha(n) * (n^2 + 1) < 2^(n-2), i.e. f(M) in dimension n^2 needs more than
n^2 + 1 parts of smaller diameter.

Verdicts use Python integers only. The Stirling estimates are advisory
floats and never feed a verdict.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List

from sympy import primerange

from .fw_polynomials import alpha, require_prime
from .hypercube_core import check_construction_dimension, reduced_dimension

logger = logging.getLogger(__name__)

PRIME_SCAN_LIMIT = 10_000


class ScanLimitExceeded(RuntimeError):
    """No counterexample prime up to the scan limit."""


# ---------------------------
# Binomials, second route
# ---------------------------

def pascal_row(N: int) -> List[int]:
    """Row N of Pascal's triangle by repeated addition."""
    row = [1]
    for _ in range(N):
        row = [1] + [a + b for a, b in zip(row, row[1:])] + [1]
    return row


def alpha_by_pascal(n: int) -> int:
    check_construction_dimension(n)
    return sum(pascal_row(n - 1)[: n // 4])


def confirm_counterexample(p: int) -> bool:
    """
    Second entry for alpha(4p) * (n^2 + 1) < 2^(n-2): Pascal-row alpha and an
    integer quotient instead of a product.
    """
    require_prime(p)
    n = 4 * p
    # a * b < M  <=>  a <= (M - 1) // b  for positive integers
    return alpha_by_pascal(n) <= ((1 << (n - 2)) - 1) // (n * n + 1)


# ---------------------------
# Stirling (advisory only)
# ---------------------------

def _ln_factorial(k: int) -> float:
    if k < 2:
        return 0.0
    return k * math.log(k) - k + 0.5 * math.log(2 * math.pi * k) + 1.0 / (12 * k)


def _log2_binomial(N: int, K: int) -> float:
    return (_ln_factorial(N) - _ln_factorial(K) - _ln_factorial(N - K)) / math.log(2)


def _check_estimate_dimension(n: int) -> None:
    check_construction_dimension(n)
    if n < 8:
        raise ValueError("Stirling estimates need n >= 8")


def stirling_estimate(n: int) -> float:
    """log2(2^(n-2) / ((n/4) * C(n-1, n/4 - 1))) with Stirling's series for the factorials."""
    _check_estimate_dimension(n)
    k = n // 4 - 1
    return (n - 2) - math.log2(n / 4) - _log2_binomial(n - 1, k)


def stirling_alpha_estimate(n: int) -> float:
    """
    log2(2^(n-2) / alpha(n)). The binomial sum is its largest term times the
    geometric tail 1 / (1 - r), r = K / (n - K) being the ratio of successive terms.
    """
    _check_estimate_dimension(n)
    k = n // 4 - 1
    r = k / (n - k)
    return (n - 2) - _log2_binomial(n - 1, k) + math.log2(1 - r)


def exact_log2_gap(n: int) -> float:
    """log2(2^(n-2) / alpha(n)) from the exact integers; reference for the estimates."""
    return (n - 2) - math.log2(alpha(n))


# ---------------------------
# Reports
# ---------------------------

@dataclass(frozen=True)
class ThresholdReport:
    p: int
    n: int
    alpha_n: int
    m_size: int
    parts_needed: int
    borsuk_bound: int
    middle_bound: int
    alpha_below_middle: bool
    middle_below_target: bool
    counterexample: bool
    stirling_estimate: float
    dimension: int
    reduced_dimension: int

    def to_dict(self) -> Dict[str, object]:
        return {
            "p": self.p,
            "n": self.n,
            "alpha_n": str(self.alpha_n),
            "m_size": str(self.m_size),
            "parts_needed": str(self.parts_needed),
            "borsuk_bound": str(self.borsuk_bound),
            "middle_bound": str(self.middle_bound),
            "alpha_below_middle": self.alpha_below_middle,
            "middle_below_target": self.middle_below_target,
            "counterexample": self.counterexample,
            "stirling_estimate": round(self.stirling_estimate, 6),
            "dimension": str(self.dimension),
            "reduced_dimension": str(self.reduced_dimension),
        }


def check_threshold(p: int) -> ThresholdReport:
    require_prime(p)
    n = 4 * p
    alpha_n = alpha(n)
    m_size = 1 << (n - 2)
    borsuk_bound = n * n + 1
    middle = (n // 4) * math.comb(n - 1, n // 4 - 1)
    report = ThresholdReport(
        p=p,
        n=n,
        alpha_n=alpha_n,
        m_size=m_size,
        parts_needed=-(-m_size // alpha_n),
        borsuk_bound=borsuk_bound,
        middle_bound=middle,
        alpha_below_middle=alpha_n < middle,
        # (n/4) C(n-1, n/4-1) < 2^(n-2) / (n^2+1), cross-multiplied
        middle_below_target=middle * borsuk_bound < m_size,
        counterexample=alpha_n * borsuk_bound < m_size,
        stirling_estimate=stirling_alpha_estimate(n),
        dimension=n * n,
        reduced_dimension=reduced_dimension(n),
    )
    logger.debug(f"p={p}: alpha={alpha_n}, parts_needed={report.parts_needed}, counterexample={report.counterexample}")
    return report


def scan_thresholds(limit: int = PRIME_SCAN_LIMIT) -> List[ThresholdReport]:
    """Reports for primes in ascending order, ending with the first counterexample."""
    reports = []
    for p in primerange(2, limit + 1):
        report = check_threshold(int(p))
        reports.append(report)
        if report.counterexample:
            if not confirm_counterexample(report.p):
                raise ArithmeticError(f"double-entry check disagrees at p = {report.p}")
            logger.info(f"First counterexample prime p = {report.p}: n = {report.n}, dimension {report.dimension}")
            return reports
    raise ScanLimitExceeded(f"no counterexample prime up to {limit}")


def find_min_counterexample(limit: int = PRIME_SCAN_LIMIT) -> ThresholdReport:
    return scan_thresholds(limit)[-1]

