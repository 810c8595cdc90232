import math

import pytest
from sympy import primerange

from borsuk.bound_engine import (
    ScanLimitExceeded,
    alpha_by_pascal,
    check_threshold,
    confirm_counterexample,
    exact_log2_gap,
    find_min_counterexample,
    pascal_row,
    scan_thresholds,
    stirling_alpha_estimate,
    stirling_estimate,
)
from borsuk.fw_polynomials import alpha


def test_pascal_row():
    assert pascal_row(0) == [1]
    assert pascal_row(4) == [1, 4, 6, 4, 1]
    assert pascal_row(51) == [math.comb(51, k) for k in range(52)]


@pytest.mark.parametrize("n", [4, 8, 12, 52, 100])
def test_alpha_two_routes_agree(n):
    assert alpha_by_pascal(n) == alpha(n)


def test_threshold_at_p2():
    r = check_threshold(2)
    assert (r.n, r.alpha_n, r.m_size) == (8, 8, 64)
    assert r.middle_bound == 14
    assert r.alpha_below_middle
    assert r.borsuk_bound == 65
    assert r.parts_needed == 8
    assert not r.counterexample
    assert r.dimension == 64
    assert r.reduced_dimension == 28


def test_threshold_rejects_composite():
    with pytest.raises(ValueError):
        check_threshold(4)


def test_first_counterexample():
    r = find_min_counterexample()
    assert r.counterexample
    assert r.alpha_n * r.borsuk_bound < r.m_size
    assert r.parts_needed > r.borsuk_bound
    assert r.n == 4 * r.p
    assert r.dimension == r.n * r.n
    assert confirm_counterexample(r.p)


def test_scan_is_minimal():
    reports = scan_thresholds()
    assert [r.p for r in reports[:4]] == [2, 3, 5, 7]
    assert all(not r.counterexample for r in reports[:-1])
    assert reports[-1].counterexample
    for r in reports[:-1]:
        assert r.alpha_n * (r.n * r.n + 1) >= 1 << (r.n - 2)
        assert not confirm_counterexample(r.p)


def test_scan_limit_exceeded():
    last = find_min_counterexample().p
    with pytest.raises(ScanLimitExceeded):
        scan_thresholds(last - 1)


def test_middle_inequality_is_strict():
    for p in (2, 3, 5, 7, 11, 13):
        r = check_threshold(p)
        assert r.alpha_n < r.middle_bound
        assert r.alpha_below_middle


def test_stirling_estimates():
    # middle bound at n = 8: log2(64 / 14)
    assert stirling_estimate(8) == pytest.approx(math.log2(64 / 14), rel=0.01)
    for p in (3, 5, 13, 101):
        n = 4 * p
        exact = exact_log2_gap(n)
        assert stirling_alpha_estimate(n) == pytest.approx(exact, rel=0.1)
    with pytest.raises(ValueError):
        stirling_estimate(4)


def test_report_dict_uses_strings_for_big_integers():
    d = find_min_counterexample().to_dict()
    assert isinstance(d["alpha_n"], str)
    assert int(d["m_size"]) == 1 << (d["n"] - 2)
    assert d["counterexample"] is True
    assert list(d)[:3] == ["p", "n", "alpha_n"]


def test_threshold_beyond_vertex_limit():
    r = check_threshold(37)
    assert r.n == 148
    assert r.alpha_n == alpha(148)
    assert r.counterexample
    assert confirm_counterexample(37)


def test_stirling_estimate_is_monotone():
    values = [stirling_estimate(n) for n in range(8, 401, 4)]
    assert all(a < b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("p", list(primerange(2, 101)))
def test_stirling_signs_match_exact_verdicts(p):
    r = check_threshold(p)
    target = math.log2(r.borsuk_bound)
    # middle bound: (n/4) C(n-1, n/4-1) against 2^(n-2) / (n^2+1)
    assert (stirling_estimate(r.n) > target) == r.middle_below_target
    assert (r.stirling_estimate > target) == r.counterexample
