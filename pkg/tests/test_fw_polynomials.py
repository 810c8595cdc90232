import math
import random
import time

import numpy as np
import pytest

from borsuk import fw_polynomials
from borsuk.fw_polynomials import (
    COEFFICIENT_BASIS_LIMIT,
    Monomial,
    MultilinearPoly,
    RankBudgetExceeded,
    alpha,
    check_nondivisibility,
    coefficient_matrix,
    dimension_bound_check,
    evaluation_matrix,
    g_eval,
    independence_rank,
    is_prime,
    monomial_basis,
    monomial_label,
    nondivisibility_witness,
    rank_mod_p,
    reduce_fa,
    substitution_mismatches,
)
from borsuk.hypercube_core import SignVertex, build_M, dot
from borsuk.ortho_graph import is_ortho_free


@pytest.mark.parametrize("n,expected", [(4, 1), (8, 8), (12, 67), (20, 1 + 19 + 171 + 969 + 3876)])
def test_alpha_values(n, expected):
    assert alpha(n) == expected


def test_alpha_is_exact_for_large_n():
    n = 4 * 97
    assert alpha(n) == sum(math.comb(n - 1, k) for k in range(97))


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_g_vanishes_off_multiples(p):
    for t in range(-3 * p, 3 * p + 1):
        assert (g_eval(t, p) == 0) == (t % p != 0)


def test_g_at_multiples_is_wilson():
    # (p-1)! = -1 mod p
    assert g_eval(0, 5) == 4
    assert g_eval(12, 3) == 2


def test_prime_checks():
    assert is_prime(13)
    assert not is_prime(1)
    assert not is_prime(9)
    with pytest.raises(ValueError):
        g_eval(1, 4)


def test_monomial_basis_order_and_size():
    basis = monomial_basis(12, 3)
    assert len(basis) == alpha(12)
    assert basis[0] == 0
    assert [monomial_label(m) for m in basis[1:4]] == ["x2", "x3", "x4"]
    keys = [(m.bit_count(), m) for m in basis]
    assert keys == sorted(keys)
    assert all(not m & 1 and m.bit_count() <= 2 for m in basis)


def test_monomial_labels():
    assert Monomial(0b110).label() == "x2*x3"
    assert Monomial(0).label() == "1"
    assert Monomial(0b1010).degree == 2


def test_poly_normalises_coefficients():
    poly = MultilinearPoly(3, 12, {0b100: 4, 0: 3, 0b10: -1})
    assert dict(poly.coeffs) == {0b10: 2, 0b100: 1}
    assert poly.degree == 1
    assert str(poly) == "2*x2 + 1*x3"
    with pytest.raises(ValueError):
        MultilinearPoly(3, 12, {1: 1})
    with pytest.raises(ValueError):
        MultilinearPoly(3, 12, {0b1110: 1})


def test_reduce_fa_all_ones_p3():
    a = SignVertex(12, 0)
    poly = reduce_fa(a, 3)
    # (s)(s - 1) with s = sum x_i over i >= 2, x_i^2 = 1
    assert poly.degree == 2
    assert poly.coeffs[0] == 11 % 3
    assert all(poly.coeffs[1 << i] == (-1) % 3 for i in range(1, 12))
    assert poly.coeffs[0b110] == 2


def test_reduce_fa_rejects_bad_input():
    with pytest.raises(ValueError):
        reduce_fa(SignVertex(8, 0), 3)
    with pytest.raises(ValueError):
        reduce_fa(SignVertex(12, 1), 3)


@pytest.mark.parametrize("p", [2, 3])
def test_substitution_identity(p):
    m = build_M(4 * p)
    rng = random.Random(11)
    pairs = [(m[rng.randrange(len(m))], m[rng.randrange(len(m))]) for _ in range(300)]
    assert substitution_mismatches(pairs, p) == []


def test_evaluate_matches_g(m12):
    pairs = [(m12[0], m12[5])]
    poly = reduce_fa(m12[0], 3)
    assert poly.evaluate(m12[5]) == g_eval(dot(m12[0], m12[5]), 3)
    assert substitution_mismatches(pairs, 3) == []


def test_rank_mod_p():
    assert rank_mod_p([[1, 2], [2, 4]], 5) == 1
    assert rank_mod_p([[1, 2], [2, 4]], 2) == 1
    assert rank_mod_p([[1, 0, 0], [0, 1, 0], [0, 0, 1]], 7) == 3
    assert rank_mod_p([[0, 0], [0, 3]], 3) == 0
    assert rank_mod_p(np.zeros((0, 4)), 3) == 0


def _first_fit(m, limit=None):
    chosen = []
    for v in m:
        if all(dot(v, c) != 0 for c in chosen):
            chosen.append(v)
        if limit and len(chosen) == limit:
            break
    return chosen


def test_independence_at_p3(m12):
    family = _first_fit(m12)
    assert is_ortho_free(family)
    report = independence_rank(family, 3)
    assert report.independent
    assert report.coefficient_rank == report.evaluation_rank == len(family)
    assert dimension_bound_check(report.coefficient_rank, 12)


def test_evaluation_matrix_is_diagonal(m12):
    family = _first_fit(m12, limit=10)
    e = evaluation_matrix(family, 3)
    assert np.all(np.diag(e) != 0)
    assert np.all(e[~np.eye(len(family), dtype=bool)] == 0)


def test_coefficient_matrix_shape(m12):
    family = _first_fit(m12, limit=5)
    basis, mat = coefficient_matrix(family, 3)
    assert mat.shape == (5, len(basis))
    assert mat.min() >= 0 and mat.max() <= 2


def test_p2_families_collapse(m8):
    family = _first_fit(m8)
    assert len(family) >= 2
    report = independence_rank(family, 2)
    assert report.coefficient_rank == 1
    assert report.evaluation_rank == 1
    assert not report.independent
    assert np.all(evaluation_matrix(family, 2) == 1)


def test_family_rejections(m12):
    with pytest.raises(ValueError, match="not ortho-free"):
        independence_rank([m12[0], m12[m12.index_of(0b111_1110)]], 3)
    with pytest.raises(ValueError, match="duplicate"):
        independence_rank([m12[0], m12[0]], 3)


def test_nondivisibility_odd_prime(m12):
    assert check_nondivisibility(m12, 3)
    assert nondivisibility_witness(m12, 3) is None


def test_nondivisibility_fails_at_p2(m8):
    assert not check_nondivisibility(m8, 2)
    i, j, d = nondivisibility_witness(m8, 2)
    assert i < j
    assert abs(d) == 4


def test_nondivisibility_parameter_mismatch(m8):
    with pytest.raises(ValueError, match="parameter mismatch"):
        check_nondivisibility(m8, 3)


def test_alpha_beyond_vertex_limit():
    assert alpha(132) == sum(math.comb(131, k) for k in range(33))


def test_monomial_basis_is_its_own_coordinate_system():
    basis = monomial_basis(12, 3)
    rows = [MultilinearPoly(3, 12, {m: 1}).coefficient_vector(basis) for m in basis]
    mat = np.array(rows, dtype=np.int64)
    assert np.array_equal(mat, np.eye(len(basis), dtype=np.int64))
    assert rank_mod_p(mat, 3) == len(basis) == alpha(12)


def test_coefficient_matrix_rows_match_reduce_fa(m12):
    family = _first_fit(m12, limit=3)
    basis, mat = coefficient_matrix(family, 3)
    for row, a in zip(mat, family):
        poly = reduce_fa(a, 3)
        assert {basis[k]: int(c) for k, c in enumerate(row) if c} == dict(poly.coeffs)


def test_coefficient_matrix_refuses_wide_basis():
    assert alpha(28) > COEFFICIENT_BASIS_LIMIT
    with pytest.raises(ValueError, match="exceeds the limit"):
        coefficient_matrix([], 7)


def test_rank_mod_p_honours_deadline():
    with pytest.raises(RankBudgetExceeded):
        rank_mod_p(np.eye(3, dtype=np.int64), 3, deadline=time.monotonic() - 1)
    assert rank_mod_p(np.eye(3, dtype=np.int64), 3, deadline=time.monotonic() + 60) == 3


def test_independence_rank_out_of_time(m12):
    family = _first_fit(m12, limit=5)
    report = independence_rank(family, 3, deadline=time.monotonic() - 1)
    assert report.family_size == 5
    assert report.coefficient_rank is None
    assert report.evaluation_rank is None
    assert report.independent is None
    assert report.coefficients is None


def test_independence_from_evaluation_rank_alone(m12, monkeypatch):
    monkeypatch.setattr(fw_polynomials, "COEFFICIENT_BASIS_LIMIT", 10)
    family = _first_fit(m12, limit=5)
    report = independence_rank(family, 3)
    assert report.coefficient_rank is None
    assert report.evaluation_rank == 5
    assert report.independent


def test_rank_report_carries_coefficients(m12):
    family = _first_fit(m12, limit=4)
    report = independence_rank(family, 3)
    assert report.basis == tuple(monomial_basis(12, 3))
    assert report.coefficients.shape == (4, alpha(12))
