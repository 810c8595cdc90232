# borsuk/fw_polynomials.py
"""
Square-free polynomials over GF(p) and the linear-independence argument
behind the cap |A| <= alpha(n) on ortho-free subsets of M.

For a in M the polynomial F_a(x_2..x_n) = G(a.x), with x = (1, x_2, .., x_n)
and G(t) = (t-1)(t-2)...(t-p+1), is expanded with x_i^2 folded to 1. The
result (called Fa~ here) agrees with F_a on every +-1 point.

Everything runs over GF(p). The rational-coefficient version of the
independence argument (clearing denominators, then descent) is not needed:
the integer coefficients of Fa~ reduce mod p to the ones computed here, and a
minor that is nonzero mod p is nonzero over Q, so independence mod p implies
independence over the rationals.

Variables x_2..x_n share the SignVertex bit layout: variable x_i is bit i-1,
so a monomial is a bitmask over bits 1..n-1 and never touches bit 0.
"""

from __future__ import annotations

import itertools
import logging
import math
import time
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sympy import isprime

from .hypercube_core import (
    SignVertex,
    VertexSetM,
    check_construction_dimension,
    dot,
    dot_matrix,
    is_in_M,
)

logger = logging.getLogger(__name__)

# sympy.isprime is deterministic below 2^64
_DETERMINISTIC_PRIME_LIMIT = 1 << 64
# widest monomial basis materialised as dense coefficient rows; alpha(20) = 5036
COEFFICIENT_BASIS_LIMIT = 10_000


def is_prime(p: int) -> bool:
    if not isinstance(p, int) or isinstance(p, bool):
        return False
    if p >= _DETERMINISTIC_PRIME_LIMIT:
        raise ValueError(f"{p} is beyond the deterministic primality range")
    return bool(isprime(p))


def require_prime(p: int) -> None:
    if not is_prime(p):
        raise ValueError(f"p = {p!r} is not prime")


def g_eval(t: int, p: int) -> int:
    """G(t) mod p. Zero exactly when p does not divide t."""
    require_prime(p)
    r = 1
    for j in range(1, p):
        r = r * (t - j) % p
    return r


def _g_table(p: int) -> List[int]:
    # G(t) mod p depends only on t mod p
    return [g_eval(t, p) for t in range(p)]


# ---------------------------
# Monomials
# ---------------------------

@dataclass(frozen=True)
class Monomial:
    """A product of distinct variables, given by its variable bitmask."""

    vars: int

    @property
    def degree(self) -> int:
        return self.vars.bit_count()

    def sort_key(self) -> Tuple[int, int]:
        return monomial_key(self.vars)

    def label(self) -> str:
        return monomial_label(self.vars)


def monomial_key(mask: int) -> Tuple[int, int]:
    """Deterministic order: degree first, then bitmask."""
    return mask.bit_count(), mask


def monomial_label(mask: int) -> str:
    if not mask:
        return "1"
    return "*".join(f"x{i + 1}" for i in range(mask.bit_length()) if (mask >> i) & 1)


def monomial_basis(n: int, p: int) -> List[int]:
    """Square-free monomials of degree <= p-1 in x_2..x_n, in monomial order."""
    basis: List[int] = []
    for degree in range(p):
        layer = [sum(1 << i for i in combo) for combo in itertools.combinations(range(1, n), degree)]
        basis.extend(sorted(layer))
    return basis


def alpha(n: int) -> int:
    """alpha(n) = C(n-1, 0) + ... + C(n-1, n/4 - 1), exact."""
    check_construction_dimension(n)
    return sum(math.comb(n - 1, k) for k in range(n // 4))


# ---------------------------
# Polynomials
# ---------------------------

@dataclass(frozen=True)
class MultilinearPoly:
    """Square-free polynomial in x_2..x_n over GF(p); coefficients keyed by monomial bitmask."""

    p: int
    n: int
    coeffs: Mapping[int, int]

    def __post_init__(self):
        clean: Dict[int, int] = {}
        for mask, c in self.coeffs.items():
            if mask < 0 or mask & 1 or mask >> self.n:
                raise ValueError(f"monomial {mask:#x} is outside the variables x2..x{self.n}")
            if mask.bit_count() > self.p - 1:
                raise ValueError(f"monomial {monomial_label(mask)} exceeds degree {self.p - 1}")
            r = c % self.p
            if r:
                clean[mask] = r
        ordered = dict(sorted(clean.items(), key=lambda kv: monomial_key(kv[0])))
        object.__setattr__(self, "coeffs", MappingProxyType(ordered))

    def __len__(self) -> int:
        return len(self.coeffs)

    @property
    def degree(self) -> int:
        return max((m.bit_count() for m in self.coeffs), default=-1)

    def evaluate(self, point: SignVertex) -> int:
        """Value mod p at x_i = point_i (i >= 2); the first coordinate is ignored."""
        if point.n != self.n:
            raise ValueError(f"dimension mismatch: {point.n} vs {self.n}")
        total = 0
        for mask, c in self.coeffs.items():
            total += -c if (mask & point.neg_mask).bit_count() % 2 else c
        return total % self.p

    def coefficient_vector(self, basis: Sequence[int]) -> List[int]:
        return [self.coeffs.get(m, 0) for m in basis]

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*{monomial_label(m)}" if m else str(c) for m, c in self.coeffs.items())


def _multiply(a: Mapping[int, int], b: Mapping[int, int], p: int) -> Dict[int, int]:
    # x_i^2 -> 1 turns monomial products into XOR of masks
    out: Dict[int, int] = {}
    for ma, ca in a.items():
        for mb, cb in b.items():
            m = ma ^ mb
            out[m] = (out.get(m, 0) + ca * cb) % p
    return {m: c for m, c in out.items() if c}


def _check_vertex_for_prime(a: SignVertex, p: int) -> None:
    if a.n != 4 * p:
        raise ValueError(f"vertex dimension {a.n} does not match n = 4p = {4 * p}")
    if not is_in_M(a):
        raise ValueError(f"vertex {a.neg_mask:#x} is not a member of M({a.n})")


def reduce_fa(a: SignVertex, p: int) -> MultilinearPoly:
    """Expand G(a.x) one linear factor at a time, folding squares after every product."""
    require_prime(p)
    _check_vertex_for_prime(a, p)
    linear = {1 << i: (-1 if (a.neg_mask >> i) & 1 else 1) % p for i in range(1, a.n)}
    acc: Dict[int, int] = {0: 1}
    for j in range(1, p):
        factor = dict(linear)
        # a_1 = +1 and x_1 = 1, so the constant of (a.x - j) is 1 - j
        if (1 - j) % p:
            factor[0] = (1 - j) % p
        acc = _multiply(acc, factor, p)
    return MultilinearPoly(p, a.n, acc)


# ---------------------------
# Linear algebra over GF(p)
# ---------------------------

class RankBudgetExceeded(RuntimeError):
    """The deadline passed before an elimination or matrix build finished."""


def _check_deadline(deadline: Optional[float], what: str) -> None:
    if deadline is not None and time.monotonic() > deadline:
        raise RankBudgetExceeded(f"{what} did not finish within the budget")


def rank_mod_p(matrix, p: int, deadline: Optional[float] = None) -> int:
    """
    Row rank over GF(p); pivots are the first nonzero column, row swaps only.
    With a deadline (time.monotonic() value) the elimination raises
    RankBudgetExceeded once it passes.
    """
    a = np.array(matrix, dtype=np.int64) % p
    if a.ndim != 2 or 0 in a.shape:
        return 0
    rows, cols = a.shape
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        if col % 64 == 0:
            _check_deadline(deadline, "elimination")
        nonzero = np.flatnonzero(a[rank:, col])
        if nonzero.size == 0:
            continue
        pivot = rank + int(nonzero[0])
        if pivot != rank:
            a[[rank, pivot]] = a[[pivot, rank]]
        a[rank] = a[rank] * pow(int(a[rank, col]), -1, p) % p
        others = np.flatnonzero(a[:, col])
        others = others[others != rank]
        if others.size:
            a[others] = (a[others] - np.outer(a[others, col], a[rank])) % p
        rank += 1
    return rank


@dataclass(frozen=True)
class RankReport:
    """
    coefficient_rank / evaluation_rank are None when not computed: the basis
    is over COEFFICIENT_BASIS_LIMIT or the deadline passed first. Either rank
    reaching family_size proves independence (c.E = 0 forces c = 0), so
    independent is None only when neither rank is known.
    """

    family_size: int
    coefficient_rank: Optional[int]
    evaluation_rank: Optional[int]
    independent: Optional[bool]
    basis: Optional[Tuple[int, ...]] = field(default=None, repr=False, compare=False)
    coefficients: Optional[np.ndarray] = field(default=None, repr=False, compare=False)


def _check_family(family: Sequence[SignVertex], p: int) -> None:
    seen = set()
    for a in family:
        _check_vertex_for_prime(a, p)
        if a.neg_mask in seen:
            raise ValueError(f"duplicate family member {a.neg_mask:#x}")
        seen.add(a.neg_mask)
    if len(family) < 2:
        return
    d = np.triu(dot_matrix(family) == 0, k=1)
    if d.any():
        i, j = (int(k) for k in np.argwhere(d)[0])
        raise ValueError(f"family is not ortho-free: {family[i].neg_mask:#x} is orthogonal to {family[j].neg_mask:#x}")


def coefficient_matrix(
    family: Sequence[SignVertex], p: int, deadline: Optional[float] = None
) -> Tuple[List[int], np.ndarray]:
    """Rows are Fa~ coefficient vectors over the monomial basis."""
    require_prime(p)
    size = alpha(4 * p)
    if size > COEFFICIENT_BASIS_LIMIT:
        raise ValueError(f"monomial basis of {size} columns exceeds the limit {COEFFICIENT_BASIS_LIMIT}")
    basis = monomial_basis(4 * p, p)
    mat = np.zeros((len(family), len(basis)), dtype=np.int64)
    for r, a in enumerate(family):
        _check_deadline(deadline, "coefficient matrix")
        mat[r] = reduce_fa(a, p).coefficient_vector(basis)
    return basis, mat


def evaluation_matrix(family: Sequence[SignVertex], p: int) -> np.ndarray:
    """E[a][b] = G(a.b) mod p."""
    require_prime(p)
    if not family:
        return np.zeros((0, 0), dtype=np.int64)
    table = np.array(_g_table(p), dtype=np.int64)
    return table[np.mod(dot_matrix(family), p)]


def independence_rank(family: Sequence[SignVertex], p: int, deadline: Optional[float] = None) -> RankReport:
    require_prime(p)
    family = list(family)
    _check_family(family, p)

    basis = coeffs = None
    coefficient_rank = evaluation_rank = None
    try:
        basis, coeffs = coefficient_matrix(family, p, deadline)
        coefficient_rank = rank_mod_p(coeffs, p, deadline)
    except (ValueError, RankBudgetExceeded) as e:
        logger.warning(f"p={p}: coefficient rank not computed: {e}")
        basis = coeffs = None
    try:
        evaluation_rank = rank_mod_p(evaluation_matrix(family, p), p, deadline)
    except RankBudgetExceeded as e:
        logger.warning(f"p={p}: evaluation rank not computed: {e}")

    if coefficient_rank is not None:
        independent = coefficient_rank == len(family)
    elif evaluation_rank is not None:
        independent = evaluation_rank == len(family)
    else:
        independent = None
    logger.debug(f"p={p}: family of {len(family)} has coefficient rank {coefficient_rank}, evaluation rank {evaluation_rank}")
    return RankReport(
        family_size=len(family),
        coefficient_rank=coefficient_rank,
        evaluation_rank=evaluation_rank,
        independent=independent,
        basis=tuple(basis) if basis is not None else None,
        coefficients=coeffs,
    )


def dimension_bound_check(family_rank: int, n: int) -> bool:
    """An independent family in the span of the basis cannot outgrow the basis."""
    return family_rank <= alpha(n)


# ---------------------------
# Non-divisibility of dot products
# ---------------------------

def _check_pair_parameters(m: VertexSetM, p: int) -> None:
    require_prime(p)
    if m.n != 4 * p:
        raise ValueError(f"parameter mismatch: M({m.n}) does not belong to p = {p} (n must be {4 * p})")


def nondivisibility_witness(m: VertexSetM, p: int) -> Optional[Tuple[int, int, int]]:
    """First pair (i, j, a.b) of distinct non-orthogonal members with p | a.b, or None."""
    _check_pair_parameters(m, p)
    d = dot_matrix(m.members)
    bad = (d != 0) & (d % p == 0)
    np.fill_diagonal(bad, False)
    hits = np.argwhere(np.triu(bad))
    if hits.size == 0:
        return None
    i, j = (int(v) for v in hits[0])
    return i, j, int(d[i, j])


def check_nondivisibility(m: VertexSetM, p: int) -> bool:
    """
    For odd p the claim follows from a.b = 0 mod 4 and |a.b| < 4p for distinct
    a, b in M, which leaves 0 as the only multiple of p; that is what is checked.
    p = 2 is checked pair by pair.
    """
    _check_pair_parameters(m, p)
    if p == 2:
        return nondivisibility_witness(m, p) is None
    d = dot_matrix(m.members)
    off_diagonal = ~np.eye(len(m), dtype=bool)
    multiples_of_four = bool(np.all(d % 4 == 0))
    strictly_inside = bool(np.all(np.abs(d[off_diagonal]) < m.n))
    return multiples_of_four and strictly_inside


def substitution_mismatches(pairs: Iterable[Tuple[SignVertex, SignVertex]], p: int) -> List[Tuple[int, int]]:
    """Pairs (a, b) where Fa~(b) differs from G(a.b) mod p, as mask pairs."""
    table = _g_table(p)
    cache: Dict[int, MultilinearPoly] = {}
    bad = []
    for a, b in pairs:
        poly = cache.get(a.neg_mask)
        if poly is None:
            poly = cache[a.neg_mask] = reduce_fa(a, p)
        if poly.evaluate(b) != table[dot(a, b) % p]:
            bad.append((a.neg_mask, b.neg_mask))
    return bad
