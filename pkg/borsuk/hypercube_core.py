# borsuk/hypercube_core.py
"""
Hypercube vertices, the parity set M and the quadratic embedding f.

Conventions:
- Coordinates are numbered 1..n. Coordinate i lives in bit i-1 of
  ``SignVertex.neg_mask``; the bit is set when the coordinate equals -1.
- Distances are always squared distances, so every comparison stays in
  exact integer arithmetic.
- QuadVertex tables are only materialised for checks and demonstrations;
  metric queries on f(M) go through ``quad_dist_sq`` on SignVertex pairs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

MAX_DIMENSION = 128
# 2^(n-2) members must fit in memory when M is materialised
MAX_MATERIALIZED_DIMENSION = 24
# full-cube enumeration of E_2^n
MAX_CUBE_DIMENSION = 16

CONSTRUCTION_ERROR = "construction requires n ≡ 0 mod 4"


def _check_dimension(n: int) -> None:
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"dimension must be a positive integer, got {n!r}")
    if n > MAX_DIMENSION:
        raise ValueError(f"dimension {n} exceeds the supported maximum {MAX_DIMENSION}")


def check_construction_dimension(n: int) -> None:
    """Raise unless n is a positive multiple of 4. No upper limit: counting stays exact for any n."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 4 or n % 4:
        raise ValueError(CONSTRUCTION_ERROR)


def check_vertex_dimension(n: int) -> None:
    """Construction dimension that also fits a SignVertex bitmask."""
    check_construction_dimension(n)
    _check_dimension(n)


# ---------------------------
# Vertex types
# ---------------------------

@dataclass(frozen=True)
class SignVertex:
    """A vertex of the n-cube, stored as the bitmask of its -1 coordinates."""

    n: int
    neg_mask: int

    def __post_init__(self):
        _check_dimension(self.n)
        if not isinstance(self.neg_mask, int) or self.neg_mask < 0 or self.neg_mask >> self.n:
            raise ValueError(f"neg_mask {self.neg_mask!r} does not fit in {self.n} coordinates")

    @classmethod
    def from_coords(cls, coords: Sequence[int]) -> "SignVertex":
        mask = 0
        for i, c in enumerate(coords):
            if c == -1:
                mask |= 1 << i
            elif c != 1:
                raise ValueError(f"coordinate {i + 1} is {c!r}, expected +1 or -1")
        return cls(len(coords), mask)

    def coords(self) -> Tuple[int, ...]:
        return tuple(-1 if (self.neg_mask >> i) & 1 else 1 for i in range(self.n))

    def coord(self, i: int) -> int:
        """Coordinate i, 1-based."""
        if not 1 <= i <= self.n:
            raise IndexError(f"coordinate {i} out of range 1..{self.n}")
        return -1 if (self.neg_mask >> (i - 1)) & 1 else 1

    @property
    def minus_count(self) -> int:
        return self.neg_mask.bit_count()

    def negate(self) -> "SignVertex":
        return SignVertex(self.n, self.neg_mask ^ ((1 << self.n) - 1))

    __neg__ = negate


@dataclass(frozen=True, eq=False)
class QuadVertex:
    """The n x n sign table (x_i x_j) of a cube vertex."""

    n: int
    entries: np.ndarray

    def __post_init__(self):
        entries = np.array(self.entries, dtype=np.int8)
        if entries.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} table, got shape {entries.shape}")
        if not np.isin(entries, (-1, 1)).all():
            raise ValueError("table entries must be +1 or -1")
        if not (np.diagonal(entries) == 1).all():
            raise ValueError("table diagonal must be +1")
        if not np.array_equal(entries, entries.T):
            raise ValueError("table must be symmetric")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    def flat(self) -> np.ndarray:
        """The table as a vector of the n^2-cube."""
        return self.entries.reshape(-1).astype(np.int64)

    def tolist(self) -> List[List[int]]:
        return self.entries.tolist()

    def __eq__(self, other):
        if not isinstance(other, QuadVertex):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.n, self.entries.tobytes()))


@dataclass(frozen=True)
class VertexSetM:
    """The vertices with x_1 = +1 and an even number of -1 coordinates."""

    n: int
    members: Tuple[SignVertex, ...]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[SignVertex]:
        return iter(self.members)

    def __getitem__(self, i: int) -> SignVertex:
        return self.members[i]

    def masks(self) -> List[int]:
        return [v.neg_mask for v in self.members]

    @cached_property
    def _index(self) -> Dict[int, int]:
        return {v.neg_mask: i for i, v in enumerate(self.members)}

    def index_of(self, neg_mask: int) -> int:
        try:
            return self._index[neg_mask]
        except KeyError:
            raise ValueError(f"mask {neg_mask:#x} is not a member of M({self.n})") from None

    def __contains__(self, vertex: object) -> bool:
        return isinstance(vertex, SignVertex) and vertex.n == self.n and vertex.neg_mask in self._index


def is_in_M(x: SignVertex) -> bool:
    return not (x.neg_mask & 1) and x.minus_count % 2 == 0


# ---------------------------
# Scalar operations
# ---------------------------

def _same_dimension(x: SignVertex, y: SignVertex) -> None:
    if x.n != y.n:
        raise ValueError(f"dimension mismatch: {x.n} vs {y.n}")


def dot(x: SignVertex, y: SignVertex) -> int:
    _same_dimension(x, y)
    return x.n - 2 * (x.neg_mask ^ y.neg_mask).bit_count()


def dist_sq(x: SignVertex, y: SignVertex) -> int:
    return 2 * x.n - 2 * dot(x, y)


def quad_dot(x: SignVertex, y: SignVertex) -> int:
    """f(x).f(y), which equals (x.y)^2."""
    d = dot(x, y)
    return d * d


def quad_dist_sq(x: SignVertex, y: SignVertex) -> int:
    """|f(x), f(y)|^2 = 2n^2 - 2(x.y)^2; maximal (2n^2) iff x and y are orthogonal."""
    return 2 * x.n * x.n - 2 * quad_dot(x, y)


def embed_f(x: SignVertex) -> QuadVertex:
    v = np.array(x.coords(), dtype=np.int8)
    return QuadVertex(x.n, np.outer(v, v))


def reduced_dimension(n: int) -> int:
    """Dimension actually spanned by f(E_2^n): off-diagonal entries above the diagonal."""
    return n * (n - 1) // 2


# ---------------------------
# Enumeration
# ---------------------------

def iter_M(n: int) -> Iterator[SignVertex]:
    """Stream M(n) in ascending neg_mask order without materialising it."""
    check_vertex_dimension(n)
    for m in range(1 << (n - 1)):
        if m.bit_count() % 2 == 0:
            yield SignVertex(n, m << 1)


def build_M(n: int) -> VertexSetM:
    check_vertex_dimension(n)
    if n > MAX_MATERIALIZED_DIMENSION:
        raise ValueError(f"M({n}) has 2^{n - 2} members; materialisation is limited to n <= {MAX_MATERIALIZED_DIMENSION}")
    members = tuple(iter_M(n))
    logger.debug(f"Built M({n}) with {len(members)} members")
    return VertexSetM(n, members)


def all_vertices(n: int) -> List[SignVertex]:
    """Every vertex of E_2^n, ascending by mask."""
    _check_dimension(n)
    if n > MAX_CUBE_DIMENSION:
        raise ValueError(f"E_2^{n} is too large to enumerate (limit n <= {MAX_CUBE_DIMENSION})")
    return [SignVertex(n, m) for m in range(1 << n)]


# ---------------------------
# Bulk (vectorised) views
# ---------------------------

def sign_matrix(vertices: Sequence[SignVertex]) -> np.ndarray:
    """Rows of +-1 coordinates, one row per vertex."""
    if not vertices:
        return np.zeros((0, 0), dtype=np.int64)
    n = vertices[0].n
    if any(v.n != n for v in vertices):
        raise ValueError("dimension mismatch inside vertex list")
    bits = np.array([[(v.neg_mask >> i) & 1 for i in range(n)] for v in vertices], dtype=np.int64)
    return 1 - 2 * bits


def dot_matrix(vertices: Sequence[SignVertex]) -> np.ndarray:
    x = sign_matrix(vertices)
    return x @ x.T


def image_diameter_sq(m: VertexSetM) -> Tuple[int, Optional[Tuple[int, int]]]:
    """
    Squared diameter of f(M) and one pair of indices attaining it.
    For even n some pair of M is orthogonal, so the value is 2n^2.
    """
    d = dot_matrix(m.members)
    sq = d * d
    np.fill_diagonal(sq, np.iinfo(np.int64).max)
    if len(m) < 2:
        return 0, None
    i, j = np.unravel_index(int(np.argmin(sq)), sq.shape)
    i, j = sorted((int(i), int(j)))
    return 2 * m.n * m.n - 2 * int(sq[i, j]), (i, j)
