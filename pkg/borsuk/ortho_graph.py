# borsuk/ortho_graph.py
"""
Orthogonality graph on M and ortho-free subsets.

A partition of f(M) into parts of smaller diameter is the same thing as a
partition of M into parts without an orthogonal pair, so everything here
works on M and the orthogonality relation.

Features:
- adjacency stored as one int bitset per vertex
- branch-and-bound maximum independent set with wall-clock and node budgets
- greedy coloring (networkx) for an upper bound and sample partitions
- counting lower bound ceil(2^(n-2) / alpha(n)) on the number of parts
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from utils import sha256_text

from .fw_polynomials import alpha, is_prime
from .hypercube_core import (
    SignVertex,
    VertexSetM,
    dot,
    dot_matrix,
    is_in_M,
    iter_M,
    quad_dist_sq,
)

logger = logging.getLogger(__name__)


# ---------------------------
# Certificates
# ---------------------------

class Claim(str, Enum):
    ORTHO_FREE_SUBSET = "ORTHO_FREE_SUBSET"
    MAX_ORTHO_FREE = "MAX_ORTHO_FREE"
    PART_COUNT_LOWER_BOUND = "PART_COUNT_LOWER_BOUND"


def subset_checksum(n: int, masks: Sequence[int]) -> str:
    """SHA-256 over the dimension and the vertex list."""
    return sha256_text(f"{n}:" + ",".join(str(m) for m in masks))


@dataclass(frozen=True)
class Certificate:
    claim: Claim
    n: int
    p: int
    subset: Tuple[int, ...]
    value: int
    exhaustive: bool
    checksum: str

    @classmethod
    def issue(cls, claim: Claim, n: int, subset: Iterable[int], value: int, exhaustive: bool) -> "Certificate":
        masks = tuple(sorted(subset))
        return cls(Claim(claim), n, n // 4, masks, value, exhaustive, subset_checksum(n, masks))


# ---------------------------
# Graph
# ---------------------------

def _row_to_bitset(row: np.ndarray) -> int:
    return int.from_bytes(np.packbits(row.astype(np.uint8), bitorder="little").tobytes(), "little")


def _bits(mask: int) -> Iterable[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


@dataclass(frozen=True)
class OrthoGraph:
    n: int
    vertices: VertexSetM
    adjacency: Tuple[int, ...]

    def __len__(self) -> int:
        return len(self.adjacency)

    def degree(self, i: int) -> int:
        return self.adjacency[i].bit_count()

    def neighbors(self, i: int) -> List[int]:
        return list(_bits(self.adjacency[i]))

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.adjacency[i] >> j) & 1)

    def edge_count(self) -> int:
        return sum(a.bit_count() for a in self.adjacency) // 2

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(len(self)))
        g.add_edges_from((i, j) for i in range(len(self)) for j in _bits(self.adjacency[i]) if i < j)
        return g


def build_graph(m: VertexSetM) -> OrthoGraph:
    ortho = dot_matrix(m.members) == 0
    adjacency = tuple(_row_to_bitset(row) for row in ortho)
    graph = OrthoGraph(m.n, m, adjacency)
    logger.info(f"Orthogonality graph on M({m.n}): {len(graph)} vertices, {graph.edge_count()} edges")
    return graph


def verify_ortho_free(g: OrthoGraph, subset: Sequence[int]) -> bool:
    seen = 0
    for i in subset:
        if not 0 <= i < len(g):
            raise IndexError(f"vertex index {i} out of range 0..{len(g) - 1}")
        if (seen >> i) & 1:
            raise ValueError(f"duplicate vertex index {i}")
        seen |= 1 << i
    taken = 0
    for i in subset:
        if g.adjacency[i] & taken:
            return False
        taken |= 1 << i
    return True


def is_ortho_free(vertices: Sequence[SignVertex]) -> bool:
    """Pairwise check without a graph, for families too large to build one for."""
    return all(dot(a, b) != 0 for i, a in enumerate(vertices) for b in vertices[i + 1:])


def trivial_upper_bound(n: int) -> int:
    # M itself contains an orthogonal pair for even n
    return (1 << (n - 2)) - 1


# ---------------------------
# Branch and bound
# ---------------------------

@dataclass(frozen=True)
class SearchResult:
    members: Tuple[int, ...]
    exhaustive: bool
    nodes: int
    elapsed: float


def _greedy_independent(adjacency: Sequence[int], candidates: int) -> Tuple[int, ...]:
    """Min-degree greedy; lowest index among equal degrees."""
    chosen = []
    while candidates:
        best, best_degree = -1, -1
        for v in _bits(candidates):
            d = (adjacency[v] & candidates).bit_count()
            if best < 0 or d < best_degree:
                best, best_degree = v, d
        chosen.append(best)
        candidates &= ~(adjacency[best] | (1 << best))
    return tuple(chosen)


def _clique_cover_bound(adjacency: Sequence[int], candidates: int) -> int:
    """Number of cliques in a greedy clique cover; an independent set takes one vertex per clique."""
    remaining = candidates
    cliques = 0
    while remaining:
        low = remaining & -remaining
        remaining ^= low
        pool = remaining & adjacency[low.bit_length() - 1]
        while pool:
            u = pool & -pool
            remaining &= ~u
            pool &= adjacency[u.bit_length() - 1]
        cliques += 1
    return cliques


def search_max_independent(
    adjacency: Sequence[int],
    budget_secs: Optional[float] = None,
    node_limit: Optional[int] = None,
) -> SearchResult:
    """
    Maximum independent set by depth-first branch and bound on bitsets.

    Branching vertex: maximum residual degree, lowest index on ties; the
    include branch is explored first. Bound: residual vertex count, then the
    greedy clique cover. On budget expiry the best set found so far is
    returned with exhaustive=False.
    """
    started = time.monotonic()
    deadline = started + budget_secs if budget_secs is not None else None
    full = (1 << len(adjacency)) - 1
    best = _greedy_independent(adjacency, full)
    stack: List[Tuple[int, Tuple[int, ...]]] = [(full, ())]
    nodes = 0
    exhaustive = True

    while stack:
        if (node_limit is not None and nodes >= node_limit) or (deadline is not None and time.monotonic() > deadline):
            exhaustive = False
            logger.warning(f"Search budget exhausted after {nodes} nodes; best size so far {len(best)}")
            break
        candidates, chosen = stack.pop()
        nodes += 1
        if len(chosen) + candidates.bit_count() <= len(best):
            continue

        isolated = 0
        branch, branch_degree = -1, 0
        for v in _bits(candidates):
            d = (adjacency[v] & candidates).bit_count()
            if d == 0:
                isolated |= 1 << v
            elif d > branch_degree:
                branch, branch_degree = v, d
        if isolated:
            chosen = chosen + tuple(_bits(isolated))
            candidates &= ~isolated
        if not candidates:
            if len(chosen) > len(best):
                best = chosen
            continue
        if len(chosen) + _clique_cover_bound(adjacency, candidates) <= len(best):
            continue

        bit = 1 << branch
        stack.append((candidates & ~bit, chosen))
        stack.append((candidates & ~(adjacency[branch] | bit), chosen + (branch,)))

    elapsed = time.monotonic() - started
    logger.info(f"Branch and bound: size {len(best)}, {nodes} nodes, exhaustive={exhaustive}, {elapsed:.2f}s")
    return SearchResult(tuple(sorted(best)), exhaustive, nodes, elapsed)


def max_ortho_free(g: OrthoGraph, budget: float, node_limit: Optional[int] = None) -> Certificate:
    if budget is None or budget <= 0:
        raise ValueError("search budget must be positive")
    result = search_max_independent(g.adjacency, budget, node_limit)
    masks = [g.vertices[i].neg_mask for i in result.members]
    claim = Claim.MAX_ORTHO_FREE if result.exhaustive else Claim.ORTHO_FREE_SUBSET
    return Certificate.issue(claim, g.n, masks, len(masks), result.exhaustive)


def grow_ortho_free(n: int, budget: float, max_size: Optional[int] = None) -> Certificate:
    """
    First-fit ortho-free family streamed from M(n) in mask order. Used where
    the graph is too large to build; never exhaustive.
    """
    if budget is None or budget <= 0:
        raise ValueError("search budget must be positive")
    deadline = time.monotonic() + budget
    chosen: List[SignVertex] = []
    for scanned, x in enumerate(iter_M(n)):
        if max_size is not None and len(chosen) >= max_size:
            break
        if scanned % 64 == 0 and time.monotonic() > deadline:
            logger.warning(f"Growth budget exhausted after scanning {scanned} vertices of M({n})")
            break
        if all(dot(x, c) != 0 for c in chosen):
            chosen.append(x)
    logger.info(f"First-fit ortho-free family in M({n}): {len(chosen)} members")
    return Certificate.issue(Claim.ORTHO_FREE_SUBSET, n, [c.neg_mask for c in chosen], len(chosen), False)


# ---------------------------
# Parts and partitions
# ---------------------------

def parts_lower_bound(n: int) -> int:
    """Fewest ortho-free parts any partition of M(n) can have, given |A| <= alpha(n)."""
    if not isinstance(n, int) or n < 4 or n % 4 or not is_prime(n // 4):
        raise ValueError(f"n = {n!r} is not of the form 4·prime")
    return -(-(1 << (n - 2)) // alpha(n))


def parts_certificate(n: int) -> Certificate:
    return Certificate.issue(Claim.PART_COUNT_LOWER_BOUND, n, (), parts_lower_bound(n), True)


def greedy_coloring(g: OrthoGraph) -> List[int]:
    """Color per vertex; every color class is ortho-free."""
    colors = nx.greedy_color(g.to_networkx(), strategy="largest_first")
    return [colors[i] for i in range(len(g))]


def coloring_upper_bound(g: OrthoGraph) -> int:
    return max(greedy_coloring(g), default=-1) + 1


def parts_of(coloring: Sequence[int]) -> List[List[int]]:
    parts: dict = {}
    for i, c in enumerate(coloring):
        parts.setdefault(c, []).append(i)
    return [parts[c] for c in sorted(parts)]


@dataclass(frozen=True)
class PartCheck:
    part: int
    size: int
    ortho_free: bool
    image_diameter_sq: int
    below_image_diameter: bool

    @property
    def consistent(self) -> bool:
        return self.ortho_free == self.below_image_diameter


def check_observation(g: OrthoGraph, coloring: Sequence[int]) -> List[PartCheck]:
    """
    For each part of the coloring: is it ortho-free, and is its image under f
    of squared diameter below 2n^2? The two answers must agree.
    """
    if len(coloring) != len(g):
        raise ValueError(f"coloring has {len(coloring)} entries for {len(g)} vertices")
    full = 2 * g.n * g.n
    checks = []
    for k, part in enumerate(parts_of(coloring)):
        vs = [g.vertices[i] for i in part]
        diameter = max((quad_dist_sq(a, b) for i, a in enumerate(vs) for b in vs[i + 1:]), default=0)
        checks.append(PartCheck(k, len(part), verify_ortho_free(g, part), diameter, diameter < full))
    return checks


def members_of(n: int, masks: Sequence[int]) -> List[SignVertex]:
    """SignVertex list for certificate masks, rejecting anything outside M(n)."""
    out = []
    for m in masks:
        v = SignVertex(n, m)
        if not is_in_M(v):
            raise ValueError(f"mask {m:#x} is not a member of M({n})")
        out.append(v)
    return out
