import hashlib
import random

import networkx as nx
import pytest

from borsuk.fw_polynomials import alpha
from borsuk.hypercube_core import build_M, dot
from borsuk.ortho_graph import (
    Certificate,
    Claim,
    build_graph,
    check_observation,
    coloring_upper_bound,
    greedy_coloring,
    grow_ortho_free,
    is_ortho_free,
    max_ortho_free,
    members_of,
    parts_certificate,
    parts_lower_bound,
    parts_of,
    search_max_independent,
    subset_checksum,
    trivial_upper_bound,
    verify_ortho_free,
)


def _induced(adjacency, nodes):
    pos = {v: k for k, v in enumerate(nodes)}
    sub = []
    for v in nodes:
        row = 0
        for u in nodes:
            if (adjacency[v] >> u) & 1:
                row |= 1 << pos[u]
        sub.append(row)
    return sub


def _oracle(adjacency):
    g = nx.Graph()
    g.add_nodes_from(range(len(adjacency)))
    g.add_edges_from((i, j) for i in range(len(adjacency)) for j in range(i + 1, len(adjacency)) if (adjacency[i] >> j) & 1)
    _, size = nx.max_weight_clique(nx.complement(g), weight=None)
    return size


def test_graph_shape_n8(graph8):
    assert len(graph8) == 64
    assert all(graph8.degree(i) == 35 for i in range(64))
    assert graph8.edge_count() == 64 * 35 // 2
    assert all(dot(graph8.vertices[0], graph8.vertices[j]) == 0 for j in graph8.neighbors(0))
    assert not graph8.has_edge(0, 0)


def test_graph_n12_degree(graph12):
    assert {graph12.degree(i) for i in range(len(graph12))} == {462}


def test_to_networkx_matches(graph8):
    g = graph8.to_networkx()
    assert g.number_of_nodes() == 64
    assert g.number_of_edges() == graph8.edge_count()


def test_n4_is_complete(m4):
    g = build_graph(m4)
    assert g.edge_count() == 6
    cert = max_ortho_free(g, 5.0)
    assert cert.value == 1
    assert cert.exhaustive


def test_max_ortho_free_n8(graph8):
    cert = max_ortho_free(graph8, 60.0)
    assert cert.claim is Claim.MAX_ORTHO_FREE
    assert cert.exhaustive
    assert cert.value == 8 == alpha(8)
    assert list(cert.subset) == sorted(cert.subset)
    assert is_ortho_free(members_of(8, cert.subset))


@pytest.mark.parametrize("seed", range(6))
def test_branch_and_bound_against_clique_oracle(graph12, seed):
    rng = random.Random(seed)
    nodes = sorted(rng.sample(range(len(graph12)), 20))
    sub = _induced(graph12.adjacency, nodes)
    result = search_max_independent(sub)
    assert result.exhaustive
    assert len(result.members) == _oracle(sub)
    taken = 0
    for v in result.members:
        assert not sub[v] & taken
        taken |= 1 << v


@pytest.mark.parametrize("seed", range(4))
def test_branch_and_bound_on_random_graphs(seed):
    rng = random.Random(100 + seed)
    size = 18
    adjacency = [0] * size
    for i in range(size):
        for j in range(i + 1, size):
            if rng.random() < 0.3:
                adjacency[i] |= 1 << j
                adjacency[j] |= 1 << i
    assert len(search_max_independent(adjacency).members) == _oracle(adjacency)


def test_node_limit_is_reproducible(graph12):
    a = max_ortho_free(graph12, 60.0, node_limit=5)
    b = max_ortho_free(graph12, 60.0, node_limit=5)
    assert a == b
    assert not a.exhaustive
    assert a.claim is Claim.ORTHO_FREE_SUBSET
    assert is_ortho_free(members_of(12, a.subset))


def test_budget_must_be_positive(graph8):
    with pytest.raises(ValueError):
        max_ortho_free(graph8, 0)
    with pytest.raises(ValueError):
        grow_ortho_free(12, -1.0)


def test_grow_ortho_free():
    cert = grow_ortho_free(12, 30.0)
    assert not cert.exhaustive
    assert cert.claim is Claim.ORTHO_FREE_SUBSET
    assert cert.subset[0] == 0
    members = members_of(12, cert.subset)
    assert is_ortho_free(members)
    # first-fit is maximal: every other member of M hits the family
    chosen = set(cert.subset)
    assert all(any(dot(x, c) == 0 for c in members) for x in build_M(12) if x.neg_mask not in chosen)
    assert grow_ortho_free(12, 30.0, max_size=3).value == 3


def test_verify_ortho_free(graph8):
    assert verify_ortho_free(graph8, [])
    assert verify_ortho_free(graph8, [0])
    j = graph8.neighbors(0)[0]
    assert not verify_ortho_free(graph8, [0, j])
    with pytest.raises(IndexError):
        verify_ortho_free(graph8, [64])
    with pytest.raises(ValueError):
        verify_ortho_free(graph8, [3, 3])


@pytest.mark.parametrize("n,expected", [(8, 8), (12, 16), (20, 53)])
def test_parts_lower_bound(n, expected):
    assert parts_lower_bound(n) == expected


@pytest.mark.parametrize("n", [4, 16, 10])
def test_parts_lower_bound_needs_4_prime(n):
    with pytest.raises(ValueError, match="4·prime"):
        parts_lower_bound(n)


def test_parts_certificate():
    cert = parts_certificate(12)
    assert cert.claim is Claim.PART_COUNT_LOWER_BOUND
    assert cert.value == 16
    assert cert.subset == ()
    assert cert.p == 3


def test_certificate_issue_sorts_and_hashes():
    cert = Certificate.issue(Claim.ORTHO_FREE_SUBSET, 8, [6, 0], 2, False)
    assert cert.subset == (0, 6)
    assert cert.checksum == hashlib.sha256(b"8:0,6").hexdigest() == subset_checksum(8, [0, 6])


def test_trivial_upper_bound():
    assert trivial_upper_bound(8) == 63


def test_greedy_coloring_parts(graph8):
    coloring = greedy_coloring(graph8)
    assert len(coloring) == 64
    for part in parts_of(coloring):
        assert verify_ortho_free(graph8, part)
    assert coloring_upper_bound(graph8) >= parts_lower_bound(8)


def test_observation_greedy_and_random(graph8):
    checks = check_observation(graph8, greedy_coloring(graph8))
    assert all(c.consistent and c.ortho_free for c in checks)
    assert all(c.image_diameter_sq < 2 * 8 * 8 for c in checks)
    rng = random.Random(5)
    checks = check_observation(graph8, [rng.randrange(4) for _ in range(64)])
    assert all(c.consistent for c in checks)
    assert not all(c.ortho_free for c in checks)


def test_observation_length_mismatch(graph8):
    with pytest.raises(ValueError):
        check_observation(graph8, [0] * 10)


def test_members_of_rejects_outsiders():
    with pytest.raises(ValueError):
        members_of(8, [1])


def test_all_ones_neighbours_n4(m4):
    g = build_graph(m4)
    assert m4[0].neg_mask == 0
    assert g.neighbors(0) == [j for j in range(1, 4) if dot(m4[0], m4[j]) == 0] == [1, 2, 3]
