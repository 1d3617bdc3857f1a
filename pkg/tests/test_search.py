import itertools
import json

import pytest

from multipart_ekr.core import FamilyClass, classify, structure
from multipart_ekr.formulas import k1_formula, m_hm
from multipart_ekr.oracle import maximal_cliques, milp_max, optimal_cliques, oracle_max
from multipart_ekr.search import (
    Mode,
    kneser_product_spectrum,
    ratio_bound,
    Status,
    TooLarge,
    build_intersection_graph,
    max_family,
    result_to_dict,
    verify_instance,
    witness_ok,
)
from multipart_ekr.shifting import is_shifted

from conftest import brute_intersects, brute_layer

SMALL = [
    ([5], [2]), ([6], [2]), ([2, 2, 2], [1, 1, 1]), ([3, 3, 3], [1, 1, 1]), ([4, 3], [2, 1]),
    ([3, 4], [1, 2]), ([2, 3, 4], [1, 1, 2]), ([4, 4], [1, 1]), ([5, 3], [2, 1]),
]


def brute_max(n, k, mode):
    """Exhaustive over all subfamilies: only for layers of at most ~12 members."""
    layer = brute_layer(n, k)
    for r in range(len(layer), 0, -1):
        for sub in itertools.combinations(layer, r):
            if not all(brute_intersects(a, b) for a, b in itertools.combinations(sub, 2)):
                continue
            if mode == "nontrivial":
                shared = set.intersection(*[{(s, v) for s, part in enumerate(F) for v in part} for F in sub])
                if shared:
                    continue
            return r
    return 0


# --------------------------------------------------------------------- graph


def test_graph_examples():
    g = build_intersection_graph(structure([5, 5], [2, 2]))
    assert len(g) == 100
    g = build_intersection_graph(structure([2, 2, 2], [1, 1, 1]))
    assert len(g) == 8
    for a, b in itertools.combinations(range(8), 2):
        agree = any(x == y for x, y in zip(g.ps.unpack(g.vertices[a]), g.ps.unpack(g.vertices[b])))
        assert bool(g.adj[a] >> b & 1) == agree
    g = build_intersection_graph(structure([4], [2]))
    assert len(g) == 6
    non = g.non_edges()
    assert len(non) == 3 and len({v for e in non for v in e}) == 6


def test_graph_symmetric_no_loops():
    g = build_intersection_graph(structure([4, 3, 3], [2, 1, 1]))
    for v, row in enumerate(g.adj):
        assert not row >> v & 1
        for u in range(len(g)):
            assert (row >> u & 1) == (g.adj[u] >> v & 1)


def test_graph_cap(monkeypatch):
    with pytest.raises(TooLarge):
        build_intersection_graph(structure([5, 5], [2, 2]), cap=99)
    monkeypatch.setenv("MULTIPART_EKR_VERTEX_CAP", "50")
    with pytest.raises(TooLarge):
        max_family(structure([5, 5], [2, 2]))


# -------------------------------------------------------------------- search


@pytest.mark.parametrize("n, k, mode, size", [
    ([5, 5], [2, 2], "intersecting", 40),
    ([3, 3, 3], [1, 1, 1], "nontrivial", 7),
    ([2, 2], [1, 1], "nontrivial", 0),
    ([5, 5], [2, 2], "nontrivial", 35),
])
def test_search_examples(n, k, mode, size):
    res = max_family(structure(n, k), mode)
    assert res.size == size
    assert res.status is (Status.OPTIMAL if size else Status.INFEASIBLE)
    assert witness_ok(res)


@pytest.mark.parametrize("n, k", [([5], [2]), ([2, 2, 2], [1, 1, 1]), ([4], [2]), ([3, 2], [1, 1]), ([4, 2], [2, 1])])
def test_search_matches_exhaustive_subfamilies(n, k):
    ps = structure(n, k)
    for mode in Mode:
        assert max_family(ps, mode).size == brute_max(n, k, mode.value)


@pytest.mark.parametrize("n, k", [(5, 2), (6, 2), (7, 3), (8, 3)])
def test_hilton_milner_agreement(n, k):
    assert max_family(structure([n], [k]), Mode.NONTRIVIAL).size == m_hm(n, k)


@pytest.mark.parametrize("p, n", [(3, 2), (3, 3), (3, 4), (4, 2), (4, 3)])
def test_k1_agreement(p, n):
    assert max_family(structure([n] * p, [1] * p), Mode.NONTRIVIAL).size == k1_formula(n, p)


@pytest.mark.parametrize("n, k", SMALL)
def test_strategies_agree(n, k):
    ps = structure(n, k)
    a = max_family(ps, Mode.NONTRIVIAL, strategy="avoid")
    b = max_family(ps, Mode.NONTRIVIAL, strategy="filter")
    assert a.size == b.size and a.status == b.status
    assert witness_ok(a) and witness_ok(b)


@pytest.mark.parametrize("n, k", SMALL + [([4, 4, 4], [1, 1, 1]), ([3, 5], [1, 2])])
def test_orbital_branching_matches_plain_search(n, k):
    ps = structure(n, k)
    for mode in Mode:
        for strategy in ("avoid", "filter"):
            a = max_family(ps, mode, strategy=strategy)
            b = max_family(ps, mode, strategy=strategy, symmetric=False)
            assert (a.size, a.status) == (b.size, b.status)
            assert witness_ok(a) and witness_ok(b)


@pytest.mark.parametrize("n, k", [([4, 3], [2, 1]), ([5, 5], [2, 2]), ([2, 4, 5], [1, 2, 2])])
def test_ceiling_off_gives_same_optimum(n, k):
    ps = structure(n, k)
    for mode in Mode:
        a = max_family(ps, mode)
        b = max_family(ps, mode, ceiling=False)
        assert (a.size, a.status) == (b.size, b.status)
        assert witness_ok(a) and witness_ok(b)


# ----------------------------------------------------------- ratio bound


@pytest.mark.parametrize("n, k", [([5], [2]), ([4, 3], [2, 1]), ([4, 5], [2, 2]), ([3, 4, 5], [1, 2, 2]), ([6], [3])])
def test_closed_form_spectrum_matches_numpy(n, k):
    np = pytest.importorskip("numpy")
    ps = structure(n, k)
    g = build_intersection_graph(ps)
    N = len(g)
    # disjointness graph = complement of the intersection graph, no loops
    A = np.array([[0 if u == v or g.adj[v] >> u & 1 else 1 for u in range(N)] for v in range(N)], dtype=float)
    eig = np.linalg.eigvalsh(A)
    assert np.allclose(eig, np.round(eig), atol=1e-8)
    assert sorted({round(x) for x in eig}, reverse=True) == kneser_product_spectrum(ps)


def test_ratio_bound_examples():
    # Petersen graph: 3, 1, -2 and 10 * 2/5 = 4
    assert kneser_product_spectrum(structure([5], [2])) == [3, 1, -2]
    assert ratio_bound(structure([5], [2])) == 4
    assert ratio_bound(structure([4, 5, 5], [1, 2, 2])) == 160
    # no disjoint pairs at all: no bound
    assert ratio_bound(structure([3], [2])) is None


@pytest.mark.parametrize("n, k", [([5], [2]), ([3, 3, 3], [1, 1, 1]), ([4, 3], [2, 1]), ([2, 3, 4], [1, 1, 2])])
def test_ratio_bound_is_an_upper_bound(n, k):
    ps = structure(n, k)
    assert oracle_max(ps, Mode.INTERSECTING).size <= ratio_bound(ps)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        max_family(structure([5], [2]), Mode.NONTRIVIAL, strategy="guess")


def test_determinism():
    ps = structure([4, 4], [2, 1])
    runs = [max_family(ps, Mode.NONTRIVIAL) for _ in range(3)]
    assert len({(r.size, r.status, r.nodes_explored) for r in runs}) == 1
    assert len({r.witness for r in runs}) == 1


def test_result_json_shape():
    ps = structure([3, 3, 3], [1, 1, 1])
    d = result_to_dict(ps, max_family(ps, Mode.NONTRIVIAL))
    assert d["instance"] == {"n": [3, 3, 3], "k": [1, 1, 1]}
    assert (d["mode"], d["size"], d["status"], d["matches_m_max"]) == ("nontrivial", 7, "optimal", True)
    assert isinstance(d["nodes"], int) and isinstance(d["ms"], int)
    json.dumps(d)


# -------------------------------------------------------------------- oracle


@pytest.mark.parametrize("n, k, mode, size", [
    ([2, 2, 2], [1, 1, 1], "nontrivial", 4),
    ([5], [2], "nontrivial", 3),
    ([5], [2], "intersecting", 4),
])
def test_oracle_examples(n, k, mode, size):
    assert oracle_max(structure(n, k), mode).size == size


def test_maximal_cliques_on_kneser_complement():
    ps = structure([4], [2])
    members = [ps.make_set([list(c)]).bits for c in itertools.combinations(range(1, 5), 2)]
    cliques = list(maximal_cliques(members))
    # the complement of a perfect matching on 6 vertices: 8 maximal triangles
    assert len(cliques) == 8 and all(len(c) == 3 for c in cliques)


@pytest.mark.parametrize("n, k", SMALL + [([5, 5], [1, 2]), ([2, 4, 5], [1, 1, 2])])
def test_engine_matches_oracle(n, k):
    ps = structure(n, k)
    for mode in Mode:
        a = max_family(ps, mode)
        b = oracle_max(ps, mode)
        assert a.size == b.size and a.status == b.status
        assert witness_ok(b)


def test_milp_and_enumeration_agree():
    for n, k in [([3, 3, 3], [1, 1, 1]), ([4, 3], [2, 1]), ([2, 2, 4], [1, 1, 2])]:
        ps = structure(n, k)
        for mode in Mode:
            assert milp_max(ps, mode)[0] == optimal_cliques(ps, mode)[0]


def test_oracle_caps():
    with pytest.raises(TooLarge):
        optimal_cliques(structure([5, 5], [2, 2]), Mode.INTERSECTING)
    with pytest.raises(TooLarge):
        oracle_max(structure([6, 6], [2, 2]), Mode.INTERSECTING)


@pytest.mark.parametrize("n, k", [([5], [2]), ([3, 3, 3], [1, 1, 1]), ([2, 2, 4], [1, 1, 2]), ([3, 5], [1, 2])])
def test_some_nontrivial_optimum_is_shifted(n, k):
    ps = structure(n, k)
    best, fams = optimal_cliques(ps, Mode.NONTRIVIAL)
    assert best == max_family(ps, Mode.NONTRIVIAL).size
    assert all(classify(f) is FamilyClass.NONTRIVIAL for f in fams)
    assert any(is_shifted(ps, f) for f in fams)


# ------------------------------------------------------------ verify_instance


def test_verify_instance_examples():
    rep = verify_instance(structure([5, 5], [2, 2]))
    assert rep.frankl_ok and rep.intersecting.size == 40
    assert rep.nontrivial.size == 35 and rep.nontrivial_vs_m_max == "equal"
    assert rep.oracle_ok and rep.ok
    rep = verify_instance(structure([2, 2, 2], [1, 1, 1]))
    assert rep.nontrivial.size == rep.m_max == 4
    rep = verify_instance(structure([6], [2]))
    assert rep.nontrivial.size == 3 == m_hm(6, 2)
    rep = verify_instance(structure([4, 4], [1, 1]))
    assert rep.nontrivial_vs_m_max == "undefined" and rep.nontrivial.status is Status.INFEASIBLE and rep.ok
