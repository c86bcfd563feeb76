import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from treesynth import (
    ArgumentError,
    DataError,
    EdgeSelectionInstance,
    InfeasibleError,
    ReducedLaplacian,
    WeightedGraph,
    build_reduced_laplacian,
    component_count,
    instance_from_json_dict,
    instance_to_json_dict,
    is_connected,
    load_instance,
    random_instance,
    reduce_removal_to_addition,
    removal_set_from_addition,
    save_instance,
)

TRIANGLE = ((1, 2, 2.0), (2, 3, 3.0), (1, 3, 4.0))


# ---------------------------------------------------------------------------
# WeightedGraph


def test_graph_edges_canonicalized():
    g = WeightedGraph(3, ((3, 2, 3.0), (2, 1, 2.0), (1, 3, 4.0)))
    assert g.edges == ((1, 2, 2.0), (1, 3, 4.0), (2, 3, 3.0))


def test_graph_parallel_edges_merge_by_weight_sum():
    g = WeightedGraph(3, ((1, 2, 2.0), (2, 1, 3.0), (2, 3, 1.0)))
    assert g.weight(1, 2) == 5.0
    assert len(g.edges) == 2


@pytest.mark.parametrize(
    "edges",
    [
        ((0, 1, 1.0),),          # vertex below range
        ((1, 4, 1.0),),          # vertex above range
        ((2, 2, 1.0),),          # self loop
        ((1, 2, 0.0),),          # nonpositive weight
        ((1, 2, -3.0),),
        ((1, 2, float("nan")),),
        ((1, 2, 0.5),),          # below unit without normalize
    ],
)
def test_graph_rejects_bad_edges(edges):
    with pytest.raises(ArgumentError):
        WeightedGraph(3, edges)


def test_graph_normalize_rescales_to_unit_minimum():
    g = WeightedGraph(3, ((1, 2, 0.5), (2, 3, 2.0)), normalize=True)
    assert min(w for _, _, w in g.edges) >= 1.0
    assert g.normalization == pytest.approx(2.0)
    assert g.weight(2, 3) == pytest.approx(4.0)


def test_graph_weight_lookup_and_edit_methods():
    g = WeightedGraph(3, TRIANGLE)
    assert g.weight(2, 1) == 2.0
    assert g.weight(1, 3) == 4.0
    bigger = g.with_edges(((1, 2, 1.0),))
    assert bigger.weight(1, 2) == 3.0
    smaller = g.without_pairs([(1, 3)])
    assert len(smaller.edges) == 2
    with pytest.raises(ArgumentError):
        g.without_pairs([(1, 5)])


def test_connectivity_queries():
    path = WeightedGraph(4, ((1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0)))
    assert is_connected(path)
    split = WeightedGraph(4, ((1, 2, 1.0), (3, 4, 1.0)))
    assert not is_connected(split)
    assert component_count(split) == 2
    assert component_count(WeightedGraph(5, ())) == 5


def test_full_laplacian_structure():
    g = WeightedGraph(3, TRIANGLE)
    L = g.full_laplacian()
    assert np.allclose(L, L.T)
    assert np.allclose(L.sum(axis=0), 0.0)
    assert L[0, 0] == 6.0  # vertex 1 touches weights 2 and 4


@given(st.permutations(list(TRIANGLE)))
def test_graph_edge_order_is_canonical_under_permutation(perm):
    assert WeightedGraph(3, tuple(perm)).edges == WeightedGraph(3, TRIANGLE).edges


# ---------------------------------------------------------------------------
# ReducedLaplacian


def test_reduced_laplacian_default_anchor_is_last_vertex():
    g = WeightedGraph(3, TRIANGLE)
    L = build_reduced_laplacian(g)
    assert L.anchor == 3
    assert L.matrix.shape == (2, 2)
    # det of the reduced Laplacian is the weighted tree count, here 26
    assert math.exp(L.log_det()) == pytest.approx(26.0, rel=1e-12)


def test_reduced_laplacian_anchor_invariance_of_logdet():
    g = WeightedGraph(4, ((1, 2, 1.5), (2, 3, 2.0), (3, 4, 1.0), (1, 4, 3.0), (1, 3, 1.0)))
    dets = {a: build_reduced_laplacian(g, anchor=a).log_det() for a in range(1, 5)}
    ref = dets[4]
    assert all(abs(v - ref) < 1e-12 for v in dets.values())


def test_reduced_laplacian_disconnected_graph_fails_factorization():
    g = WeightedGraph(4, ((1, 2, 1.0), (3, 4, 1.0)))
    L = build_reduced_laplacian(g)
    with pytest.raises(Exception):
        L.cholesky  # noqa: B018  (property access is the operation under test)


def test_incidence_vector_anchor_handling():
    g = WeightedGraph(3, TRIANGLE)
    L = build_reduced_laplacian(g)
    a = L.incidence_vector(1, 2)
    assert list(a) == [1.0, -1.0]
    a2 = L.incidence_vector(1, 3)  # anchored endpoint drops out
    assert list(a2) == [1.0, 0.0]


def test_with_edge_matches_full_rebuild():
    rng = np.random.default_rng(0)
    from conftest import random_connected_graph

    for _ in range(40):
        n = int(rng.integers(4, 9))
        g = random_connected_graph(rng, n, min(n + 3, n * (n - 1) // 2))
        L = build_reduced_laplacian(g)
        _ = L.cholesky
        u, v = rng.choice(np.arange(1, n + 1), size=2, replace=False)
        w = float(rng.uniform(1.0, 4.0))
        updated = L.with_edge(int(u), int(v), w)
        rebuilt = build_reduced_laplacian(g.with_edges(((int(u), int(v), w),)))
        assert np.allclose(updated.matrix, rebuilt.matrix)
        assert abs(updated.log_det() - rebuilt.log_det()) < 1e-9
        # the seeded factor must match a from-scratch factorization
        assert np.allclose(updated.cholesky, rebuilt.cholesky, atol=1e-9)


# ---------------------------------------------------------------------------
# EdgeSelectionInstance


def test_instance_validation_basics():
    base = ((1, 2, 1.0), (2, 3, 1.0))
    cands = ((1, 3, 1.0),)
    inst = EdgeSelectionInstance(3, base, cands, 1)
    assert inst.num_candidates == 1
    assert inst.channels == ((None, 1.0),)
    with pytest.raises(ArgumentError):
        EdgeSelectionInstance(3, base, cands, 2)  # k > c
    with pytest.raises(ArgumentError):
        EdgeSelectionInstance(3, base, cands, -1)
    with pytest.raises(ArgumentError):
        EdgeSelectionInstance(3, base, cands, 1, direction="sideways")
    with pytest.raises(ArgumentError):
        EdgeSelectionInstance(3, base, cands, 1, objective="triple")


def test_instance_requires_connected_base():
    with pytest.raises(DataError):
        EdgeSelectionInstance(4, ((1, 2, 1.0), (3, 4, 1.0)), ((2, 3, 1.0),), 1)


def test_instance_dual_channel_shapes():
    base = ((1, 2, 1.0, 2.0), (2, 3, 1.5, 2.5))
    cands = ((1, 3, 1.0, 1.0),)
    inst = EdgeSelectionInstance(3, base, cands, 1, objective="slam-double")
    assert inst.channels == (("p", 2.0), ("theta", 1.0))
    assert inst.base_graph("p").weight(1, 2) == 1.0
    assert inst.base_graph("theta").weight(1, 2) == 2.0
    with pytest.raises(ArgumentError):
        EdgeSelectionInstance(3, base, ((1, 3, 1.0),), 1, objective="slam-double")


def test_remove_candidates_must_live_in_base():
    base = ((1, 2, 1.0), (2, 3, 1.0), (1, 3, 1.0))
    EdgeSelectionInstance(3, base, ((1, 3, 1.0),), 1, direction="remove")
    with pytest.raises(ArgumentError):
        EdgeSelectionInstance(3, base, ((1, 3, 2.0),), 1, direction="remove")
    with pytest.raises(ArgumentError):
        EdgeSelectionInstance(4, base + ((3, 4, 1.0),), ((1, 4, 1.0),), 1, direction="remove")


# ---------------------------------------------------------------------------
# removal reduction


def test_reduction_budget_and_candidates():
    base = tuple((u, v, 1.0) for u in range(1, 5) for v in range(u + 1, 5))
    cands = ((1, 2, 1.0), (1, 3, 1.0), (2, 4, 1.0))
    inst = EdgeSelectionInstance(4, base, cands, 2, direction="remove")
    red = reduce_removal_to_addition(inst)
    assert red.direction == "add"
    assert red.k == 1
    assert red.candidates == cands
    assert len(red.base_edges) == len(base) - len(cands)


def test_reduction_rejects_disconnected_skeleton():
    base = ((1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0))
    inst = EdgeSelectionInstance(4, base, ((2, 3, 1.0),), 1, direction="remove")
    with pytest.raises(InfeasibleError):
        reduce_removal_to_addition(inst)


def test_removal_set_is_complement_of_kept():
    base = tuple((u, v, 1.0) for u in range(1, 5) for v in range(u + 1, 5))
    cands = ((1, 2, 1.0), (1, 3, 1.0), (2, 4, 1.0))
    inst = EdgeSelectionInstance(4, base, cands, 2, direction="remove")
    red = reduce_removal_to_addition(inst)
    assert removal_set_from_addition(red, (1,)) == (0, 2)
    with pytest.raises(ArgumentError):
        removal_set_from_addition(red, (1, 2))  # wrong cardinality


# ---------------------------------------------------------------------------
# generation and serialization


def test_random_instance_is_seed_deterministic():
    a = random_instance(n=10, m_init=14, seed=7, k=3, candidate_mode="sampled", sample_size=6)
    b = random_instance(n=10, m_init=14, seed=7, k=3, candidate_mode="sampled", sample_size=6)
    assert a == b
    c = random_instance(n=10, m_init=14, seed=8, k=3, candidate_mode="sampled", sample_size=6)
    assert a != c


def test_random_instance_base_connected_and_weights_in_range():
    inst = random_instance(n=12, m_init=16, weight_range=(2.0, 3.0), seed=1, k=2)
    assert is_connected(inst.base_graph())
    for _, _, w in inst.base_edges:
        assert 2.0 <= w <= 3.0


def test_random_instance_complement_mode_disjoint_from_base():
    inst = random_instance(n=7, m_init=9, candidate_mode="complement", seed=4)
    base_pairs = {(u, v) for u, v, _ in inst.base_edges}
    cand_pairs = {(u, v) for u, v, _ in inst.candidates}
    assert not base_pairs & cand_pairs
    assert len(cand_pairs) == 7 * 6 // 2 - len(base_pairs)


def test_instance_json_round_trip(tmp_path):
    inst = random_instance(n=6, m_init=8, seed=2, k=2, candidate_mode="sampled", sample_size=4)
    doc = instance_to_json_dict(inst)
    assert instance_from_json_dict(doc) == inst
    path = tmp_path / "inst.json"
    save_instance(inst, path)
    assert load_instance(path) == inst


def test_load_instance_errors(tmp_path):
    with pytest.raises(DataError):
        load_instance(tmp_path / "absent.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(DataError):
        load_instance(bad)
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"n": 3, "base_edges": [[1, 2, 1.0]], "candidates": [], "k": 0}))
    with pytest.raises(DataError):
        load_instance(wrong)  # disconnected base surfaces as a data error


@settings(max_examples=60)
@given(
    st.lists(
        st.tuples(st.integers(1, 6), st.integers(1, 6), st.floats(1.0, 9.0)),
        min_size=1,
        max_size=10,
    )
)
def test_graph_construction_is_idempotent(raw):
    edges = tuple((u, v, w) for u, v, w in raw if u != v)
    if not edges:
        return
    g = WeightedGraph(6, edges)
    again = WeightedGraph(6, g.edges)
    assert g.edges == again.edges
    assert g == again
