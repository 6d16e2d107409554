"""Tests for graph- and feature-based node equivalences."""

import itertools

import numpy as np
import pytest

from rolescope import (
    EquivalenceReport,
    Graph,
    Partition,
    RoleGraph,
    ValidationError,
    borgatti_everett,
    disjoint_union,
    epsilon_structural_similarity,
    exact_role_partition,
    feature_equivalence_partition,
    gen_barbell,
    gen_clique,
    gen_complete_bipartite,
    gen_star,
    kernel_similarity,
    orbit_feature_matrix,
    regular_equivalence_partition,
    structural_equivalence_partition,
    verify_exact_role_assignment,
    verify_strong_structural_assignment,
)


def path_graph(n):
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def refines(fine: Partition, coarse: Partition) -> bool:
    """True when every class of ``fine`` sits inside one class of ``coarse``."""
    mapped = {}
    for f, c in zip(fine.labels.tolist(), coarse.labels.tolist()):
        if f in mapped and mapped[f] != c:
            return False
        mapped[f] = c
    return True


def classes_as_sets(part: Partition):
    return {frozenset(np.flatnonzero(part.labels == c).tolist()) for c in range(part.k)}


# ---------------------------------------------------------------------------
# structural equivalence
# ---------------------------------------------------------------------------


def test_structural_star_two_classes():
    part = structural_equivalence_partition(gen_star(4))
    assert classes_as_sets(part) == {frozenset({0}), frozenset({1, 2, 3, 4})}


def test_structural_clique_open_vs_closed():
    g = gen_clique(4)
    open_part = structural_equivalence_partition(g)
    assert open_part.k == 4
    closed_part = structural_equivalence_partition(g, closed=True)
    assert closed_part.k == 1


def test_structural_complete_bipartite_two_classes():
    part = structural_equivalence_partition(gen_complete_bipartite(2, 3))
    assert classes_as_sets(part) == {frozenset({0, 1}), frozenset({2, 3, 4})}


def test_structural_disjoint_hubs_not_merged():
    # Neighbor sets are over node ids, so hubs of different components
    # never match; this is what separates Def. 5-style equivalence from
    # the feature-based notions.
    g, _ = disjoint_union(gen_star(3), gen_star(3))
    part = structural_equivalence_partition(g)
    assert part.labels[0] != part.labels[4]
    assert part.labels[1] == part.labels[2] == part.labels[3]


# ---------------------------------------------------------------------------
# regular equivalence
# ---------------------------------------------------------------------------


def test_regular_star_and_clique():
    star_part = regular_equivalence_partition(gen_star(4))
    assert classes_as_sets(star_part) == {frozenset({0}), frozenset({1, 2, 3, 4})}
    assert regular_equivalence_partition(gen_clique(5)).k == 1


def test_regular_barbell_interiors_vs_endpoints():
    g, _ = gen_barbell(5)
    part = regular_equivalence_partition(g)
    assert classes_as_sets(part) == {
        frozenset({0, 1, 2, 3, 6, 7, 8, 9}),
        frozenset({4, 5}),
    }


def test_regular_path5_three_classes():
    part = regular_equivalence_partition(path_graph(5))
    assert classes_as_sets(part) == {
        frozenset({0, 4}),
        frozenset({1, 3}),
        frozenset({2}),
    }


def test_regular_partition_is_set_stable():
    for g in (gen_star(5), gen_barbell(4)[0], path_graph(6), gen_complete_bipartite(2, 4)):
        part = regular_equivalence_partition(g)
        for c in range(part.k):
            members = np.flatnonzero(part.labels == c)
            sets = {frozenset(part.labels[g.neighbors(int(u))].tolist()) for u in members}
            assert len(sets) == 1


# ---------------------------------------------------------------------------
# exact role equivalence
# ---------------------------------------------------------------------------


def test_exact_partition_star_and_path():
    assert exact_role_partition(gen_star(4)).k == 2
    part = exact_role_partition(path_graph(5))
    assert classes_as_sets(part) == {
        frozenset({0, 4}),
        frozenset({1, 3}),
        frozenset({2}),
    }


def test_exact_verification_star_holds():
    g = gen_star(4)
    rep = verify_exact_role_assignment(g, [0, 1, 1, 1, 1])
    assert rep.kind == "exact-role"
    assert rep.holds
    assert rep.witness is None


def test_exact_verification_barbell_two_classes_holds():
    # Every clique interior is adjacent to its block's bridge endpoint, so
    # all interiors see the multiset {interior x3, endpoint x1} and the
    # two-class assignment genuinely satisfies the exact-role condition.
    g, _ = gen_barbell(5)
    labels = [0, 0, 0, 0, 1, 1, 0, 0, 0, 0]
    rep = verify_exact_role_assignment(g, labels)
    assert rep.holds


def test_exact_verification_one_class_barbell_fails():
    g, _ = gen_barbell(5)
    rep = verify_exact_role_assignment(g, [0] * 10)
    assert not rep.holds
    assert rep.witness["pair"] == [0, 4]
    assert "multiset" in rep.witness["condition"]


def test_exact_verification_borgatti_everett_holds():
    g, _, roles = borgatti_everett()
    assert verify_exact_role_assignment(g, roles).holds


def test_exact_partition_passes_its_own_verification():
    for g in (gen_barbell(5)[0], path_graph(6), gen_complete_bipartite(3, 4)):
        part = exact_role_partition(g)
        assert verify_exact_role_assignment(g, part).holds


def test_exact_verification_requires_total_assignment():
    with pytest.raises(ValidationError, match="every node"):
        verify_exact_role_assignment(gen_star(3), [0, 1])


# ---------------------------------------------------------------------------
# strong structural verification
# ---------------------------------------------------------------------------


def test_strong_star_holds():
    rep = verify_strong_structural_assignment(gen_star(4), [0, 1, 1, 1, 1])
    assert rep.holds
    assert rep.reading == "universal"


def test_strong_path4_ends_mids_holds():
    g = path_graph(4)
    for reading in ("universal", "edge-consistency"):
        rep = verify_strong_structural_assignment(
            g, [0, 1, 1, 0], reading=reading
        )
        assert rep.holds
        assert rep.reading == reading


def test_strong_barbell_two_roles_holds():
    g, _ = gen_barbell(5)
    labels = [0, 0, 0, 0, 1, 1, 0, 0, 0, 0]
    rep = verify_strong_structural_assignment(g, labels)
    assert rep.holds


def test_strong_path5_fails_universal_holds_edgewise():
    g = path_graph(5)
    labels = [0, 1, 1, 1, 0]
    universal = verify_strong_structural_assignment(g, labels, reading="universal")
    assert not universal.holds
    assert universal.witness["pair"] == [2, 0]
    assert "no role-0 neighbor" in universal.witness["condition"]
    edgewise = verify_strong_structural_assignment(
        g, labels, reading="edge-consistency"
    )
    assert edgewise.holds


def test_strong_detects_unmapped_edge_and_ghost_role_edge():
    g = gen_clique(3)
    empty = RoleGraph(1, frozenset())
    rep = verify_strong_structural_assignment(g, [0, 0, 0], role_graph=empty)
    assert not rep.holds
    assert "absent from the role graph" in rep.witness["condition"]

    star = gen_star(4)
    ghost = RoleGraph(2, frozenset({(0, 1), (1, 1)}))
    rep2 = verify_strong_structural_assignment(
        star, [0, 1, 1, 1, 1], role_graph=ghost
    )
    assert not rep2.holds
    assert rep2.witness["pair"] == [1, 1]
    assert "realized by no graph edge" in rep2.witness["condition"]


def test_strong_unknown_reading_rejected():
    with pytest.raises(ValidationError, match="reading"):
        verify_strong_structural_assignment(gen_star(3), [0, 1, 1, 1], reading="loose")


def test_report_witness_consistency_enforced():
    with pytest.raises(ValidationError, match="witness"):
        EquivalenceReport(kind="exact-role", holds=True, witness={"pair": [0, 1]})
    with pytest.raises(ValidationError, match="witness"):
        EquivalenceReport(kind="exact-role", holds=False, witness=None)
    rep = EquivalenceReport(kind="exact-role", holds=True)
    assert rep.to_dict() == {"kind": "exact-role", "holds": True, "witness": None}


# ---------------------------------------------------------------------------
# hierarchy across notions
# ---------------------------------------------------------------------------


def test_structural_refines_exact_refines_regular():
    rng = np.random.default_rng(80)
    corpus = [
        gen_star(5),
        gen_barbell(5)[0],
        gen_complete_bipartite(2, 3),
        path_graph(6),
        gen_clique(4),
    ]
    for i in range(3):
        edges = [
            (u, v)
            for u in range(10)
            for v in range(u + 1, 10)
            if rng.random() < 0.35
        ]
        if edges:
            corpus.append(Graph.from_edges(10, edges))
    for g in corpus:
        structural = structural_equivalence_partition(g)
        exact = exact_role_partition(g)
        regular = regular_equivalence_partition(g)
        assert refines(structural, exact)
        assert refines(exact, regular)


# ---------------------------------------------------------------------------
# feature equivalence
# ---------------------------------------------------------------------------


def test_feature_equivalence_disjoint_stars():
    g, _ = disjoint_union(gen_star(4), gen_star(4))
    part = feature_equivalence_partition(orbit_feature_matrix(g))
    assert part.k == 2
    assert part.labels[0] == part.labels[5]
    assert part.labels[1] != part.labels[0]


def test_feature_equivalence_distinct_rows_singletons():
    X = np.arange(12, dtype=float).reshape(4, 3)
    assert feature_equivalence_partition(X).k == 4


def test_feature_equivalence_barbell_orbit_rows():
    g, _ = gen_barbell(5)
    part = feature_equivalence_partition(orbit_feature_matrix(g))
    assert classes_as_sets(part) == {
        frozenset({0, 1, 2, 3, 6, 7, 8, 9}),
        frozenset({4, 5}),
    }


def test_feature_equivalence_tolerance_closure_chains():
    X = np.array([[0.0], [0.4], [0.8]])
    assert feature_equivalence_partition(X, tolerance=0.5).k == 1
    assert feature_equivalence_partition(X, tolerance=0.3).k == 3


def test_feature_equivalence_validation():
    with pytest.raises(ValidationError, match="2-d"):
        feature_equivalence_partition(np.empty((0, 2)))
    with pytest.raises(ValidationError, match="tolerance"):
        feature_equivalence_partition(np.ones((2, 2)), tolerance=-0.1)


# ---------------------------------------------------------------------------
# kernels and epsilon similarity
# ---------------------------------------------------------------------------


def test_kernel_cosine_basics():
    x = np.array([1.0, 2.0, 3.0])
    assert kernel_similarity(x, x) == pytest.approx(1.0)
    assert kernel_similarity([1.0, 0.0], [0.0, 1.0]) == 0.0
    assert kernel_similarity([0.0, 0.0], [0.0, 0.0]) == 1.0
    assert kernel_similarity([0.0, 0.0], [1.0, 0.0]) == 0.0


def test_kernel_rbf_value_and_validation():
    x = np.array([0.0, 0.0])
    y = np.array([3.0, 4.0])
    assert kernel_similarity(x, y, kernel="rbf", sigma=5.0) == pytest.approx(
        np.exp(-0.5)
    )
    assert kernel_similarity(x, x, kernel="rbf") == 1.0
    with pytest.raises(ValidationError, match="sigma"):
        kernel_similarity(x, y, kernel="rbf", sigma=0.0)
    with pytest.raises(ValidationError, match="kernel"):
        kernel_similarity(x, y, kernel="poly")
    with pytest.raises(ValidationError, match="shape"):
        kernel_similarity(np.ones(2), np.ones(3))


def test_epsilon_similarity_thresholds():
    x = np.array([2.0, 1.0])
    assert epsilon_structural_similarity(x, x, epsilon=1e-9)
    assert not epsilon_structural_similarity([1.0, 0.0], [0.0, 1.0], epsilon=0.5)
    with pytest.raises(ValidationError, match="epsilon"):
        epsilon_structural_similarity(x, x, epsilon=0.0)


def test_epsilon_similarity_hub_profiles_across_star_sizes():
    hub10 = np.log1p(orbit_feature_matrix(gen_star(10)).values[0])
    hub12 = np.log1p(orbit_feature_matrix(gen_star(12)).values[0])
    sim = kernel_similarity(hub10, hub12)
    assert sim >= 0.99
    assert epsilon_structural_similarity(hub10, hub12, epsilon=0.01)
