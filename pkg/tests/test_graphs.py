import numpy as np
import pytest

from rolescope import (
    Graph,
    GraphError,
    ParseError,
    Partition,
    ValidationError,
    build_role_graph,
    connected_components,
    degree_vector,
    disjoint_union,
    gen_barbell,
    gen_block_chung_lu,
    gen_clique,
    gen_complete_bipartite,
    gen_star,
    is_bipartite,
    load_edge_list,
)


def check_graph_invariants(g):
    """Symmetry, sorted neighbor lists, no self loops, positive weights."""
    assert g.indptr[0] == 0 and g.indptr[-1] == len(g.indices)
    assert np.all(g.weights > 0)
    for u in range(g.n):
        nbrs = g.neighbors(u)
        assert np.all(np.diff(nbrs) > 0), f"node {u} has unsorted or duplicate neighbors"
        assert u not in nbrs, f"self loop at {u}"
        for v in nbrs:
            assert g.has_edge(int(v), u), f"edge {u}-{v} not mirrored"


def test_from_edges_basic():
    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    check_graph_invariants(g)
    assert g.n == 3
    assert g.num_edges == 2
    assert list(g.neighbors(1)) == [0, 2]


def test_from_edges_collapses_duplicates():
    g = Graph.from_edges(2, [(0, 1), (1, 0)])
    assert g.num_edges == 1
    assert g.weights[0] == 2.0


def test_from_edges_rejects_self_loop_and_bad_ids():
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 0)])
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 5)])
    with pytest.raises(GraphError):
        Graph.from_edges(2, [(0, 1)], weights=[-1.0])


def test_degrees_weighted_and_unweighted():
    g = Graph.from_edges(3, [(0, 1), (1, 2)], weights=[2.0, 3.0])
    assert g.is_weighted
    assert np.allclose(degree_vector(g), [2.0, 5.0, 3.0])
    h = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert not h.is_weighted
    assert np.allclose(degree_vector(h), [1.0, 2.0, 1.0])


def test_edge_array_lists_each_edge_once():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    src, dst, w = g.edge_array()
    assert sorted(zip(src.tolist(), dst.tolist())) == [(0, 1), (1, 2), (2, 3)]
    assert np.all(src < dst)
    assert np.all(w == 1.0)


def test_partition_validates_and_groups():
    part = Partition(np.array([0, 1, 1, 0]), 2)
    assert part.as_sets() == [{0, 3}, {1, 2}]
    assert part.same_class_matrix()[0, 3]
    assert not part.same_class_matrix()[0, 1]
    with pytest.raises(ValidationError):
        Partition(np.array([0, 2]), 3)  # class 1 empty
    with pytest.raises(ValidationError):
        Partition(np.array([0, -1]), 2)


def test_partition_from_labels_first_appearance():
    part = Partition.from_labels(["b", "a", "b", "c"])
    assert part.labels.tolist() == [0, 1, 0, 2]
    assert part.k == 3


# ---------------------------------------------------------------------------
# file loading
# ---------------------------------------------------------------------------


def test_load_edge_list_integer_ids(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("0 1\n1 2\n")
    g = load_edge_list(path)
    check_graph_invariants(g)
    assert g.n == 3
    assert g.has_edge(0, 1) and g.has_edge(1, 2) and not g.has_edge(0, 2)


def test_load_edge_list_integer_ids_are_positional(tmp_path):
    # ids out of first-appearance order must not be relabeled
    path = tmp_path / "g.edges"
    path.write_text("0 1\n4 9\n5 6\n")
    g = load_edge_list(path)
    assert g.n == 10
    assert g.has_edge(4, 9) and g.has_edge(5, 6)
    assert g.node_labels is None


def test_load_edge_list_string_tokens_mapped_in_order(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("a b\nb a\n")
    g = load_edge_list(path)
    assert g.n == 2
    assert g.num_edges == 1
    assert g.weights[0] == 2.0
    assert g.node_labels == ("a", "b")


def test_load_edge_list_comments_and_weights(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("# header\n0 1 2.5\n\n1 2 0.5\n")
    g = load_edge_list(path)
    assert g.num_edges == 2
    assert np.isclose(g.degrees[1], 3.0)


@pytest.mark.parametrize(
    "content,err",
    [
        ("0 0\n", ParseError),
        ("0 1 2 3\n", ParseError),
        ("0 1 x\n", ParseError),
        ("0 1 -2\n", ValidationError),
        ("# only a comment\n", ParseError),
    ],
)
def test_load_edge_list_bad_input(tmp_path, content, err):
    path = tmp_path / "g.edges"
    path.write_text(content)
    with pytest.raises(err):
        load_edge_list(path)


def test_load_edge_list_parse_error_names_line(tmp_path):
    path = tmp_path / "g.edges"
    path.write_text("0 1\n2 2\n")
    with pytest.raises(ParseError, match="line 2"):
        load_edge_list(path)


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def test_barbell_counts():
    g, part = gen_barbell(5)
    check_graph_invariants(g)
    assert g.n == 10
    assert g.num_edges == 21
    assert part.as_sets() == [set(range(5)), set(range(5, 10))]
    g3, _ = gen_barbell(3)
    assert g3.n == 6 and g3.num_edges == 7
    with pytest.raises(ValidationError):
        gen_barbell(2)


def test_barbell_components_and_bridge():
    g, _ = gen_barbell(5)
    assert connected_components(g).k == 1
    src, dst, _ = g.edge_array()
    no_bridge = [(u, v) for u, v in zip(src, dst) if (u, v) != (4, 5)]
    cut = Graph.from_edges(10, no_bridge)
    assert connected_components(cut).k == 2


def test_star_shape():
    g = gen_star(4)
    check_graph_invariants(g)
    assert g.out_degrees.tolist() == [4, 1, 1, 1, 1]
    assert gen_star(1).num_edges == 1
    with pytest.raises(ValidationError):
        gen_star(0)


def test_clique_and_bipartite_shapes():
    assert gen_clique(4).num_edges == 6
    assert gen_clique(2).num_edges == 1
    kb = gen_complete_bipartite(2, 3)
    check_graph_invariants(kb)
    assert kb.num_edges == 6
    assert is_bipartite(kb)
    with pytest.raises(ValidationError):
        gen_clique(1)
    with pytest.raises(ValidationError):
        gen_complete_bipartite(0, 3)


@pytest.mark.filterwarnings("ignore:.*capped at 1")
def test_generator_invariants_hold_on_corpus():
    corpus = [
        gen_barbell(5)[0],
        gen_star(4),
        gen_clique(6),
        gen_complete_bipartite(3, 4),
        gen_block_chung_lu((20, 20), 0.5, 2.5, seed=7)[0],
    ]
    for g in corpus:
        check_graph_invariants(g)


def test_structure_ops_on_path_and_triangle():
    path = Graph.from_edges(3, [(0, 1), (1, 2)])
    assert degree_vector(path).tolist() == [1.0, 2.0, 1.0]
    assert is_bipartite(path)
    assert connected_components(path).k == 1
    assert not is_bipartite(gen_clique(3))
    two_edges = Graph.from_edges(4, [(0, 1), (2, 3)])
    assert connected_components(two_edges).k == 2


# ---------------------------------------------------------------------------
# role graphs
# ---------------------------------------------------------------------------


def test_role_graph_star():
    g = gen_star(4)
    roles = Partition(np.array([0, 1, 1, 1, 1]), 2)
    rg = build_role_graph(g, roles)
    assert rg.edges == frozenset({(0, 1)})
    assert not rg.has_edge(0, 0) and not rg.has_edge(1, 1)


def test_role_graph_clique_self_loop():
    rg = build_role_graph(gen_clique(4), Partition(np.zeros(4, dtype=np.int64), 1))
    assert rg.edges == frozenset({(0, 0)})


def test_role_graph_barbell_three_super_edges():
    g, _ = gen_barbell(5)
    labels = np.zeros(10, dtype=np.int64)
    labels[[4, 5]] = 1  # bridge endpoints
    rg = build_role_graph(g, Partition(labels, 2))
    assert rg.edges == frozenset({(0, 0), (0, 1), (1, 1)})
    assert rg.neighbor_roles(0) == {0, 1}


def test_role_graph_isomorphic_under_relabeling():
    g, _ = gen_barbell(5)
    labels = np.zeros(10, dtype=np.int64)
    labels[[4, 5]] = 1
    rg = build_role_graph(g, Partition(labels, 2))
    swapped = build_role_graph(g, Partition(1 - labels, 2))
    remapped = frozenset((min(1 - a, 1 - b), max(1 - a, 1 - b)) for a, b in rg.edges)
    assert swapped.edges == remapped


def test_disjoint_union_offsets_and_labels():
    g, part = disjoint_union(gen_star(4), gen_star(4))
    check_graph_invariants(g)
    assert g.n == 10
    assert g.num_edges == 8
    assert part.labels.tolist() == [0] * 5 + [1] * 5
    assert connected_components(g).k == 2


# ---------------------------------------------------------------------------
# Chung-Lu generator
# ---------------------------------------------------------------------------


def modularity(g, part):
    """Standard Newman modularity of a partition (oracle for block structure)."""
    src, dst, w = g.edge_array()
    two_m = g.degrees.sum()
    same = part.labels[src] == part.labels[dst]
    intra = 2.0 * w[same].sum() / two_m
    expected = sum(
        (g.degrees[part.members(c)].sum() / two_m) ** 2 for c in range(part.k)
    )
    return intra - expected


@pytest.mark.filterwarnings("ignore:.*capped at 1")
def test_chung_lu_blocks_are_modular():
    g, part = gen_block_chung_lu((50, 50), 0.9, 1.7, seed=0)
    check_graph_invariants(g)
    assert g.n == 100
    assert modularity(g, part) > 0.3


def test_chung_lu_warns_when_probabilities_cap():
    with pytest.warns(UserWarning, match="capped at 1"):
        gen_block_chung_lu((30, 30), 0.9, 1.7, seed=1)


@pytest.mark.filterwarnings("ignore:.*capped at 1")
def test_chung_lu_degrees_track_expected_degrees():
    from scipy.stats import spearmanr

    n = 200
    for seed in range(3):
        # reconstruct the drawn expected degrees (same RNG consumption order)
        rng = np.random.default_rng(seed)
        expected = 2.0 * (1.0 - rng.random(n)) ** (-1.0 / (1.7 - 1.0))
        expected = np.minimum(expected, n - 1.0)
        g, _ = gen_block_chung_lu((n,), 0.0, 1.7, seed=seed)
        rho = spearmanr(expected, g.degrees).statistic
        assert rho > 0.8, f"seed {seed}: Spearman {rho:.3f}"


@pytest.mark.filterwarnings("ignore:.*capped at 1")
def test_chung_lu_deterministic_and_no_isolated_nodes():
    for seed in range(5):
        g1, _ = gen_block_chung_lu((30, 30), 0.7, 2.0, seed=seed)
        g2, _ = gen_block_chung_lu((30, 30), 0.7, 2.0, seed=seed)
        assert np.array_equal(g1.indptr, g2.indptr)
        assert np.array_equal(g1.indices, g2.indices)
        assert g1.out_degrees.min() >= 1


def test_chung_lu_validates_parameters():
    with pytest.raises(ValidationError):
        gen_block_chung_lu((1, 5), 0.5, 2.0, seed=0)
    with pytest.raises(ValidationError):
        gen_block_chung_lu((5, 5), 1.0, 2.0, seed=0)
    with pytest.raises(ValidationError):
        gen_block_chung_lu((5, 5), 0.5, 1.0, seed=0)
