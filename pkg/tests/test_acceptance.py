"""Acceptance gate: one test per shipped guarantee.

Run `pytest -v tests/test_acceptance.py` to get one pass/fail line per
criterion. Each test states its tolerance inline and asserts its runtime
budget where one applies.
"""

import time
import warnings

import numpy as np
import pytest

from test_graphlets import brute_force_orbits, er_graph

from rolescope import (
    DiffusionConfig,
    Partition,
    borgatti_everett,
    containment_bounds,
    cosine_similarity,
    count_orbits,
    diffuse,
    disjoint_union,
    embed_community,
    embed_factorized_roles,
    embed_role,
    estimate_containment,
    exact_role_partition,
    gen_barbell,
    gen_block_chung_lu,
    gen_clique,
    gen_complete_bipartite,
    gen_star,
    motif_graph,
    nmf,
    pairwise_cosine,
    regular_equivalence_partition,
    sample_walks,
    scenario_suite,
    spectrum_check,
    structural_equivalence_partition,
    verify_convergence_rw,
    verify_convergence_sym,
)

BARBELL_PHI = 1.0 / 21.0


def chung_lu_100(seed):
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*capped at 1")
        g, _ = gen_block_chung_lu(
            (50, 50), intra_weight=0.9, degree_exponent=2.5, seed=seed
        )
    return g


def generator_corpus():
    graphs = [
        gen_star(4),
        gen_star(6),
        gen_clique(4),
        gen_clique(5),
        gen_barbell(4)[0],
        gen_barbell(5)[0],
        gen_complete_bipartite(3, 4),
        gen_complete_bipartite(2, 5),
        borgatti_everett()[0],
        disjoint_union(gen_star(4), gen_star(4))[0],
    ]
    return graphs


def refines(fine: Partition, coarse: Partition) -> bool:
    mapped = {}
    for f, c in zip(fine.labels, coarse.labels):
        if f in mapped and mapped[f] != c:
            return False
        mapped[f] = c
    return True


def test_ac01_random_walk_diffusion_converges_to_degree_average():
    g, _ = gen_barbell(5)
    X = np.random.default_rng(0).uniform(size=(g.n, 3))
    start = time.perf_counter()
    report = verify_convergence_rw(g, X, t_max=10000, tol=1e-8)
    elapsed = time.perf_counter() - start
    assert report.converged
    assert report.t_reached <= 10000
    assert report.max_deviation <= 1e-8
    y = (g.degrees @ X) / g.degrees.sum()
    assert np.abs(report.limit - y).max() <= 1e-8
    assert elapsed < 1.0


def test_ac02_symmetric_diffusion_limit_proportional_to_sqrt_degree():
    g, _ = gen_barbell(5)
    X = np.random.default_rng(0).uniform(size=(g.n, 3))
    report = verify_convergence_sym(g, X, t_max=10000, tol=1e-8)
    assert report.converged
    ratios = report.limit / np.sqrt(g.degrees)[:, None]
    assert np.ptp(ratios, axis=0).max() <= 1e-8
    endpoint_over_interior = report.limit[4] / report.limit[0]
    assert np.abs(endpoint_over_interior - np.sqrt(5.0 / 4.0)).max() <= 1e-6


def test_ac03_symmetric_operator_spectrum_lies_in_unit_interval():
    from rolescope import Graph

    triangle = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    for g in (triangle, gen_barbell(5)[0], chung_lu_100(0)):
        report = spectrum_check(g)
        assert report.eigenvalues.min() > -1.0 + 1e-9
        assert report.eigenvalues.max() <= 1.0 + 1e-9
        assert report.num_components == 1
        assert not report.bipartite
        assert report.num_at_one == 1
    edge = Graph.from_edges(2, [(0, 1)])
    edge_report = spectrum_check(edge)
    assert abs(edge_report.min_eigenvalue - (-1.0)) <= 1e-9


def test_ac04_walk_containment_beats_conductance_bound():
    g, _ = gen_barbell(5)
    community = list(range(5))
    trials = 10000
    start = time.perf_counter()
    for ell in (2, 4, 8):
        empirical = estimate_containment(g, community, ell=ell, trials=trials, seed=0)
        bound, _ = containment_bounds(BARBELL_PHI, ell)
        sigma = np.sqrt(bound * (1.0 - bound) / trials)
        assert empirical >= bound - 3.0 * sigma, (ell, empirical, bound)
    elapsed = time.perf_counter() - start
    stars, _ = disjoint_union(gen_star(4), gen_star(4))
    assert estimate_containment(stars, range(5), ell=6, trials=500, seed=0) == 1.0
    assert elapsed < 5.0


def test_ac05_per_edge_walk_traversals_bounded_by_length():
    length = 5
    means = []
    for i in range(20):
        g = chung_lu_100(1000 + i)
        starts = np.repeat(np.arange(g.n), g.degrees.astype(np.int64))
        corpus = sample_walks(
            g, length=length, walks_per_node=1, seed=i, start_nodes=starts
        )
        counts = {}
        for walk in corpus.walks:
            for pair in set(zip(walk[:-1].tolist(), walk[1:].tolist())):
                counts[pair] = counts.get(pair, 0) + 1
        src, dst, _ = g.edge_array()
        total = sum(
            counts.get((int(u), int(v)), 0) + counts.get((int(v), int(u)), 0)
            for u, v in zip(src, dst)
        )
        means.append(total / (2 * g.num_edges))
    means = np.asarray(means)
    assert means.mean() <= length + 3.0 * means.std()


def test_ac06_orbit_counts_match_brute_force_enumeration():
    start = time.perf_counter()
    graphs = list(generator_corpus())
    sizes = (8, 10, 12)
    probs = (0.2, 0.4, 0.6)
    for i in range(25):
        graphs.append(er_graph(sizes[i % 3], probs[(i // 3) % 3], seed=500 + i))
    for g in graphs:
        assert np.array_equal(count_orbits(g), brute_force_orbits(g))
    assert time.perf_counter() - start < 30.0


def test_ac07_motif_graph_shatters_barbell_but_not_clique():
    g, _ = gen_barbell(5)
    shattered = motif_graph(g, "4-clique", min_count=1)
    assert shattered.num_components == 2
    whole = motif_graph(gen_clique(4), "4-clique")
    assert whole.num_components == 1


def test_ac08_equivalence_partitions_form_a_hierarchy():
    for g in generator_corpus():
        structural = structural_equivalence_partition(g)
        exact = exact_role_partition(g)
        regular = regular_equivalence_partition(g)
        assert refines(structural, exact)
        assert refines(exact, regular)
    star = gen_star(4)
    for part in (
        structural_equivalence_partition(star),
        exact_role_partition(star),
        regular_equivalence_partition(star),
    ):
        assert part.k == 2
        assert sorted(np.bincount(part.labels).tolist()) == [1, 4]
        assert (part.labels[1:] == part.labels[1]).all()


def test_ac09_role_mechanisms_transfer_hubs_community_does_not():
    g, _ = disjoint_union(gen_star(4), gen_star(4))
    role_emb = embed_role(g, d=2, seed=0)
    assert cosine_similarity(role_emb.vectors[0], role_emb.vectors[5]) == 1.0
    nmf_emb = embed_factorized_roles(g, k_roles=2, seed=0)
    assert cosine_similarity(nmf_emb.vectors[0], nmf_emb.vectors[5]) == 1.0
    community = embed_community(g, d=4, seed=0)
    S = pairwise_cosine(community.vectors)
    cross_mean = np.mean([S[i, j] for i in range(5) for j in range(5, 10)])
    assert S[0, 5] <= cross_mean + 0.05


def test_ac10_random_walk_diffusion_smooths_within_cliques():
    g, _ = gen_barbell(5)
    config = DiffusionConfig(operator="random-walk", steps=3)
    cliques = (list(range(5)), list(range(5, 10)))
    ratios = {0: [], 1: []}
    for i in range(20):
        X = np.random.default_rng(3000 + i).uniform(size=(g.n, 1))
        smoothed = diffuse(g, X, config)
        for side, nodes in enumerate(cliques):
            before = X[nodes, 0].std()
            after = smoothed[nodes, 0].std()
            ratios[side].append(after / before)
    for side in (0, 1):
        assert np.mean(ratios[side]) <= 0.10


@pytest.mark.filterwarnings("ignore:.*capped at 1")
def test_ac11_scenario_suite_matches_expected_verdicts():
    start = time.perf_counter()
    for seed in range(5):
        for record in scenario_suite(seed=seed):
            if record["expected"] is not None:
                assert record["report"].verdict == record["expected"], (
                    seed,
                    record["scenario"],
                    record["mechanism"],
                )
    assert time.perf_counter() - start < 60.0


def test_ac12_nmf_objective_never_increases():
    for seed in range(10):
        X = np.abs(np.random.default_rng(seed).normal(size=(12, 6)))
        fact = nmf(X, k=3, iters=150, tol=0.0, seed=seed)
        trace = np.asarray(fact.objective)
        assert np.all(np.diff(trace) <= 1e-12)
