"""Tests for the embedding diagnostic scores, verdicts, and scenario suite."""

import numpy as np
import pytest

from rolescope import (
    MECHANISMS,
    SCENARIOS,
    DiagnosticReport,
    Embedding,
    Partition,
    ValidationError,
    borgatti_everett,
    count_orbits,
    diagnose,
    disjoint_union,
    embed_community,
    embed_factorized_roles,
    embed_role,
    feature_equivalence_partition,
    gen_barbell,
    gen_clique,
    gen_star,
    scenario_suite,
    verdict_matrix,
    verify_exact_role_assignment,
)
from rolescope.diagnostics import EXPECTED_VERDICTS


def orbit_classes(g):
    return feature_equivalence_partition(count_orbits(g).astype(np.float64))


def barbell_fixture():
    g, communities = gen_barbell(5)
    return g, communities, orbit_classes(g)


def star_pair_fixture():
    g, communities = disjoint_union(gen_star(4), gen_star(4))
    roles = Partition(np.array([0, 1, 1, 1, 1, 0, 1, 1, 1, 1], dtype=np.int64), 2)
    return g, communities, roles


# ---------------------------------------------------------------------------
# report container
# ---------------------------------------------------------------------------


def test_report_validation_and_round_trip():
    with pytest.raises(ValidationError, match="finite"):
        DiagnosticReport(np.nan, 0.0, 0.0, 0.0, "community")
    with pytest.raises(ValidationError, match="verdict"):
        DiagnosticReport(0.0, 0.0, 0.0, 0.0, "unknown")
    rep = DiagnosticReport(0.5, 0.1, 0.2, 0.0, "community", notes=("a note",))
    d = rep.to_dict()
    assert d["verdict"] == "community"
    assert d["community_score"] == 0.5
    assert d["tau"] == 0.1 and d["rho"] == 0.3
    assert d["notes"] == ["a note"]


# ---------------------------------------------------------------------------
# score geometry
# ---------------------------------------------------------------------------


def test_scores_invariant_under_rotation_and_translation():
    g, communities, roles = barbell_fixture()
    emb = embed_community(g, d=3, seed=2)
    base = diagnose(g, emb, communities, roles)
    Q = np.linalg.qr(np.random.default_rng(3).normal(size=(3, 3)))[0]
    moved = Embedding(emb.vectors @ Q + np.array([5.0, -2.0, 0.5]), emb.provenance, 3)
    other = diagnose(g, moved, communities, roles)
    assert abs(base.community_score - other.community_score) <= 1e-9
    assert abs(base.role_score - other.role_score) <= 1e-9
    assert abs(base.proximity_correlation - other.proximity_correlation) <= 1e-9
    assert abs(base.transfer_score - other.transfer_score) <= 1e-9
    assert base.verdict == other.verdict


def test_diagnose_is_deterministic():
    g, communities, roles = barbell_fixture()
    emb = embed_community(g, d=4, seed=0)
    assert diagnose(g, emb, communities, roles) == diagnose(g, emb, communities, roles)


# ---------------------------------------------------------------------------
# verdicts on fixtures
# ---------------------------------------------------------------------------


def test_role_mechanisms_transfer_perfectly_across_components():
    g, communities, roles = star_pair_fixture()
    for emb in (
        embed_role(g, d=2, seed=0),
        embed_factorized_roles(g, k_roles=2, seed=0),
    ):
        report = diagnose(g, emb, communities, roles)
        assert report.verdict == "role"
        assert report.transfer_score == 1.0


def test_community_mechanism_wins_on_barbell():
    g, communities, roles = barbell_fixture()
    for seed in range(3):
        report = diagnose(g, embed_community(g, d=4, seed=seed), communities, roles)
        assert report.verdict == "community"
        assert report.community_score > report.tau
        assert report.proximity_correlation > 0.0


def test_noise_embedding_is_inconclusive():
    g, communities, roles = barbell_fixture()
    for seed in range(6):
        rng = np.random.default_rng(seed)
        noise = Embedding(rng.normal(size=(g.n, 8)), "diffusion", 8)
        report = diagnose(g, noise, communities, roles)
        assert report.verdict == "inconclusive"


def test_flat_embedding_is_flagged_degenerate():
    g, communities, roles = barbell_fixture()
    flat = Embedding(np.ones((g.n, 3)), "diffusion", 3)
    report = diagnose(g, flat, communities, roles)
    assert report.verdict == "inconclusive"
    assert "degenerate embedding: all rows equal" in report.notes


def test_one_class_partitions_zero_out_contrasts():
    g = gen_clique(6)
    ones = Partition(np.zeros(6, dtype=np.int64), 1)
    report = diagnose(g, embed_community(g, d=3, seed=1), ones, ones)
    assert report.verdict == "inconclusive"
    assert report.community_score == 0.0
    assert report.role_score == 0.0
    assert report.proximity_correlation == 0.0
    assert report.transfer_score == 0.0
    assert len(report.notes) == 4


def test_thresholds_are_arguments():
    g, communities, roles = barbell_fixture()
    emb = embed_community(g, d=4, seed=0)
    report = diagnose(g, emb, communities, roles, tau=10.0, rho=0.9)
    assert report.verdict == "inconclusive"
    assert report.tau == 10.0 and report.rho == 0.9


def test_diagnose_validation():
    g, communities, roles = barbell_fixture()
    emb = embed_community(g, d=4, seed=0)
    small = Embedding(np.zeros((4, 2)), "diffusion", 2)
    with pytest.raises(ValidationError, match="align"):
        diagnose(g, small, communities, roles)
    with pytest.raises(ValidationError, match="label every node"):
        diagnose(g, emb, Partition(np.zeros(4, dtype=np.int64), 1), roles)


# ---------------------------------------------------------------------------
# the hub-leaf-gatekeeper fixture
# ---------------------------------------------------------------------------


def test_borgatti_everett_fixture_shape():
    g, communities, roles = borgatti_everett()
    assert g.n == 10 and g.num_edges == 9
    degs = sorted(g.degrees.tolist())
    assert degs == [1.0] * 6 + [2.0, 2.0, 4.0, 4.0]
    assert communities.k == 2
    assert communities.labels.tolist() == [0] * 5 + [1] * 5
    assert roles.k == 3
    assert roles.labels[0] == roles.labels[5]
    assert roles.labels[4] == roles.labels[9]
    assert roles.labels[0] != roles.labels[4]


def test_borgatti_everett_roles_pass_exact_verification():
    g, _, roles = borgatti_everett()
    assert verify_exact_role_assignment(g, roles).holds


# ---------------------------------------------------------------------------
# scenario suite
# ---------------------------------------------------------------------------


@pytest.mark.filterwarnings("ignore:.*capped at 1")
def test_scenario_suite_covers_grid_and_matches_pins():
    records = scenario_suite(seed=0)
    assert len(records) == len(SCENARIOS) * len(MECHANISMS)
    seen = {(r["scenario"], r["mechanism"]) for r in records}
    assert seen == {(s, m) for s in SCENARIOS for m in MECHANISMS}
    for rec in records:
        assert isinstance(rec["report"], DiagnosticReport)
        if rec["expected"] is not None:
            assert rec["report"].verdict == rec["expected"], (
                rec["scenario"],
                rec["mechanism"],
            )
    pinned = {(r["scenario"], r["mechanism"]) for r in records if r["expected"]}
    assert pinned == set(EXPECTED_VERDICTS)


@pytest.mark.filterwarnings("ignore:.*capped at 1")
def test_scenario_suite_deterministic():
    first = [r["report"].verdict for r in scenario_suite(seed=0)]
    second = [r["report"].verdict for r in scenario_suite(seed=0)]
    assert first == second


@pytest.mark.filterwarnings("ignore:.*capped at 1")
def test_verdict_matrix_layout():
    records = scenario_suite(seed=0)
    text = verdict_matrix(records)
    lines = text.splitlines()
    assert lines[0].startswith("scenario")
    for mechanism in MECHANISMS:
        assert mechanism in lines[0]
    assert len(lines) == 1 + len(SCENARIOS)
    for scenario, line in zip(SCENARIOS, lines[1:]):
        assert line.startswith(scenario)


def test_verdict_matrix_marks_missing_cells():
    rep = DiagnosticReport(0.5, 0.0, 0.5, 0.0, "community")
    text = verdict_matrix([{"scenario": "only", "mechanism": "deepwalk", "report": rep}])
    lines = text.splitlines()
    assert len(lines) == 2
    assert "community" in lines[1]
    assert "-" in lines[1]
