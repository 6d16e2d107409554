"""Decide what an embedding preserved: communities, roles, both, or neither.

Four scores feed a verdict. Community and role scores contrast mean
within-class and between-class cosine similarity (after centering, so the
scores ignore rotations and translations of the embedding). Proximity is
the Spearman correlation between pairwise similarity and inverse shortest
path distance. Transfer averages the similarity of structurally identical
node pairs living in different components.

The thresholds are policy, not facts from any theorem: they are surfaced
in every report and kept identical across scenarios.
"""

from __future__ import annotations

import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.stats import spearmanr

from .embedding import (
    Embedding,
    embed_community,
    embed_factorized_roles,
    embed_implicit,
    embed_role,
    pairwise_cosine,
)
from .errors import ValidationError
from .graphlets import count_orbits
from .graphs import (
    Graph,
    Partition,
    connected_components,
    disjoint_union,
    gen_barbell,
    gen_block_chung_lu,
    gen_clique,
    gen_complete_bipartite,
    gen_star,
)
from .roles import fit_type_mapping

__all__ = [
    "TAU",
    "RHO",
    "VERDICTS",
    "SCENARIOS",
    "MECHANISMS",
    "EXPECTED_VERDICTS",
    "DiagnosticReport",
    "diagnose",
    "borgatti_everett",
    "scenario_suite",
    "verdict_matrix",
]

TAU = 0.1
RHO = 0.3
VERDICTS = ("community", "role", "mixed", "inconclusive")


@dataclass(frozen=True)
class DiagnosticReport:
    """Scores, thresholds, verdict, and any degeneracy notes."""

    community_score: float
    role_score: float
    proximity_correlation: float
    transfer_score: float
    verdict: str
    tau: float = TAU
    rho: float = RHO
    notes: tuple = ()

    def __post_init__(self):
        for value in (
            self.community_score,
            self.role_score,
            self.proximity_correlation,
            self.transfer_score,
        ):
            if not np.isfinite(value):
                raise ValidationError("diagnostic scores must be finite")
        if self.verdict not in VERDICTS:
            raise ValidationError(f"verdict must be one of {VERDICTS}")

    def to_dict(self) -> dict:
        return {
            "community_score": self.community_score,
            "role_score": self.role_score,
            "proximity_correlation": self.proximity_correlation,
            "transfer_score": self.transfer_score,
            "verdict": self.verdict,
            "tau": self.tau,
            "rho": self.rho,
            "notes": list(self.notes),
        }


def _as_partition(value, n: int, what: str) -> Partition:
    part = value if isinstance(value, Partition) else Partition.from_labels(np.asarray(value))
    if part.n != n:
        raise ValidationError(f"{what} must label every node")
    return part


def _centered_similarity(X: np.ndarray) -> np.ndarray:
    return pairwise_cosine(X - X.mean(axis=0))


def _class_contrast(S: np.ndarray, part: Partition) -> tuple[float, str | None]:
    """Mean same-class minus mean cross-class similarity over node pairs."""
    same = part.same_class_matrix()
    iu = np.triu_indices(part.n, k=1)
    mask = same[iu]
    intra = S[iu][mask]
    inter = S[iu][~mask]
    if intra.size == 0 or inter.size == 0:
        return 0.0, "class contrast undefined (no intra or no inter pairs); score set to 0"
    return float(intra.mean() - inter.mean()), None


def _all_pairs_distances(g: Graph) -> np.ndarray:
    dist = np.full((g.n, g.n), -1, dtype=np.int64)
    for s in range(g.n):
        dist[s, s] = 0
        queue = deque([s])
        while queue:
            u = queue.popleft()
            for v in g.neighbors(u):
                if dist[s, v] < 0:
                    dist[s, v] = dist[s, u] + 1
                    queue.append(v)
    return dist


def _proximity_correlation(g: Graph, S: np.ndarray) -> tuple[float, str | None]:
    dist = _all_pairs_distances(g)
    iu = np.triu_indices(g.n, k=1)
    d = dist[iu].astype(np.float64)
    prox = np.where(d < 0, 0.0, 1.0 / (1.0 + np.where(d < 0, 1.0, d)))
    sims = S[iu]
    if np.ptp(sims) == 0.0 or np.ptp(prox) == 0.0:
        return 0.0, "proximity correlation undefined (constant input); set to 0"
    rho = spearmanr(sims, prox)[0]
    if not np.isfinite(rho):
        return 0.0, "proximity correlation undefined (rank degeneracy); set to 0"
    return float(rho), None


def _transfer_score(g: Graph, S: np.ndarray) -> tuple[float, str | None]:
    """Mean similarity over cross-component pairs with identical orbit rows."""
    orbits = count_orbits(g)
    comp = connected_components(g).labels
    groups: dict = {}
    for u in range(g.n):
        groups.setdefault(orbits[u].tobytes(), []).append(u)
    values = []
    for members in groups.values():
        for a in range(len(members)):
            for b in range(a + 1, len(members)):
                u, v = members[a], members[b]
                if comp[u] != comp[v]:
                    values.append(S[u, v])
    if not values:
        return 0.0, "no cross-component structurally identical pairs; transfer set to 0"
    return float(np.mean(values)), None


def _verdict(community: float, role: float, proximity: float, tau: float, rho: float) -> str:
    if community > tau and role > tau:
        return "mixed"
    if community > tau:
        return "community"
    if role > tau and proximity < rho:
        return "role"
    return "inconclusive"


def diagnose(
    g: Graph,
    emb: Embedding,
    communities,
    roles,
    tau: float = TAU,
    rho: float = RHO,
) -> DiagnosticReport:
    """Score an embedding against ground-truth communities and roles.

    Verdict rules: both contrasts above tau is mixed; only the community
    contrast above tau is community; the role contrast above tau with
    proximity correlation below rho is role; anything else, or a
    degenerate embedding with all rows equal, is inconclusive.
    """
    if emb.n != g.n:
        raise ValidationError("embedding rows must align with graph nodes")
    comm_part = _as_partition(communities, g.n, "communities")
    role_part = _as_partition(roles, g.n, "roles")

    notes = []
    X = emb.vectors
    S = _centered_similarity(X)
    community_score, note = _class_contrast(S, comm_part)
    if note:
        notes.append("community " + note)
    role_score, note = _class_contrast(S, role_part)
    if note:
        notes.append("role " + note)
    proximity, note = _proximity_correlation(g, S)
    if note:
        notes.append(note)
    transfer, note = _transfer_score(g, S)
    if note:
        notes.append(note)

    if np.all(X == X[0]):
        verdict = "inconclusive"
        notes.append("degenerate embedding: all rows equal")
    else:
        verdict = _verdict(community_score, role_score, proximity, tau, rho)
    return DiagnosticReport(
        community_score=community_score,
        role_score=role_score,
        proximity_correlation=proximity,
        transfer_score=transfer,
        verdict=verdict,
        tau=tau,
        rho=rho,
        notes=tuple(notes),
    )


def borgatti_everett() -> tuple[Graph, Partition, Partition]:
    """Ten-node fixture with two hubs, six leaves, and two gatekeepers.

    Each hub carries three leaves and one gatekeeper; the single
    cross edge joins the gatekeepers. Communities are the two halves;
    roles are {hubs}, {leaves}, {gatekeepers}, and that assignment
    passes exact-role verification.
    """
    edges = [
        (0, 1),
        (0, 2),
        (0, 3),
        (0, 4),
        (5, 6),
        (5, 7),
        (5, 8),
        (5, 9),
        (4, 9),
    ]
    g = Graph.from_edges(10, edges)
    communities = Partition(np.array([0] * 5 + [1] * 5, dtype=np.int64), 2)
    roles = Partition(np.array([0, 1, 1, 1, 2, 0, 1, 1, 1, 2], dtype=np.int64), 3)
    return g, communities, roles


SCENARIOS = (
    "barbell",
    "disjoint-stars",
    "borgatti-everett",
    "chung-lu",
    "clique",
    "complete-bipartite",
)
MECHANISMS = ("deepwalk", "role2vec", "implicit", "roles-nmf")

EXPECTED_VERDICTS = {
    ("barbell", "deepwalk"): "community",
    ("barbell", "implicit"): "community",
    ("chung-lu", "deepwalk"): "community",
    ("chung-lu", "implicit"): "community",
    ("disjoint-stars", "role2vec"): "role",
    ("disjoint-stars", "roles-nmf"): "role",
    ("borgatti-everett", "role2vec"): "role",
    ("borgatti-everett", "roles-nmf"): "role",
}


def _structural_classes(g: Graph) -> Partition:
    from .equivalence import feature_equivalence_partition

    return feature_equivalence_partition(count_orbits(g).astype(np.float64))


def _scenario_fixture(name: str, seed: int) -> tuple[Graph, Partition, Partition]:
    if name == "barbell":
        g, communities = gen_barbell(5)
        return g, communities, _structural_classes(g)
    if name == "disjoint-stars":
        g, communities = disjoint_union(gen_star(4), gen_star(4))
        return g, communities, _structural_classes(g)
    if name == "borgatti-everett":
        return borgatti_everett()
    if name == "chung-lu":
        g, communities = gen_block_chung_lu(
            (50, 50), intra_weight=0.9, degree_exponent=2.5, seed=seed
        )
        # a random block graph plants communities but no role structure;
        # the one-class partition keeps the role contrast out of the verdict
        return g, communities, Partition(np.zeros(g.n, dtype=np.int64), 1)
    if name == "clique":
        g = gen_clique(6)
        ones = Partition(np.zeros(6, dtype=np.int64), 1)
        return g, ones, ones
    if name == "complete-bipartite":
        g = gen_complete_bipartite(3, 4)
        whole = Partition(np.zeros(7, dtype=np.int64), 1)
        return g, whole, _structural_classes(g)
    raise ValidationError(f"unknown scenario {name!r}")


def _run_mechanism(mechanism: str, g: Graph, seed: int, k_roles: int) -> Embedding:
    with warnings.catch_warnings():
        warnings.filterwarnings("ignore", message=".*clamping")
        if mechanism == "deepwalk":
            return embed_community(g, seed=seed)
        if mechanism == "role2vec":
            return embed_role(g, seed=seed)
        if mechanism == "implicit":
            return embed_implicit(g, k=3, d=8)
        if mechanism == "roles-nmf":
            return embed_factorized_roles(g, k_roles=max(k_roles, 2), seed=seed)
    raise ValidationError(f"unknown mechanism {mechanism!r}")


def scenario_suite(seed: int = 0) -> list:
    """Run every mechanism on every scenario and diagnose each embedding.

    Returns one record per cell with the scenario, mechanism, report, and
    the expected verdict where the fixture pins one.
    """
    records = []
    for si, scenario in enumerate(SCENARIOS):
        g, communities, roles = _scenario_fixture(scenario, seed + 7 * si)
        for mi, mechanism in enumerate(MECHANISMS):
            cell_seed = seed + 101 * si + 7919 * mi
            emb = _run_mechanism(mechanism, g, cell_seed, roles.k)
            report = diagnose(g, emb, communities, roles)
            records.append(
                {
                    "scenario": scenario,
                    "mechanism": mechanism,
                    "report": report,
                    "expected": EXPECTED_VERDICTS.get((scenario, mechanism)),
                }
            )
    return records


def verdict_matrix(records: list) -> str:
    """Scenario-by-mechanism verdict table as plain text."""
    scenarios = []
    for rec in records:
        if rec["scenario"] not in scenarios:
            scenarios.append(rec["scenario"])
    cell = {(r["scenario"], r["mechanism"]): r["report"].verdict for r in records}
    width = max(len(s) for s in scenarios + ["scenario"]) + 2
    col = max(max(len(m) for m in MECHANISMS), len("inconclusive")) + 2
    lines = ["scenario".ljust(width) + "".join(m.ljust(col) for m in MECHANISMS)]
    for s in scenarios:
        row = s.ljust(width)
        for m in MECHANISMS:
            row += cell.get((s, m), "-").ljust(col)
        lines.append(row)
    return "\n".join(lines)
