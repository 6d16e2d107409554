"""Node equivalences on graphs and feature matrices.

Graph-based notions, ordered strict to loose: structural equivalence
(identical neighbor sets), exact role equivalence (identical neighbor-role
multisets), regular equivalence (identical neighbor-role sets). Feature
rows induce their own equivalence, either exact or within a tolerance, and
a kernel threshold gives the epsilon-relaxed variant.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graphs import Graph, Partition, RoleGraph, build_role_graph

__all__ = [
    "EquivalenceReport",
    "structural_equivalence_partition",
    "regular_equivalence_partition",
    "exact_role_partition",
    "verify_exact_role_assignment",
    "verify_strong_structural_assignment",
    "feature_equivalence_partition",
    "kernel_similarity",
    "epsilon_structural_similarity",
]

KERNELS = ("cosine", "rbf")


@dataclass(frozen=True)
class EquivalenceReport:
    """Outcome of a verification: which notion, whether it holds, and on
    failure the first violation in lexicographic order."""

    kind: str
    holds: bool
    witness: dict | None = None
    reading: str | None = None

    def __post_init__(self):
        if self.holds and self.witness is not None:
            raise ValidationError("witness must be absent when the relation holds")
        if not self.holds and self.witness is None:
            raise ValidationError("witness required when the relation fails")

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "holds": self.holds, "witness": self.witness}
        if self.reading is not None:
            out["reading"] = self.reading
        return out


def _labels_of(assignment) -> np.ndarray:
    if isinstance(assignment, Partition):
        return assignment.labels
    labels = np.asarray(assignment, dtype=np.int64)
    if labels.ndim != 1:
        raise ValidationError("role assignment must be one label per node")
    if labels.size and labels.min() < 0:
        raise ValidationError("role labels must be nonnegative")
    return labels


def _group_by_key(keys: list) -> Partition:
    seen: dict = {}
    labels = np.empty(len(keys), dtype=np.int64)
    for i, key in enumerate(keys):
        if key not in seen:
            seen[key] = len(seen)
        labels[i] = seen[key]
    return Partition(labels, len(seen))


def structural_equivalence_partition(g: Graph, closed: bool = False) -> Partition:
    """Group nodes with identical neighbor sets (weights ignored).

    Open neighborhoods by default, so adjacent nodes can only match in
    complete-bipartite-like positions; ``closed=True`` adds the node
    itself, which instead unites mutually adjacent twins such as clique
    members.
    """
    keys = []
    for u in range(g.n):
        nbrs = g.neighbors(u)
        if closed:
            nbrs = np.sort(np.append(nbrs, u))
        keys.append(nbrs.tobytes())
    return _group_by_key(keys)


def _refine(g: Graph, labels: np.ndarray, use_multiset: bool) -> Partition:
    # Signatures keep the node's own label, so each round refines the last;
    # an unchanged class count therefore means the partition is stable.
    part = Partition.from_labels(labels)
    while True:
        keys = []
        for u in range(g.n):
            nbr_labels = part.labels[g.neighbors(u)]
            if use_multiset:
                sig = tuple(sorted(Counter(nbr_labels.tolist()).items()))
            else:
                sig = tuple(sorted(set(nbr_labels.tolist())))
            keys.append((int(part.labels[u]), sig))
        refined = _group_by_key(keys)
        if refined.k == part.k:
            return part
        part = refined


def regular_equivalence_partition(g: Graph) -> Partition:
    """Maximal regular equivalence by set-based color refinement.

    Classes are split while members see different sets of neighbor
    classes. Refinement starts from the degree partition: the one-class
    start is already a fixpoint on any graph without isolated nodes, so
    degree seeding is what makes the procedure discover anything.
    """
    return _refine(g, Partition.from_labels(g.out_degrees.astype(np.int64)).labels, False)


def exact_role_partition(g: Graph) -> Partition:
    """Coarsest partition whose classes share neighbor-class multisets.

    Multiset color refinement from a uniform start; the structural
    partition always refines this, and this always refines the regular
    one.
    """
    return _refine(g, np.zeros(g.n, dtype=np.int64), True)


def _first_class_violation(profiles: list, labels: np.ndarray, k: int):
    """Lexicographically first same-class pair with differing profiles."""
    candidates = []
    for c in range(k):
        members = np.flatnonzero(labels == c)
        ref = int(members[0])
        for v in members[1:]:
            if profiles[v] != profiles[ref]:
                candidates.append((ref, int(v)))
                break
    return min(candidates) if candidates else None


def verify_exact_role_assignment(g: Graph, assignment) -> EquivalenceReport:
    """Check that same-role nodes have identical neighbor-role multisets."""
    labels = _labels_of(assignment)
    if len(labels) != g.n:
        raise ValidationError("assignment must label every node")
    part = Partition.from_labels(labels)
    profiles = [Counter(part.labels[g.neighbors(u)].tolist()) for u in range(g.n)]
    pair = _first_class_violation(profiles, part.labels, part.k)
    if pair is None:
        return EquivalenceReport(kind="exact-role", holds=True)
    u, v = pair
    witness = {
        "pair": [u, v],
        "condition": (
            f"nodes {u} and {v} share a role but see neighbor-role multisets "
            f"{dict(profiles[u])} vs {dict(profiles[v])}"
        ),
    }
    return EquivalenceReport(kind="exact-role", holds=False, witness=witness)


def verify_strong_structural_assignment(
    g: Graph,
    assignment,
    role_graph: RoleGraph | None = None,
    reading: str = "universal",
) -> EquivalenceReport:
    """Check an assignment against its role graph.

    Both readings require every graph edge to map to a role-graph edge and
    every role-graph edge to be realized by at least one graph edge. The
    default ``universal`` reading additionally requires that for every
    role-graph edge (a, b), every node of role a has at least one role-b
    neighbor. ``edge-consistency`` stops at the two realization checks.

    Violations are searched in a fixed order (unmapped edge, unrealized
    role edge, then per-node universality scanning nodes ascending), so
    the witness is deterministic.
    """
    if reading not in ("universal", "edge-consistency"):
        raise ValidationError(f"unknown reading {reading!r}")
    labels = _labels_of(assignment)
    if len(labels) != g.n:
        raise ValidationError("assignment must label every node")
    part = Partition.from_labels(labels)
    if role_graph is None:
        role_graph = build_role_graph(g, part)
    kind = "strong-structural"

    realized = set()
    src, dst, _ = g.edge_array()
    for u, v in zip(src, dst):
        a, b = sorted((int(part.labels[u]), int(part.labels[v])))
        if not role_graph.has_edge(a, b):
            witness = {
                "pair": [int(u), int(v)],
                "condition": (
                    f"edge ({u}, {v}) joins roles ({a}, {b}) absent from the role graph"
                ),
            }
            return EquivalenceReport(kind, False, witness, reading)
        realized.add((a, b))
    for a, b in sorted(role_graph.edges):
        if (a, b) not in realized:
            witness = {
                "pair": [a, b],
                "condition": f"role edge ({a}, {b}) is realized by no graph edge",
            }
            return EquivalenceReport(kind, False, witness, reading)

    if reading == "universal":
        neighbor_roles = [set(part.labels[g.neighbors(u)].tolist()) for u in range(g.n)]
        for u in range(g.n):
            a = int(part.labels[u])
            for b in sorted(role_graph.neighbor_roles(a)):
                if b not in neighbor_roles[u]:
                    witness = {
                        "pair": [u, b],
                        "condition": (
                            f"node {u} of role {a} has no role-{b} neighbor although "
                            f"the role graph joins ({a}, {b})"
                        ),
                    }
                    return EquivalenceReport(kind, False, witness, reading)
    return EquivalenceReport(kind, True, None, reading)


def feature_equivalence_partition(X, tolerance: float = 0.0) -> Partition:
    """Group identical feature rows; with a tolerance, group rows whose
    near-equality closure connects them (single linkage), which can chain
    dissimilar rows and is therefore not the default.
    """
    from .features import FeatureMatrix

    if isinstance(X, FeatureMatrix):
        X = X.values
    X = np.ascontiguousarray(np.asarray(X, dtype=np.float64))
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValidationError("feature matrix must be 2-d and nonempty")
    if tolerance < 0:
        raise ValidationError("tolerance must be nonnegative")
    n = X.shape[0]
    if tolerance == 0.0:
        return _group_by_key([X[i].tobytes() for i in range(n)])

    parent = np.arange(n)

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for i in range(n):
        for j in range(i + 1, n):
            if np.max(np.abs(X[i] - X[j]), initial=0.0) <= tolerance:
                parent[find(j)] = find(i)
    return Partition.from_labels(np.array([find(i) for i in range(n)]))


def kernel_similarity(x, y, kernel: str = "cosine", sigma: float = 1.0) -> float:
    """Similarity in [0, 1] for nonnegative vectors.

    Cosine declares two zero vectors identical (1.0) and a zero vector
    dissimilar to anything else (0.0). RBF is exp(-||x-y||^2 / (2 sigma^2)).
    """
    if kernel not in KERNELS:
        raise ValidationError(f"kernel must be one of {KERNELS}")
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise ValidationError("vectors must share a shape")
    if kernel == "rbf":
        if sigma <= 0:
            raise ValidationError("sigma must be positive")
        return float(np.exp(-float(np.dot(x - y, x - y)) / (2.0 * sigma * sigma)))
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0.0 and ny == 0.0:
        return 1.0
    if nx == 0.0 or ny == 0.0:
        return 0.0
    return float(np.dot(x, y) / (nx * ny))


def epsilon_structural_similarity(
    x, y, epsilon: float, kernel: str = "cosine", sigma: float = 1.0
) -> bool:
    """True when the kernel similarity reaches 1 - epsilon."""
    if epsilon <= 0:
        raise ValidationError("epsilon must be positive")
    return kernel_similarity(x, y, kernel=kernel, sigma=sigma) >= 1.0 - epsilon
