"""Immutable graph containers, deterministic generators, and basic structure ops.

Graphs are undirected, optionally weighted, with dense integer node ids
0..n-1, no self loops and no parallel edges. Storage is CSR (indptr,
indices, weights) with neighbor lists sorted ascending, so membership
tests are binary searches and iteration order is reproducible.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import GraphError, ParseError, ValidationError

__all__ = [
    "Graph",
    "Partition",
    "RoleGraph",
    "load_edge_list",
    "degree_vector",
    "is_bipartite",
    "connected_components",
    "build_role_graph",
    "disjoint_union",
    "gen_barbell",
    "gen_star",
    "gen_clique",
    "gen_complete_bipartite",
    "gen_block_chung_lu",
]


# ---------------------------------------------------------------------------
# containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Graph:
    """Undirected graph in immutable CSR form.

    ``indices[indptr[u]:indptr[u+1]]`` are the sorted neighbors of ``u`` and
    ``weights`` aligns with ``indices`` (all ones for unweighted input).
    ``node_labels`` keeps the original string tokens when the graph was read
    from an edge list, otherwise None.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray
    node_labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.indptr.ndim != 1 or self.indptr[0] != 0:
            raise GraphError("indptr must be 1-d and start at 0")
        if len(self.indices) != self.indptr[-1]:
            raise GraphError("indices length disagrees with indptr")
        if len(self.weights) != len(self.indices):
            raise GraphError("weights length disagrees with indices")

    # -- construction -------------------------------------------------------

    @classmethod
    def from_edges(
        cls,
        num_nodes: int,
        edges,
        weights=None,
        node_labels: tuple[str, ...] | None = None,
    ) -> "Graph":
        """Build a graph from an iterable of (u, v) pairs.

        Duplicate edges are collapsed (weights summed), orientation is
        ignored. Self loops and out-of-range ids raise GraphError.
        """
        if num_nodes <= 0:
            raise GraphError("graph must have at least one node")
        edges = np.asarray(list(edges), dtype=np.int64).reshape(-1, 2)
        if weights is None:
            w = np.ones(len(edges), dtype=np.float64)
        else:
            w = np.asarray(weights, dtype=np.float64)
            if w.shape != (len(edges),):
                raise GraphError("weights must align with edges")
            if np.any(w <= 0) or not np.all(np.isfinite(w)):
                raise GraphError("edge weights must be positive and finite")
        if len(edges):
            if edges.min() < 0 or edges.max() >= num_nodes:
                raise GraphError("edge endpoint out of range")
            if np.any(edges[:, 0] == edges[:, 1]):
                bad = edges[edges[:, 0] == edges[:, 1]][0]
                raise GraphError(f"self loop at node {int(bad[0])}")
        lo = np.minimum(edges[:, 0], edges[:, 1]) if len(edges) else edges[:, 0]
        hi = np.maximum(edges[:, 0], edges[:, 1]) if len(edges) else edges[:, 1]
        # collapse duplicates on the canonical (lo, hi) key, summing weights
        key = lo * num_nodes + hi
        order = np.argsort(key, kind="stable")
        key, lo, hi, w = key[order], lo[order], hi[order], w[order]
        uniq, start = np.unique(key, return_index=True)
        wsum = np.add.reduceat(w, start) if len(key) else w
        lo, hi = lo[start] if len(key) else lo, hi[start] if len(key) else hi
        # mirror both directions and sort into CSR
        src = np.concatenate([lo, hi])
        dst = np.concatenate([hi, lo])
        ww = np.concatenate([wsum, wsum])
        order = np.lexsort((dst, src))
        src, dst, ww = src[order], dst[order], ww[order]
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        indptr = np.cumsum(indptr)
        return cls(indptr, dst, ww, node_labels)

    # -- basic accessors -----------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @cached_property
    def num_edges(self) -> int:
        """Number of undirected edges."""
        return len(self.indices) // 2

    @cached_property
    def degrees(self) -> np.ndarray:
        """Weighted degree of every node (unweighted graphs: plain degree)."""
        out = np.zeros(self.n, dtype=np.float64)
        nonempty = np.flatnonzero(np.diff(self.indptr))
        if len(nonempty):
            out[nonempty] = np.add.reduceat(self.weights, self.indptr[nonempty])
        return out

    @cached_property
    def out_degrees(self) -> np.ndarray:
        """Unweighted degree (neighbor count) of every node."""
        return np.diff(self.indptr).astype(np.int64)

    @cached_property
    def is_weighted(self) -> bool:
        return not np.all(self.weights == 1.0)

    def neighbors(self, u: int) -> np.ndarray:
        return self.indices[self.indptr[u] : self.indptr[u + 1]]

    def edge_weights_of(self, u: int) -> np.ndarray:
        return self.weights[self.indptr[u] : self.indptr[u + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.neighbors(u)
        i = np.searchsorted(row, v)
        return i < len(row) and row[i] == v

    def edge_array(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Each undirected edge once as (u, v, w) arrays with u < v."""
        src = np.repeat(np.arange(self.n), np.diff(self.indptr))
        mask = src < self.indices
        return src[mask], self.indices[mask], self.weights[mask]

    def adjacency(self, dense: bool = False):
        """Adjacency matrix as scipy CSR, or a dense float array."""
        from scipy.sparse import csr_matrix

        mat = csr_matrix(
            (self.weights, self.indices, self.indptr), shape=(self.n, self.n)
        )
        return mat.toarray() if dense else mat

    def adjacency_bool(self) -> np.ndarray:
        """Dense boolean adjacency, used by the orbit counting kernels."""
        out = np.zeros((self.n, self.n), dtype=bool)
        src = np.repeat(np.arange(self.n), np.diff(self.indptr))
        out[src, self.indices] = True
        return out


@dataclass(frozen=True)
class Partition:
    """Assignment of every node to one of k classes, ids dense 0..k-1."""

    labels: np.ndarray
    k: int

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        object.__setattr__(self, "labels", labels)
        if len(labels) == 0:
            raise ValidationError("partition over an empty node set")
        if labels.min() < 0 or labels.max() >= self.k:
            raise ValidationError("class id out of range")
        if len(np.unique(labels)) != self.k:
            raise ValidationError("every class must be nonempty")

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Relabel arbitrary hashable labels to dense ids by first appearance."""
        labels = list(labels)
        seen: dict = {}
        out = np.empty(len(labels), dtype=np.int64)
        for i, lab in enumerate(labels):
            if lab not in seen:
                seen[lab] = len(seen)
            out[i] = seen[lab]
        return cls(out, len(seen))

    @property
    def n(self) -> int:
        return len(self.labels)

    def members(self, c: int) -> np.ndarray:
        return np.flatnonzero(self.labels == c)

    def classes(self) -> list[np.ndarray]:
        return [self.members(c) for c in range(self.k)]

    def as_sets(self) -> list[set]:
        return [set(map(int, self.members(c))) for c in range(self.k)]

    def same_class_matrix(self) -> np.ndarray:
        return self.labels[:, None] == self.labels[None, :]


@dataclass(frozen=True)
class RoleGraph:
    """Quotient of a graph under a role partition.

    Nodes are the k role ids; a super-edge (a, b) with a <= b is present
    when some graph edge joins a node of role a to a node of role b.
    """

    k: int
    edges: frozenset

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def neighbor_roles(self, a: int) -> set:
        out = set()
        for x, y in self.edges:
            if x == a:
                out.add(y)
            if y == a:
                out.add(x)
        return out


# ---------------------------------------------------------------------------
# structure ops
# ---------------------------------------------------------------------------


def degree_vector(g: Graph) -> np.ndarray:
    """Weighted degree vector d with d_u = sum of incident edge weights."""
    return g.degrees.copy()


def is_bipartite(g: Graph) -> bool:
    """Two-color every component by BFS; False as soon as an odd cycle shows."""
    color = np.full(g.n, -1, dtype=np.int8)
    for s in range(g.n):
        if color[s] >= 0:
            continue
        color[s] = 0
        queue = [s]
        while queue:
            u = queue.pop()
            cu = color[u]
            for v in g.neighbors(u):
                if color[v] < 0:
                    color[v] = 1 - cu
                    queue.append(int(v))
                elif color[v] == cu:
                    return False
    return True


def connected_components(g: Graph) -> Partition:
    """Connected components as a partition, class ids by first-seen node."""
    labels = np.full(g.n, -1, dtype=np.int64)
    k = 0
    for s in range(g.n):
        if labels[s] >= 0:
            continue
        labels[s] = k
        queue = [s]
        while queue:
            u = queue.pop()
            for v in g.neighbors(u):
                if labels[v] < 0:
                    labels[v] = k
                    queue.append(int(v))
        k += 1
    return Partition(labels, k)


def build_role_graph(g: Graph, partition: Partition) -> RoleGraph:
    """Collapse nodes by role: super-edge (a, b) iff some (u, v) in E has roles a, b."""
    if partition.n != g.n:
        raise ValidationError("partition size disagrees with graph")
    u, v, _ = g.edge_array()
    a = partition.labels[u]
    b = partition.labels[v]
    pairs = {(int(min(x, y)), int(max(x, y))) for x, y in zip(a, b)}
    return RoleGraph(partition.k, frozenset(pairs))


def disjoint_union(*graphs: Graph) -> tuple[Graph, Partition]:
    """Stack graphs side by side; the partition records which input each node came from."""
    if not graphs:
        raise ValidationError("need at least one graph")
    offsets = np.cumsum([0] + [h.n for h in graphs])
    edges = []
    weights = []
    labels = []
    for i, h in enumerate(graphs):
        u, v, w = h.edge_array()
        edges.append(np.column_stack([u + offsets[i], v + offsets[i]]))
        weights.append(w)
        labels.append(np.full(h.n, i, dtype=np.int64))
    g = Graph.from_edges(
        int(offsets[-1]), np.concatenate(edges), np.concatenate(weights)
    )
    return g, Partition(np.concatenate(labels), len(graphs))


# ---------------------------------------------------------------------------
# file formats
# ---------------------------------------------------------------------------


def load_edge_list(path) -> Graph:
    """Read a whitespace-separated edge list.

    Lines are ``u v`` or ``u v weight``; ``#`` starts a comment line. When
    every node token is a canonical nonnegative integer the tokens are used
    as node ids directly (so files round trip against partition files keyed
    by id); otherwise tokens map to dense ids in order of first appearance
    and the original tokens are kept on ``Graph.node_labels``. Duplicate
    edges collapse with summed weights; self loops raise ParseError with the
    line number.
    """
    rows: list[tuple[str, str, float]] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) not in (2, 3):
                raise ParseError(
                    f"expected 'u v' or 'u v w', got {len(parts)} fields", lineno
                )
            a, b = parts[0], parts[1]
            if a == b:
                raise ParseError(f"self loop on node {a!r}", lineno)
            try:
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise ParseError(f"bad weight {parts[2]!r}", lineno) from None
            if not np.isfinite(w) or w <= 0:
                raise ValidationError(
                    f"line {lineno}: weight must be positive and finite, got {w}"
                )
            rows.append((a, b, w))
    if not rows:
        raise ParseError("edge list is empty")

    def as_id(tok: str):
        return int(tok) if tok.isdigit() and tok == str(int(tok)) else None

    if all(as_id(a) is not None and as_id(b) is not None for a, b, _ in rows):
        edges = [(int(a), int(b)) for a, b, _ in rows]
        num_nodes = max(max(u, v) for u, v in edges) + 1
        return Graph.from_edges(num_nodes, edges, [w for _, _, w in rows])
    ids: dict[str, int] = {}
    for a, b, _ in rows:
        for tok in (a, b):
            if tok not in ids:
                ids[tok] = len(ids)
    return Graph.from_edges(
        len(ids),
        [(ids[a], ids[b]) for a, b, _ in rows],
        [w for _, _, w in rows],
        node_labels=tuple(ids.keys()),
    )


# ---------------------------------------------------------------------------
# generators (all deterministic; randomized ones take an explicit seed)
# ---------------------------------------------------------------------------


def gen_barbell(m: int) -> tuple[Graph, Partition]:
    """Two m-cliques joined by a single bridge edge.

    Nodes 0..m-1 form the first clique, m..2m-1 the second; the bridge is
    (m-1, m). The returned partition is the two cliques (the planted
    communities).
    """
    if m < 3:
        raise ValidationError("barbell needs cliques of size >= 3")
    edges = []
    for off in (0, m):
        for i in range(m):
            for j in range(i + 1, m):
                edges.append((off + i, off + j))
    edges.append((m - 1, m))
    labels = np.repeat([0, 1], m)
    return Graph.from_edges(2 * m, edges), Partition(labels, 2)


def gen_star(leaves: int) -> Graph:
    """Hub node 0 joined to ``leaves`` leaf nodes, no other edges."""
    if leaves < 1:
        raise ValidationError("star needs at least one leaf")
    edges = [(0, i) for i in range(1, leaves + 1)]
    return Graph.from_edges(leaves + 1, edges)


def gen_clique(k: int) -> Graph:
    """Complete graph on nodes 0..k-1."""
    if k < 2:
        raise ValidationError("clique needs k >= 2")
    edges = [(i, j) for i in range(k) for j in range(i + 1, k)]
    return Graph.from_edges(k, edges)


def gen_complete_bipartite(a: int, b: int) -> Graph:
    """K_{a,b}: left block 0..a-1, right block a..a+b-1."""
    if a < 1 or b < 1:
        raise ValidationError("both sides need at least one node")
    edges = [(i, a + j) for i in range(a) for j in range(b)]
    return Graph.from_edges(a + b, edges)


def gen_block_chung_lu(
    block_sizes,
    intra_weight: float,
    degree_exponent: float,
    seed: int,
    min_expected_degree: float = 2.0,
) -> tuple[Graph, Partition]:
    """Chung-Lu random graph with power-law expected degrees and block structure.

    Expected degrees w_i are drawn from a Pareto tail with the given exponent
    (capped at n-1). Pair (u, v) is kept with probability w_u*w_v/sum(w),
    scaled by (1 - intra_weight) across blocks; the removed cross mass is
    pushed back onto intra-block pairs by a single global factor so the
    expected volume is preserved. intra_weight=0 is plain Chung-Lu.
    Probabilities cap at 1 (a warning reports how many pairs hit the cap).
    Isolated nodes are rewired to one random partner inside their block.

    Args:
        block_sizes: list of block sizes, each >= 2.
        intra_weight: in [0, 1); strength of the within-block boost.
        degree_exponent: power-law exponent (> 1), e.g. 1.7.
        seed: RNG seed; the construction is deterministic given it.

    Returns:
        (Graph, Partition): the graph and the block assignment.
    """
    block_sizes = [int(s) for s in block_sizes]
    if any(s < 2 for s in block_sizes) or not block_sizes:
        raise ValidationError("every block needs at least 2 nodes")
    if not 0.0 <= intra_weight < 1.0:
        raise ValidationError("intra_weight must be in [0, 1)")
    if degree_exponent <= 1.0:
        raise ValidationError("degree_exponent must exceed 1")
    n = sum(block_sizes)
    rng = np.random.default_rng(seed)
    u01 = rng.random(n)
    # Pareto inverse transform: survival (w/w_min)^(1-gamma)
    w = min_expected_degree * (1.0 - u01) ** (-1.0 / (degree_exponent - 1.0))
    w = np.minimum(w, n - 1.0)
    total = w.sum()

    labels = np.repeat(np.arange(len(block_sizes)), block_sizes)
    iu, iv = np.triu_indices(n, k=1)
    q = w[iu] * w[iv] / total
    same = labels[iu] == labels[iv]
    p = np.where(same, q, (1.0 - intra_weight) * q)
    if intra_weight > 0.0:
        q_intra = q[same].sum()
        q_cross = q[~same].sum()
        if q_intra > 0.0:
            p[same] = q[same] * (1.0 + intra_weight * q_cross / q_intra)
    capped = int(np.count_nonzero(p > 1.0))
    if capped:
        warnings.warn(f"{capped} pair probabilities capped at 1", stacklevel=2)
        p = np.minimum(p, 1.0)
    keep = rng.random(len(p)) < p
    edges = list(zip(iu[keep].tolist(), iv[keep].tolist()))

    present = np.zeros(n, dtype=bool)
    for a, b in edges:
        present[a] = present[b] = True
    for v in np.flatnonzero(~present):
        block = np.flatnonzero(labels == labels[v])
        choices = block[block != v]
        partner = int(rng.choice(choices))
        edges.append((min(v, partner), max(v, partner)))
        present[v] = present[partner] = True

    g = Graph.from_edges(n, edges)
    return g, Partition(labels, len(block_sizes))
