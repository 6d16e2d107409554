"""Exact induced counts of all 2-4 node graphlets, their 15 node orbits,
and motif-weighted graphs.

Orbit counting is combinatorial (wedge/triangle accumulation, one triangle
enumeration pass plus one edge pass), not enumeration, so it scales to the
sparse desk-scale graphs the diagnostics run on. The enumeration route
exists separately (enumerate_connected_subgraphs, used for motif graphs)
and the test suite keeps a brute-force subset oracle against both.

Canonical orbit ordering (column order of every output):

    0   edge                endpoint of an edge
    1   2-path-end          end of an induced path on 3 nodes
    2   2-path-center       center of that path
    3   triangle            any corner of a triangle
    4   4-path-end          end of an induced path on 4 nodes
    5   4-path-center       interior of that path
    6   3-star-edge         leaf of a 3-star (hub plus 3 leaves)
    7   3-star-center       hub of the 3-star
    8   4-cycle             any corner of an induced 4-cycle
    9   tailed-tri-tail     degree-1 node of a tailed triangle
    10  tailed-tri-base     degree-2 triangle nodes of a tailed triangle
    11  tailed-tri-center   degree-3 node of a tailed triangle
    12  diamond-side        degree-2 nodes of a diamond
    13  diamond-center      degree-3 nodes of a diamond
    14  4-clique            any node of a 4-clique

Graphlet ordering: edge, 2-path, triangle, 4-path, 3-star, 4-cycle,
tailed-triangle, diamond, 4-clique.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .features import FeatureMatrix
from .graphs import Graph, Partition

__all__ = [
    "ORBIT_NAMES",
    "GRAPHLET_NAMES",
    "ORBIT_GRAPHLET",
    "ORBIT_MULTIPLICITY",
    "MotifGraph",
    "count_orbits",
    "count_graphlets_global",
    "motif_graph",
    "orbit_feature_matrix",
    "enumerate_connected_subgraphs",
    "classify_subgraph",
]

ORBIT_NAMES = (
    "edge",
    "2-path-end",
    "2-path-center",
    "triangle",
    "4-path-end",
    "4-path-center",
    "3-star-edge",
    "3-star-center",
    "4-cycle",
    "tailed-tri-tail",
    "tailed-tri-base",
    "tailed-tri-center",
    "diamond-side",
    "diamond-center",
    "4-clique",
)

GRAPHLET_NAMES = (
    "edge",
    "2-path",
    "triangle",
    "4-path",
    "3-star",
    "4-cycle",
    "tailed-triangle",
    "diamond",
    "4-clique",
)

# graphlet owning each orbit, and how many nodes of one instance sit in it
ORBIT_GRAPHLET = (0, 1, 1, 2, 3, 3, 4, 4, 5, 6, 6, 6, 7, 7, 8)
ORBIT_MULTIPLICITY = (2, 2, 1, 3, 2, 2, 3, 1, 4, 1, 2, 1, 2, 2, 4)

# accepted aliases for motif ids ("4-star" is the same 4-node star)
_MOTIF_ALIASES = {"4-star": "3-star"}

ORBIT_GUARD = 5000


def _choose2(x: np.ndarray) -> np.ndarray:
    x = np.maximum(x, 0)
    return x * (x - 1) // 2


def count_orbits(g: Graph) -> np.ndarray:
    """Per-node induced orbit counts, n x 15 int64, columns per ORBIT_NAMES.

    Structure only: edge weights are ignored. One pass enumerates each
    triangle once (at its lexicographically smallest edge) and accumulates
    every triangle-anchored orbit; a second pass over edges resolves the
    path/star orbits from set differences; 4-cycles come from the
    common-neighbor matrix over non-adjacent pairs. All identities are
    inclusion-exclusion over how a node's neighborhood meets the candidate
    subgraph, which keeps every count induced-exact.
    """
    n = g.n
    if n > ORBIT_GUARD:
        raise ValidationError(f"orbit counting guard: n > {ORBIT_GUARD}")
    counts = np.zeros((n, 15), dtype=np.int64)
    deg = g.out_degrees
    counts[:, 0] = deg
    m = g.num_edges
    if m == 0:
        return counts

    rows = g.adjacency_bool()
    eu, ev, _ = g.edge_array()
    eid = {(int(u), int(v)): i for i, (u, v) in enumerate(zip(eu, ev))}

    # common-neighbor count per edge
    ce = np.fromiter(
        (np.count_nonzero(rows[u] & rows[v]) for u, v in zip(eu, ev)),
        dtype=np.int64,
        count=m,
    )
    tri = np.zeros(n, dtype=np.int64)  # triangles per node
    np.add.at(tri, eu, ce)
    np.add.at(tri, ev, ce)
    tri //= 2
    counts[:, 3] = tri

    # triangle pass: orbits 10-14 plus the directed accumulators needed by
    # orbits 6 and 9
    acc9 = np.zeros((m, 2), dtype=np.int64)  # per edge (u,v): dir 0 = p=u, 1 = p=v
    k4raw = np.zeros(m, dtype=np.int64)
    tq = np.zeros(m, dtype=np.int64)  # sum of q over triangles on the edge
    o10 = counts[:, 10]
    o11 = counts[:, 11]
    o12 = counts[:, 12]
    o14 = counts[:, 14]
    for e in range(m):
        u, v = int(eu[e]), int(ev[e])
        common = rows[u] & rows[v]
        ws = np.flatnonzero(common)
        ws = ws[ws > v]
        if len(ws) == 0:
            continue
        c_uv = int(ce[e])
        for w in ws:
            w = int(w)
            e_uw = eid[(u, w)]
            e_vw = eid[(v, w)]
            c_uw = int(ce[e_uw])
            c_vw = int(ce[e_vw])
            common3 = common & rows[w]
            q = int(np.count_nonzero(common3))
            if q:
                o14[np.flatnonzero(common3)] += 1
                k4raw[e] += q
                k4raw[e_uw] += q
                k4raw[e_vw] += q
                tq[e] += q
                tq[e_uw] += q
                tq[e_vw] += q
            o12[u] += c_vw - 1 - q
            o12[v] += c_uw - 1 - q
            o12[w] += c_uv - 1 - q
            tails_u = (deg[u] - 2) - (c_uv - 1) - (c_uw - 1) + q
            tails_v = (deg[v] - 2) - (c_uv - 1) - (c_vw - 1) + q
            tails_w = (deg[w] - 2) - (c_uw - 1) - (c_vw - 1) + q
            o11[u] += tails_u
            o10[v] += tails_u
            o10[w] += tails_u
            o11[v] += tails_v
            o10[u] += tails_v
            o10[w] += tails_v
            o11[w] += tails_w
            o10[u] += tails_w
            o10[v] += tails_w
            acc9[e, 0] += c_vw - 1
            acc9[e, 1] += c_uw - 1
            acc9[e_uw, 0] += c_vw - 1
            acc9[e_uw, 1] += c_uv - 1
            acc9[e_vw, 0] += c_uw - 1
            acc9[e_vw, 1] += c_uv - 1
    k4e = k4raw // 2

    # edge pass: orbits 6, 9, 13 from the per-edge aggregates
    cpairs = _choose2(ce)
    np.add.at(counts[:, 13], eu, cpairs - k4e)
    np.add.at(counts[:, 13], ev, cpairs - k4e)
    np.add.at(counts[:, 9], eu, tri[ev] - ce - acc9[:, 0] + k4e)
    np.add.at(counts[:, 9], ev, tri[eu] - ce - acc9[:, 1] + k4e)
    np.add.at(
        counts[:, 6],
        eu,
        _choose2(deg[ev] - 1 - ce) - tri[ev] + k4e + acc9[:, 0] - tq + ce,
    )
    np.add.at(
        counts[:, 6],
        ev,
        _choose2(deg[eu] - 1 - ce) - tri[eu] + k4e + acc9[:, 1] - tq + ce,
    )

    # wedge orbits
    counts[:, 2] = _choose2(deg) - tri
    neighbor_deg_sum = rows @ deg
    counts[:, 1] = neighbor_deg_sum - deg - 2 * tri

    # 4-path orbits: per edge, split the two exclusive neighborhoods and
    # subtract the pairs that close a 4-cycle
    o4 = counts[:, 4]
    o5 = counts[:, 5]
    for e in range(m):
        u, v = int(eu[e]), int(ev[e])
        a_mask = rows[u] & ~rows[v]
        a_mask[v] = False
        b_mask = rows[v] & ~rows[u]
        b_mask[u] = False
        aset = np.flatnonzero(a_mask)
        bset = np.flatnonzero(b_mask)
        na, nb = len(aset), len(bset)
        if na == 0 and nb == 0:
            continue
        zsum = 0
        if nb:
            for a in aset:
                z = int(np.count_nonzero(rows[a] & b_mask))
                o4[a] += nb - z
                zsum += z
        if na:
            for b in bset:
                z = int(np.count_nonzero(rows[b] & a_mask))
                o4[b] += na - z
        cross = na * nb - zsum
        o5[u] += cross
        o5[v] += cross

    # star center: every neighbor triple is exactly one of star, tailed
    # triangle (center), diamond (center), or clique
    counts[:, 7] = (
        _choose2(deg) * np.maximum(deg - 2, 0) // 3
        - counts[:, 11]
        - counts[:, 13]
        - counts[:, 14]
    )

    # 4-cycle: pairs of common neighbors of non-adjacent node pairs,
    # minus the pairs that are themselves adjacent (those are diamonds)
    from scipy.sparse import csr_matrix

    ones = csr_matrix(
        (np.ones(len(g.indices), dtype=np.int64), g.indices, g.indptr),
        shape=(n, n),
    )
    common_counts = (ones @ ones).tocsr()
    o8 = counts[:, 8]
    for u in range(n):
        s, e = common_counts.indptr[u], common_counts.indptr[u + 1]
        cols = common_counts.indices[s:e]
        vals = common_counts.data[s:e]
        keep = ~rows[u, cols] & (cols != u)
        o8[u] = _choose2(vals[keep]).sum()
    counts[:, 8] -= counts[:, 12]
    return counts


def count_graphlets_global(g: Graph) -> np.ndarray:
    """Total induced instances per graphlet, 9-vector per GRAPHLET_NAMES."""
    orbits = count_orbits(g)
    sums = orbits.sum(axis=0)
    out = np.zeros(9, dtype=np.int64)
    out[0] = sums[0] // 2
    out[1] = sums[2]
    out[2] = sums[3] // 3
    out[3] = sums[5] // 2
    out[4] = sums[7]
    out[5] = sums[8] // 4
    out[6] = sums[11]
    out[7] = sums[13] // 2
    out[8] = sums[14] // 4
    return out


def orbit_feature_matrix(g: Graph, transform: str = "none") -> FeatureMatrix:
    """Orbit counts as real node features, optionally log(1+x) transformed."""
    if transform not in ("none", "log1p"):
        raise ValidationError("transform must be 'none' or 'log1p'")
    values = count_orbits(g).astype(np.float64)
    if transform == "log1p":
        values = np.log1p(values)
    return FeatureMatrix(values, ORBIT_NAMES)


# ---------------------------------------------------------------------------
# motif enumeration and motif graphs
# ---------------------------------------------------------------------------

_GRAPHLET_SIZE = {
    "edge": 2,
    "2-path": 3,
    "triangle": 3,
    "4-path": 4,
    "3-star": 4,
    "4-cycle": 4,
    "tailed-triangle": 4,
    "diamond": 4,
    "4-clique": 4,
}


def classify_subgraph(g: Graph, nodes) -> str | None:
    """Name the graphlet induced by 2-4 nodes; None when disconnected."""
    nodes = sorted(int(x) for x in nodes)
    k = len(nodes)
    if k not in (2, 3, 4):
        raise ValidationError("classification covers 2-4 nodes")
    sub_deg = [sum(1 for b in nodes if b != a and g.has_edge(a, b)) for a in nodes]
    edges = sum(sub_deg) // 2
    if k == 2:
        return "edge" if edges == 1 else None
    if k == 3:
        if edges == 3:
            return "triangle"
        if edges == 2:
            return "2-path"
        return None
    if 0 in sub_deg or edges < 3:
        return None
    degs = tuple(sorted(sub_deg))
    if edges == 3:
        # no isolated node plus 3 edges on 4 nodes means a tree, hence connected
        return "3-star" if degs == (1, 1, 1, 3) else "4-path"
    if edges == 4:
        return "4-cycle" if degs == (2, 2, 2, 2) else "tailed-triangle"
    if edges == 5:
        return "diamond"
    return "4-clique"


def enumerate_connected_subgraphs(g: Graph, k: int):
    """Yield every connected induced k-node subgraph exactly once (ESU).

    Subgraphs come out as sorted node tuples; each is discovered from its
    smallest node, so the enumeration is duplicate-free by construction.
    """
    if k < 1:
        raise ValidationError("subgraph size must be positive")
    if k == 1:
        for v in range(g.n):
            yield (v,)
        return
    neigh = [set(map(int, g.neighbors(v))) for v in range(g.n)]

    def extend(sub: list, ext: set, root: int, closed: set):
        if len(sub) == k - 1:
            for w in sorted(ext):
                yield tuple(sorted(sub + [w]))
            return
        ext = set(ext)
        while ext:
            w = ext.pop()
            new_ext = ext | {
                u for u in neigh[w] if u > root and u not in closed
            }
            yield from extend(sub + [w], new_ext, root, closed | neigh[w] | {w})

    for v in range(g.n):
        seed_ext = {u for u in neigh[v] if u > v}
        yield from extend([v], seed_ext, v, neigh[v] | {v})


@dataclass
class MotifGraph:
    """Graph reweighted by co-occurrence in instances of one motif.

    pair_weights maps node pairs (u < v) to the number of motif instances
    containing both, after the min-count filter. component_labels labels
    nodes covered by at least one surviving pair, -1 elsewhere;
    num_components counts components among covered nodes only.
    """

    motif: str
    n: int
    min_count: int
    all_pairs: bool
    pair_weights: dict
    component_labels: np.ndarray
    num_components: int
    total_instances: int

    def weight_matrix(self):
        from scipy.sparse import csr_matrix

        if not self.pair_weights:
            return csr_matrix((self.n, self.n))
        us, vs, ws = [], [], []
        for (u, v), w in self.pair_weights.items():
            us.extend((u, v))
            vs.extend((v, u))
            ws.extend((w, w))
        return csr_matrix((ws, (us, vs)), shape=(self.n, self.n))

    def full_partition(self) -> Partition:
        """Component partition over all nodes, uncovered nodes as singletons."""
        labels = self.component_labels.copy()
        nxt = self.num_components
        for v in np.flatnonzero(labels < 0):
            labels[v] = nxt
            nxt += 1
        return Partition(labels, nxt) if len(labels) else Partition(labels, 0)


def motif_graph(
    g: Graph, motif: str, min_count: int = 1, all_pairs: bool = False
) -> MotifGraph:
    """Weight node pairs by how many instances of ``motif`` contain both.

    By default only pairs that are edges of g receive weight (the motif
    adjacency used for shattering analysis); all_pairs=True also counts
    non-adjacent pairs inside an instance. Pairs below min_count are
    dropped, and components are computed over what survives.
    """
    motif = _MOTIF_ALIASES.get(motif, motif)
    if motif not in _GRAPHLET_SIZE:
        raise ValidationError(f"unknown motif {motif!r}")
    if min_count < 1:
        raise ValidationError("min_count must be at least 1")
    k = _GRAPHLET_SIZE[motif]
    weights: dict[tuple[int, int], int] = {}
    total = 0
    for sub in enumerate_connected_subgraphs(g, k):
        if classify_subgraph(g, sub) != motif:
            continue
        total += 1
        for i in range(k):
            for j in range(i + 1, k):
                u, v = sub[i], sub[j]
                if all_pairs or g.has_edge(u, v):
                    weights[(u, v)] = weights.get((u, v), 0) + 1
    surviving = {p: w for p, w in weights.items() if w >= min_count}

    labels = np.full(g.n, -1, dtype=np.int64)
    adj: dict[int, list[int]] = {}
    for u, v in surviving:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    comp = 0
    for s in sorted(adj):
        if labels[s] >= 0:
            continue
        stack = [s]
        labels[s] = comp
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if labels[y] < 0:
                    labels[y] = comp
                    stack.append(y)
        comp += 1
    return MotifGraph(
        motif=motif,
        n=g.n,
        min_count=min_count,
        all_pairs=all_pairs,
        pair_weights=surviving,
        component_labels=labels,
        num_components=comp,
        total_instances=total,
    )
