"""Explicit random walks, implicit walk-count matrices, and containment math.

The sampling side draws seeded walks with one independent RNG stream per
(start node, walk index), so parallel sampling is order-independent. The
matrix side exposes A^k and the partial sums A_k. Community containment
ties the two together: conductance gives analytic lower bounds on the
probability that a short walk never leaves its community, and a Monte
Carlo estimator checks them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .graphs import Graph

__all__ = [
    "TransitionModel",
    "WalkCorpus",
    "CommunityStats",
    "sample_walks",
    "walk_count_matrix",
    "walk_sum_matrix",
    "community_stats",
    "containment_bounds",
    "estimate_containment",
    "containment_report",
]

DENSE_GUARD = 5000


class TransitionModel:
    """Row-stochastic transition probabilities P(u,v) = w(u,v)/d_u.

    Rows of isolated nodes are all-zero (the walk has nowhere to go);
    callers that need ergodicity must check for that case themselves.
    """

    def __init__(self, g: Graph):
        self.graph = g
        # per-row cumulative probabilities aligned with g.indices, used for
        # O(log deg) weighted stepping; unweighted rows use integer math
        if g.is_weighted:
            cum = np.empty(len(g.weights), dtype=np.float64)
            for u in range(g.n):
                s, e = g.indptr[u], g.indptr[u + 1]
                if e > s:
                    block = np.cumsum(g.weights[s:e])
                    cum[s:e] = block / block[-1]
            self._cum = cum
        else:
            self._cum = None

    def probabilities(self, u: int) -> np.ndarray:
        """Dense probability row for node u."""
        out = np.zeros(self.graph.n, dtype=np.float64)
        s, e = self.graph.indptr[u], self.graph.indptr[u + 1]
        if e > s:
            out[self.graph.indices[s:e]] = self.graph.weights[s:e] / self.graph.weights[
                s:e
            ].sum()
        return out

    def matrix(self, dense: bool = True):
        """Full transition matrix D^{-1}A (zero rows for isolated nodes)."""
        if dense and self.graph.n > DENSE_GUARD:
            raise ValidationError(f"dense guard: n > {DENSE_GUARD}")
        d = self.graph.degrees
        inv = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)
        adj = self.graph.adjacency(dense=dense)
        if dense:
            return inv[:, None] * adj
        from scipy.sparse import diags

        return diags(inv) @ adj

    def next_node(self, u: int, r: float) -> int:
        """Step from u using a uniform draw r in [0,1). Returns u if isolated."""
        g = self.graph
        s, e = g.indptr[u], g.indptr[u + 1]
        deg = e - s
        if deg == 0:
            return u
        if self._cum is None:
            j = int(r * deg)
            if j >= deg:
                j = deg - 1
            return int(g.indices[s + j])
        return int(g.indices[s + np.searchsorted(self._cum[s:e], r, side="right")])


@dataclass
class WalkCorpus:
    """A bag of seeded walks. Tokens are node ids, or type ids after mapping."""

    walks: list
    length: int
    walks_per_node: int
    seed: int
    starts: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.int64))
    num_short: int = 0

    @property
    def num_walks(self) -> int:
        return len(self.walks)

    def __iter__(self):
        return iter(self.walks)


def _walk_rng(seed: int, key: int, walk_idx: int) -> np.random.Generator:
    # independent stream per (start key, walk index): sampling order never
    # changes the corpus
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(key), int(walk_idx)))
    return np.random.Generator(np.random.PCG64(ss))


def sample_walks(
    g: Graph,
    length: int,
    walks_per_node: int,
    seed: int,
    start_nodes=None,
    stream_keys=None,
) -> WalkCorpus:
    """Sample ``walks_per_node`` walks of ``length`` tokens from every start node.

    Steps follow TransitionModel (uniform over neighbors when unweighted).
    Isolated start nodes yield a length-1 walk and a warning. ``stream_keys``
    optionally re-keys the RNG stream of each start (used by the embedding
    pipeline to key streams by a structure-only canonical rank instead of
    the raw node id).

    Args:
        g: input graph.
        length: tokens per walk, >= 2 (length - 1 steps).
        walks_per_node: walks started per start node, >= 1.
        seed: stream seed.
        start_nodes: iterable of start ids; defaults to all nodes.
        stream_keys: per-start RNG keys aligned with start_nodes; defaults
            to the start node ids themselves.

    Returns:
        WalkCorpus with len(start_nodes) * walks_per_node walks.
    """
    if length < 2:
        raise ValidationError("walk length must be at least 2 tokens")
    if walks_per_node < 1:
        raise ValidationError("walks_per_node must be at least 1")
    if start_nodes is None:
        start_nodes = np.arange(g.n, dtype=np.int64)
    else:
        start_nodes = np.asarray(list(start_nodes), dtype=np.int64)
        if len(start_nodes) and (start_nodes.min() < 0 or start_nodes.max() >= g.n):
            raise ValidationError("start node out of range")
    if stream_keys is None:
        stream_keys = start_nodes
    else:
        stream_keys = np.asarray(list(stream_keys), dtype=np.int64)
        if stream_keys.shape != start_nodes.shape:
            raise ValidationError("stream_keys must align with start_nodes")

    model = TransitionModel(g)
    steps = length - 1
    walks: list[np.ndarray] = []
    starts: list[int] = []
    num_short = 0
    for key, u0 in zip(stream_keys, start_nodes):
        deg0 = g.indptr[u0 + 1] - g.indptr[u0]
        for j in range(walks_per_node):
            starts.append(int(u0))
            if deg0 == 0:
                walks.append(np.array([u0], dtype=np.int64))
                num_short += 1
                continue
            rng = _walk_rng(seed, int(key), j)
            draws = rng.random(steps)
            walk = np.empty(length, dtype=np.int64)
            walk[0] = u0
            cur = int(u0)
            for t in range(steps):
                cur = model.next_node(cur, draws[t])
                walk[t + 1] = cur
            walks.append(walk)
    if num_short:
        warnings.warn(
            f"{num_short} walks started at isolated nodes have length 1",
            stacklevel=2,
        )
    return WalkCorpus(
        walks=walks,
        length=length,
        walks_per_node=walks_per_node,
        seed=int(seed),
        starts=np.asarray(starts, dtype=np.int64),
        num_short=num_short,
    )


# ---------------------------------------------------------------------------
# implicit walk matrices
# ---------------------------------------------------------------------------


def walk_count_matrix(g: Graph, k: int) -> np.ndarray:
    """A^k: entry (i,j) counts length-k walks between i and j.

    Dense output, guarded at n <= 5000. Exact integers for unweighted
    graphs (int64 as long as counts stay below 2^53), reals when weighted.
    k=0 returns the identity with a note.
    """
    if k < 0:
        raise ValidationError("power k must be nonnegative")
    if g.n > DENSE_GUARD:
        raise ValidationError(f"dense guard: n > {DENSE_GUARD}")
    if k == 0:
        warnings.warn("k=0: returning the identity matrix", stacklevel=2)
        return np.eye(g.n, dtype=np.int64 if not g.is_weighted else np.float64)
    adj = g.adjacency(dense=True)
    out = adj.copy()
    for _ in range(k - 1):
        out = out @ adj
    if not g.is_weighted and out.max(initial=0.0) < 2.0**53:
        return np.rint(out).astype(np.int64)
    return out


def walk_sum_matrix(g: Graph, k: int) -> np.ndarray:
    """A_k = sum of A^i for i = 1..k; support reaches pairs at distance <= k."""
    if k < 1:
        raise ValidationError("k must be at least 1")
    if g.n > DENSE_GUARD:
        raise ValidationError(f"dense guard: n > {DENSE_GUARD}")
    adj = g.adjacency(dense=True)
    power = adj.copy()
    total = adj.copy()
    for _ in range(k - 1):
        power = power @ adj
        total += power
    if not g.is_weighted and total.max(initial=0.0) < 2.0**53:
        return np.rint(total).astype(np.int64)
    return total


# ---------------------------------------------------------------------------
# conductance and containment
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CommunityStats:
    """Volume, cut size, and conductance of a node subset."""

    volume: float
    cut: float
    conductance: float


def _community_mask(g: Graph, community) -> np.ndarray:
    mask = np.zeros(g.n, dtype=bool)
    idx = np.asarray(list(community), dtype=np.int64)
    if len(idx) and (idx.min() < 0 or idx.max() >= g.n):
        raise ValidationError("community node out of range")
    mask[idx] = True
    return mask


def community_stats(g: Graph, community) -> CommunityStats:
    """Volume mu(C), cut |E(C, complement)|, and conductance of C.

    Conductance is cut / min(mu(C), mu(complement)); 0 when C has no
    external edges (covers the disconnected-component case). Weighted
    graphs use weight sums for both volume and cut.
    """
    mask = _community_mask(g, community)
    size = int(mask.sum())
    if size == 0 or size == g.n:
        raise ValidationError("community must be a nonempty proper subset")
    src = np.repeat(np.arange(g.n), np.diff(g.indptr))
    crossing = mask[src] & ~mask[g.indices]
    cut = float(g.weights[crossing].sum())
    vol = float(g.degrees[mask].sum())
    vol_rest = float(g.degrees.sum() - vol)
    denom = min(vol, vol_rest)
    phi = cut / denom if denom > 0 else 0.0
    return CommunityStats(volume=vol, cut=cut, conductance=phi)


def containment_bounds(phi: float, ell: int) -> tuple[float, float]:
    """Lower bounds on the probability an ell-step walk stays inside C.

    Basic bound 1 - ell*phi/2 (clamped to [0,1]) and the improved bound
    (1 - phi/2)^ell. The improved bound dominates the basic one.
    """
    if not 0.0 <= phi <= 1.0:
        raise ValidationError("conductance must lie in [0, 1]")
    if ell < 1:
        raise ValidationError("walk length must be at least 1 step")
    basic = max(0.0, 1.0 - ell * phi / 2.0)
    improved = (1.0 - phi / 2.0) ** ell
    return basic, min(1.0, max(0.0, improved))


def estimate_containment(
    g: Graph,
    community,
    ell: int,
    trials: int,
    seed: int,
    start: str = "degree",
    lazy: bool = True,
) -> float:
    """Monte Carlo estimate of the ell-step containment probability.

    Walks follow the lazy transition model by default (each step stays put
    with probability 1/2, else moves per TransitionModel): the analytic
    containment bounds with their phi/2 escape rate hold for the lazy
    walk, where each step spills at most half the boundary mass. lazy=False
    runs the plain walk instead; its per-step escape rate is phi, so it can
    undershoot the bounds and is offered only for sensitivity checks.

    Start nodes are drawn from C proportionally to degree by default
    (matching the stationary-start convention behind the analytic bounds);
    start="uniform" draws uniformly instead. Walks from isolated nodes
    stay put and count as contained.
    """
    if trials < 1:
        raise ValidationError("trials must be at least 1")
    if ell < 1:
        raise ValidationError("walk length must be at least 1 step")
    if start not in ("degree", "uniform"):
        raise ValidationError("start must be 'degree' or 'uniform'")
    mask = _community_mask(g, community)
    members = np.flatnonzero(mask)
    if len(members) == 0:
        raise ValidationError("community must be nonempty")

    if start == "degree":
        w = g.degrees[members]
        total = w.sum()
        probs = w / total if total > 0 else np.full(len(members), 1.0 / len(members))
    else:
        probs = np.full(len(members), 1.0 / len(members))

    model = TransitionModel(g)
    rng = np.random.default_rng(seed)
    start_draws = rng.choice(members, size=trials, p=probs)
    step_draws = rng.random((trials, ell))
    contained = 0
    for i in range(trials):
        cur = int(start_draws[i])
        inside = True
        for t in range(ell):
            r = step_draws[i, t]
            if lazy:
                if r < 0.5:
                    continue
                r = 2.0 * r - 1.0
            cur = model.next_node(cur, r)
            if not mask[cur]:
                inside = False
                break
        contained += inside
    return contained / trials


def containment_report(
    g: Graph,
    community,
    ell: int,
    trials: int,
    seed: int,
    start: str = "degree",
    lazy: bool = True,
) -> dict:
    """Bundle conductance, both analytic bounds, and the empirical estimate."""
    mask = _community_mask(g, community)
    size = int(mask.sum())
    if 0 < size < g.n:
        phi = community_stats(g, community).conductance
    else:
        phi = 0.0
    basic, improved = containment_bounds(phi, ell)
    empirical = estimate_containment(
        g, community, ell, trials, seed, start=start, lazy=lazy
    )
    return {
        "phi": phi,
        "ell": int(ell),
        "basic_bound": basic,
        "improved_bound": improved,
        "empirical": empirical,
        "trials": int(trials),
        "seed": int(seed),
    }
