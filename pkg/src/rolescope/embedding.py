"""Corpus-to-embedding pipeline and the four embedding mechanisms.

Walk corpora become symmetric windowed co-occurrence counts, those become
a shifted positive PMI matrix, and a truncated eigendecomposition of that
matrix gives the vectors. Community embeddings run the pipeline over node
tokens, role embeddings over feature-derived type tokens, and implicit
embeddings factorize walk-count matrices directly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .graphs import Graph
from .graphlets import count_orbits, orbit_feature_matrix
from .roles import feature_walks, fit_type_mapping, nmf, recursive_features
from .walks import WalkCorpus, sample_walks, walk_count_matrix, walk_sum_matrix

__all__ = [
    "PROVENANCE_TAGS",
    "Embedding",
    "cooccurrence",
    "ppmi_matrix",
    "factorize_pmi",
    "embed_community",
    "embed_role",
    "embed_implicit",
    "embed_factorized_roles",
    "cosine_similarity",
    "pairwise_cosine",
]

PROVENANCE_TAGS = (
    "deepwalk-style",
    "role2vec-style",
    "implicit-Ak",
    "diffusion",
    "factorized-roles",
)

DEFAULT_LENGTH = 10
DEFAULT_WALKS_PER_NODE = 10
DEFAULT_WINDOW = 3
DEFAULT_DIM = 8


@dataclass(frozen=True)
class Embedding:
    """Node vectors plus a record of which mechanism produced them."""

    vectors: np.ndarray
    provenance: str
    d: int
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.vectors.ndim != 2:
            raise ValidationError("embedding vectors must be 2-d")
        if not np.all(np.isfinite(self.vectors)):
            raise ValidationError("embedding entries must be finite")
        if self.provenance not in PROVENANCE_TAGS:
            raise ValidationError(f"provenance must be one of {PROVENANCE_TAGS}")
        if self.d != self.vectors.shape[1]:
            raise ValidationError("d must match the vector width")

    @property
    def n(self) -> int:
        return self.vectors.shape[0]


def cooccurrence(corpus: WalkCorpus, window: int = DEFAULT_WINDOW, num_tokens=None) -> np.ndarray:
    """Symmetric within-window co-occurrence counts over the corpus.

    A pair is counted once per positioned occurrence within ``window``
    steps in a walk, on both token orders; pairs of a token with itself
    are excluded.
    """
    if window < 1:
        raise ValidationError("window must be at least 1")
    if not corpus.walks:
        raise ValidationError("empty corpus has no co-occurrences")
    if num_tokens is None:
        num_tokens = max(int(w.max()) for w in corpus.walks if len(w)) + 1
    counts = np.zeros((num_tokens, num_tokens), dtype=np.float64)
    for walk in corpus.walks:
        L = len(walk)
        for i in range(L):
            a = walk[i]
            for j in range(i + 1, min(i + window + 1, L)):
                b = walk[j]
                if a != b:
                    counts[a, b] += 1.0
                    counts[b, a] += 1.0
    return counts


def ppmi_matrix(counts: np.ndarray, shift: float = 1.0, smoothing: float = 0.75) -> np.ndarray:
    """Shifted positive PMI with context-distribution smoothing.

    PMI is computed only where counts are positive; zero-count cells stay
    zero. The result is symmetrized, since context smoothing breaks the
    symmetry of the raw counts.
    """
    counts = np.asarray(counts, dtype=np.float64)
    if counts.ndim != 2 or counts.shape[0] != counts.shape[1]:
        raise ValidationError("counts must be square")
    if np.any(counts < 0):
        raise ValidationError("counts must be nonnegative")
    if shift < 1.0:
        raise ValidationError("shift must be at least 1")
    total = counts.sum()
    if total == 0:
        raise ValidationError("counts are identically zero")
    row = counts.sum(axis=1)
    ctx = counts.sum(axis=0) ** smoothing
    ctx /= ctx.sum()
    M = np.zeros_like(counts)
    pos = counts > 0
    i, j = np.nonzero(pos)
    pmi = np.log(counts[i, j] / total) - np.log(row[i] / total) - np.log(ctx[j])
    M[i, j] = np.maximum(pmi - np.log(shift), 0.0)
    return (M + M.T) / 2.0


def _factorize_symmetric(M: np.ndarray, d: int) -> tuple[np.ndarray, float]:
    """Top-d eigenpairs by magnitude; vectors scaled by sqrt|eigenvalue|.

    Sign convention: the largest-magnitude entry of each eigenvector is
    made positive (first occurrence on ties), so output is deterministic.
    Returns the vectors and the Frobenius error of the rank-d truncation.
    """
    t = M.shape[0]
    if not 1 <= d <= t:
        raise ValidationError(f"d must lie in [1, {t}]")
    vals, vecs = np.linalg.eigh(M)
    order = np.argsort(-np.abs(vals), kind="stable")
    keep = order[:d]
    for idx in keep:
        col = vecs[:, idx]
        if col[np.argmax(np.abs(col))] < 0:
            vecs[:, idx] = -col
    out = vecs[:, keep] * np.sqrt(np.abs(vals[keep]))
    error = float(np.sqrt(np.sum(vals[order[d:]] ** 2)))
    return out, error


def factorize_pmi(
    counts: np.ndarray,
    d: int,
    shift: float = 1.0,
    smoothing: float = 0.75,
    provenance: str = "deepwalk-style",
) -> Embedding:
    """Embed tokens by truncated eigendecomposition of the shifted PPMI."""
    M = ppmi_matrix(counts, shift=shift, smoothing=smoothing)
    vectors, error = _factorize_symmetric(M, d)
    config = {
        "d": d,
        "shift": shift,
        "smoothing": smoothing,
        "reconstruction_error": error,
    }
    return Embedding(vectors=vectors, provenance=provenance, d=d, config=config)


def _clamp_dim(d: int, limit: int, what: str) -> int:
    if d < 1:
        raise ValidationError("d must be at least 1")
    if d > limit:
        warnings.warn(f"d={d} exceeds {what} ({limit}); clamping", stacklevel=3)
        return limit
    return d


def embed_community(
    g: Graph,
    d: int = DEFAULT_DIM,
    length: int = DEFAULT_LENGTH,
    walks_per_node: int = DEFAULT_WALKS_PER_NODE,
    window: int = DEFAULT_WINDOW,
    seed: int = 0,
    shift: float = 1.0,
    smoothing: float = 0.75,
) -> Embedding:
    """Walks over node ids, factorized: nearby nodes co-occur, so the
    vectors preserve proximity and community structure."""
    d = _clamp_dim(d, g.n, "node count")
    corpus = sample_walks(g, length=length, walks_per_node=walks_per_node, seed=seed)
    counts = cooccurrence(corpus, window=window, num_tokens=g.n)
    emb = factorize_pmi(counts, d, shift=shift, smoothing=smoothing)
    config = dict(emb.config)
    config.update(
        {"length": length, "walks_per_node": walks_per_node, "window": window, "seed": seed}
    )
    return Embedding(emb.vectors, "deepwalk-style", d, config)


def _canonical_order(orbits: np.ndarray) -> np.ndarray:
    """Nodes sorted by their orbit rows lexicographically, ties by id."""
    return np.lexsort(np.fliplr(orbits).T)


def embed_role(
    g: Graph,
    d: int = DEFAULT_DIM,
    length: int = DEFAULT_LENGTH,
    walks_per_node: int = DEFAULT_WALKS_PER_NODE,
    window: int = DEFAULT_WINDOW,
    seed: int = 0,
    bins_per_feature: int = 4,
    shift: float = 1.0,
    smoothing: float = 0.75,
) -> Embedding:
    """Walks whose tokens are feature-derived types, factorized.

    Nodes are first re-keyed by the rank of their orbit row (a structural
    key), so walk randomness attaches to structure rather than input ids.
    Each node inherits the vector of its type; nodes of one type are
    therefore bit-identical, on any component. The dimension clamps to
    the number of observed types.
    """
    orbits = count_orbits(g)
    perm = _canonical_order(orbits)
    inverse = np.empty(g.n, dtype=np.int64)
    inverse[perm] = np.arange(g.n)
    src, dst, w = g.edge_array()
    relabeled = Graph.from_edges(
        g.n, np.column_stack([inverse[src], inverse[dst]]), weights=w if g.is_weighted else None
    )
    features = orbits[perm].astype(np.float64)

    corpus = sample_walks(relabeled, length=length, walks_per_node=walks_per_node, seed=seed)
    mapping = fit_type_mapping(features, bins_per_feature=bins_per_feature)
    typed = feature_walks(corpus, mapping, features)
    d_eff = _clamp_dim(d, mapping.num_types, "type count")
    counts = cooccurrence(typed, window=window, num_tokens=mapping.num_types)
    if counts.sum() == 0:
        # one observed type only: constant walks carry no co-occurrence
        # signal, so every node gets the zero vector (reported degenerate)
        type_vectors = np.zeros((mapping.num_types, d_eff))
        config = {
            "d": d_eff,
            "shift": shift,
            "smoothing": smoothing,
            "reconstruction_error": 0.0,
            "degenerate": True,
        }
        type_emb = Embedding(type_vectors, "role2vec-style", d_eff, config)
    else:
        type_emb = factorize_pmi(counts, d_eff, shift=shift, smoothing=smoothing)
    node_types = mapping.assign(orbits.astype(np.float64))
    vectors = type_emb.vectors[node_types]
    config = dict(type_emb.config)
    config.update(
        {
            "length": length,
            "walks_per_node": walks_per_node,
            "window": window,
            "seed": seed,
            "bins_per_feature": bins_per_feature,
            "num_types": mapping.num_types,
        }
    )
    return Embedding(vectors, "role2vec-style", d_eff, config)


def embed_implicit(g: Graph, k: int = 3, d: int = DEFAULT_DIM, mode: str = "summed") -> Embedding:
    """Factorize walk-count matrices instead of sampling walks.

    ``summed`` factorizes the sum of the first k powers of the adjacency
    matrix; ``per-power`` factorizes each power separately and
    concatenates, giving dimension d * k.
    """
    if mode not in ("summed", "per-power"):
        raise ValidationError("mode must be 'summed' or 'per-power'")
    if k < 1:
        raise ValidationError("k must be at least 1")
    d = _clamp_dim(d, g.n, "node count")
    if mode == "summed":
        M = walk_sum_matrix(g, k).astype(np.float64)
        vectors, error = _factorize_symmetric(M, d)
        width = d
    else:
        blocks = []
        error = 0.0
        for i in range(1, k + 1):
            Ai = walk_count_matrix(g, i).astype(np.float64)
            vec_i, err_i = _factorize_symmetric(Ai, d)
            blocks.append(vec_i)
            error += err_i**2
        vectors = np.hstack(blocks)
        error = float(np.sqrt(error))
        width = d * k
    config = {"k": k, "d": d, "mode": mode, "reconstruction_error": error}
    return Embedding(vectors, "implicit-Ak", width, config)


def embed_factorized_roles(
    g: Graph,
    k_roles: int = 4,
    depth: int = 1,
    seed: int = 0,
    iters: int = 200,
    tol: float = 1e-6,
) -> Embedding:
    """Nonnegative factorization of recursively aggregated orbit features.

    The distinct feature rows are factorized once and every node receives
    its row's membership vector, so nodes with identical structural
    features get bit-identical embeddings. If fewer distinct rows (or
    feature columns) than k_roles exist, the factorization runs at the
    feasible rank and memberships are zero-padded to width k_roles.
    """
    if k_roles < 1:
        raise ValidationError("k_roles must be at least 1")
    base = orbit_feature_matrix(g)
    grown = recursive_features(g, base=base, depth=depth)
    X = np.log1p(grown.values)
    uniq, inverse = np.unique(X, axis=0, return_inverse=True)
    k_eff = min(k_roles, uniq.shape[0], uniq.shape[1])
    fact = nmf(uniq, k_eff, iters=iters, tol=tol, seed=seed)
    memberships = fact.memberships
    if k_eff < k_roles:
        pad = np.zeros((memberships.shape[0], k_roles - k_eff))
        memberships = np.hstack([memberships, pad])
    vectors = memberships[inverse]
    config = {
        "k_roles": k_roles,
        "k_effective": k_eff,
        "depth": depth,
        "seed": seed,
        "iters_run": fact.iters_run,
        "final_error": fact.final_error,
        "num_feature_columns": grown.num_features,
        "num_distinct_rows": int(uniq.shape[0]),
    }
    return Embedding(vectors, "factorized-roles", k_roles, config)


def cosine_similarity(a, b) -> float:
    """Cosine with exact answers at the edges: bit-identical vectors give
    exactly 1.0, and a zero vector is similar only to another zero vector."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise ValidationError("vectors must share a shape")
    if np.array_equal(a, b):
        return 1.0
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def pairwise_cosine(X: np.ndarray) -> np.ndarray:
    """Cosine matrix over rows, with bit-identical rows pinned to 1.0."""
    X = np.asarray(X, dtype=np.float64)
    norms = np.linalg.norm(X, axis=1)
    safe = np.where(norms == 0.0, 1.0, norms)
    S = (X / safe[:, None]) @ (X / safe[:, None]).T
    S[norms == 0.0, :] = 0.0
    S[:, norms == 0.0] = 0.0
    np.clip(S, -1.0, 1.0, out=S)
    # pin exact equality: identical rows must compare at exactly 1.0
    order = np.lexsort(np.fliplr(X).T)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and np.array_equal(X[order[j + 1]], X[order[i]]):
            j += 1
        if j > i:
            block = order[i : j + 1]
            S[np.ix_(block, block)] = 1.0
        i = j + 1
    np.fill_diagonal(S, 1.0)
    return S
