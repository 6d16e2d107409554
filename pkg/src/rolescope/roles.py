"""Structural role mechanisms: recursive feature aggregation, feature-to-type
mapping with feature-based walks, and nonnegative factorization of feature
matrices into role memberships.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .diffusion import AGGREGATORS, _aggregate
from .errors import ValidationError
from .features import FeatureMatrix
from .graphs import Graph
from .walks import WalkCorpus

__all__ = [
    "TypeMapping",
    "RoleFactorization",
    "recursive_features",
    "fit_type_mapping",
    "feature_walks",
    "nmf",
    "assign_roles",
]

MAX_DEPTH = 4
_DUP_TOL = 1e-12


def _as_matrix(X) -> np.ndarray:
    if isinstance(X, FeatureMatrix):
        return X.values
    X = np.asarray(X, dtype=np.float64)
    return X[:, None] if X.ndim == 1 else X


def _base_features(g: Graph) -> FeatureMatrix:
    from .graphlets import count_orbits

    degree = g.out_degrees.astype(np.float64)
    triangles = count_orbits(g)[:, 3].astype(np.float64)
    return FeatureMatrix(np.column_stack([degree, triangles]), ("degree", "triangle"))


def _is_duplicate(candidate: np.ndarray, kept: list) -> bool:
    cstd = candidate.std()
    for col in kept:
        if np.allclose(candidate, col, rtol=0.0, atol=_DUP_TOL):
            return True
        if cstd > 0.0 and col.std() > 0.0:
            r = np.corrcoef(candidate, col)[0, 1]
            if r >= 1.0 - _DUP_TOL:
                return True
    return False


def recursive_features(
    g: Graph,
    base: FeatureMatrix | None = None,
    depth: int = 1,
    aggregators: tuple = ("mean", "sum"),
) -> FeatureMatrix:
    """Grow features by repeated neighbor aggregation.

    Each level appends, for every column present so far and every
    aggregator, the column aggregated over each node's neighbors.
    Duplicates (correlation 1 within 1e-12, or exact equality) are pruned
    as they appear. Base defaults to (degree, triangle count).

    depth=0 returns the base unchanged; depth is capped at 4 because the
    column count grows geometrically.
    """
    if depth < 0 or depth > MAX_DEPTH:
        raise ValidationError(f"depth must lie in [0, {MAX_DEPTH}]")
    for agg in aggregators:
        if agg not in AGGREGATORS:
            raise ValidationError(f"unknown aggregator {agg!r}")
    if base is None:
        base = _base_features(g)
    if base.n != g.n:
        raise ValidationError("base feature rows must equal node count")

    cols = [base.values[:, j].copy() for j in range(base.num_features)]
    names = list(base.columns)
    for _ in range(depth):
        level_end = len(cols)
        block = np.column_stack(cols[:level_end])
        for agg in aggregators:
            aggregated = _aggregate(g, block, agg)
            for j in range(level_end):
                cand = aggregated[:, j]
                if not _is_duplicate(cand, cols):
                    cols.append(cand.copy())
                    names.append(f"{agg}({names[j]})")
        if len(cols) == level_end:
            break  # fixpoint: the level added nothing new
    return FeatureMatrix(np.column_stack(cols), tuple(names))


# ---------------------------------------------------------------------------
# type mapping and feature walks
# ---------------------------------------------------------------------------


@dataclass
class TypeMapping:
    """Deterministic map from feature rows to discrete type ids.

    Each feature gets logarithmic bins: equal-width bins over the observed
    range of log(1+x). A row's bin-index tuple is then ranked among the
    tuples seen at fit time (lexicographic order) to give a dense type id.
    Values outside the fitted range clamp to the boundary bins; tuples
    never seen at fit time get fresh ids in encounter order.
    """

    bin_edges: list
    bins_per_feature: int
    type_ids: dict = field(default_factory=dict)

    @property
    def num_types(self) -> int:
        return len(self.type_ids)

    def bin_indices(self, X) -> np.ndarray:
        X = _as_matrix(X)
        if X.shape[1] != len(self.bin_edges):
            raise ValidationError("feature count differs from fitted mapping")
        if not np.all(np.isfinite(X)):
            raise ValidationError("features must be finite")
        if np.any(X < 0):
            raise ValidationError("log binning requires nonnegative features")
        out = np.zeros(X.shape, dtype=np.int64)
        z = np.log1p(X)
        for j, edges in enumerate(self.bin_edges):
            if len(edges) <= 2:
                continue  # constant feature: single bin
            idx = np.searchsorted(edges, z[:, j], side="right") - 1
            out[:, j] = np.clip(idx, 0, len(edges) - 2)
        return out

    def assign(self, X) -> np.ndarray:
        """Type id per row; unseen bin tuples are registered on the fly."""
        bins = self.bin_indices(X)
        ids = np.empty(len(bins), dtype=np.int64)
        for i, row in enumerate(bins):
            key = tuple(int(b) for b in row)
            if key not in self.type_ids:
                self.type_ids[key] = len(self.type_ids)
            ids[i] = self.type_ids[key]
        return ids

    def to_dict(self) -> dict:
        return {
            "bins_per_feature": self.bins_per_feature,
            "bin_edges": [e.tolist() for e in self.bin_edges],
            "types": {",".join(map(str, k)): v for k, v in self.type_ids.items()},
        }


def fit_type_mapping(X, bins_per_feature: int = 4) -> TypeMapping:
    """Fit per-feature logarithmic bins and rank the observed bin tuples.

    Identical rows always share a type. Constant features collapse to a
    single bin and cannot split types.
    """
    if bins_per_feature < 1:
        raise ValidationError("bins_per_feature must be at least 1")
    X = _as_matrix(X)
    if X.size == 0:
        raise ValidationError("cannot fit a type mapping on empty features")
    if not np.all(np.isfinite(X)):
        raise ValidationError("features must be finite")
    if np.any(X < 0):
        raise ValidationError("log binning requires nonnegative features")
    z = np.log1p(X)
    edges = []
    for j in range(X.shape[1]):
        lo, hi = float(z[:, j].min()), float(z[:, j].max())
        if hi - lo <= 1e-15:
            edges.append(np.array([lo, lo]))
        else:
            edges.append(np.linspace(lo, hi, bins_per_feature + 1))
    mapping = TypeMapping(bin_edges=edges, bins_per_feature=bins_per_feature)
    bins = mapping.bin_indices(X)
    observed = sorted({tuple(int(b) for b in row) for row in bins})
    mapping.type_ids = {t: i for i, t in enumerate(observed)}
    return mapping


def feature_walks(corpus: WalkCorpus, mapping: TypeMapping, features) -> WalkCorpus:
    """Replace every node id in the corpus by its feature-derived type id.

    Walk lengths are preserved; the result is a corpus over type tokens
    suitable for the same co-occurrence machinery as node walks.
    """
    types = mapping.assign(features)
    mapped = []
    for walk in corpus.walks:
        if walk.max(initial=0) >= len(types):
            raise ValidationError("walk visits a node with no feature row")
        mapped.append(types[walk])
    return WalkCorpus(
        walks=mapped,
        length=corpus.length,
        walks_per_node=corpus.walks_per_node,
        seed=corpus.seed,
        starts=corpus.starts.copy(),
        num_short=corpus.num_short,
    )


# ---------------------------------------------------------------------------
# nonnegative factorization
# ---------------------------------------------------------------------------

_NMF_EPS = 1e-12


@dataclass
class RoleFactorization:
    """Nonnegative X ~ memberships @ patterns with the objective trace."""

    memberships: np.ndarray
    patterns: np.ndarray
    objective: list
    iters_run: int
    seed: int

    @property
    def final_error(self) -> float:
        return self.objective[-1]


def nmf(X, k: int, iters: int = 200, tol: float = 1e-6, seed: int = 0) -> RoleFactorization:
    """Lee-Seung multiplicative updates for the Frobenius objective.

    Seeded nonnegative uniform init; denominators guarded by 1e-12. Stops
    at ``iters`` or when the relative improvement drops below ``tol``. The
    objective trace (initial error plus one entry per iteration) is
    non-increasing, which the test suite asserts.
    """
    X = _as_matrix(X)
    if np.any(X < 0):
        raise ValidationError(
            "nmf needs nonnegative input; transform counts with log1p first"
        )
    if not np.all(np.isfinite(X)):
        raise ValidationError("nmf input must be finite")
    n, F = X.shape
    if not 1 <= k <= min(n, F):
        raise ValidationError("k must lie in [1, min(n, F)]")
    if iters < 1:
        raise ValidationError("iters must be at least 1")
    rng = np.random.default_rng(seed)
    scale = np.sqrt(max(X.mean(), _NMF_EPS) / k)
    W = rng.uniform(0.1, 1.0, size=(n, k)) * scale
    H = rng.uniform(0.1, 1.0, size=(k, F)) * scale

    def err(W, H):
        return float(np.linalg.norm(X - W @ H))

    objective = [err(W, H)]
    iters_run = 0
    for _ in range(iters):
        H *= (W.T @ X) / (W.T @ W @ H + _NMF_EPS)
        W *= (X @ H.T) / (W @ (H @ H.T) + _NMF_EPS)
        objective.append(err(W, H))
        iters_run += 1
        prev, cur = objective[-2], objective[-1]
        if prev > 0 and (prev - cur) / prev < tol:
            break
    return RoleFactorization(
        memberships=W, patterns=H, objective=objective, iters_run=iters_run, seed=seed
    )


def assign_roles(memberships) -> np.ndarray:
    """Hard role per row by argmax; ties break toward the lower index.

    All-zero rows fall to role 0 with a warning.
    """
    M = _as_matrix(memberships)
    if np.any(M < 0):
        raise ValidationError("memberships must be nonnegative")
    zero_rows = int(np.sum(~M.any(axis=1)))
    if zero_rows:
        warnings.warn(f"{zero_rows} all-zero membership rows assigned role 0", stacklevel=2)
    return M.argmax(axis=1).astype(np.int64)
