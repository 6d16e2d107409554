"""Feature diffusion operators and numerical verification of their limits.

Implements the propagation family used by convolution-style embedding
methods: the random-walk operator D^{-1}A, its symmetric twin
D^{-1/2}AD^{-1/2}, a theta-weighted Laplacian recurrence, an untrained
GCN-style step with seeded random weights, and plain neighborhood
aggregators. The verify_* routines iterate the first two operators to
their analytic limits (weighted feature mean, respectively sqrt-degree
profile) and report how fast and how closely they get there; both limits
exist exactly when the graph is connected and non-bipartite, which is
checked up front.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .graphs import Graph, connected_components, is_bipartite

__all__ = [
    "DiffusionConfig",
    "ConvergenceReport",
    "SpectrumReport",
    "diffuse",
    "verify_convergence_rw",
    "verify_convergence_sym",
    "spectrum_check",
    "motif_feature_one_step",
]

OPERATORS = ("random-walk", "symmetric", "theta-laplacian", "gcn-step", "aggregate")
AGGREGATORS = ("sum", "mean", "min", "max")

SPECTRUM_GUARD = 2000


@dataclass(frozen=True)
class DiffusionConfig:
    """Operator choice plus everything needed to make a run reproducible.

    theta weighs the original features in the theta-laplacian recurrence
    (theta=1 is the identity map). i_minus_l swaps the Laplacian L for
    I - L in that recurrence, the variant common elsewhere; the printed
    form is the default. identity_weights pins the gcn-step weight
    matrices to I, which makes the step equal the symmetric operator when
    activation is linear (kept as a cross-check between code paths).
    """

    operator: str = "random-walk"
    steps: int = 1
    theta: float = 0.5
    i_minus_l: bool = False
    aggregator: str = "mean"
    activation: str = "relu"
    seed: int = 0
    identity_weights: bool = False

    def __post_init__(self):
        if self.operator not in OPERATORS:
            raise ValidationError(f"unknown operator {self.operator!r}")
        if self.steps < 0:
            raise ValidationError("steps must be nonnegative")
        if not 0.0 <= self.theta <= 1.0:
            raise ValidationError("theta must lie in [0, 1]")
        if self.aggregator not in AGGREGATORS:
            raise ValidationError(f"unknown aggregator {self.aggregator!r}")
        if self.activation not in ("relu", "linear"):
            raise ValidationError("activation must be 'relu' or 'linear'")


def _as_features(g: Graph, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != g.n:
        raise ValidationError("feature row count must equal node count")
    if not np.all(np.isfinite(X)):
        raise ValidationError("features must be finite")
    return X


def _rw_matrix(g: Graph, strict: bool = True):
    from scipy.sparse import diags

    d = g.degrees
    if strict and np.any(d == 0):
        bad = int(np.flatnonzero(d == 0)[0])
        raise ValidationError(
            f"random-walk operator undefined: node {bad} is isolated"
        )
    inv = np.divide(1.0, d, out=np.zeros_like(d), where=d > 0)
    return diags(inv) @ g.adjacency()


def _sym_matrix(g: Graph):
    from scipy.sparse import diags

    d = g.degrees
    inv_sqrt = np.divide(1.0, np.sqrt(d), out=np.zeros_like(d), where=d > 0)
    half = diags(inv_sqrt)
    return half @ g.adjacency() @ half


def _aggregate(g: Graph, X: np.ndarray, aggregator: str) -> np.ndarray:
    """Columnwise aggregation of neighbor feature rows (structural: ignores
    edge weights). Isolated nodes get zero rows."""
    n, F = X.shape
    out = np.zeros((n, F), dtype=np.float64)
    nonempty = np.flatnonzero(np.diff(g.indptr))
    if len(nonempty) == 0:
        return out
    gathered = X[g.indices]
    ptr = g.indptr[nonempty]
    if aggregator == "sum":
        out[nonempty] = np.add.reduceat(gathered, ptr, axis=0)
    elif aggregator == "mean":
        sums = np.add.reduceat(gathered, ptr, axis=0)
        out[nonempty] = sums / np.diff(g.indptr)[nonempty, None]
    elif aggregator == "min":
        out[nonempty] = np.minimum.reduceat(gathered, ptr, axis=0)
    elif aggregator == "max":
        out[nonempty] = np.maximum.reduceat(gathered, ptr, axis=0)
    return out


def _gcn_weight(F: int, seed: int, step: int, identity: bool) -> np.ndarray:
    if identity:
        return np.eye(F)
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(step),))
    rng = np.random.Generator(np.random.PCG64(ss))
    s = 1.0 / np.sqrt(F)
    return rng.uniform(-s, s, size=(F, F))


def diffuse(g: Graph, X, config: DiffusionConfig | None = None) -> np.ndarray:
    """Apply config.steps rounds of the configured operator to X.

    steps=0 returns X unchanged. The theta-laplacian recurrence keeps a
    handle on the original X (its theta*X term), so repeated single-step
    calls are not equivalent to one multi-step call for that operator.
    """
    config = config or DiffusionConfig()
    X = _as_features(g, X)
    if config.steps == 0:
        return X.copy()
    op = config.operator
    if op == "random-walk":
        P = _rw_matrix(g, strict=True)
        out = X
        for _ in range(config.steps):
            out = P @ out
        return np.asarray(out)
    if op == "symmetric":
        S = _sym_matrix(g)
        out = X
        for _ in range(config.steps):
            out = S @ out
        return np.asarray(out)
    if op == "theta-laplacian":
        from scipy.sparse import identity

        S = _sym_matrix(g)
        L = identity(g.n, format="csr") - S
        base = S if config.i_minus_l else L
        theta = config.theta
        out = X
        for _ in range(config.steps):
            out = (1.0 - theta) * (base @ out) + theta * X
        return np.asarray(out)
    if op == "gcn-step":
        S = _sym_matrix(g)
        out = X
        for t in range(config.steps):
            W = _gcn_weight(out.shape[1], config.seed, t, config.identity_weights)
            out = np.asarray(S @ out) @ W
            if config.activation == "relu":
                out = np.maximum(out, 0.0)
        return out
    # aggregate
    out = X
    for _ in range(config.steps):
        out = _aggregate(g, out, config.aggregator)
    return out


# ---------------------------------------------------------------------------
# convergence verification
# ---------------------------------------------------------------------------


@dataclass
class ConvergenceReport:
    """Outcome of iterating an operator to its limit.

    max_deviation is the stopping statistic at t_reached; for the
    random-walk operator that is the largest row-to-row spread, for the
    symmetric operator the spread of X / sqrt(d). analytic holds the
    predicted limit (row y for random-walk, full matrix for symmetric)
    and analytic_deviation the worst absolute gap against it.
    """

    operator: str
    t_reached: int
    max_deviation: float
    converged: bool
    analytic_match: bool
    analytic_deviation: float
    tol: float
    limit: np.ndarray = field(repr=False, default=None)
    analytic: np.ndarray = field(repr=False, default=None)

    def to_dict(self) -> dict:
        return {
            "operator": self.operator,
            "t_reached": self.t_reached,
            "max_deviation": self.max_deviation,
            "analytic_match": self.analytic_match,
            "analytic_deviation": self.analytic_deviation,
            "converged": self.converged,
            "tol": self.tol,
        }


def _require_connected_non_bipartite(g: Graph):
    if connected_components(g).k != 1:
        raise ValidationError(
            "convergence requires a connected graph (limit undefined otherwise)"
        )
    if is_bipartite(g):
        raise ValidationError(
            "convergence requires a non-bipartite graph (walk parity oscillates)"
        )


def _col_spread(X: np.ndarray) -> float:
    return float((X.max(axis=0) - X.min(axis=0)).max())


def verify_convergence_rw(
    g: Graph, X, t_max: int = 10000, tol: float = 1e-8
) -> ConvergenceReport:
    """Iterate D^{-1}A until all rows agree within tol.

    The limit is the rank-one matrix 1 y^T with y = (d^T X) / sum(d); the
    report compares the reached iterate against that prediction.
    """
    _require_connected_non_bipartite(g)
    X = _as_features(g, X)
    P = _rw_matrix(g)
    d = g.degrees
    y = (d @ X) / d.sum()
    out = X
    t = 0
    dev = _col_spread(out)
    while dev > tol and t < t_max:
        out = np.asarray(P @ out)
        t += 1
        dev = _col_spread(out)
    analytic_dev = float(np.abs(out - y[None, :]).max())
    return ConvergenceReport(
        operator="random-walk",
        t_reached=t,
        max_deviation=dev,
        converged=dev <= tol,
        analytic_match=analytic_dev <= tol,
        analytic_deviation=analytic_dev,
        tol=tol,
        limit=out,
        analytic=y,
    )


def verify_convergence_sym(
    g: Graph, X, t_max: int = 10000, tol: float = 1e-8
) -> ConvergenceReport:
    """Iterate D^{-1/2}AD^{-1/2} until X / sqrt(d) is constant per column.

    The limit is q q^T X with q = sqrt(d)/||sqrt(d)||, i.e. every column
    settles proportional to the square root of the node degree.
    """
    _require_connected_non_bipartite(g)
    X = _as_features(g, X)
    S = _sym_matrix(g)
    sqrt_d = np.sqrt(g.degrees)
    q = sqrt_d / np.linalg.norm(sqrt_d)
    analytic = np.outer(q, q @ X)
    out = X
    t = 0
    dev = _col_spread(out / sqrt_d[:, None])
    while dev > tol and t < t_max:
        out = np.asarray(S @ out)
        t += 1
        dev = _col_spread(out / sqrt_d[:, None])
    analytic_dev = float(np.abs(out - analytic).max())
    return ConvergenceReport(
        operator="symmetric",
        t_reached=t,
        max_deviation=dev,
        converged=dev <= tol,
        analytic_match=analytic_dev <= tol,
        analytic_deviation=analytic_dev,
        tol=tol,
        limit=out,
        analytic=analytic,
    )


@dataclass
class SpectrumReport:
    """Eigenvalues of the symmetric walk operator plus the facts the
    convergence theory needs about them."""

    eigenvalues: np.ndarray
    min_eigenvalue: float
    max_eigenvalue: float
    num_at_one: int
    num_components: int
    bipartite: bool
    tol: float

    def to_dict(self) -> dict:
        return {
            "eigenvalues": self.eigenvalues.tolist(),
            "min_eigenvalue": self.min_eigenvalue,
            "max_eigenvalue": self.max_eigenvalue,
            "num_at_one": self.num_at_one,
            "num_components": self.num_components,
            "bipartite": self.bipartite,
            "tol": self.tol,
        }


def spectrum_check(g: Graph, tol: float = 1e-9) -> SpectrumReport:
    """Dense eigensolve of D^{-1/2}AD^{-1/2} (shares the spectrum of D^{-1}A).

    All eigenvalues lie in [-1, 1]; 1 appears once per connected component
    that has edges, and -1 appears exactly when some component with edges
    is bipartite.
    """
    if g.n > SPECTRUM_GUARD:
        raise ValidationError(f"dense eigensolve guard: n > {SPECTRUM_GUARD}")
    S = np.asarray(_sym_matrix(g).todense())
    vals = np.linalg.eigvalsh(S)
    return SpectrumReport(
        eigenvalues=vals,
        min_eigenvalue=float(vals.min()),
        max_eigenvalue=float(vals.max()),
        num_at_one=int(np.sum(np.abs(vals - 1.0) <= tol)),
        num_components=connected_components(g).k,
        bipartite=is_bipartite(g),
        tol=tol,
    )


def motif_feature_one_step(g: Graph, orbit_features, aggregator: str = "mean") -> np.ndarray:
    """One neighborhood aggregation of structural features, concatenated
    with the originals.

    A single propagation keeps the structural signal intact (more rounds
    wash it toward the degree profile), so the output still separates
    roles; column count doubles.
    """
    if aggregator not in AGGREGATORS:
        raise ValidationError(f"unknown aggregator {aggregator!r}")
    X = _as_features(g, orbit_features)
    return np.hstack([X, _aggregate(g, X, aggregator)])
