"""Request and response models for the HTTP service.

Graphs travel as explicit edge lists; matrices as nested lists. Every
response model mirrors what the core returns so the CLI can rebuild
library objects from JSON without loss.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from ..graphs import Graph


class GraphPayload(BaseModel):
    num_nodes: int = Field(ge=1)
    edges: list[tuple[int, int]]
    weights: list[float] | None = None

    def to_graph(self) -> Graph:
        return Graph.from_edges(self.num_nodes, self.edges, weights=self.weights)

    @classmethod
    def from_graph(cls, g: Graph) -> "GraphPayload":
        src, dst, w = g.edge_array()
        return cls(
            num_nodes=g.n,
            edges=[(int(u), int(v)) for u, v in zip(src, dst)],
            weights=[float(x) for x in w] if g.is_weighted else None,
        )


class PartitionOut(BaseModel):
    labels: list[int]
    k: int


class GenerateRequest(BaseModel):
    kind: Literal[
        "barbell", "star", "clique", "complete-bipartite", "chung-lu", "borgatti-everett"
    ]
    m: int = 5
    leaves: int = 4
    left: int = 3
    right: int = 4
    blocks: list[int] = Field(default_factory=lambda: [50, 50])
    intra_weight: float = 0.9
    degree_exponent: float = 2.5
    seed: int = 0


class GenerateResponse(BaseModel):
    graph: GraphPayload
    communities: PartitionOut | None = None
    roles: PartitionOut | None = None


class WalkRequest(BaseModel):
    graph: GraphPayload
    length: int = 10
    walks_per_node: int = 10
    seed: int = 0


class WalkResponse(BaseModel):
    walks: list[list[int]]
    starts: list[int]
    length: int
    walks_per_node: int
    seed: int
    num_short: int


class ContainmentRequest(BaseModel):
    graph: GraphPayload
    community: list[int]
    ell: int = 4
    trials: int = 1000
    seed: int = 0
    start: Literal["degree", "uniform"] = "degree"


class ContainmentResponse(BaseModel):
    phi: float
    ell: int
    basic_bound: float
    improved_bound: float
    empirical: float
    trials: int
    seed: int


class DiffuseRequest(BaseModel):
    graph: GraphPayload
    features: list[list[float]] | None = None
    feature_columns: int = Field(default=3, ge=1)
    operator: Literal[
        "random-walk", "symmetric", "theta-laplacian", "gcn-step", "aggregate"
    ] = "random-walk"
    steps: int = 1
    theta: float = 0.5
    i_minus_l: bool = False
    aggregator: Literal["sum", "mean", "min", "max"] = "mean"
    activation: Literal["relu", "linear"] = "relu"
    seed: int = 0
    verify: Literal["none", "rw", "sym"] = "none"
    tol: float = 1e-8
    max_steps: int = 10000


class DiffuseResponse(BaseModel):
    matrix: list[list[float]]
    report: dict | None = None


class OrbitsRequest(BaseModel):
    graph: GraphPayload


class OrbitsResponse(BaseModel):
    counts: list[list[int]]
    orbit_names: list[str]
    graphlet_totals: dict[str, int]


class MotifGraphRequest(BaseModel):
    graph: GraphPayload
    motif: str = "4-clique"
    min_count: int = 1
    all_pairs: bool = False


class MotifGraphResponse(BaseModel):
    pairs: list[tuple[int, int, int]]
    component_labels: list[int]
    num_components: int
    total_instances: int


class EmbedRequest(BaseModel):
    graph: GraphPayload
    mechanism: Literal["deepwalk", "role2vec", "implicit", "roles-nmf"] = "deepwalk"
    d: int = 8
    length: int = 10
    walks_per_node: int = 10
    window: int = 3
    seed: int = 0
    bins_per_feature: int = 4
    k: int = 3
    mode: Literal["summed", "per-power"] = "summed"
    k_roles: int = 4
    depth: int = 1


class EmbedResponse(BaseModel):
    vectors: list[list[float]]
    provenance: str
    d: int
    config: dict


class EquivalenceRequest(BaseModel):
    graph: GraphPayload
    kind: Literal["structural", "regular", "exact", "verify-exact", "verify-strong"]
    closed: bool = False
    roles: list[int] | None = None
    reading: Literal["universal", "edge-consistency"] = "universal"


class EquivalenceResponse(BaseModel):
    partition: PartitionOut | None = None
    report: dict | None = None


class DiagnoseRequest(BaseModel):
    graph: GraphPayload
    vectors: list[list[float]]
    provenance: str = "deepwalk-style"
    communities: list[int]
    roles: list[int]
    tau: float = 0.1
    rho: float = 0.3


class SuiteRequest(BaseModel):
    seed: int = 0


class SuiteCell(BaseModel):
    scenario: str
    mechanism: str
    report: dict
    expected: str | None = None


class SuiteResponse(BaseModel):
    records: list[SuiteCell]
    matrix: str
    all_expected_match: bool


def matrix_to_lists(M: np.ndarray) -> list:
    return [[float(v) for v in row] for row in np.asarray(M, dtype=np.float64)]
