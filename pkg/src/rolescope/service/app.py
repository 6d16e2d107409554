"""HTTP facade over the library: one endpoint per pipeline stage.

Domain errors surface as 422 responses carrying the message; everything
else is a regular 200 with a typed payload. The CLI drives these routes
in-process by default, so the service is also the integration seam.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from .. import __version__
from ..diffusion import (
    DiffusionConfig,
    diffuse,
    verify_convergence_rw,
    verify_convergence_sym,
)
from ..diagnostics import diagnose, scenario_suite, verdict_matrix
from ..embedding import (
    Embedding,
    embed_community,
    embed_factorized_roles,
    embed_implicit,
    embed_role,
)
from ..equivalence import (
    exact_role_partition,
    regular_equivalence_partition,
    structural_equivalence_partition,
    verify_exact_role_assignment,
    verify_strong_structural_assignment,
)
from ..errors import RolescopeError
from ..graphlets import (
    GRAPHLET_NAMES,
    ORBIT_NAMES,
    count_graphlets_global,
    count_orbits,
    motif_graph,
)
from ..graphs import (
    Partition,
    disjoint_union,
    gen_barbell,
    gen_block_chung_lu,
    gen_clique,
    gen_complete_bipartite,
    gen_star,
)
from ..walks import containment_report, sample_walks
from . import schemas as S


def _partition_out(part: Partition) -> S.PartitionOut:
    return S.PartitionOut(labels=[int(x) for x in part.labels], k=part.k)


def create_app() -> FastAPI:
    app = FastAPI(title="rolescope", version=__version__)

    @app.exception_handler(RolescopeError)
    async def _domain_error(request: Request, exc: RolescopeError):
        return JSONResponse(status_code=422, content={"detail": str(exc)})

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/generate", response_model=S.GenerateResponse)
    async def generate(req: S.GenerateRequest) -> S.GenerateResponse:
        roles = None
        communities = None
        if req.kind == "barbell":
            g, communities = gen_barbell(req.m)
        elif req.kind == "star":
            g = gen_star(req.leaves)
        elif req.kind == "clique":
            g = gen_clique(req.m)
        elif req.kind == "complete-bipartite":
            g = gen_complete_bipartite(req.left, req.right)
        elif req.kind == "chung-lu":
            g, communities = gen_block_chung_lu(
                tuple(req.blocks),
                intra_weight=req.intra_weight,
                degree_exponent=req.degree_exponent,
                seed=req.seed,
            )
        else:
            from ..diagnostics import borgatti_everett

            g, communities, role_part = borgatti_everett()
            roles = _partition_out(role_part)
        return S.GenerateResponse(
            graph=S.GraphPayload.from_graph(g),
            communities=_partition_out(communities) if communities else None,
            roles=roles,
        )

    @app.post("/walks/sample", response_model=S.WalkResponse)
    async def walks_sample(req: S.WalkRequest) -> S.WalkResponse:
        corpus = sample_walks(
            req.graph.to_graph(),
            length=req.length,
            walks_per_node=req.walks_per_node,
            seed=req.seed,
        )
        return S.WalkResponse(
            walks=[[int(t) for t in w] for w in corpus.walks],
            starts=[int(s) for s in corpus.starts],
            length=corpus.length,
            walks_per_node=corpus.walks_per_node,
            seed=corpus.seed,
            num_short=corpus.num_short,
        )

    @app.post("/walks/containment", response_model=S.ContainmentResponse)
    async def walks_containment(req: S.ContainmentRequest) -> S.ContainmentResponse:
        report = containment_report(
            req.graph.to_graph(),
            req.community,
            ell=req.ell,
            trials=req.trials,
            seed=req.seed,
            start=req.start,
        )
        return S.ContainmentResponse(**report)

    @app.post("/diffuse", response_model=S.DiffuseResponse)
    async def diffuse_route(req: S.DiffuseRequest) -> S.DiffuseResponse:
        g = req.graph.to_graph()
        if req.features is not None:
            X = np.asarray(req.features, dtype=np.float64)
        else:
            X = np.random.default_rng(req.seed).uniform(size=(g.n, req.feature_columns))
        report = None
        if req.verify == "rw":
            rep = verify_convergence_rw(g, X, t_max=req.max_steps, tol=req.tol)
            report = rep.to_dict()
            matrix = rep.limit
        elif req.verify == "sym":
            rep = verify_convergence_sym(g, X, t_max=req.max_steps, tol=req.tol)
            report = rep.to_dict()
            matrix = rep.limit
        else:
            config = DiffusionConfig(
                operator=req.operator,
                steps=req.steps,
                theta=req.theta,
                i_minus_l=req.i_minus_l,
                aggregator=req.aggregator,
                activation=req.activation,
                seed=req.seed,
            )
            matrix = diffuse(g, X, config)
        return S.DiffuseResponse(matrix=S.matrix_to_lists(matrix), report=report)

    @app.post("/graphlets/orbits", response_model=S.OrbitsResponse)
    async def orbits(req: S.OrbitsRequest) -> S.OrbitsResponse:
        g = req.graph.to_graph()
        counts = count_orbits(g)
        totals = count_graphlets_global(g)
        return S.OrbitsResponse(
            counts=[[int(v) for v in row] for row in counts],
            orbit_names=list(ORBIT_NAMES),
            graphlet_totals={name: int(totals[i]) for i, name in enumerate(GRAPHLET_NAMES)},
        )

    @app.post("/graphlets/motifgraph", response_model=S.MotifGraphResponse)
    async def motifgraph(req: S.MotifGraphRequest) -> S.MotifGraphResponse:
        mg = motif_graph(
            req.graph.to_graph(),
            req.motif,
            min_count=req.min_count,
            all_pairs=req.all_pairs,
        )
        return S.MotifGraphResponse(
            pairs=[(u, v, int(w)) for (u, v), w in sorted(mg.pair_weights.items())],
            component_labels=[int(x) for x in mg.component_labels],
            num_components=mg.num_components,
            total_instances=mg.total_instances,
        )

    @app.post("/embed", response_model=S.EmbedResponse)
    async def embed(req: S.EmbedRequest) -> S.EmbedResponse:
        g = req.graph.to_graph()
        if req.mechanism == "deepwalk":
            emb = embed_community(
                g,
                d=req.d,
                length=req.length,
                walks_per_node=req.walks_per_node,
                window=req.window,
                seed=req.seed,
            )
        elif req.mechanism == "role2vec":
            emb = embed_role(
                g,
                d=req.d,
                length=req.length,
                walks_per_node=req.walks_per_node,
                window=req.window,
                seed=req.seed,
                bins_per_feature=req.bins_per_feature,
            )
        elif req.mechanism == "implicit":
            emb = embed_implicit(g, k=req.k, d=req.d, mode=req.mode)
        else:
            emb = embed_factorized_roles(g, k_roles=req.k_roles, depth=req.depth, seed=req.seed)
        return S.EmbedResponse(
            vectors=S.matrix_to_lists(emb.vectors),
            provenance=emb.provenance,
            d=emb.d,
            config={k: (v.item() if isinstance(v, np.generic) else v) for k, v in emb.config.items()},
        )

    @app.post("/equivalence", response_model=S.EquivalenceResponse)
    async def equivalence(req: S.EquivalenceRequest) -> S.EquivalenceResponse:
        g = req.graph.to_graph()
        if req.kind in ("structural", "regular", "exact"):
            if req.kind == "structural":
                part = structural_equivalence_partition(g, closed=req.closed)
            elif req.kind == "regular":
                part = regular_equivalence_partition(g)
            else:
                part = exact_role_partition(g)
            return S.EquivalenceResponse(partition=_partition_out(part))
        if req.roles is None:
            from ..errors import ValidationError

            raise ValidationError("verification needs a roles labeling")
        labels = np.asarray(req.roles, dtype=np.int64)
        if req.kind == "verify-exact":
            report = verify_exact_role_assignment(g, labels)
        else:
            report = verify_strong_structural_assignment(g, labels, reading=req.reading)
        return S.EquivalenceResponse(report=report.to_dict())

    @app.post("/diagnose")
    async def diagnose_route(req: S.DiagnoseRequest) -> dict:
        g = req.graph.to_graph()
        emb = Embedding(
            vectors=np.asarray(req.vectors, dtype=np.float64),
            provenance=req.provenance,
            d=len(req.vectors[0]) if req.vectors else 0,
        )
        report = diagnose(
            g,
            emb,
            np.asarray(req.communities, dtype=np.int64),
            np.asarray(req.roles, dtype=np.int64),
            tau=req.tau,
            rho=req.rho,
        )
        return report.to_dict()

    @app.post("/suite", response_model=S.SuiteResponse)
    async def suite(req: S.SuiteRequest) -> S.SuiteResponse:
        records = scenario_suite(seed=req.seed)
        cells = [
            S.SuiteCell(
                scenario=r["scenario"],
                mechanism=r["mechanism"],
                report=r["report"].to_dict(),
                expected=r["expected"],
            )
            for r in records
        ]
        ok = all(
            r["report"].verdict == r["expected"] for r in records if r["expected"] is not None
        )
        return S.SuiteResponse(
            records=cells, matrix=verdict_matrix(records), all_expected_match=ok
        )

    return app


app = create_app()
