"""Command-line front end.

Every subcommand is a thin client of the HTTP service: requests are
serialized to JSON and posted either to an in-process copy of the app
(the default, no network involved) or to a running server given with
--server. Responses are written to files under --out-dir.
"""

from __future__ import annotations

import argparse
import asyncio
import json
import sys
from pathlib import Path

import httpx
import numpy as np

from . import io as rio
from .embedding import Embedding
from .errors import RolescopeError
from .features import FeatureMatrix
from .graphs import Graph, Partition, load_edge_list
from .service.app import create_app
from .service.schemas import GraphPayload
from .walks import WalkCorpus


def _post(args, path: str, payload: dict) -> dict:
    if args.server:
        with httpx.Client(base_url=args.server, timeout=600.0) as client:
            response = client.post(path, json=payload)
    else:

        async def _go():
            transport = httpx.ASGITransport(app=create_app())
            async with httpx.AsyncClient(
                transport=transport, base_url="http://rolescope.internal", timeout=600.0
            ) as client:
                return await client.post(path, json=payload)

        response = asyncio.run(_go())
    if response.status_code != 200:
        try:
            detail = response.json().get("detail", response.text)
        except ValueError:
            detail = response.text
        raise SystemExit(f"error: {detail}")
    return response.json()


def _graph_payload(path) -> dict:
    g = load_edge_list(path)
    return GraphPayload.from_graph(g).model_dump()


def _out(args, name: str) -> Path:
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / name


def _write_matrix(args, name: str, values, columns) -> Path:
    """Write a node-indexed matrix in the requested format."""
    values = np.asarray(values, dtype=np.float64)
    if args.format == "json":
        path = _out(args, f"{name}.json")
        with open(path, "w") as fh:
            json.dump({"columns": list(columns), "values": values.tolist()}, fh, indent=2)
            fh.write("\n")
        return path
    path = _out(args, f"{name}.{args.format}")
    rio.write_feature_matrix(path, FeatureMatrix(values, tuple(columns)), fmt=args.format)
    return path


def _cmd_generate(args) -> None:
    payload = {
        "kind": args.kind,
        "m": args.m,
        "leaves": args.leaves,
        "left": args.left,
        "right": args.right,
        "blocks": [int(b) for b in args.blocks.split(",")] if args.blocks else [50, 50],
        "intra_weight": args.intra_weight,
        "degree_exponent": args.degree_exponent,
        "seed": args.seed,
    }
    data = _post(args, "/generate", payload)
    graph = data["graph"]
    g = Graph.from_edges(
        graph["num_nodes"], [tuple(e) for e in graph["edges"]], weights=graph["weights"]
    )
    edge_path = _out(args, "graph.edges")
    rio.write_edge_list(edge_path, g)
    written = [str(edge_path)]
    for key, fname in (("communities", "communities.tsv"), ("roles", "roles.tsv")):
        if data.get(key):
            part = Partition(np.array(data[key]["labels"], dtype=np.int64), data[key]["k"])
            path = _out(args, fname)
            rio.write_partition(path, part)
            written.append(str(path))
    print(f"{args.kind}: {g.n} nodes, {g.num_edges} edges -> " + ", ".join(written))


def _cmd_walks(args) -> None:
    graph = _graph_payload(args.graph)
    if args.community:
        payload = {
            "graph": graph,
            "community": [int(x) for x in args.community.split(",")],
            "ell": args.ell,
            "trials": args.trials,
            "seed": args.seed,
            "start": args.start,
        }
        data = _post(args, "/walks/containment", payload)
        path = _out(args, "containment.json")
        rio.write_report(path, data)
        print(
            f"containment: phi={data['phi']:.4f} empirical={data['empirical']:.4f} "
            f"bounds=({data['basic_bound']:.4f}, {data['improved_bound']:.4f}) -> {path}"
        )
        return
    payload = {
        "graph": graph,
        "length": args.length,
        "walks_per_node": args.per_node,
        "seed": args.seed,
    }
    data = _post(args, "/walks/sample", payload)
    corpus = WalkCorpus(
        walks=[np.array(w, dtype=np.int64) for w in data["walks"]],
        length=data["length"],
        walks_per_node=data["walks_per_node"],
        seed=data["seed"],
        starts=np.array(data["starts"], dtype=np.int64),
        num_short=data["num_short"],
    )
    path = _out(args, "walks.txt")
    rio.write_walks(path, corpus)
    print(f"{len(corpus.walks)} walks of length {corpus.length} -> {path}")


def _cmd_diffuse(args) -> None:
    payload = {
        "graph": _graph_payload(args.graph),
        "feature_columns": args.columns,
        "operator": args.operator,
        "steps": args.steps,
        "theta": args.theta,
        "i_minus_l": args.i_minus_l,
        "aggregator": args.aggregator,
        "activation": args.activation,
        "seed": args.seed,
        "verify": args.verify,
        "tol": args.tol,
        "max_steps": args.max_steps,
    }
    if args.features:
        with open(args.features) as fh:
            header = fh.readline()
            rows = [[float(v) for v in line.split(",")[1:]] for line in fh if line.strip()]
        payload["features"] = rows
        del header
    data = _post(args, "/diffuse", payload)
    matrix = np.asarray(data["matrix"])
    cols = [f"f_{j}" for j in range(matrix.shape[1])]
    path = _write_matrix(args, "diffused", matrix, cols)
    msg = f"{args.operator if args.verify == 'none' else args.verify}: wrote {path}"
    if data.get("report"):
        rpath = _out(args, "convergence.json")
        rio.write_report(rpath, data["report"])
        msg += f", report {rpath} (t={data['report']['t_reached']})"
    print(msg)


def _cmd_graphlets(args) -> None:
    data = _post(args, "/graphlets/orbits", {"graph": _graph_payload(args.graph)})
    counts = np.array(data["counts"], dtype=np.int64)
    if args.format == "json":
        path = _out(args, "orbits.json")
        with open(path, "w") as fh:
            json.dump(
                {"columns": data["orbit_names"], "values": counts.tolist()}, fh, indent=2
            )
            fh.write("\n")
    else:
        path = _out(args, f"orbits.{args.format}")
        rio.write_orbit_counts(path, counts, fmt=args.format)
    totals_path = _out(args, "graphlets.json")
    rio.write_report(totals_path, data["graphlet_totals"])
    print(f"orbit counts for {counts.shape[0]} nodes -> {path}, totals -> {totals_path}")


def _cmd_motifgraph(args) -> None:
    payload = {
        "graph": _graph_payload(args.graph),
        "motif": args.motif,
        "min_count": args.min_count,
        "all_pairs": args.all_pairs,
    }
    data = _post(args, "/graphlets/motifgraph", payload)
    edge_path = _out(args, "motif.edges")
    with open(edge_path, "w") as fh:
        for u, v, w in data["pairs"]:
            fh.write(f"{u} {v} {w}\n")
    comp_path = _out(args, "motif_components.tsv")
    with open(comp_path, "w") as fh:
        fh.write(f"# components={data['num_components']}\n")
        for node, label in enumerate(data["component_labels"]):
            fh.write(f"{node}\t{label}\n")
    print(
        f"{args.motif}: {data['total_instances']} instances, "
        f"{data['num_components']} components -> {edge_path}, {comp_path}"
    )


def _cmd_embed(args) -> None:
    payload = {
        "graph": _graph_payload(args.graph),
        "mechanism": args.mechanism,
        "d": args.d,
        "length": args.length,
        "walks_per_node": args.per_node,
        "window": args.window,
        "seed": args.seed,
        "bins_per_feature": args.bins,
        "k": args.k,
        "mode": args.mode,
        "k_roles": args.k_roles,
        "depth": args.depth,
    }
    data = _post(args, "/embed", payload)
    emb = Embedding(
        vectors=np.asarray(data["vectors"], dtype=np.float64),
        provenance=data["provenance"],
        d=data["d"],
        config=data["config"],
    )
    path = _out(args, "embedding.tsv")
    rio.write_embedding(path, emb)
    print(f"{data['provenance']} embedding ({emb.n} x {emb.d}) -> {path}")


def _cmd_equiv(args) -> None:
    payload = {
        "graph": _graph_payload(args.graph),
        "kind": args.kind,
        "closed": args.closed,
        "reading": args.reading,
    }
    if args.roles:
        payload["roles"] = [int(x) for x in rio.read_partition(args.roles).labels]
    data = _post(args, "/equivalence", payload)
    if data.get("partition"):
        part = Partition(
            np.array(data["partition"]["labels"], dtype=np.int64), data["partition"]["k"]
        )
        path = _out(args, f"{args.kind}_partition.tsv")
        rio.write_partition(path, part)
        print(f"{args.kind}: {part.k} classes -> {path}")
    else:
        path = _out(args, "equivalence.json")
        rio.write_report(path, data["report"])
        print(f"{data['report']['kind']}: holds={data['report']['holds']} -> {path}")


def _cmd_diagnose(args) -> None:
    emb = rio.read_embedding(args.embedding)
    payload = {
        "graph": _graph_payload(args.graph),
        "vectors": emb.vectors.tolist(),
        "provenance": emb.provenance,
        "communities": [int(x) for x in rio.read_partition(args.communities).labels],
        "roles": [int(x) for x in rio.read_partition(args.roles).labels],
        "tau": args.tau,
        "rho": args.rho,
    }
    data = _post(args, "/diagnose", payload)
    path = _out(args, "diagnosis.json")
    rio.write_report(path, data)
    print(
        f"verdict: {data['verdict']} (community={data['community_score']:.3f}, "
        f"role={data['role_score']:.3f}, proximity={data['proximity_correlation']:.3f}, "
        f"transfer={data['transfer_score']:.3f}) -> {path}"
    )


def _cmd_suite(args) -> None:
    data = _post(args, "/suite", {"seed": args.seed})
    path = _out(args, "suite.json")
    rio.write_report(path, {"records": data["records"], "seed": args.seed})
    print(data["matrix"])
    expected = [r for r in data["records"] if r["expected"]]
    hits = sum(1 for r in expected if r["report"]["verdict"] == r["expected"])
    print(f"\nexpected verdicts matched: {hits}/{len(expected)} -> {path}")
    if hits != len(expected):
        raise SystemExit(1)


def _cmd_serve(args) -> None:
    import uvicorn

    uvicorn.run("rolescope.service.app:app", host=args.host, port=args.port)


def build_parser() -> argparse.ArgumentParser:
    # The global options live in a parent parser with SUPPRESS defaults so
    # they are accepted both before and after the subcommand; real defaults
    # are injected through the namespace in main().
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--seed", type=int, default=argparse.SUPPRESS, help="seed for anything stochastic"
    )
    common.add_argument(
        "--out-dir", default=argparse.SUPPRESS, help="directory for output files"
    )
    common.add_argument(
        "--format",
        choices=("csv", "json", "tsv"),
        default=argparse.SUPPRESS,
        help="table output format",
    )
    common.add_argument(
        "--server",
        default=argparse.SUPPRESS,
        help="base URL of a running service; default runs the service in-process",
    )

    parser = argparse.ArgumentParser(
        prog="rolescope",
        description="Community and role embedding mechanisms with diagnostics.",
        parents=[common],
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_parser(name, help):
        return sub.add_parser(name, help=help, parents=[common])

    p = add_parser("generate", "write a synthetic graph")
    p.add_argument(
        "--kind",
        required=True,
        choices=(
            "barbell",
            "star",
            "clique",
            "complete-bipartite",
            "chung-lu",
            "borgatti-everett",
        ),
    )
    p.add_argument("--m", type=int, default=5, help="clique size (barbell, clique)")
    p.add_argument("--leaves", type=int, default=4, help="leaf count (star)")
    p.add_argument("--left", type=int, default=3, help="left side (complete-bipartite)")
    p.add_argument("--right", type=int, default=4, help="right side (complete-bipartite)")
    p.add_argument("--blocks", default=None, help="comma-separated block sizes (chung-lu)")
    p.add_argument("--intra-weight", type=float, default=0.9)
    p.add_argument("--degree-exponent", type=float, default=2.5)
    p.set_defaults(func=_cmd_generate)

    p = add_parser("walks", "sample walks or run a containment experiment")
    p.add_argument("--graph", required=True)
    p.add_argument("--length", type=int, default=10)
    p.add_argument("--per-node", type=int, default=10)
    p.add_argument("--community", default=None, help="comma-separated node ids")
    p.add_argument("--ell", type=int, default=4)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--start", choices=("degree", "uniform"), default="degree")
    p.set_defaults(func=_cmd_walks)

    p = add_parser("diffuse", "run a feature diffusion operator")
    p.add_argument("--graph", required=True)
    p.add_argument(
        "--operator",
        choices=("random-walk", "symmetric", "theta-laplacian", "gcn-step", "aggregate"),
        default="random-walk",
    )
    p.add_argument("--steps", type=int, default=1)
    p.add_argument("--theta", type=float, default=0.5)
    p.add_argument("--i-minus-l", action="store_true")
    p.add_argument("--aggregator", choices=("sum", "mean", "min", "max"), default="mean")
    p.add_argument("--activation", choices=("relu", "linear"), default="relu")
    p.add_argument("--columns", type=int, default=3, help="seeded feature columns")
    p.add_argument("--features", default=None, help="CSV with node_id first column")
    p.add_argument("--verify", choices=("none", "rw", "sym"), default="none")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-steps", type=int, default=10000)
    p.set_defaults(func=_cmd_diffuse)

    p = add_parser("graphlets", "count graphlet orbits")
    p.add_argument("--graph", required=True)
    p.set_defaults(func=_cmd_graphlets)

    p = add_parser("motifgraph", "build the weighted motif graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--motif", default="4-clique")
    p.add_argument("--min-count", type=int, default=1)
    p.add_argument("--all-pairs", action="store_true")
    p.set_defaults(func=_cmd_motifgraph)

    p = add_parser("embed", "embed nodes with one of the mechanisms")
    p.add_argument("--graph", required=True)
    p.add_argument(
        "--mechanism",
        choices=("deepwalk", "role2vec", "implicit", "roles-nmf"),
        default="deepwalk",
    )
    p.add_argument("--d", type=int, default=8)
    p.add_argument("--length", type=int, default=10)
    p.add_argument("--per-node", type=int, default=10)
    p.add_argument("--window", type=int, default=3)
    p.add_argument("--bins", type=int, default=4, help="bins per feature (role2vec)")
    p.add_argument("--k", type=int, default=3, help="walk-matrix power (implicit)")
    p.add_argument("--mode", choices=("summed", "per-power"), default="summed")
    p.add_argument("--k-roles", type=int, default=4, help="roles (roles-nmf)")
    p.add_argument("--depth", type=int, default=1, help="recursion depth (roles-nmf)")
    p.set_defaults(func=_cmd_embed)

    p = add_parser("equiv", "compute or verify node equivalences")
    p.add_argument("--graph", required=True)
    p.add_argument(
        "--kind",
        required=True,
        choices=("structural", "regular", "exact", "verify-exact", "verify-strong"),
    )
    p.add_argument("--closed", action="store_true", help="closed neighborhoods (structural)")
    p.add_argument("--roles", default=None, help="partition TSV to verify")
    p.add_argument(
        "--reading", choices=("universal", "edge-consistency"), default="universal"
    )
    p.set_defaults(func=_cmd_equiv)

    p = add_parser("diagnose", "score an embedding against ground truth")
    p.add_argument("--graph", required=True)
    p.add_argument("--embedding", required=True, help="embedding TSV")
    p.add_argument("--communities", required=True, help="partition TSV")
    p.add_argument("--roles", required=True, help="partition TSV")
    p.add_argument("--tau", type=float, default=0.1)
    p.add_argument("--rho", type=float, default=0.3)
    p.set_defaults(func=_cmd_diagnose)

    p = add_parser("suite", "run the scenario suite and print the verdict matrix")
    p.set_defaults(func=_cmd_suite)

    p = add_parser("serve", "run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    defaults = argparse.Namespace(seed=0, out_dir=".", format="csv", server=None)
    args = parser.parse_args(argv, namespace=defaults)
    try:
        args.func(args)
    except RolescopeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
