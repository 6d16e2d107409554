"""File formats: TSV partitions, CSV feature tables, walk corpora, TSV
embeddings with JSON sidecars, motif-graph edge lists, and JSON reports.

All writers take a path and overwrite it; readers validate enough to give
line-numbered errors on malformed input.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .embedding import Embedding
from .errors import ParseError, ValidationError
from .features import FeatureMatrix
from .graphlets import ORBIT_NAMES, MotifGraph
from .graphs import Graph, Partition
from .roles import RoleFactorization, TypeMapping
from .walks import WalkCorpus

__all__ = [
    "write_edge_list",
    "write_partition",
    "read_partition",
    "write_feature_matrix",
    "write_orbit_counts",
    "write_walks",
    "read_walks",
    "write_embedding",
    "read_embedding",
    "write_motif_graph",
    "write_type_mapping",
    "write_role_factorization",
    "write_report",
]

_DELIMS = {"csv": ",", "tsv": "\t"}


def _delim(fmt: str) -> str:
    if fmt not in _DELIMS:
        raise ValidationError(f"format must be one of {tuple(_DELIMS)}")
    return _DELIMS[fmt]


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def write_edge_list(path, g: Graph) -> None:
    """One edge per line as `u v` (plus the weight when weighted)."""
    src, dst, w = g.edge_array()
    with open(path, "w") as fh:
        for i in range(len(src)):
            if g.is_weighted:
                fh.write(f"{src[i]} {dst[i]} {w[i]:g}\n")
            else:
                fh.write(f"{src[i]} {dst[i]}\n")


def write_partition(path, partition: Partition) -> None:
    """TSV `node_id<TAB>class_id` under a `# k=<count>` header."""
    with open(path, "w") as fh:
        fh.write(f"# k={partition.k}\n")
        for node, label in enumerate(partition.labels):
            fh.write(f"{node}\t{label}\n")


def read_partition(path) -> Partition:
    labels: dict = {}
    k = None
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "k=" in line:
                    k = int(line.split("k=")[1])
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise ParseError("expected node_id<TAB>class_id", line=lineno)
            try:
                labels[int(parts[0])] = int(parts[1])
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
    if not labels:
        raise ParseError("no rows found", line=1)
    if sorted(labels) != list(range(len(labels))):
        raise ValidationError("partition rows must cover node ids 0..n-1")
    arr = np.array([labels[i] for i in range(len(labels))], dtype=np.int64)
    part = Partition.from_labels(arr)
    if k is not None and part.k != k:
        raise ValidationError(f"header says k={k} but rows define {part.k} classes")
    return part


def write_feature_matrix(path, fm: FeatureMatrix, fmt: str = "csv") -> None:
    """Delimited table with a header row; first column is node_id."""
    d = _delim(fmt)
    with open(path, "w") as fh:
        fh.write(d.join(["node_id", *fm.columns]) + "\n")
        for node in range(fm.n):
            row = d.join(f"{v:.12g}" for v in fm.values[node])
            fh.write(f"{node}{d}{row}\n")


def write_orbit_counts(path, counts: np.ndarray, fmt: str = "csv") -> None:
    """Orbit-count table headed by the canonical orbit names."""
    counts = np.asarray(counts)
    if counts.ndim != 2 or counts.shape[1] != len(ORBIT_NAMES):
        raise ValidationError(f"orbit counts must have {len(ORBIT_NAMES)} columns")
    d = _delim(fmt)
    with open(path, "w") as fh:
        fh.write(d.join(["node_id", *ORBIT_NAMES]) + "\n")
        for node in range(counts.shape[0]):
            fh.write(f"{node}{d}" + d.join(str(int(v)) for v in counts[node]) + "\n")


def write_walks(path, corpus: WalkCorpus) -> None:
    """One walk per line, space-separated token ids."""
    with open(path, "w") as fh:
        for walk in corpus.walks:
            fh.write(" ".join(str(int(t)) for t in walk) + "\n")


def read_walks(path) -> WalkCorpus:
    """Rebuild a corpus from its line format.

    Sampling metadata is not stored in the format, so the returned corpus
    carries placeholder values (walks_per_node=0, seed=-1).
    """
    walks = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                walks.append(np.array([int(t) for t in line.split()], dtype=np.int64))
            except ValueError as exc:
                raise ParseError(str(exc), line=lineno) from exc
    if not walks:
        raise ParseError("no walks found", line=1)
    length = max(len(w) for w in walks)
    starts = np.array([w[0] for w in walks], dtype=np.int64)
    return WalkCorpus(walks=walks, length=length, walks_per_node=0, seed=-1, starts=starts)


def write_embedding(path, emb: Embedding, sidecar_path=None) -> None:
    """TSV `node_id dim_0 ... dim_{d-1}` plus a provenance JSON sidecar."""
    path = Path(path)
    with open(path, "w") as fh:
        fh.write("\t".join(["node_id", *(f"dim_{j}" for j in range(emb.d))]) + "\n")
        for node in range(emb.n):
            row = "\t".join(f"{v:.17g}" for v in emb.vectors[node])
            fh.write(f"{node}\t{row}\n")
    sidecar = Path(sidecar_path) if sidecar_path else path.with_suffix(path.suffix + ".json")
    with open(sidecar, "w") as fh:
        json.dump(
            {"provenance": emb.provenance, "d": emb.d, "config": _jsonable(emb.config)},
            fh,
            indent=2,
        )
        fh.write("\n")


def read_embedding(path, sidecar_path=None) -> Embedding:
    path = Path(path)
    rows = {}
    d = None
    with open(path) as fh:
        header = fh.readline().strip().split("\t")
        if not header or header[0] != "node_id":
            raise ParseError("embedding header must start with node_id", line=1)
        d = len(header) - 1
        for lineno, raw in enumerate(fh, start=2):
            line = raw.strip()
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != d + 1:
                raise ParseError(f"expected {d + 1} columns", line=lineno)
            rows[int(parts[0])] = [float(v) for v in parts[1:]]
    if sorted(rows) != list(range(len(rows))):
        raise ValidationError("embedding rows must cover node ids 0..n-1")
    vectors = np.array([rows[i] for i in range(len(rows))], dtype=np.float64)
    sidecar = Path(sidecar_path) if sidecar_path else path.with_suffix(path.suffix + ".json")
    provenance, config = "deepwalk-style", {}
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
        provenance = meta.get("provenance", provenance)
        config = meta.get("config", {})
    return Embedding(vectors=vectors, provenance=provenance, d=d, config=config)


def write_motif_graph(edge_path, component_path, mg: MotifGraph) -> None:
    """Weighted pair list `u v weight` plus a node component TSV.

    Nodes in no motif instance carry component -1 in the TSV.
    """
    with open(edge_path, "w") as fh:
        for (u, v), w in sorted(mg.pair_weights.items()):
            fh.write(f"{u} {v} {w}\n")
    with open(component_path, "w") as fh:
        fh.write(f"# components={mg.num_components}\n")
        for node, label in enumerate(mg.component_labels):
            fh.write(f"{node}\t{label}\n")


def write_type_mapping(path, mapping: TypeMapping) -> None:
    with open(path, "w") as fh:
        json.dump(_jsonable(mapping.to_dict()), fh, indent=2)
        fh.write("\n")


def write_role_factorization(out_dir, fact: RoleFactorization, prefix: str = "roles") -> dict:
    """Membership and pattern CSVs plus a JSON metadata record.

    Returns the paths written, keyed by artifact name.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = {
        "memberships": out_dir / f"{prefix}_memberships.csv",
        "patterns": out_dir / f"{prefix}_patterns.csv",
        "metadata": out_dir / f"{prefix}_metadata.json",
    }
    k = fact.memberships.shape[1]
    with open(paths["memberships"], "w") as fh:
        fh.write(",".join(["node_id", *(f"role_{j}" for j in range(k))]) + "\n")
        for node in range(fact.memberships.shape[0]):
            fh.write(f"{node}," + ",".join(f"{v:.12g}" for v in fact.memberships[node]) + "\n")
    with open(paths["patterns"], "w") as fh:
        fh.write(",".join(["role_id", *(f"f_{j}" for j in range(fact.patterns.shape[1]))]) + "\n")
        for role in range(fact.patterns.shape[0]):
            fh.write(f"{role}," + ",".join(f"{v:.12g}" for v in fact.patterns[role]) + "\n")
    meta = {
        "k": k,
        "iters_run": fact.iters_run,
        "final_error": fact.final_error,
        "seed": fact.seed,
    }
    with open(paths["metadata"], "w") as fh:
        json.dump(_jsonable(meta), fh, indent=2)
        fh.write("\n")
    return {name: str(p) for name, p in paths.items()}


def write_report(path, report) -> None:
    """JSON for anything exposing to_dict(), or a plain dict."""
    payload = report.to_dict() if hasattr(report, "to_dict") else report
    if not isinstance(payload, dict):
        raise ValidationError("report must be a dict or expose to_dict()")
    with open(path, "w") as fh:
        json.dump(_jsonable(payload), fh, indent=2)
        fh.write("\n")
