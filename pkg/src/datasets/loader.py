"""
Readers and writers for the tab-separated graph, partition, score and label files.

nodes file:  id <TAB> attr_1 ... attr_d [<TAB> label]
edges file:  src <TAB> dst
"""

import csv
import json
import logging
import re
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from src.core.errors import DataError, GraphSizeError, ParseError, UnknownNodeError
from src.graph.attributed import AttributedGraph
from src.stability.partition import Partition

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_float(value: float) -> str:
    """Shortest decimal string that round-trips to the same float"""
    return repr(float(value))


def _check_field_counts(path: Path, sep: str) -> None:
    """Every non-blank row must have exactly as many fields as the header"""
    with open(path, "r", newline="") as f:
        reader = csv.reader(f, delimiter=sep)
        expected = None
        for row in reader:
            if not row:
                continue
            if expected is None:
                expected = len(row)
            elif len(row) != expected:
                raise ParseError(f"wrong column count: expected {expected} fields, got {len(row)}",
                                 path=str(path), line=reader.line_num)


def _read_table(path: PathLike, expected: Optional[Sequence[str]] = None,
                sep: str = "\t") -> pd.DataFrame:
    """Read a delimited file with a header row as strings, translating parser errors"""
    path = Path(path)
    if not path.exists():
        raise DataError(f"file not found: {path}")
    _check_field_counts(path, sep)
    try:
        frame = pd.read_csv(path, sep=sep, dtype=str, keep_default_na=False, index_col=False,
                            engine="python", skip_blank_lines=True)
    except pd.errors.EmptyDataError:
        raise ParseError("file is empty", path=str(path), line=1) from None
    except pd.errors.ParserError as exc:
        match = re.search(r"line (\d+)", str(exc))
        line = int(match.group(1)) if match else None
        raise ParseError(f"malformed row ({exc})", path=str(path), line=line) from None

    frame.columns = [str(c).strip() for c in frame.columns]
    if expected is not None and list(frame.columns[:len(expected)]) != list(expected):
        raise ParseError(f"header must start with {', '.join(expected)}", path=str(path), line=1)
    return frame.apply(lambda col: col.str.strip())


def _parse_floats(frame: pd.DataFrame, path: PathLike) -> np.ndarray:
    """Exact decimal parsing of attribute cells; first bad cell reported by line"""
    values = frame.to_numpy(dtype=object)
    try:
        parsed = values.astype(float)
    except ValueError:
        parsed = None
    if parsed is not None and np.all(np.isfinite(parsed)):
        return parsed
    for row, col in np.ndindex(values.shape):
        try:
            ok = np.isfinite(float(values[row, col]))
        except ValueError:
            ok = False
        if not ok:
            raise ParseError(
                f"non-numeric attribute {frame.columns[col]}={values[row, col]!r}",
                path=str(path), line=row + 2,
            )
    return parsed


def load_attributed_graph(nodes_path: PathLike, edges_path: PathLike) -> AttributedGraph:
    """
    Load an attributed graph from a nodes TSV and an edges TSV.

    Duplicate undirected edges and self-loops are dropped with a warning; the
    count is kept in `graph.dropped_edges`. Node order follows the nodes file.

    Raises:
        ParseError: malformed row (with its line number)
        UnknownNodeError: edge endpoint not declared in the nodes file
        GraphSizeError: fewer than two nodes
    """
    nodes = _read_table(nodes_path, expected=["id"])
    columns = list(nodes.columns[1:])
    has_labels = bool(columns) and columns[-1] == "label"
    attribute_columns = columns[:-1] if has_labels else columns
    if not attribute_columns:
        raise ParseError("nodes file needs at least one attribute column", path=str(nodes_path), line=1)
    if len(nodes) < 2:
        raise GraphSizeError(f"graph needs at least 2 nodes, got {len(nodes)}")

    node_ids = nodes["id"].tolist()
    attributes = _parse_floats(nodes[attribute_columns], nodes_path)

    labels = None
    if has_labels:
        raw = nodes["label"]
        invalid = ~raw.isin(["0", "1"])
        if invalid.any():
            row = int(np.flatnonzero(invalid.to_numpy())[0])
            raise ParseError(f"label must be 0 or 1, got {raw.iloc[row]!r}",
                             path=str(nodes_path), line=row + 2)
        labels = raw.astype(int).to_numpy()

    if len(set(node_ids)) != len(node_ids):
        seen = set()
        for row, node in enumerate(node_ids):
            if node in seen:
                raise ParseError(f"duplicate node id {node!r}", path=str(nodes_path), line=row + 2)
            seen.add(node)

    index = {node: i for i, node in enumerate(node_ids)}
    edge_frame = _read_table(edges_path, expected=["src", "dst"])
    if edge_frame.shape[1] != 2:
        raise ParseError("edges file must have exactly the columns src, dst", path=str(edges_path), line=1)

    pairs = []
    for row, (src, dst) in enumerate(edge_frame.itertuples(index=False, name=None)):
        for endpoint in (src, dst):
            if endpoint not in index:
                raise UnknownNodeError(
                    f"{edges_path}:{row + 2}: edge references unknown node id {endpoint!r}"
                )
        pairs.append((index[src], index[dst]))

    edges = np.array(pairs, dtype=np.int64).reshape(-1, 2)
    self_loops = edges[:, 0] == edges[:, 1]
    edges = np.sort(edges[~self_loops], axis=1)
    unique_edges = np.unique(edges, axis=0) if len(edges) else edges
    dropped = int(self_loops.sum()) + len(edges) - len(unique_edges)
    if dropped:
        logger.warning("dropped %d self-loop/duplicate edge rows from %s", dropped, edges_path)

    return AttributedGraph(
        node_ids=tuple(node_ids),
        attributes=attributes,
        edges=unique_edges,
        labels=labels,
        attribute_names=tuple(attribute_columns),
        dropped_edges=dropped,
    )


def write_attributed_graph(graph: AttributedGraph, nodes_path: PathLike, edges_path: PathLike) -> None:
    """Write a graph back in the loader's format (round-trip exact floats)"""
    nodes = pd.DataFrame({"id": list(graph.node_ids)})
    for k, name in enumerate(graph.attribute_names):
        nodes[name] = [format_float(v) for v in graph.attributes[:, k]]
    if graph.labels is not None:
        nodes["label"] = [str(int(v)) for v in graph.labels]
    nodes.to_csv(nodes_path, sep="\t", index=False)

    edges = pd.DataFrame({
        "src": [graph.node_ids[u] for u in graph.edges[:, 0]],
        "dst": [graph.node_ids[v] for v in graph.edges[:, 1]],
    })
    edges.to_csv(edges_path, sep="\t", index=False)


def write_partition(partition: Partition, node_ids: Sequence[str], path: PathLike) -> None:
    frame = pd.DataFrame({"id": list(node_ids), "context": partition.assignment})
    frame.to_csv(path, sep="\t", index=False)


def load_partition(path: PathLike, graph: AttributedGraph) -> Partition:
    """
    Read a partition as TSV (id, context) or as JSON ({"assignment": {id: context}}).
    """
    path = Path(path)
    if path.suffix == ".json":
        if not path.exists():
            raise DataError(f"file not found: {path}")
        try:
            with open(path, "r") as f:
                payload = json.load(f)
        except json.JSONDecodeError as exc:
            raise ParseError(str(exc), path=str(path), line=exc.lineno) from None
        mapping = {str(k): int(v) for k, v in payload.get("assignment", {}).items()}
    else:
        frame = _read_table(path, expected=["id", "context"])
        contexts = pd.to_numeric(frame["context"], errors="coerce")
        if contexts.isna().any():
            row = int(np.flatnonzero(contexts.isna().to_numpy())[0])
            raise ParseError("context must be an integer", path=str(path), line=row + 2)
        mapping = dict(zip(frame["id"], contexts.astype(int)))

    missing = [node for node in graph.node_ids if node not in mapping]
    extra = [node for node in mapping if node not in set(graph.node_ids)]
    if missing or extra:
        raise UnknownNodeError(
            f"partition ids do not match graph ids (missing {len(missing)}, unknown {len(extra)})"
        )
    return Partition(np.array([mapping[node] for node in graph.node_ids]))


def load_scores(path: PathLike) -> pd.DataFrame:
    """
    Read per-node scores: columns id, score, optionally flagged (report CSV).
    """
    sep = "\t" if str(path).endswith(".tsv") else ","
    frame = _read_table(path, expected=["id"], sep=sep)
    if "score" not in frame.columns:
        raise ParseError("scores file needs a 'score' column", path=str(path), line=1)
    out = pd.DataFrame({"id": frame["id"].astype(str)})
    out["score"] = pd.to_numeric(frame["score"], errors="coerce")
    if out["score"].isna().any():
        row = int(np.flatnonzero(out["score"].isna().to_numpy())[0])
        raise ParseError("non-numeric score", path=str(path), line=row + 2)
    if "flagged" in frame.columns:
        out["flagged"] = frame["flagged"].astype(str).str.lower().isin(["1", "true"])
    return out.set_index("id")


def load_labels(path: PathLike) -> pd.Series:
    """Read ground-truth labels: columns id, label (0/1)"""
    frame = _read_table(path, expected=["id", "label"])
    invalid = ~frame["label"].isin(["0", "1"])
    if invalid.any():
        row = int(np.flatnonzero(invalid.to_numpy())[0])
        raise ParseError("label must be 0 or 1", path=str(path), line=row + 2)
    return frame.set_index("id")["label"].astype(int)


def write_labels(node_ids: Sequence[str], labels: np.ndarray, path: PathLike) -> None:
    pd.DataFrame({"id": list(node_ids), "label": np.asarray(labels, dtype=int)}).to_csv(
        path, sep="\t", index=False
    )


def align_scores_labels(scores: pd.DataFrame, labels: pd.Series) -> Tuple[pd.DataFrame, np.ndarray]:
    """
    Order scores like labels; both files must cover exactly the same ids.
    """
    score_ids = set(scores.index)
    label_ids = set(labels.index)
    if score_ids != label_ids:
        only_scores = sorted(score_ids - label_ids)[:5]
        only_labels = sorted(label_ids - score_ids)[:5]
        raise UnknownNodeError(
            f"score and label ids differ (only in scores: {only_scores}, only in labels: {only_labels})"
        )
    ordered = scores.loc[labels.index]
    return ordered, labels.to_numpy()


class DatasetLoader:
    """
    Named datasets stored as <name>.nodes.tsv / <name>.edges.tsv pairs.
    """

    def __init__(self, datasets_dir: str = "datasets"):
        self.datasets_dir = Path(datasets_dir)

    def paths(self, dataset_name: str) -> Tuple[Path, Path]:
        return (self.datasets_dir / f"{dataset_name}.nodes.tsv",
                self.datasets_dir / f"{dataset_name}.edges.tsv")

    def load_dataset(self, dataset_name: str) -> AttributedGraph:
        nodes_path, edges_path = self.paths(dataset_name)
        if not nodes_path.exists():
            available = ", ".join(self.list_datasets()) or "none"
            raise DataError(f"Dataset not found: {nodes_path} (available: {available})")
        return load_attributed_graph(nodes_path, edges_path)

    def list_datasets(self) -> List[str]:
        """List all datasets with both files present"""
        if not self.datasets_dir.exists():
            return []
        names = []
        for file in self.datasets_dir.glob("*.nodes.tsv"):
            name = file.name[: -len(".nodes.tsv")]
            if self.paths(name)[1].exists():
                names.append(name)
        return sorted(names)

    def get_dataset_info(self, dataset_name: str) -> Dict[str, Any]:
        """Basic size information about a dataset"""
        graph = self.load_dataset(dataset_name)
        return {
            "name": dataset_name,
            "nodes": graph.node_count,
            "edges": graph.edge_count,
            "attributes": list(graph.attribute_names),
            "labelled": graph.labels is not None,
            "anomalies": None if graph.labels is None else int(graph.labels.sum()),
        }
