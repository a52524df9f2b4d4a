"""
Attributed graphs, Gaussian edge weighting and the weighted Laplacian.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial.distance import pdist

from src.core.errors import (
    ConnectivityError,
    DataError,
    DegenerateSigmaError,
    GraphSizeError,
    ParameterError,
    UnknownNodeError,
)

logger = logging.getLogger(__name__)

DEFAULT_PAIR_BUDGET = 2_000_000


@dataclass(frozen=True, eq=False)
class AttributedGraph:
    """
    Undirected simple graph whose nodes carry d-dimensional attribute vectors.

    Node order is the order of node_ids; row u of `attributes` is f(u).
    `edges` is an E x 2 integer array with u < v in every row, rows sorted.

    Invariants (checked on construction):
    - N >= 2, d >= 1, finite attributes, unique node ids
    - no self-loops, no duplicate edges, endpoints < N
    """
    node_ids: Tuple[str, ...]
    attributes: np.ndarray
    edges: np.ndarray
    labels: Optional[np.ndarray] = None
    attribute_names: Tuple[str, ...] = ()
    dropped_edges: int = field(default=0, compare=False)

    def __post_init__(self):
        attributes = np.array(self.attributes, dtype=float)
        if attributes.ndim == 1:
            attributes = attributes.reshape(-1, 1)
        edges = np.array(self.edges, dtype=np.int64).reshape(-1, 2)

        n = len(self.node_ids)
        if n < 2:
            raise GraphSizeError(f"graph needs at least 2 nodes, got {n}")
        if attributes.shape[0] != n:
            raise DataError(f"attribute matrix has {attributes.shape[0]} rows for {n} nodes")
        if attributes.shape[1] < 1:
            raise DataError("nodes need at least one attribute")
        if not np.all(np.isfinite(attributes)):
            raise DataError("attribute matrix contains non-finite entries")
        if len(set(self.node_ids)) != n:
            raise DataError("node ids are not unique")

        if len(edges):
            if edges.min() < 0 or edges.max() >= n:
                raise UnknownNodeError("edge endpoint outside 0..N-1")
            if np.any(edges[:, 0] == edges[:, 1]):
                raise DataError("self-loops are not allowed")
            edges = np.sort(edges, axis=1)
            edges = edges[np.lexsort((edges[:, 1], edges[:, 0]))]
            if np.any(np.all(edges[1:] == edges[:-1], axis=1)):
                raise DataError("duplicate edges are not allowed")

        names = tuple(self.attribute_names) or tuple(
            f"attr_{k + 1}" for k in range(attributes.shape[1])
        )
        if len(names) != attributes.shape[1]:
            raise DataError("attribute_names length differs from attribute dimension")

        labels = self.labels
        if labels is not None:
            labels = np.asarray(labels, dtype=np.int64)
            if labels.shape != (n,):
                raise DataError("labels must have one entry per node")
            labels.setflags(write=False)

        attributes.setflags(write=False)
        edges.setflags(write=False)
        object.__setattr__(self, "node_ids", tuple(str(i) for i in self.node_ids))
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "attribute_names", names)

    @property
    def node_count(self) -> int:
        return len(self.node_ids)

    @property
    def attribute_dim(self) -> int:
        return self.attributes.shape[1]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def adjacency(self) -> sparse.csr_matrix:
        """Unweighted symmetric adjacency matrix"""
        return _symmetric_matrix(self.edges, np.ones(self.edge_count), self.node_count)

    def subgraph(self, nodes: Sequence[int]) -> "AttributedGraph":
        """Induced subgraph on the given node indices (kept in ascending order)"""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        remap = np.full(self.node_count, -1, dtype=np.int64)
        remap[nodes] = np.arange(len(nodes))
        keep = (remap[self.edges[:, 0]] >= 0) & (remap[self.edges[:, 1]] >= 0)
        return AttributedGraph(
            node_ids=tuple(self.node_ids[i] for i in nodes),
            attributes=self.attributes[nodes],
            edges=remap[self.edges[keep]],
            labels=None if self.labels is None else self.labels[nodes],
            attribute_names=self.attribute_names,
            dropped_edges=self.dropped_edges,
        )

    def with_attributes(self, attributes: np.ndarray,
                        names: Optional[Sequence[str]] = None) -> "AttributedGraph":
        """Same structure and labels, new attribute matrix"""
        if names is None:
            same_width = np.ndim(attributes) == 2 and np.shape(attributes)[1] == self.attribute_dim
            names = self.attribute_names if same_width else ()
        return AttributedGraph(
            node_ids=self.node_ids,
            attributes=attributes,
            edges=self.edges,
            labels=self.labels,
            attribute_names=tuple(names),
        )

    def with_labels(self, labels: Optional[np.ndarray]) -> "AttributedGraph":
        return AttributedGraph(
            node_ids=self.node_ids,
            attributes=self.attributes,
            edges=self.edges,
            labels=labels,
            attribute_names=self.attribute_names,
        )

    def index_of(self, node_id: str) -> int:
        try:
            return self.node_ids.index(str(node_id))
        except ValueError:
            raise UnknownNodeError(f"unknown node id: {node_id!r}") from None

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AttributedGraph):
            return NotImplemented
        same_labels = (self.labels is None and other.labels is None) or (
            self.labels is not None and other.labels is not None
            and np.array_equal(self.labels, other.labels)
        )
        return (
            self.node_ids == other.node_ids
            and self.attribute_names == other.attribute_names
            and np.array_equal(self.attributes, other.attributes)
            and np.array_equal(self.edges, other.edges)
            and same_labels
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """
    Attributed graph plus one Gaussian weight per edge.

    weights[i] belongs to base.edges[i]; sigma = inf encodes the unweighted
    fallback (every weight equal to 1).
    """
    base: AttributedGraph
    sigma: float
    weights: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float)
        if weights.shape != (self.base.edge_count,):
            raise DataError("one weight per edge is required")
        weights.setflags(write=False)
        object.__setattr__(self, "weights", weights)

    def adjacency(self) -> sparse.csr_matrix:
        """Weighted symmetric adjacency matrix W"""
        return _symmetric_matrix(self.base.edges, self.weights, self.base.node_count)


@dataclass(frozen=True, eq=False)
class LaplacianMatrix:
    """Combinatorial Laplacian L = D - W of a weighted graph"""
    entries: sparse.csr_matrix
    strengths: np.ndarray

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def adjacency(self) -> sparse.csr_matrix:
        """Recover W = D - L"""
        w = sparse.diags(self.strengths) - self.entries
        w = sparse.csr_matrix(w)
        w.setdiag(0.0)
        w.eliminate_zeros()
        return w

    def dense(self) -> np.ndarray:
        return self.entries.toarray()


def _symmetric_matrix(edges: np.ndarray, values: np.ndarray, n: int) -> sparse.csr_matrix:
    rows = np.concatenate([edges[:, 0], edges[:, 1]])
    cols = np.concatenate([edges[:, 1], edges[:, 0]])
    data = np.concatenate([values, values])
    return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


def connected_components(graph: AttributedGraph) -> List[np.ndarray]:
    """
    Maximal connected node sets, ordered by their smallest member index.

    Each component is returned as a sorted array of node indices.
    """
    _, labels = csgraph.connected_components(graph.adjacency(), directed=False)
    # relabel by first occurrence so ordering follows the smallest member
    _, first = np.unique(labels, return_index=True)
    order = np.argsort(first)
    return [np.flatnonzero(labels == label) for label in order]


def largest_component(graph: AttributedGraph) -> AttributedGraph:
    """Induced subgraph on the largest component (ties: smallest member index)"""
    components = connected_components(graph)
    if len(components) == 1:
        return graph
    largest = max(components, key=len)
    logger.warning(
        "restricting analysis to the largest connected component (%d of %d nodes, %d components)",
        len(largest), graph.node_count, len(components),
    )
    return graph.subgraph(largest)


def _condensed_to_pairs(k: np.ndarray, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Map condensed pdist indices to (i, j) with i < j"""
    k = k.astype(np.float64)
    i = n - 2 - np.floor(np.sqrt(-8.0 * k + 4.0 * n * (n - 1) - 7.0) / 2.0 - 0.5)
    i = i.astype(np.int64)
    j = (k + i + 1 - n * (n - 1) // 2 + (n - i) * ((n - i) - 1) // 2).astype(np.int64)
    return i, j


def auto_sigma(graph: AttributedGraph, pair_budget: int = DEFAULT_PAIR_BUDGET,
               rng_seed: int = 0, pairs: str = "all") -> float:
    """
    Population std of Euclidean attribute distances, used as sigma.

    Args:
        graph: Input graph
        pair_budget: Max number of node pairs; above it pairs are sampled
            uniformly without replacement
        rng_seed: Seed for the pair sample
        pairs: "all" (every node pair) or "edges" (adjacent pairs only)

    Raises:
        DegenerateSigmaError: when the distance std is zero
    """
    x = graph.attributes
    n = graph.node_count

    if pairs == "edges":
        if graph.edge_count == 0:
            raise DegenerateSigmaError("no edges to measure attribute distances on")
        diffs = x[graph.edges[:, 0]] - x[graph.edges[:, 1]]
        distances = np.linalg.norm(diffs, axis=1)
    elif pairs == "all":
        total = n * (n - 1) // 2
        if total <= pair_budget:
            distances = pdist(x, metric="euclidean")
        else:
            rng = np.random.default_rng(rng_seed)
            picked = np.sort(rng.choice(total, size=pair_budget, replace=False))
            i, j = _condensed_to_pairs(picked, n)
            distances = np.linalg.norm(x[i] - x[j], axis=1)
    else:
        raise ParameterError(f"unknown sigma pair population: {pairs!r}")

    sigma = float(np.std(distances))
    if not sigma > 0.0:
        raise DegenerateSigmaError("attribute distances have zero standard deviation")
    return sigma


def weight_edges(graph: AttributedGraph, sigma: float) -> WeightedGraph:
    """
    Gaussian similarity weight w(u,v) = exp(-||f(u)-f(v)||^2 / (2 sigma^2)) on every edge.

    sigma = inf yields the unweighted graph (all weights 1).
    """
    if not sigma > 0.0:
        raise ParameterError(f"sigma must be positive, got {sigma}")
    diffs = graph.attributes[graph.edges[:, 0]] - graph.attributes[graph.edges[:, 1]]
    squared = np.einsum("ij,ij->i", diffs, diffs)
    if math.isinf(sigma):
        weights = np.ones(graph.edge_count)
    else:
        weights = np.exp(-squared / (2.0 * sigma * sigma))
    return WeightedGraph(base=graph, sigma=float(sigma), weights=weights)


def resolve_sigma(graph: AttributedGraph, sigma: Union[str, float] = "auto",
                  pair_budget: int = DEFAULT_PAIR_BUDGET, rng_seed: int = 0,
                  pairs: str = "all") -> float:
    """
    Turn a "auto" | number sigma setting into a value.

    A degenerate attribute set falls back to sigma = inf (unweighted graph).
    """
    if isinstance(sigma, str):
        if sigma != "auto":
            raise ParameterError(f"sigma must be 'auto' or a positive number, got {sigma!r}")
        try:
            return auto_sigma(graph, pair_budget=pair_budget, rng_seed=rng_seed, pairs=pairs)
        except DegenerateSigmaError:
            logger.warning("all attribute distances are equal; using unit edge weights")
            return math.inf
    value = float(sigma)
    if not value > 0.0:
        raise ParameterError(f"sigma must be positive, got {value}")
    return value


def laplacian(weighted: WeightedGraph) -> LaplacianMatrix:
    """
    Weighted combinatorial Laplacian L = D - W.

    Raises:
        ConnectivityError: when the base graph has more than one component
    """
    components = connected_components(weighted.base)
    if len(components) > 1:
        raise ConnectivityError(sorted((len(c) for c in components), reverse=True))

    w = weighted.adjacency()
    strengths = np.asarray(w.sum(axis=1)).ravel()
    entries = sparse.csr_matrix(sparse.diags(strengths) - w)
    entries.sort_indices()
    strengths.setflags(write=False)
    return LaplacianMatrix(entries=entries, strengths=strengths)


def standardize_attributes(graph: AttributedGraph) -> AttributedGraph:
    """Z-score every attribute column (population std); constant columns become 0"""
    x = graph.attributes
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    centered = x - mean
    scale = np.where(std > 0.0, std, 1.0)
    return graph.with_attributes(centered / scale, names=graph.attribute_names)


def select_attributes(graph: AttributedGraph, columns: Sequence[Union[str, int]]) -> AttributedGraph:
    """
    Keep only the given attribute columns.

    Args:
        columns: attribute names, or 1-based column positions
    """
    picked = []
    for column in columns:
        if isinstance(column, (int, np.integer)) or str(column).isdigit():
            position = int(column) - 1
            if not 0 <= position < graph.attribute_dim:
                raise ParameterError(f"attribute position {column} outside 1..{graph.attribute_dim}")
            picked.append(position)
        else:
            try:
                picked.append(graph.attribute_names.index(str(column)))
            except ValueError:
                raise ParameterError(f"unknown attribute column: {column!r}") from None
    if not picked:
        raise ParameterError("at least one attribute column must be selected")
    return graph.with_attributes(
        graph.attributes[:, picked],
        names=[graph.attribute_names[k] for k in picked],
    )
