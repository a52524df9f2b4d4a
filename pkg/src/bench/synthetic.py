"""
Synthetic attributed networks with planted communities and contextual anomalies.

The generator follows the LFR recipe loosely: power-law community sizes and
degrees, a mixing fraction mu of each node's edges leaving its community, and
per-community attribute distributions whose centers are shared within
hierarchy groups. Anomalies are nodes whose attributes are partly replaced by
values drawn from another community.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import networkx as nx
import numpy as np

from src.core.errors import ConfigError, ParameterError
from src.core.seeding import derive_seed, make_rng
from src.graph.attributed import AttributedGraph, connected_components
from src.stability.partition import Partition

logger = logging.getLogger(__name__)

FAMILIES = ("normal", "uniform", "logistic")
MATCHING_ROUNDS = 50
# floor() of products like 0.29 * 100 must not lose a unit to rounding
FLOOR_SLACK = 1e-9


@dataclass
class SyntheticConfig:
    """Parameters of the planted-partition benchmark"""
    n: int = 1000
    mixing: float = 0.1
    size_exponent: float = 1.0
    min_size: int = 50
    max_size: int = 200
    degree_exponent: float = 2.0
    mean_degree: float = 20.0
    max_degree: int = 100
    attribute_dim: int = 20
    noise: float = 0.1
    # spread of community centers around their hierarchy-group center
    group_spread: float = 0.1
    families: Optional[List[str]] = None
    hierarchy: Optional[Dict[int, int]] = None
    anomaly_fraction: float = 0.05
    perturbed_attr_fraction: float = 0.30
    rng_seed: int = 0

    def validate(self) -> None:
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if not 0.0 < self.mixing < 1.0:
            raise ConfigError(f"mixing must lie in (0, 1), got {self.mixing}")
        if not 1 <= self.min_size <= self.max_size:
            raise ConfigError(f"need 1 <= min_size <= max_size, got {self.min_size}, {self.max_size}")
        if int(np.ceil(self.n / self.max_size)) * self.min_size > self.n:
            raise ConfigError(
                f"community sizes in [{self.min_size}, {self.max_size}] cannot tile n={self.n}"
            )
        if self.mean_degree <= 0 or self.max_degree < 1:
            raise ConfigError("mean_degree and max_degree must be positive")
        if self.attribute_dim < 1:
            raise ConfigError(f"attribute_dim must be >= 1, got {self.attribute_dim}")
        if self.noise < 0 or self.group_spread < 0:
            raise ConfigError("noise and group_spread must be nonnegative")
        if self.families is not None and any(f not in FAMILIES for f in self.families):
            raise ConfigError(f"families must be drawn from {FAMILIES}")
        if not 0.0 <= self.anomaly_fraction < 1.0:
            raise ConfigError(f"anomaly_fraction must lie in [0, 1), got {self.anomaly_fraction}")
        if 0 < self.anomaly_fraction and _floor(self.anomaly_fraction * self.n) < 1:
            raise ConfigError("anomaly_fraction * n must be >= 1 when anomalies are requested")
        if not 0.0 <= self.perturbed_attr_fraction <= 1.0:
            raise ConfigError("perturbed_attr_fraction must lie in [0, 1]")

    def family_of(self, community: int) -> str:
        families = self.families or list(FAMILIES)
        return families[community % len(families)]

    def group_of(self, community: int) -> int:
        if self.hierarchy is not None:
            return int(self.hierarchy.get(community, community))
        return community // 2


def _floor(x: float) -> int:
    return int(np.floor(x + FLOOR_SLACK))


def _power_law(rng: np.random.Generator, exponent: float, low: float, high: float,
               size: int) -> np.ndarray:
    """Inverse-CDF samples of p(x) ~ x^-exponent on [low, high]"""
    u = rng.random(size)
    if np.isclose(exponent, 1.0):
        return low * (high / low) ** u
    a = 1.0 - exponent
    return (low ** a + u * (high ** a - low ** a)) ** (1.0 / a)


def community_sizes(config: SyntheticConfig, rng: np.random.Generator,
                    attempts: int = 100) -> List[int]:
    """Power-law sizes in [min_size, max_size] summing exactly to n"""
    lo, hi = config.min_size, config.max_size

    def tileable(x: int) -> bool:
        return x == 0 or int(np.ceil(x / hi)) * lo <= x

    for _ in range(attempts):
        sizes: List[int] = []
        remaining = config.n
        while remaining > 0:
            if remaining <= hi:
                sizes.append(remaining)
                break
            s = int(round(_power_law(rng, config.size_exponent, lo, hi, 1)[0]))
            s = min(max(s, lo), remaining)
            if not tileable(remaining - s):
                options = [x for x in range(lo, min(hi, remaining) + 1) if tileable(remaining - x)]
                if not options:
                    break
                s = options[int(rng.integers(len(options)))]
            sizes.append(s)
            remaining -= s
        if sum(sizes) == config.n and all(lo <= s <= hi for s in sizes):
            return sizes
    raise ConfigError(f"could not tile n={config.n} with sizes in [{lo}, {hi}]")


def _match_stubs(stubs: np.ndarray, rng: np.random.Generator,
                 group: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Pair stubs at random into edges. Self-loops, repeated pairs and (when
    `group` is given) pairs inside one group are re-paired with randomly
    chosen good pairs for a bounded number of rounds, then dropped.
    """
    stubs = rng.permutation(stubs)
    if len(stubs) % 2:
        stubs = stubs[:-1]
    if len(stubs) == 0:
        return np.zeros((0, 2), dtype=np.int64)
    pairs = np.sort(stubs.reshape(-1, 2), axis=1)

    def bad_mask(p: np.ndarray) -> np.ndarray:
        bad = p[:, 0] == p[:, 1]
        if group is not None:
            bad |= group[p[:, 0]] == group[p[:, 1]]
        _, first = np.unique(p, axis=0, return_index=True)
        repeated = np.ones(len(p), dtype=bool)
        repeated[first] = False
        return bad | repeated

    for _ in range(MATCHING_ROUNDS):
        bad = bad_mask(pairs)
        if not bad.any():
            break
        bad_idx = np.flatnonzero(bad)
        good_idx = np.flatnonzero(~bad)
        partners = rng.choice(good_idx, size=min(len(bad_idx), len(good_idx)), replace=False)
        chosen = np.concatenate([bad_idx, partners])
        pool = rng.permutation(pairs[chosen].ravel())
        pairs[chosen] = np.sort(pool.reshape(-1, 2), axis=1)

    return pairs[~bad_mask(pairs)]


def _bridge_communities(edges: np.ndarray, membership: np.ndarray, k: int,
                        rng: np.random.Generator) -> np.ndarray:
    """Add one edge between consecutive communities not yet joined by any path"""
    graph = nx.Graph()
    graph.add_nodes_from(range(k))
    cross = membership[edges[:, 0]] != membership[edges[:, 1]]
    graph.add_edges_from(zip(membership[edges[cross, 0]].tolist(),
                             membership[edges[cross, 1]].tolist()))
    extra = []
    for c in range(k - 1):
        if not nx.has_path(graph, c, c + 1):
            u = rng.choice(np.flatnonzero(membership == c))
            v = rng.choice(np.flatnonzero(membership == c + 1))
            extra.append(sorted((int(u), int(v))))
            graph.add_edge(c, c + 1)
    if not extra:
        return edges
    return np.unique(np.vstack([edges, np.array(extra, dtype=np.int64)]), axis=0)


def _community_attributes(config: SyntheticConfig, membership: np.ndarray, k: int,
                          rng: np.random.Generator) -> np.ndarray:
    d = config.attribute_dim
    groups = sorted({config.group_of(c) for c in range(k)})
    group_centers = {g: rng.uniform(0.0, 1.0, d) for g in groups}
    attributes = np.empty((len(membership), d))
    for c in range(k):
        members = np.flatnonzero(membership == c)
        center = group_centers[config.group_of(c)] + rng.normal(0.0, config.group_spread, d)
        family = config.family_of(c)
        shape = (len(members), d)
        if family == "normal":
            draws = rng.normal(0.0, config.noise, shape)
        elif family == "uniform":
            half = config.noise * np.sqrt(3.0)
            draws = rng.uniform(-half, half, shape)
        else:
            draws = rng.logistic(0.0, config.noise * np.sqrt(3.0) / np.pi, shape)
        attributes[members] = center + draws
    return attributes


def generate_synthetic(config: SyntheticConfig) -> Tuple[AttributedGraph, Partition, np.ndarray]:
    """
    Build a planted-partition attributed network and inject anomalies.

    Returns:
        (graph with labels, ground-truth communities, labels). Everything is
        restricted to the giant component, so N is the realized node count.

    Raises:
        ConfigError: invalid or infeasible configuration
    """
    config.validate()
    seed = config.rng_seed

    # 1. community sizes
    sizes = community_sizes(config, make_rng(seed, "sizes"))
    k = len(sizes)
    membership = np.repeat(np.arange(k), sizes)

    # 2. degrees, rescaled to the mean-degree target
    rng = make_rng(seed, "degrees")
    raw = _power_law(rng, config.degree_exponent, 1.0, float(config.max_degree), config.n)
    degrees = np.maximum(1, np.round(raw * config.mean_degree / raw.mean())).astype(np.int64)
    degrees = np.minimum(degrees, config.n - 1)
    internal = np.round((1.0 - config.mixing) * degrees).astype(np.int64)
    internal = np.minimum(internal, np.array(sizes)[membership] - 1)
    external = degrees - internal

    # 3. stub matching inside and across communities
    rng = make_rng(seed, "edges")
    blocks = []
    for c in range(k):
        members = np.flatnonzero(membership == c)
        blocks.append(_match_stubs(np.repeat(members, internal[members]), rng))
    blocks.append(_match_stubs(np.repeat(np.arange(config.n), external), rng, group=membership))
    edges = np.unique(np.vstack(blocks), axis=0)
    edges = _bridge_communities(edges, membership, k, make_rng(seed, "bridges"))

    # 4. attributes
    attributes = _community_attributes(config, membership, k, make_rng(seed, "attributes"))
    graph = AttributedGraph(
        node_ids=tuple(str(i) for i in range(config.n)),
        attributes=attributes,
        edges=edges,
        attribute_names=tuple(f"x{j + 1}" for j in range(config.attribute_dim)),
    )

    components = connected_components(graph)
    if len(components) > 1:
        giant = max(components, key=len)
        logger.info("synthetic graph: keeping giant component (%d of %d nodes)",
                    len(giant), graph.node_count)
        graph = graph.subgraph(giant)
        membership = membership[giant]
    truth = Partition(membership)

    # 5. anomalies
    if config.anomaly_fraction > 0:
        graph, labels = inject_anomalies(graph, truth, config.anomaly_fraction,
                                         config.perturbed_attr_fraction,
                                         derive_seed(seed, "anomalies"))
    else:
        labels = np.zeros(graph.node_count, dtype=np.int64)
        graph = graph.with_labels(labels)
    logger.info("synthetic graph: N=%d, E=%d, %d communities, %d anomalies",
                graph.node_count, graph.edge_count, truth.num_contexts, int(labels.sum()))
    return graph, truth, labels


def inject_anomalies(graph: AttributedGraph, ground_truth: Partition, fraction: float,
                     attr_fraction: float, rng_seed: int) -> Tuple[AttributedGraph, np.ndarray]:
    """
    Perturb floor(fraction * N) uniformly chosen nodes: for each, floor(attr_fraction * d)
    attributes are redrawn from the empirical distribution of a different,
    uniformly chosen community.

    Returns:
        (graph with the perturbed attributes and labels, 0/1 labels)

    Raises:
        ConfigError: fewer than two communities, or no node to perturb
    """
    if ground_truth.node_count != graph.node_count:
        raise ParameterError("ground truth does not match the graph size")
    if ground_truth.num_contexts < 2:
        raise ConfigError("anomaly injection needs at least two communities")
    n, d = graph.node_count, graph.attribute_dim
    count = _floor(fraction * n)
    if count < 1:
        raise ConfigError(f"fraction {fraction} selects no node out of {n}")
    per_node = _floor(attr_fraction * d)

    rng = make_rng(rng_seed, "inject")
    chosen = np.sort(rng.choice(n, size=count, replace=False))
    attributes = np.array(graph.attributes)
    blocks = ground_truth.blocks()
    for u in chosen:
        own = ground_truth.assignment[u]
        others = [c for c in range(ground_truth.num_contexts) if c != own]
        source = blocks[others[int(rng.integers(len(others)))]]
        columns = rng.choice(d, size=per_node, replace=False)
        donors = rng.choice(source, size=per_node)
        attributes[u, columns] = graph.attributes[donors, columns]

    labels = np.zeros(n, dtype=np.int64)
    labels[chosen] = 1
    return graph.with_attributes(attributes).with_labels(labels), labels


# --- toy network with an income-like scalar attribute ---

TOY_COMMUNITIES = ("rich", "medium", "poor", "very_poor")
TOY_INCOME = {"rich": 4.0, "medium": 2.0, "poor": 1.0, "very_poor": 0.0}
TOY_COMMUNITY_SIZE = 40
# outlier role -> (node index, community it sits in, income it carries, edges into its community)
TOY_OUTLIERS = {
    "O1": (0, "rich", "medium", 1),
    "O2": (40, "medium", "very_poor", 1),
    "O3": (120, "very_poor", "rich", 2),
}
# edges between two communities, endpoints drawn from their regular members
TOY_LINKS = {
    ("poor", "very_poor"): 8,
    ("rich", "medium"): 2,
    ("rich", "very_poor"): 1,
}


def toy_income_network(rng_seed: int = 0, p_in: float = 0.5,
                       noise: float = 0.05) -> Tuple[AttributedGraph, Partition, np.ndarray]:
    """
    160 nodes in four dense communities (rich, medium, poor, very poor) joined
    only by the edges counted in TOY_LINKS. Poor and very poor are coupled
    tightly, rich and medium loosely, and a single edge joins the two groups,
    so the contexts coarsen from four to three to two as t grows.

    Three outliers are planted, each wired into its own community only:
    O1 carries a medium income inside the rich community, O2 a very-poor
    income inside the medium community and O3 a rich income inside the very
    poor community. O1 and O2 sit one income step away from a neighbouring
    community and lose their heat at the department scale; O3 sits four
    steps away and keeps it up to the company scale.

    Returns:
        (graph with labels, ground-truth communities, labels)
    """
    k = len(TOY_COMMUNITIES)
    size = TOY_COMMUNITY_SIZE
    probs = [[p_in if a == b else 0.0 for b in range(k)] for a in range(k)]
    sbm = nx.stochastic_block_model([size] * k, probs, seed=derive_seed(rng_seed, "toy-sbm") % 2**32)
    membership = np.repeat(np.arange(k), size)
    outliers = [node for node, _, _, _ in TOY_OUTLIERS.values()]
    regular = np.setdiff1d(np.arange(k * size), outliers)
    members = {name: regular[membership[regular] == c] for c, name in enumerate(TOY_COMMUNITIES)}
    rng = make_rng(rng_seed, "toy")

    # 1. outliers keep only the edges planted here
    sbm.remove_edges_from(list(sbm.edges(outliers)))
    for node, community, _, degree in TOY_OUTLIERS.values():
        for v in rng.choice(members[community], size=degree, replace=False):
            sbm.add_edge(node, int(v))

    # 2. a fixed number of links per community pair
    for (a, b), count in TOY_LINKS.items():
        placed = 0
        while placed < count:
            u, v = int(rng.choice(members[a])), int(rng.choice(members[b]))
            if not sbm.has_edge(u, v):
                sbm.add_edge(u, v)
                placed += 1

    # 3. incomes
    income = np.array([TOY_INCOME[TOY_COMMUNITIES[c]] for c in membership])
    labels = np.zeros(k * size, dtype=np.int64)
    for node, _, carried, _ in TOY_OUTLIERS.values():
        income[node] = TOY_INCOME[carried]
        labels[node] = 1
    income = income + rng.normal(0.0, noise, len(income))

    edges = np.unique(np.sort(np.array(list(sbm.edges()), dtype=np.int64).reshape(-1, 2), axis=1), axis=0)
    node_ids = tuple(f"{TOY_COMMUNITIES[c]}_{i % size:02d}" for i, c in enumerate(membership))
    graph = AttributedGraph(node_ids=node_ids, attributes=income.reshape(-1, 1), edges=edges,
                            labels=labels, attribute_names=("income",))
    return graph, Partition(membership), labels


def preferential_attachment_graph(n: int, edges_per_node: int = 3, attribute_dim: int = 1,
                                  rng_seed: int = 0) -> AttributedGraph:
    """Barabasi-Albert graph (about edges_per_node * N edges) with Gaussian attributes"""
    if n <= edges_per_node:
        raise ParameterError(f"need n > edges_per_node, got {n} and {edges_per_node}")
    ba = nx.barabasi_albert_graph(n, edges_per_node, seed=derive_seed(rng_seed, "ba") % 2**32)
    rng = make_rng(rng_seed, "ba-attributes")
    return AttributedGraph(
        node_ids=tuple(str(i) for i in range(n)),
        attributes=rng.normal(0.0, 1.0, (n, attribute_dim)),
        edges=np.sort(np.array(list(ba.edges()), dtype=np.int64).reshape(-1, 2), axis=1),
    )
