"""Tests for the synthetic benchmark, anomaly injection and evaluation metrics"""

import numpy as np
import pytest

from src.bench.metrics import evaluate, pr_auc, prf1, random_baseline, roc_auc
from src.bench.scalability import fit_exponent, run_scalability
from src.bench.synthetic import (
    TOY_COMMUNITIES,
    TOY_COMMUNITY_SIZE,
    TOY_LINKS,
    TOY_OUTLIERS,
    SyntheticConfig,
    community_sizes,
    generate_synthetic,
    inject_anomalies,
    preferential_attachment_graph,
    toy_income_network,
)
from src.core.errors import ConfigError, MetricError, ShapeError
from src.core.seeding import make_rng
from src.graph.attributed import connected_components, laplacian, resolve_sigma, weight_edges
from src.scales.variation import variation_of_information
from src.stability.contexts import best_partition
from src.stability.partition import Partition
from tests.graphs import make_graph


def small_config(**overrides) -> SyntheticConfig:
    values = dict(n=200, min_size=20, max_size=60, mean_degree=10, max_degree=30,
                  anomaly_fraction=0.05, rng_seed=3)
    values.update(overrides)
    return SyntheticConfig(**values)


# --- metrics ---

def test_roc_auc_examples():
    assert roc_auc([0.9, 0.1], [1, 0]) == 1.0
    assert roc_auc([0.8, 0.7, 0.6, 0.5], [1, 0, 1, 0]) == pytest.approx(0.75)
    assert roc_auc([0.3, 0.3, 0.3, 0.3], [1, 0, 1, 0]) == pytest.approx(0.5)


def test_roc_auc_rank_properties():
    """Invariant to increasing transforms; negating scores gives 1 - AUC"""
    rng = np.random.default_rng(2)
    scores = rng.random(40)
    labels = (rng.random(40) < 0.3).astype(int)
    labels[:2] = [0, 1]
    auc = roc_auc(scores, labels)
    assert roc_auc(np.exp(3.0 * scores), labels) == pytest.approx(auc)
    assert roc_auc(-scores, labels) == pytest.approx(1.0 - auc)


def test_roc_auc_single_class_is_an_error():
    with pytest.raises(MetricError):
        roc_auc([0.1, 0.2], [0, 0])


def test_pr_auc_examples():
    assert pr_auc([0.9, 0.8, 0.2, 0.1], [1, 1, 0, 0]) == pytest.approx(1.0)
    assert pr_auc([0.9, 0.1], [0, 1]) == pytest.approx(0.5)
    assert pr_auc([0.5] * 5, [1, 0, 1, 0, 0]) == pytest.approx(2 / 5)
    with pytest.raises(MetricError):
        pr_auc([0.5, 0.4], [0, 0])


def test_prf1_exact_and_empty():
    exact = prf1([1, 3], [0, 1, 0, 1])
    assert (exact.precision, exact.recall, exact.f1_weighted) == (1.0, 1.0, 1.0)
    empty = prf1([], [0, 1, 0, 1])
    assert empty.precision == 0.0 and empty.recall == 0.0
    assert (empty.tp, empty.fn) == (0, 2)


def test_prf1_support_weighted():
    """tp=1, fp=1, fn=1, tn=7: F1 is 0.875 on negatives, 0.5 on positives"""
    labels = [1, 1, 0, 0, 0, 0, 0, 0, 0, 0]
    result = prf1([0, 2], labels)
    assert (result.tp, result.fp, result.fn, result.tn) == (1, 1, 1, 7)
    assert result.precision == pytest.approx(0.5)
    assert result.recall == pytest.approx(0.5)
    assert result.f1_weighted == pytest.approx(0.8)


def test_evaluate_combines_all_metrics():
    result = evaluate([0.9, 0.2, 0.8, 0.1], [1, 0, 1, 0], flagged=[0, 2])
    payload = result.to_dict()
    assert payload["roc_auc"] == 1.0 and payload["pr_auc"] == 1.0
    assert payload["f1_weighted"] == 1.0
    with pytest.raises(ShapeError):
        evaluate([0.9, 0.2], [1, 0, 1])


def test_random_baseline():
    scores = random_baseline(500, rng_seed=4)
    assert np.array_equal(scores, random_baseline(500, rng_seed=4))
    assert scores.min() >= 0.0 and scores.max() < 1.0
    labels = np.tile([0, 1], 50)
    aucs = [roc_auc(random_baseline(100, rng_seed=s), labels) for s in range(200)]
    assert np.mean(aucs) == pytest.approx(0.5, abs=0.05)


# --- synthetic networks ---

def test_community_sizes_tile_n():
    config = small_config()
    sizes = community_sizes(config, make_rng(0, "sizes"))
    assert sum(sizes) == 200
    assert all(20 <= s <= 60 for s in sizes)


def test_infeasible_sizes_rejected():
    with pytest.raises(ConfigError):
        generate_synthetic(small_config(n=100, min_size=70, max_size=90))
    with pytest.raises(ConfigError):
        generate_synthetic(small_config(mixing=1.5))


def test_generate_synthetic_is_connected_and_labelled():
    graph, truth, labels = generate_synthetic(small_config())
    assert len(connected_components(graph)) == 1
    assert truth.node_count == graph.node_count
    assert graph.attribute_dim == 20
    assert np.array_equal(graph.labels, labels)
    assert labels.sum() == int(np.floor(0.05 * graph.node_count + 1e-9))


def test_generate_synthetic_is_deterministic():
    first = generate_synthetic(small_config(rng_seed=11))
    second = generate_synthetic(small_config(rng_seed=11))
    assert first[0] == second[0]
    assert first[1] == second[1]


def test_no_anomalies_gives_zero_labels():
    _, _, labels = generate_synthetic(small_config(anomaly_fraction=0.0))
    assert labels.sum() == 0


def test_realized_mean_degree_near_target():
    degrees = []
    for seed in range(3):
        graph, _, _ = generate_synthetic(small_config(n=400, min_size=50, max_size=150, rng_seed=seed,
                                                      anomaly_fraction=0.0))
        degrees.append(2.0 * graph.edge_count / graph.node_count)
    assert np.mean(degrees) == pytest.approx(10.0, rel=0.2)


def test_planted_partition_recovered_without_mixing():
    """mu -> 0 with four communities: contexts match the ground truth"""
    config = SyntheticConfig(n=160, min_size=40, max_size=40, mixing=1e-6, mean_degree=10,
                             max_degree=20, anomaly_fraction=0.0, rng_seed=5)
    graph, truth, _ = generate_synthetic(config)
    assert truth.num_contexts == 4
    L = laplacian(weight_edges(graph, resolve_sigma(graph)))
    best, _ = best_partition(L, 3.0, runs=5, rng_seed=1)
    assert variation_of_information(best, truth) < 0.05


def test_inject_anomalies_changes_exact_attribute_count():
    """d = 20 and 30 % perturbed: six entries change per anomaly, none elsewhere"""
    rng = np.random.default_rng(0)
    n, d = 40, 20
    attributes = np.vstack([rng.normal(0.0, 1.0, (20, d)), rng.normal(5.0, 1.0, (20, d))])
    graph = make_graph(n, [(i, i + 1) for i in range(n - 1)], attributes=attributes)
    truth = Partition(np.repeat([0, 1], 20))
    perturbed, labels = inject_anomalies(graph, truth, 0.1, 0.30, rng_seed=2)
    changed = (perturbed.attributes != graph.attributes).sum(axis=1)
    assert labels.sum() == 4
    assert np.all(changed[labels == 1] == 6)
    assert np.all(changed[labels == 0] == 0)
    assert np.array_equal(perturbed.labels, labels)


def test_inject_anomalies_needs_two_communities():
    graph = make_graph(10, [(i, i + 1) for i in range(9)])
    with pytest.raises(ConfigError):
        inject_anomalies(graph, Partition.all_in_one(10), 0.2, 0.3, rng_seed=0)
    with pytest.raises(ConfigError):
        inject_anomalies(graph, Partition(np.repeat([0, 1], 5)), 0.01, 0.3, rng_seed=0)


def test_toy_income_network():
    graph, truth, labels = toy_income_network(rng_seed=0)
    assert graph.node_count == 4 * TOY_COMMUNITY_SIZE
    assert graph.attribute_names == ("income",)
    assert truth.num_contexts == 4
    assert sorted(np.flatnonzero(labels).tolist()) == sorted(v[0] for v in TOY_OUTLIERS.values())
    assert graph.node_ids[0] == "rich_00"
    assert len(connected_components(graph)) == 1
    # O1 carries a medium income inside the rich community
    assert graph.attributes[0, 0] == pytest.approx(2.0, abs=0.3)


def test_toy_income_network_wiring():
    """Outliers only touch their own community; cross links come in fixed numbers"""
    graph, truth, _ = toy_income_network(rng_seed=3)
    community = truth.assignment
    degree = np.bincount(graph.edges.ravel(), minlength=graph.node_count)
    for node, name, _, edges in TOY_OUTLIERS.values():
        assert degree[node] == edges
        neighbours = graph.edges[(graph.edges == node).any(axis=1)].ravel()
        assert set(community[neighbours].tolist()) == {TOY_COMMUNITIES.index(name)}

    cross = community[graph.edges[:, 0]] != community[graph.edges[:, 1]]
    pairs = [tuple(sorted(TOY_COMMUNITIES[c] for c in community[e])) for e in graph.edges[cross]]
    for (a, b), count in TOY_LINKS.items():
        assert pairs.count(tuple(sorted((a, b)))) == count
    assert len(pairs) == sum(TOY_LINKS.values())


def test_toy_income_weights():
    """Auto sigma leaves O1 and O2 weakly attached and O3 almost cut off"""
    graph, _, _ = toy_income_network(rng_seed=0)
    weighted = weight_edges(graph, resolve_sigma(graph))
    assert weighted.sigma == pytest.approx(1.31, abs=0.05)
    strength = np.asarray(weighted.adjacency().sum(axis=1)).ravel()
    o1, o2, o3 = (TOY_OUTLIERS[role][0] for role in ("O1", "O2", "O3"))
    assert 0.2 < strength[o1] < 0.45
    assert 0.2 < strength[o2] < 0.45
    assert strength[o3] < 0.03
    regular = np.setdiff1d(np.arange(graph.node_count), [o1, o2, o3])
    assert strength[regular].min() > 5.0


def test_preferential_attachment_graph():
    graph = preferential_attachment_graph(50, edges_per_node=3, rng_seed=1)
    assert graph.node_count == 50
    assert graph.edge_count == 3 * (50 - 3)
    assert preferential_attachment_graph(50, rng_seed=1) == graph


# --- scalability ---

def test_fit_exponent_recovers_power():
    sizes = [100, 200, 400, 800]
    fit = fit_exponent(sizes, [1e-6 * n ** 2 for n in sizes])
    assert fit["exponent"] == pytest.approx(2.0)
    assert fit["r_squared"] == pytest.approx(1.0)


def test_run_scalability_small():
    report = run_scalability([30, 60], workers=(1, 2), degree=10)
    assert [(p.n, p.workers) for p in report.points] == [(30, 1), (30, 2), (60, 1), (60, 2)]
    assert np.isfinite(report.exponent)
    assert report.speedup(30, 2) > 0
