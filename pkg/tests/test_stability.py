"""Tests for Markov stability, Louvain and context detection"""

import numpy as np
import pytest

from src.core.errors import ParameterError, ShapeError
from src.core.seeding import derive_seed
from src.graph.attributed import laplacian, resolve_sigma, weight_edges
from src.kernel.base import KernelMatrix
from src.kernel.exact import exact_kernel
from src.scales.variation import ensemble_vi
from src.stability.contexts import best_partition, merge_singletons
from src.stability.louvain import louvain, run_louvain
from src.stability.partition import Partition
from src.stability.quality import literal_stability_score, quality_matrix, stability_score
from tests.graphs import (
    TRIANGLE_EDGES,
    brute_force_optimum,
    enumerate_partitions,
    unit_laplacian,
    weighted_laplacian,
)

TRIANGLES = Partition.from_blocks([[0, 1, 2], [3, 4, 5]])


def test_partition_canonical_labels():
    """Relabeled assignments compare equal and are numbered by first occurrence"""
    p = Partition(np.array([7, 7, 3, 9]))
    assert p.assignment.tolist() == [0, 0, 1, 2]
    assert p == Partition(np.array([1, 1, 0, 5]))
    assert p.num_contexts == 3
    assert p.sizes().tolist() == [2, 1, 1]


def test_singletons_at_time_zero_score(triangle):
    """At t = 0 singletons score 1 - 1/N"""
    Q = quality_matrix(exact_kernel(triangle, 0.0))
    assert stability_score(Q, Partition.singletons(3)) == pytest.approx(1.0 - 1.0 / 3.0)


def test_all_in_one_scores_zero(two_triangles):
    for t in (0.0, 0.3, 4.0, 100.0):
        Q = quality_matrix(exact_kernel(two_triangles, t))
        assert abs(stability_score(Q, Partition.all_in_one(6))) < 1e-10


def test_score_nonnegative_and_decreasing(two_triangles):
    """Every partition scores >= 0 and a fixed partition decays with t"""
    partitions = enumerate_partitions(6)
    times = [0.01, 0.1, 1.0, 10.0, 100.0]
    scores = np.array([
        [stability_score(quality_matrix(exact_kernel(two_triangles, t)), p) for t in times]
        for p in partitions
    ])
    assert scores.min() >= -1e-10
    assert np.all(np.diff(scores, axis=1) <= 1e-8)


def test_score_nonnegative_on_random_partitions(two_triangles, random_graph):
    """1000 random partitions per instance never score below zero"""
    instances = [
        (two_triangles, 0.5),
        (two_triangles, 20.0),
        (laplacian(weight_edges(random_graph, resolve_sigma(random_graph))), 0.1),
        (laplacian(weight_edges(random_graph, resolve_sigma(random_graph))), 3.0),
    ]
    rng = np.random.default_rng(derive_seed(0, "random-partitions"))
    for L, t in instances:
        Q = quality_matrix(exact_kernel(L, t))
        n = L.order
        for _ in range(1000):
            k = int(rng.integers(1, n + 1))
            partition = Partition(rng.integers(0, k, size=n))
            assert stability_score(Q, partition) >= -1e-10


def test_literal_score_prefers_all_in_one(two_triangles):
    """With the uncorrected null term the single context always wins"""
    kernel = exact_kernel(two_triangles, 1.0)
    whole = literal_stability_score(kernel, Partition.all_in_one(6))
    assert whole == pytest.approx(5.0)
    assert all(literal_stability_score(kernel, p) <= whole + 1e-12 for p in enumerate_partitions(6))


def test_score_shape_mismatch(triangle):
    Q = quality_matrix(exact_kernel(triangle, 1.0))
    with pytest.raises(ShapeError):
        stability_score(Q, Partition.singletons(4))


def test_weak_cliques_beat_trivial_partitions():
    """Near-disconnected triangles: the two-clique split is the enumerated optimum"""
    L = weighted_laplacian(6, TRIANGLE_EDGES + [(2, 3)], [1.0] * 6 + [1e-9])
    Q = quality_matrix(exact_kernel(L, 1.0))
    split = stability_score(Q, TRIANGLES)
    assert split > stability_score(Q, Partition.all_in_one(6))
    assert split > stability_score(Q, Partition.singletons(6))
    assert split == pytest.approx(brute_force_optimum(Q, 6), abs=1e-12)


def test_louvain_keeps_singletons_at_time_zero(triangle):
    Q = quality_matrix(exact_kernel(triangle, 0.0))
    p = louvain(Q, rng_seed=3)
    assert p.num_contexts == 3
    assert p.score == pytest.approx(1.0 - 1.0 / 3.0)


def test_louvain_finds_triangles(two_triangles):
    """Matches the optimum over all 203 partitions of 6 nodes"""
    Q = quality_matrix(exact_kernel(two_triangles, 1.0))
    p = louvain(Q, rng_seed=0)
    assert p == TRIANGLES
    assert p.score == pytest.approx(brute_force_optimum(Q, 6), abs=1e-12)


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_louvain_gain_consistency(two_triangles, seed):
    """Accepted gains add up to score(final) - score(singletons)"""
    Q = quality_matrix(exact_kernel(two_triangles, 0.5))
    run = run_louvain(Q, rng_seed=seed)
    start = stability_score(Q, Partition.singletons(6))
    assert run.partition.score >= start - 1e-12
    assert run.total_gain == pytest.approx(run.partition.score - start, abs=1e-8)


@pytest.mark.parametrize("edges, t", [
    ([(i, i + 1) for i in range(6)], 2.0),
    ([(0, i) for i in range(1, 7)], 0.5),
])
def test_best_partition_reaches_enumerated_optimum(edges, t):
    """Paths and stars on 7 nodes"""
    L = unit_laplacian(7, edges)
    best, _ = best_partition(L, t, runs=20, merge=False)
    Q = quality_matrix(exact_kernel(L, t))
    assert best.score == pytest.approx(brute_force_optimum(Q, 7), abs=1e-10)


def test_louvain_is_deterministic(two_triangles):
    Q = quality_matrix(exact_kernel(two_triangles, 0.2))
    assert louvain(Q, 11) == louvain(Q, 11)


def test_louvain_permutation_equivariance(two_triangles):
    """Relabeling nodes relabels the optimal partition the same way"""
    perm = np.array([4, 0, 5, 2, 1, 3])
    kernel = exact_kernel(two_triangles, 1.0)
    permuted = kernel.entries[np.ix_(perm, perm)]
    Q = quality_matrix(kernel)
    Qp = quality_matrix(KernelMatrix(entries=permuted.copy(), time=1.0))
    base = louvain(Q, 0)
    moved = louvain(Qp, 0)
    assert moved == Partition(base.assignment[perm])


def test_merge_singletons_single_candidate():
    """{a}, {b, c} with edge a-b: a joins b's context"""
    L = weighted_laplacian(3, [(0, 1), (1, 2)], [0.9, 1.0])
    merged = merge_singletons(Partition(np.array([0, 1, 1])), L)
    assert merged.num_contexts == 1


def test_merge_singletons_picks_heaviest_context():
    """a sends 0.5 to X and 0.7 to Y, so it joins Y"""
    edges = [(0, 1), (0, 2), (0, 3), (1, 2), (3, 4)]
    L = weighted_laplacian(5, edges, [0.25, 0.25, 0.7, 1.0, 1.0])
    merged = merge_singletons(Partition(np.array([0, 1, 1, 2, 2])), L)
    assert merged.assignment.tolist() == [0, 1, 1, 0, 0]


def test_merge_singletons_tie_goes_to_lowest_context():
    L = weighted_laplacian(5, [(0, 1), (0, 3), (1, 2), (3, 4)], [0.5, 0.5, 1.0, 1.0])
    merged = merge_singletons(Partition(np.array([0, 1, 1, 2, 2])), L)
    assert merged == Partition(np.array([0, 0, 0, 1, 1]))


def test_merge_singletons_leaves_all_singletons(triangle):
    p = Partition.singletons(3)
    assert merge_singletons(p, triangle) is p


def test_best_partition_two_triangles(two_triangles):
    """Every run agrees on the two triangles at t = 1"""
    best, ensemble = best_partition(two_triangles, 1.0, runs=30, rng_seed=5)
    assert best == TRIANGLES
    assert len(ensemble) == 30
    assert ensemble_vi(ensemble).mean == 0.0


def test_best_partition_single_run_is_louvain_plus_merge(two_triangles):
    best, ensemble = best_partition(two_triangles, 0.05, runs=1, rng_seed=9)
    Q = quality_matrix(exact_kernel(two_triangles, 0.05))
    expected = merge_singletons(louvain(Q, derive_seed(9, "louvain", 0)), two_triangles)
    assert best == expected
    assert ensemble == [best]


def test_best_partition_same_for_any_worker_count(two_triangles):
    serial = best_partition(two_triangles, 0.3, runs=8, rng_seed=2, workers=1)
    pooled = best_partition(two_triangles, 0.3, runs=8, rng_seed=2, workers=2)
    assert serial[0] == pooled[0]
    assert serial[0].score == pooled[0].score
    assert serial[1] == pooled[1]


def test_best_partition_rejects_zero_runs(two_triangles):
    with pytest.raises(ParameterError):
        best_partition(two_triangles, 1.0, runs=0)
