"""
Normalized variation of information between partitions.

    VI(P1, P2) = (H(P1|P2) + H(P2|P1)) / log N

with natural logarithms and a uniform probability on the nodes.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import List, Sequence, Tuple

import numpy as np
from sklearn.metrics.cluster import contingency_matrix

from src.core.errors import GraphSizeError, ShapeError
from src.core.seeding import make_rng
from src.stability.partition import Partition

MAX_VI_PAIRS = 1000


def _check_sizes(p1: Partition, p2: Partition) -> int:
    if p1.node_count != p2.node_count:
        raise ShapeError(f"partitions have {p1.node_count} and {p2.node_count} nodes")
    return p1.node_count


def conditional_entropy(p1: Partition, p2: Partition) -> float:
    """H(P1|P2) = -sum n12/N log(n12 / n2) over the nonzero contingency cells"""
    n = _check_sizes(p1, p2)
    if n == 0:
        return 0.0
    table = contingency_matrix(p1.assignment, p2.assignment, sparse=True).tocoo()
    given = np.asarray(table.sum(axis=0)).ravel()
    joint = table.data.astype(float)
    value = -np.sum(joint / n * np.log(joint / given[table.col]))
    return max(0.0, float(value))


def variation_of_information(p1: Partition, p2: Partition) -> float:
    """
    Normalized VI in [0, 1]; 0 exactly when the partitions agree up to relabeling.

    Raises:
        GraphSizeError: fewer than two nodes (log N = 0)
    """
    n = _check_sizes(p1, p2)
    if n < 2:
        raise GraphSizeError(f"variation of information needs N >= 2, got {n}")
    if np.array_equal(p1.assignment, p2.assignment):
        return 0.0
    value = (conditional_entropy(p1, p2) + conditional_entropy(p2, p1)) / np.log(n)
    return float(min(1.0, max(0.0, value)))


@dataclass(frozen=True)
class EnsembleVI:
    """Mean pairwise VI of a run ensemble; `std` is over the evaluated pairs"""
    mean: float
    std: float
    pairs: int
    sampled: bool


def _pair_indices(runs: int, max_pairs: int, rng_seed: int, tag: str) -> Tuple[List[Tuple[int, int]], bool]:
    total = runs * (runs - 1) // 2
    if total <= max_pairs:
        return list(combinations(range(runs), 2)), False
    rng = make_rng(rng_seed, tag)
    chosen = np.sort(rng.choice(total, size=max_pairs, replace=False))
    # unrank linear pair index k -> (i, j), i < j, in row-major order
    starts = np.array([i * runs - i * (i + 1) // 2 for i in range(runs)])
    rows = np.searchsorted(starts, chosen, side="right") - 1
    cols = chosen - starts[rows] + rows + 1
    return list(zip(rows.tolist(), cols.tolist())), True


def ensemble_vi(partitions: Sequence[Partition], rng_seed: int = 0,
                max_pairs: int = MAX_VI_PAIRS, tag: str = "vi-pairs") -> EnsembleVI:
    """
    Mean VI over all pairs of the ensemble, or over `max_pairs` pairs drawn
    uniformly without replacement (seeded) when there are more.
    """
    if len(partitions) < 2:
        return EnsembleVI(mean=0.0, std=0.0, pairs=0, sampled=False)
    pairs, sampled = _pair_indices(len(partitions), max_pairs, rng_seed, tag)
    values = np.array([variation_of_information(partitions[i], partitions[j]) for i, j in pairs])
    return EnsembleVI(mean=float(values.mean()), std=float(values.std()),
                      pairs=len(pairs), sampled=sampled)


def vi_matrix(partitions: Sequence[Partition]) -> np.ndarray:
    """Symmetric matrix of pairwise VI with an exact zero diagonal"""
    t = len(partitions)
    out = np.zeros((t, t))
    for i, j in combinations(range(t), 2):
        out[i, j] = out[j, i] = variation_of_information(partitions[i], partitions[j])
    return out
