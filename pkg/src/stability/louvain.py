"""
Generalized Louvain optimisation of sum_i h_i^T B h_i for a dense symmetric B.

Two phases are alternated: greedy local moves of single (super)nodes between
contexts, then aggregation of every context into a supernode with
B_agg = S^T B S. Moving u from context A to C changes the score by

    2 * sum_{v in C} B_uv - 2 * sum_{v in A, v != u} B_uv

so the diagonal never matters and the per-context row sums are all that has
to be maintained.
"""

from dataclasses import dataclass
from typing import List

import numpy as np

from src.stability.partition import Partition, compact_labels
from src.stability.quality import QualityMatrix, stability_score

GAIN_TOLERANCE = 1e-12


class _Level:
    """Local-move phase on one aggregation level"""

    __slots__ = ("B", "n", "community", "row_sums", "sizes", "gain")

    def __init__(self, B: np.ndarray):
        self.B = B
        self.n = B.shape[0]
        self.community = np.arange(self.n)
        # row_sums[u, c] = sum of B[u, v] over v currently in context c
        self.row_sums = B.copy()
        self.sizes = np.ones(self.n, dtype=np.int64)
        self.gain = 0.0

    def _move(self, u: int, source: int, target: int) -> None:
        column = self.B[:, u]
        self.row_sums[:, source] -= column
        self.row_sums[:, target] += column
        self.sizes[source] -= 1
        self.sizes[target] += 1
        self.community[u] = target

    def run(self, order: np.ndarray) -> bool:
        """Sweep nodes in `order` until no move gains more than the tolerance"""
        moved_any = False
        diagonal = np.diagonal(self.B)
        improved = True
        while improved:
            improved = False
            for u in order:
                source = self.community[u]
                row = self.row_sums[u]
                loss = row[source] - diagonal[u]
                gains = 2.0 * (row - loss)
                gains[source] = -np.inf
                gains[self.sizes == 0] = -np.inf
                target = int(np.argmax(gains))
                best = gains[target]
                if best > GAIN_TOLERANCE:
                    self._move(u, source, target)
                    self.gain += float(best)
                    improved = True
                    moved_any = True
        return moved_any


@dataclass(frozen=True)
class LouvainRun:
    """Outcome of one Louvain run, with the sum of all accepted gains"""
    partition: Partition
    total_gain: float
    levels: int


def run_louvain(Q: QualityMatrix, rng_seed: int) -> LouvainRun:
    """
    Optimise the stability of Q starting from singletons.

    Node visiting order is a seeded shuffle per level, so the run is fully
    determined by rng_seed.
    """
    rng = np.random.default_rng(rng_seed)
    n = Q.order
    B = np.array(Q.entries, dtype=float)
    membership = np.arange(n)
    total_gain = 0.0
    levels = 0

    while True:
        level = _Level(B)
        moved = level.run(rng.permutation(level.n))
        levels += 1
        total_gain += level.gain
        if not moved:
            break
        labels = compact_labels(level.community)
        membership = labels[membership]
        k = int(labels.max()) + 1
        s = np.zeros((level.n, k))
        s[np.arange(level.n), labels] = 1.0
        B = s.T @ B @ s
        B = 0.5 * (B + B.T)
        if k == 1:
            break

    partition = Partition(membership, time=Q.time)
    return LouvainRun(
        partition=partition.with_score(stability_score(Q, partition)),
        total_gain=total_gain,
        levels=levels,
    )


def louvain(Q: QualityMatrix, rng_seed: int) -> Partition:
    """Best partition found by one seeded Louvain run, with its stability"""
    return run_louvain(Q, rng_seed).partition


def run_louvain_batch(Q: QualityMatrix, seeds: List[int]) -> List[Partition]:
    """Louvain for several seeds; module-level so process pools can pickle it"""
    return [louvain(Q, seed) for seed in seeds]
