"""
Context detection at one time: an ensemble of Louvain runs on the Markov
stability quality matrix, followed by absorption of singleton contexts.
"""

import logging
from functools import partial
from typing import List, Optional, Protocol, Tuple

import numpy as np
from scipy import sparse

from src.core.errors import ParameterError
from src.core.parallel import ordered_map, split_evenly
from src.core.seeding import derive_seed
from src.graph.attributed import LaplacianMatrix
from src.kernel.base import KernelMatrix
from src.kernel.heat import heat_kernel
from src.stability.louvain import run_louvain_batch
from src.stability.partition import Partition
from src.stability.quality import QualityMatrix, quality_matrix, stability_score

logger = logging.getLogger(__name__)

DEFAULT_RUNS = 100


class HasAdjacency(Protocol):
    def adjacency(self) -> sparse.csr_matrix: ...


def merge_singletons(partition: Partition, weighted: HasAdjacency) -> Partition:
    """
    Join every one-node context to the adjacent context it sends the most edge
    weight to (ties: lowest context id). Nodes without edges stay alone; a
    partition made only of singletons is returned unchanged.
    """
    sizes = partition.sizes()
    if partition.num_contexts == partition.node_count or not np.any(sizes == 1):
        return partition

    w = sparse.csr_matrix(weighted.adjacency())
    labels = partition.assignment.copy()
    changed = True
    while changed:
        changed = False
        sizes = np.bincount(labels, minlength=partition.num_contexts)
        if np.count_nonzero(sizes) == len(labels):
            break
        for u in np.flatnonzero(sizes[labels] == 1):
            own = labels[u]
            if sizes[own] != 1:
                continue
            start, stop = w.indptr[u], w.indptr[u + 1]
            neighbours = w.indices[start:stop]
            weights = w.data[start:stop]
            keep = labels[neighbours] != own
            if not np.any(keep):
                continue
            totals = np.bincount(labels[neighbours[keep]], weights=weights[keep],
                                 minlength=len(sizes))
            candidates = np.flatnonzero(sizes > 0)
            candidates = candidates[candidates != own]
            target = int(candidates[np.argmax(totals[candidates])])
            labels[u] = target
            sizes[own] -= 1
            sizes[target] += 1
            changed = True

    return Partition(labels, time=partition.time)


def run_ensemble(Q: QualityMatrix, seeds: List[int], workers: int = 1) -> List[Partition]:
    """Louvain for every seed; contiguous seed chunks per worker, results in seed order"""
    chunks = split_evenly(seeds, workers)
    results = ordered_map(partial(run_louvain_batch, Q), chunks, workers=workers)
    return [p for chunk in results for p in chunk]


def best_partition(L: LaplacianMatrix, t: float, runs: int = DEFAULT_RUNS, rng_seed: int = 0,
                   workers: int = 1, kernel: Optional[KernelMatrix] = None,
                   merge: bool = True, sparsify_eps: float = 0.0,
                   **kernel_options) -> Tuple[Partition, List[Partition]]:
    """
    Highest-stability partition among `runs` seeded Louvain runs at time t.

    Args:
        L: Laplacian (its off-diagonal entries provide the singleton-merge weights)
        t: Diffusion time
        runs: Number of Louvain runs
        rng_seed: Master seed; run i uses derive_seed(rng_seed, "louvain", i)
        workers: Process pool size for the runs
        kernel: Precomputed exp(-tL); built with heat_kernel otherwise
        merge: Absorb singleton contexts into their closest neighbour context
        sparsify_eps: Drop kernel entries below this before optimising
        **kernel_options: Passed to heat_kernel

    Returns:
        (best partition, full ensemble in run order). Ties go to the lowest run index.
    """
    if runs < 1:
        raise ParameterError(f"runs must be >= 1, got {runs}")
    if kernel is None:
        kernel = heat_kernel(L, t, workers=workers, **kernel_options)
    Q = quality_matrix(kernel, sparsify_eps=sparsify_eps)

    seeds = [derive_seed(rng_seed, "louvain", i) for i in range(runs)]
    ensemble = run_ensemble(Q, seeds, workers=workers)
    if merge:
        merged = []
        for p in ensemble:
            m = merge_singletons(p, L)
            merged.append(m if m is p else m.with_score(stability_score(Q, m), time=Q.time))
        ensemble = merged

    best = ensemble[0]
    for candidate in ensemble[1:]:
        if candidate.score > best.score:
            best = candidate
    logger.debug("t=%g: best of %d runs has K=%d, r=%.6g", t, runs, best.num_contexts, best.score)
    return best, ensemble
