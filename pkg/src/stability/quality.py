"""
Markov stability at time t as a sum of within-context entries of a quality matrix.

    r(t; H) = sum_i [ (1/N) h_i^T exp(-tL) h_i - (|h_i|_1 / N)^2 ]
            = sum_i h_i^T B(t) h_i,   B(t) = exp(-tL) / N - 1 1^T / N^2

The null term is the stationary-distribution product pi pi^T with pi = 1/N.
Subtracting (1/N)|h_i|_1 instead would give the same constant for every
partition; literal_stability_score evaluates that form for comparison only.
"""

from dataclasses import dataclass

import numpy as np

from src.core.errors import ShapeError
from src.kernel.base import KernelMatrix
from src.stability.partition import Partition


@dataclass(frozen=True, eq=False)
class QualityMatrix:
    """Symmetric N x N matrix B(t) whose rows sum to zero"""
    entries: np.ndarray
    time: float

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def order(self) -> int:
        return self.entries.shape[0]


def quality_matrix(kernel: KernelMatrix, sparsify_eps: float = 0.0) -> QualityMatrix:
    """
    B(t) = exp(-tL) / N - 1 1^T / N^2.

    Args:
        kernel: Heat kernel at time t
        sparsify_eps: entries of exp(-tL)/N below this are dropped before the
            null model is subtracted (approximation knob; 0 keeps everything)
    """
    n = kernel.order
    flow = kernel.entries / n
    if sparsify_eps > 0.0:
        flow = np.where(np.abs(flow) < sparsify_eps, 0.0, flow)
    entries = flow - 1.0 / (n * n)
    return QualityMatrix(entries=entries, time=kernel.time)


def stability_score(Q: QualityMatrix, partition: Partition) -> float:
    """Sum over contexts of the within-context entries of B(t)"""
    if partition.node_count != Q.order:
        raise ShapeError(f"partition has {partition.node_count} nodes, quality matrix {Q.order}")
    h = partition.indicator()
    return float(np.sum((Q.entries @ h) * h))


def literal_stability_score(kernel: KernelMatrix, partition: Partition) -> float:
    """sum_i (h_i^T exp(-tL) h_i - |h_i|_1 / N); the null term is 1 for every partition"""
    if partition.node_count != kernel.order:
        raise ShapeError(f"partition has {partition.node_count} nodes, kernel {kernel.order}")
    h = partition.indicator()
    within = float(np.sum((kernel.entries @ h) * h))
    return within - float(h.sum()) / kernel.order
