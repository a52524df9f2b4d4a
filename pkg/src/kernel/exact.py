"""
Exact heat kernel through the full symmetric eigendecomposition of L.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import linalg

from src.core.errors import KernelSizeError, ParameterError
from src.graph.attributed import LaplacianMatrix
from src.kernel.base import EXACT, KernelMatrix

logger = logging.getLogger(__name__)

DEFAULT_DENSE_LIMIT = 8000
SATURATION_RATIO = 1e-12


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """L = U diag(eigenvalues) U^T with ascending eigenvalues"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def order(self) -> int:
        return len(self.eigenvalues)

    @property
    def algebraic_connectivity(self) -> float:
        return float(self.eigenvalues[1]) if self.order > 1 else 0.0

    def filter_diagonal(self, t: float) -> np.ndarray:
        """Diagonal of exp(-tL) without forming the matrix"""
        return (self.eigenvectors ** 2) @ np.exp(-t * self.eigenvalues)


def spectral_decomposition(L: LaplacianMatrix,
                           dense_limit: int = DEFAULT_DENSE_LIMIT) -> SpectralDecomposition:
    """
    Full eigendecomposition of the Laplacian.

    Raises:
        KernelSizeError: N above dense_limit (use the Chebyshev path instead)
    """
    if L.order > dense_limit:
        raise KernelSizeError(
            f"N={L.order} exceeds the dense limit {dense_limit}; use the chebyshev method"
        )
    logger.debug("eigendecomposing %d x %d Laplacian", L.order, L.order)
    eigenvalues, eigenvectors = linalg.eigh(L.dense())
    return SpectralDecomposition(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def exact_kernel(L: LaplacianMatrix, t: float, dense_limit: int = DEFAULT_DENSE_LIMIT,
                 decomposition: Optional[SpectralDecomposition] = None) -> KernelMatrix:
    """
    exp(-tL) = U diag(exp(-t lambda_i)) U^T.

    Args:
        L: Laplacian of a connected graph
        t: Diffusion time (>= 0)
        dense_limit: Largest N allowed on this path
        decomposition: Precomputed eigendecomposition of L, reused across times
    """
    if t < 0:
        raise ParameterError(f"diffusion time must be nonnegative, got {t}")
    n = L.order
    if t == 0:
        return KernelMatrix(entries=np.eye(n), time=0.0, method=EXACT)

    if decomposition is None:
        decomposition = spectral_decomposition(L, dense_limit=dense_limit)
    elif decomposition.order != n:
        raise ParameterError("decomposition does not belong to this Laplacian")

    # past saturation the kernel is the rank-one projection on constants
    if np.exp(-t * decomposition.algebraic_connectivity) < SATURATION_RATIO / n:
        return KernelMatrix(entries=np.full((n, n), 1.0 / n), time=float(t), method=EXACT)

    u = decomposition.eigenvectors
    entries = (u * np.exp(-t * decomposition.eigenvalues)) @ u.T
    entries = 0.5 * (entries + entries.T)
    return KernelMatrix(entries=entries, time=float(t), method=EXACT)
