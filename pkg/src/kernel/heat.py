"""
Method selection for exp(-tL) and kernel export.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import pandas as pd

from src.core.errors import ParameterError
from src.graph.attributed import LaplacianMatrix
from src.kernel.base import CHEBYSHEV, EXACT, KernelMatrix
from src.kernel.chebyshev import DEFAULT_DEGREE, full_kernel_approx
from src.kernel.exact import DEFAULT_DENSE_LIMIT, SpectralDecomposition, exact_kernel

logger = logging.getLogger(__name__)

AUTO = "auto"
METHODS = (AUTO, EXACT, CHEBYSHEV)


def choose_method(order: int, method: str = AUTO, dense_limit: int = DEFAULT_DENSE_LIMIT) -> str:
    """Resolve "auto" to exact (N <= dense_limit) or chebyshev"""
    if method not in METHODS:
        raise ParameterError(f"unknown kernel method {method!r}; expected one of {METHODS}")
    if method == AUTO:
        return EXACT if order <= dense_limit else CHEBYSHEV
    return method


def heat_kernel(L: LaplacianMatrix, t: float, method: str = AUTO,
                dense_limit: int = DEFAULT_DENSE_LIMIT, degree: int = DEFAULT_DEGREE,
                workers: int = 1, refine_bound: bool = False,
                decomposition: Optional[SpectralDecomposition] = None) -> KernelMatrix:
    """
    Evaluate exp(-tL) with the exact or the Chebyshev path.

    Args:
        L: Laplacian
        t: Diffusion time (>= 0)
        method: "auto", "exact" or "chebyshev"
        dense_limit: Node count above which "auto" picks chebyshev
        degree: Initial Chebyshev degree m
        workers: Threads for the column-parallel Chebyshev assembly
        refine_bound: Use power iteration to tighten lambda_max
        decomposition: Reused eigendecomposition for the exact path
    """
    if t < 0:
        raise ParameterError(f"diffusion time must be nonnegative, got {t}")
    resolved = choose_method(L.order, method, dense_limit)
    if resolved == EXACT:
        return exact_kernel(L, t, dense_limit=dense_limit, decomposition=decomposition)
    return full_kernel_approx(L, t, m=degree, workers=workers, refine_bound=refine_bound)


def dump_kernel_csv(kernel: KernelMatrix, path: Union[str, Path]) -> None:
    """Write the kernel row-major at full precision, no header"""
    pd.DataFrame(kernel.entries).to_csv(path, header=False, index=False, float_format="%.17g")
