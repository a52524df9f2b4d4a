"""
Kernel matrix container and spectral upper bounds for the Laplacian.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.core.errors import NumericError
from src.graph.attributed import LaplacianMatrix

EXACT = "exact"
CHEBYSHEV = "chebyshev"

POWER_ITERATIONS = 50
POWER_SAFETY = 1.01


@dataclass(frozen=True, eq=False)
class KernelMatrix:
    """
    Dense evaluation of the heat kernel exp(-tL) at one diffusion time.

    Attributes:
        entries: symmetric N x N matrix, rows summing to 1
        time: diffusion time t >= 0
        method: "exact" or "chebyshev"
        degree: Chebyshev degree actually used (chebyshev only)
        est_lambda_max: spectral bound the expansion was built on (chebyshev only)
    """
    entries: np.ndarray
    time: float
    method: str = EXACT
    degree: Optional[int] = None
    est_lambda_max: Optional[float] = None

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def order(self) -> int:
        return self.entries.shape[0]

    def apply(self, signal: np.ndarray) -> np.ndarray:
        return self.entries @ signal


def spectral_bound(L: LaplacianMatrix, refine: bool = False,
                   iterations: int = POWER_ITERATIONS, rng_seed: int = 0) -> float:
    """
    Upper bound on the largest Laplacian eigenvalue.

    The default 2 * max strength is a guaranteed bound (Gershgorin). With
    refine=True a power iteration estimate times 1.01 is used when smaller.
    """
    bound = 2.0 * float(np.max(L.strengths))
    if not bound > 0.0:
        raise NumericError("Laplacian has no positive strengths; edge weights underflowed")
    if not refine:
        return bound

    rng = np.random.default_rng(rng_seed)
    x = rng.standard_normal(L.order)
    x -= x.mean()
    estimate = 0.0
    for _ in range(iterations):
        y = L.entries @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            break
        estimate = float(x @ y) / float(x @ x)
        x = y / norm
    refined = estimate * POWER_SAFETY
    return min(bound, refined) if refined > 0.0 else bound
