"""
Node concentration: L2 norm of a heat-filtered impulse, c_u(t) = ||exp(-tL) delta_u||.

A node whose impulse fails to diffuse (few or low-weight edges, i.e. attributes
unlike its neighbours') keeps a high concentration.
"""

from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np

from src.core.errors import NodeIndexError, ParameterError
from src.graph.attributed import LaplacianMatrix
from src.kernel.base import KernelMatrix, spectral_bound
from src.kernel.chebyshev import DEFAULT_DEGREE, cheb_apply, guarded_coefficients
from src.kernel.exact import SpectralDecomposition


@dataclass(frozen=True, eq=False)
class ConcentrationProfile:
    """Per-node concentrations at one time, with their mean and population std"""
    time: float
    values: np.ndarray
    mean: float
    std: float

    @classmethod
    def from_values(cls, time: float, values: np.ndarray) -> "ConcentrationProfile":
        values = np.asarray(values, dtype=float)
        values.setflags(write=False)
        return cls(time=float(time), values=values,
                   mean=float(np.mean(values)), std=float(np.std(values)))

    @property
    def N(self) -> int:
        return len(self.values)

    def scaled(self, factor: float) -> "ConcentrationProfile":
        return ConcentrationProfile.from_values(self.time, self.values * factor)

    def to_dict(self) -> Dict[str, object]:
        return {"time": self.time, "mean": self.mean, "std": self.std,
                "values": self.values.tolist()}


def concentration_profile(kernel: KernelMatrix) -> ConcentrationProfile:
    """Column L2 norms of the kernel"""
    return ConcentrationProfile.from_values(kernel.time, np.linalg.norm(kernel.entries, axis=0))


def concentration_from_spectrum(decomposition: SpectralDecomposition, t: float) -> ConcentrationProfile:
    """
    Same quantity via c_u(t)^2 = (exp(-2tL))_uu; an independent cross-check
    of the kernel-column path.
    """
    diagonal = np.clip(decomposition.filter_diagonal(2.0 * t), 0.0, None)
    return ConcentrationProfile.from_values(t, np.sqrt(diagonal))


def concentration_curve(L: LaplacianMatrix, node: int, times: Sequence[float],
                        degree: int = DEFAULT_DEGREE,
                        lambda_max: Optional[float] = None) -> List[float]:
    """
    Concentration of one node across several times, without building full kernels.

    Raises:
        NodeIndexError: node outside 0..N-1
    """
    if not 0 <= node < L.order:
        raise NodeIndexError(f"node index {node} outside 0..{L.order - 1}")
    times = [float(t) for t in times]
    if any(t < 0 for t in times):
        raise ParameterError("times must be nonnegative")
    if any(b < a for a, b in zip(times, times[1:])):
        raise ParameterError("times must be ascending")

    bound = lambda_max if lambda_max is not None else spectral_bound(L)
    impulse = np.zeros(L.order)
    impulse[node] = 1.0
    curve = []
    for t in times:
        coeffs = guarded_coefficients(t, bound, degree)
        curve.append(float(np.linalg.norm(cheb_apply(L, coeffs, impulse))))
    return curve
