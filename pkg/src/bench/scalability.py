"""
Timing of the Chebyshev kernel on preferential-attachment graphs.
"""

import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Sequence

import numpy as np
import statsmodels.api as sm

from src.bench.synthetic import preferential_attachment_graph
from src.core.errors import ParameterError
from src.graph.attributed import laplacian, resolve_sigma, weight_edges
from src.kernel.chebyshev import DEFAULT_DEGREE, full_kernel_approx

logger = logging.getLogger(__name__)


@dataclass
class TimingPoint:
    n: int
    edges: int
    workers: int
    seconds: float
    degree: int


@dataclass
class ScalabilityReport:
    """Timings and the fitted exponent b of seconds ~ a * N^b (single-worker points)"""
    points: List[TimingPoint] = field(default_factory=list)
    exponent: float = float("nan")
    exponent_stderr: float = float("nan")
    r_squared: float = float("nan")

    def speedup(self, n: int, workers: int) -> float:
        base = [p.seconds for p in self.points if p.n == n and p.workers == 1]
        other = [p.seconds for p in self.points if p.n == n and p.workers == workers]
        if not base or not other or other[0] <= 0:
            return float("nan")
        return base[0] / other[0]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "points": [asdict(p) for p in self.points],
            "exponent": self.exponent,
            "exponent_stderr": self.exponent_stderr,
            "r_squared": self.r_squared,
        }


def fit_exponent(sizes: Sequence[float], seconds: Sequence[float]) -> Dict[str, float]:
    """OLS fit of log(seconds) = log(a) + b log(N)"""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.maximum(np.asarray(seconds, dtype=float), 1e-9))
    if len(np.unique(x)) < 2:
        raise ParameterError("need timings at two or more distinct sizes to fit an exponent")
    model = sm.OLS(y, sm.add_constant(x)).fit()
    return {
        "exponent": float(model.params[1]),
        "stderr": float(model.bse[1]),
        "r_squared": float(model.rsquared),
    }


def run_scalability(sizes: Sequence[int], workers: Sequence[int] = (1,), t: float = 1.0,
                    degree: int = DEFAULT_DEGREE, edges_per_node: int = 3,
                    rng_seed: int = 0) -> ScalabilityReport:
    """
    Time full_kernel_approx at time t on a preferential-attachment graph per size.

    Args:
        sizes: Node counts
        workers: Worker counts to time at every size (1 is always included)
        t: Diffusion time
        degree: Chebyshev degree
        edges_per_node: Attachment parameter (|E| is about edges_per_node * N)
        rng_seed: Graph seed
    """
    if not sizes:
        raise ParameterError("no sizes given for the scalability run")
    worker_counts = sorted(set(workers) | {1})
    report = ScalabilityReport()
    for n in sizes:
        graph = preferential_attachment_graph(int(n), edges_per_node, rng_seed=rng_seed)
        sigma = resolve_sigma(graph, "auto", rng_seed=rng_seed)
        L = laplacian(weight_edges(graph, sigma))
        for w in worker_counts:
            start = time.perf_counter()
            full_kernel_approx(L, t, m=degree, workers=w)
            elapsed = time.perf_counter() - start
            logger.info("scalability: N=%d E=%d workers=%d %.3fs", n, graph.edge_count, w, elapsed)
            report.points.append(TimingPoint(n=int(n), edges=graph.edge_count, workers=w,
                                             seconds=elapsed, degree=degree))

    single = [p for p in report.points if p.workers == 1]
    if len({p.n for p in single}) >= 2:
        fit = fit_exponent([p.n for p in single], [p.seconds for p in single])
        report.exponent = fit["exponent"]
        report.exponent_stderr = fit["stderr"]
        report.r_squared = fit["r_squared"]
    return report
