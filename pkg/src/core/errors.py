"""
Exception hierarchy for the analysis pipeline.

Library code raises these; only the CLI turns them into exit codes:
0 success, 2 usage, 3 data error, 4 numeric failure.
"""

from typing import Any, Dict, List, Optional


class AnalysisError(Exception):
    """Base class for every error raised by the pipeline"""
    exit_code: int = 1

    def to_dict(self) -> Dict[str, Any]:
        """Structured form printed by the CLI"""
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


# Usage errors (exit 2)

class UsageError(AnalysisError):
    exit_code = 2


class ParameterError(UsageError):
    """Parameter outside its valid range (sigma <= 0, t < 0, ...)"""


class ConfigError(UsageError):
    """Invalid configuration file or infeasible generator configuration"""


class NodeIndexError(UsageError):
    """Node index outside 0..N-1"""


# Data errors (exit 3)

class DataError(AnalysisError):
    exit_code = 3


class ParseError(DataError):
    """Malformed row in an input file"""

    def __init__(self, message: str, path: Optional[str] = None, line: Optional[int] = None):
        location = ""
        if path is not None:
            location = f"{path}"
            if line is not None:
                location += f":{line}"
            location += ": "
        super().__init__(f"{location}{message}")
        self.path = path
        self.line = line


class UnknownNodeError(DataError):
    """Reference to a node id that is not declared"""


class GraphSizeError(DataError):
    """Graph too small for the requested operation"""


class ConnectivityError(DataError):
    """Graph is not connected"""

    def __init__(self, component_sizes: List[int]):
        sizes = ", ".join(str(s) for s in component_sizes)
        super().__init__(
            f"graph has {len(component_sizes)} connected components (sizes: {sizes}); "
            f"rerun with --largest-component to analyse the largest one"
        )
        self.component_sizes = list(component_sizes)


class ShapeError(DataError):
    """Dimension mismatch between arrays"""


class MetricError(DataError):
    """Evaluation metric undefined for the given labels"""


# Numeric failures (exit 4)

class NumericError(AnalysisError):
    exit_code = 4


class DegenerateSigmaError(NumericError):
    """All pairwise attribute distances are equal, so their std is zero"""


class KernelSizeError(NumericError):
    """Graph too large for the dense eigendecomposition path"""


class ScanError(NumericError):
    """Failure while processing one time of a scale scan"""

    def __init__(self, time: float, cause: Exception):
        super().__init__(f"scan failed at t={time:g}: {cause}")
        self.time = time
        self.cause = cause
