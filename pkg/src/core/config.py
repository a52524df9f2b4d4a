"""
Run configuration.

Values come from three layers, highest first: command-line flags, an
optional key=value config file, and the defaults below.
"""

import logging
import typing
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from src.core.errors import ConfigError, DataError, ParameterError

logger = logging.getLogger(__name__)

SIGMA_AUTO = "auto"
# alternative spellings accepted for config keys
KEY_ALIASES = {"literal_eq5": "literal_null_term"}


@dataclass
class RunConfig:
    """Every knob of every subcommand, with its default"""

    # inputs
    nodes: Optional[str] = None
    edges: Optional[str] = None
    dataset: Optional[str] = None
    datasets_dir: str = "datasets"
    out: str = "out"

    # graph preparation
    sigma: Union[str, float] = SIGMA_AUTO
    sigma_pairs: str = "all"
    pair_budget: int = 2_000_000
    largest_component: bool = False
    standardize: bool = False
    attributes: Optional[List[str]] = None

    # kernel
    method: str = "auto"
    degree: int = 30
    dense_limit: int = 8000
    refine_bound: bool = False
    dump_kernel: bool = False

    # scan and stability
    t_min: float = 1e-2
    t_max: float = 1e3
    t_count: int = 100
    at_times: Optional[List[float]] = None
    runs: int = 100
    merge_singletons: bool = True
    sparsify_eps: float = 0.0
    literal_null_term: bool = False
    dip_quantile: float = 0.25
    plateau_eps: float = 0.05
    min_plateau: int = 3
    plot: bool = False

    # single-scale detection and partition scoring
    t: Optional[float] = None
    contexts: bool = False
    partition: Optional[str] = None

    # benchmark
    n: int = 1000
    mixing: float = 0.1
    attribute_dim: int = 20
    anomaly_fraction: float = 0.05
    perturbed_attr_fraction: float = 0.30
    fractions: Optional[List[float]] = None
    seeds: int = 1
    toy: bool = False
    scalability: Optional[List[int]] = None
    scalability_workers: List[int] = field(default_factory=lambda: [1])

    # evaluation of external scores
    scores: Optional[str] = None
    labels: Optional[str] = None

    # execution
    workers: int = 1
    seed: int = 0
    verbose: int = 0

    @classmethod
    def keys(cls) -> List[str]:
        return [f.name for f in fields(cls)]

    @classmethod
    def from_sources(cls, flags: Optional[Mapping[str, Any]] = None,
                     config_path: Optional[str] = None) -> "RunConfig":
        """
        Merge defaults, an optional config file and explicitly given flags.

        Args:
            flags: Flag values; None entries count as "not given"
            config_path: key=value file

        Raises:
            ConfigError: unknown key or unparsable value in the config file
        """
        config = cls()
        if config_path is not None:
            for key, value in read_config_file(config_path).items():
                config.set_from_text(key, value)
        for key, value in (flags or {}).items():
            if value is None or key not in cls.keys():
                continue
            setattr(config, key, value)
        return config

    def set_from_text(self, key: str, raw: str) -> None:
        name = key.strip().replace("-", "_")
        name = KEY_ALIASES.get(name, name)
        hints = typing.get_type_hints(RunConfig)
        if name not in hints:
            raise ConfigError(f"unknown configuration key: {key!r}")
        try:
            value = _coerce(hints[name], raw.strip())
        except ValueError as exc:
            raise ConfigError(f"bad value for {key!r}: {raw!r} ({exc})") from None
        setattr(self, name, value)

    def sigma_value(self) -> Union[str, float]:
        if isinstance(self.sigma, str) and self.sigma != SIGMA_AUTO:
            try:
                return float(self.sigma)
            except ValueError:
                raise ParameterError(f"sigma must be 'auto' or a positive number, got {self.sigma!r}") from None
        return self.sigma

    def validate(self, command: str) -> None:
        """
        Check numeric bounds and that the input paths the command needs exist.

        Raises:
            ParameterError: value out of range or missing required input
            DataError: input file not found
        """
        sigma = self.sigma_value()
        if sigma != SIGMA_AUTO and not float(sigma) > 0:
            raise ParameterError(f"sigma must be positive, got {sigma}")
        _positive_int("runs", self.runs)
        _positive_int("degree", self.degree)
        _positive_int("dense_limit", self.dense_limit)
        _positive_int("workers", self.workers)
        _positive_int("t_count", self.t_count)
        _positive_int("min_plateau", self.min_plateau)
        if not 0 < self.t_min <= self.t_max:
            raise ParameterError(f"need 0 < t_min <= t_max, got {self.t_min}, {self.t_max}")
        if self.at_times is not None and any(t <= 0 for t in self.at_times):
            raise ParameterError("--at-times values must be positive")
        if self.t is not None and self.t < 0:
            raise ParameterError(f"diffusion time must be nonnegative, got {self.t}")
        if not 0.0 <= self.dip_quantile <= 1.0:
            raise ParameterError(f"dip_quantile must lie in [0, 1], got {self.dip_quantile}")
        if self.plateau_eps < 0 or self.sparsify_eps < 0:
            raise ParameterError("plateau_eps and sparsify_eps must be nonnegative")
        if self.sigma_pairs not in ("all", "edges"):
            raise ParameterError(f"sigma_pairs must be 'all' or 'edges', got {self.sigma_pairs!r}")

        required = {
            "scan": ["graph"],
            "detect": ["graph", "t"],
            "score-partition": ["graph", "t", "partition"],
            "eval": ["scores", "labels"],
        }.get(command, [])
        for item in required:
            if item == "graph":
                if self.dataset is None and (self.nodes is None or self.edges is None):
                    raise ParameterError("give --nodes and --edges, or --dataset")
                for path in (self.nodes, self.edges):
                    _existing(path)
            elif item == "t":
                if self.t is None:
                    raise ParameterError("--t is required")
            else:
                value = getattr(self, item)
                if value is None:
                    raise ParameterError(f"--{item} is required")
                _existing(value)

    def to_dict(self) -> Dict[str, Any]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _positive_int(name: str, value: int) -> None:
    if int(value) < 1:
        raise ParameterError(f"{name} must be >= 1, got {value}")


def _existing(path: Optional[str]) -> None:
    if path is not None and not Path(path).exists():
        raise DataError(f"file not found: {path}")


def _coerce(hint: Any, raw: str) -> Any:
    """Parse a config-file string into the field's declared type"""
    origin = typing.get_origin(hint)
    args = typing.get_args(hint)
    if origin is Union:
        if type(None) in args and raw.lower() in ("", "none", "null"):
            return None
        options = [a for a in args if a is not type(None)]
        for option in options:
            try:
                return _coerce(option, raw)
            except ValueError:
                continue
        raise ValueError(f"expected one of {options}")
    if origin in (list, List):
        (item,) = args
        return [_coerce(item, part.strip()) for part in raw.split(",") if part.strip()]
    if hint is bool:
        lowered = raw.lower()
        if lowered in ("1", "true", "yes", "on"):
            return True
        if lowered in ("0", "false", "no", "off"):
            return False
        raise ValueError("expected a boolean")
    if hint is int:
        return int(raw)
    if hint is float:
        return float(raw)
    if hint is str:
        return raw
    raise ValueError(f"unsupported type {hint}")


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """
    Parse key=value lines; '#' starts a comment, blank lines are skipped.

    Raises:
        DataError: file missing
        ConfigError: line without '='
    """
    path = Path(path)
    if not path.exists():
        raise DataError(f"config file not found: {path}")
    entries: Dict[str, str] = {}
    with open(path, "r") as f:
        for number, line in enumerate(f, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path}:{number}: expected key=value, got {text!r}")
            key, value = text.split("=", 1)
            entries[key.strip()] = value.strip()
    logger.debug("read %d settings from %s", len(entries), path)
    return entries
