"""
Base classes for CLI subcommands.
Provides the abstract command class and the standardized result container.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List

from src.core.artifacts import ArtifactWriter
from src.core.config import RunConfig

logger = logging.getLogger(__name__)


class CommandType(Enum):
    """Enumeration of all subcommands"""
    SCAN = "scan"
    DETECT = "detect"
    BENCH = "bench"
    EVAL = "eval"
    SCORE_PARTITION = "score-partition"


@dataclass
class CommandResult:
    """Standardized container for command results"""
    command: str
    summary: Dict[str, Any]
    artifacts: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    exit_code: int = 0

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization"""
        return {
            "command": self.command,
            "summary": self.summary,
            "artifacts": self.artifacts,
            "warnings": self.warnings,
            "exit_code": self.exit_code,
        }


class BaseCommand(ABC):
    """Abstract base class for all subcommands using the Template Method pattern"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.warnings: List[str] = []

    @abstractmethod
    def command_type(self) -> CommandType:
        """Return the command type"""

    @abstractmethod
    def execute(self, writer: ArtifactWriter) -> Dict[str, Any]:
        """
        Run the pipeline and write its artifacts.
        Returns: summary dictionary
        """

    def validate(self) -> None:
        """Check the configuration for this command (raises on failure)"""
        self.config.validate(self.command_type().value)

    def run(self) -> CommandResult:
        """
        Main execution method - Template Method pattern
        Orchestrates validate -> execute -> result
        """
        # 1. Validate configuration
        self.validate()

        # 2. Execute pipeline and write artifacts
        writer = ArtifactWriter(self.config.out)
        logger.info("%s: writing artifacts to %s", self.command_type().value, writer.out_dir)
        summary = self.execute(writer)

        # 3. Summarize run
        result = CommandResult(
            command=self.command_type().value,
            summary=summary,
            artifacts=writer.list_artifacts(),
            warnings=self.warnings,
        )
        writer.write_json("summary.json", result.to_dict(), kind="summary")
        return result

    def warn(self, message: str) -> None:
        logger.warning(message)
        self.warnings.append(message)
