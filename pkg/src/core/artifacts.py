"""
Artifact writer for command outputs.

Every file a command produces goes through an ArtifactWriter, which keeps an
index.json of what was written. Nothing time-dependent is recorded, so a rerun
with the same inputs and seed reproduces every file byte for byte.
"""

import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)


class ArtifactWriter:
    """
    Writes JSON, CSV/TSV and figures under one output directory.

    Layout:
    <out>/
        ├── index.json            # name -> kind for every artifact
        ├── *.json / *.csv        # command results
        └── <subdir>/...          # per-time exports (partitions/, concentration/)
    """

    def __init__(self, out_dir: Union[str, Path]):
        """
        Args:
            out_dir: Output directory (created if missing)
        """
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.index_file = self.out_dir / "index.json"
        self.index: Dict[str, Dict[str, str]] = {}

    def path(self, name: str) -> Path:
        """Absolute path of an artifact, creating its parent directory"""
        target = self.out_dir / name
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def _record(self, name: str, kind: str) -> None:
        self.index[name] = {"kind": kind}
        self._save_index()

    def _save_index(self) -> None:
        with open(self.index_file, "w") as f:
            json.dump({"artifacts": self.index}, f, indent=2, sort_keys=True)
            f.write("\n")

    def write_json(self, name: str, payload: Any, kind: str = "json") -> Path:
        """Serialize payload (numpy-aware, NaN/inf as null) with sorted keys"""
        target = self.path(name)
        with open(target, "w") as f:
            json.dump(make_serializable(payload), f, indent=2, sort_keys=True, allow_nan=False)
            f.write("\n")
        self._record(name, kind)
        logger.debug("wrote %s", target)
        return target

    def write_frame(self, name: str, frame: pd.DataFrame, kind: str = "table",
                    sep: Optional[str] = None, index: bool = False,
                    header: bool = True) -> Path:
        """CSV (or TSV when the name ends in .tsv) through pandas"""
        target = self.path(name)
        if sep is None:
            sep = "\t" if name.endswith(".tsv") else ","
        frame.to_csv(target, sep=sep, index=index, header=header)
        self._record(name, kind)
        logger.debug("wrote %s", target)
        return target

    def write_figure(self, name: str, figure: Any) -> Path:
        """Save a matplotlib figure"""
        target = self.path(name)
        figure.savefig(target, dpi=120, bbox_inches="tight", metadata={"Software": None})
        self._record(name, "figure")
        return target

    def register(self, name: str, kind: str) -> Path:
        """Record a file written by other means (e.g. the kernel dump)"""
        self._record(name, kind)
        return self.out_dir / name

    def list_artifacts(self) -> List[str]:
        return sorted(self.index)


def make_serializable(obj: Any) -> Any:
    """Convert numpy arrays and scalars to JSON-compatible types; NaN/inf become None"""
    if isinstance(obj, np.ndarray):
        return [make_serializable(item) for item in obj.tolist()]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        return value if math.isfinite(value) else None
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(key): make_serializable(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [make_serializable(item) for item in obj]
    if isinstance(obj, Path):
        return str(obj)
    return obj
