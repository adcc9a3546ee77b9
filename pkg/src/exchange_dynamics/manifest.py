"""Run manifest: what ran, with which parameters, on which inputs, producing what"""

import hashlib
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

from exchange_dynamics import __version__

logger = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"


def file_digest(path: Union[str, Path]) -> str:
    """sha256 of a file's bytes"""
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_json(path: Union[str, Path], data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(data, indent=2, allow_nan=False) + "\n")
    return path


@dataclass
class RunManifest:
    """Written once per run next to the outputs. No timestamps, so reruns compare by digest."""
    subcommand: str
    params: Dict[str, Any] = field(default_factory=dict)
    inputs: Dict[str, str] = field(default_factory=dict)  # path -> sha256
    outputs: List[str] = field(default_factory=list)
    version: str = __version__

    def add_input(self, path: Union[str, Path]):
        self.inputs[str(path)] = file_digest(path)

    def add_output(self, path: Union[str, Path], out_dir: Union[str, Path]):
        path, out_dir = Path(path), Path(out_dir)
        try:
            name = str(path.relative_to(out_dir))
        except ValueError:
            name = str(path)
        if name not in self.outputs:
            self.outputs.append(name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "subcommand": self.subcommand,
            "params": self.params,
            "inputs": dict(sorted(self.inputs.items())),
            "outputs": sorted(self.outputs),
            "version": self.version,
        }

    def write(self, out_dir: Union[str, Path]) -> Path:
        path = write_json(Path(out_dir) / MANIFEST_NAME, self.to_dict())
        logger.info(f"Wrote manifest for {self.subcommand} with {len(self.outputs)} output(s)")
        return path
