"""
Run manifests
=============

Every command that writes artifacts also writes a manifest recording what
produced them. Manifests live next to the data (``hrep.json`` ->
``hrep.manifest.json``) so the data files themselves carry no timestamps and
reruns with the same inputs are byte-identical.
"""

import os
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from artifacts.schemas import write_json

TOOL_VERSION = "0.1.0"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunManifest(BaseModel):
    command: str
    config: Dict[str, Any] = Field(default_factory=dict)
    seed: Optional[int] = None
    tool_version: str = TOOL_VERSION
    outputs: List[str] = Field(default_factory=list)
    started_at: str = Field(default_factory=utc_now)
    finished_at: Optional[str] = None

    def finish(self, outputs: List[str]) -> "RunManifest":
        return self.model_copy(update={"outputs": [os.path.basename(p) for p in outputs],
                                       "finished_at": utc_now()})


def manifest_path_for(artifact_path: str) -> str:
    """Sibling manifest path: ``dir/name.ext`` -> ``dir/name.manifest.json``."""
    root, _ = os.path.splitext(artifact_path)
    return f"{root}.manifest.json"


def write_manifest(path: str, manifest: RunManifest) -> None:
    write_json(path, manifest)
