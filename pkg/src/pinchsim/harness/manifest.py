"""Run manifests: enough provenance to re-run any experiment."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path

MANIFEST_NAME = "manifest.json"


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


@dataclass
class RunManifest:
    command: str
    config_path: str | None
    seed: int
    code_version: str
    out_dir: str
    outputs: list[str] = field(default_factory=list)  # relative paths
    started_at: str = field(default_factory=_now)
    finished_at: str | None = None
    status: str = "running"

    def path(self) -> Path:
        return Path(self.out_dir) / MANIFEST_NAME

    def write(self) -> None:
        self.path().parent.mkdir(parents=True, exist_ok=True)
        with open(self.path(), "w", encoding="utf-8") as fh:
            json.dump(asdict(self), fh, indent=2)
            fh.write("\n")

    def finalize(self, status: str = "ok") -> None:
        self.status = status
        self.finished_at = _now()
        self.write()

    def add_output(self, relative: str) -> None:
        if relative not in self.outputs:
            self.outputs.append(relative)
