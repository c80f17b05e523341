"""Run directories, CSV/JSON writers and the run manifest.

Floats are written with 17 significant digits so reruns with identical flags
produce byte-identical numeric files. Wall-clock data only appears in the
manifest.
"""

from __future__ import annotations

import csv
import json
import re
import threading
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, List, Optional, Sequence

from pydantic import BaseModel

from src.cli.models import Diagnostic, RunManifest

MANIFEST_NAME = "manifest.json"
DIAGNOSTIC_NAME = "diagnostic.json"


def _now() -> datetime:
    return datetime.now(tz=timezone.utc)


def slug(text: str) -> str:
    return re.sub(r"[^A-Za-z0-9._-]+", "_", text).strip("_") or "run"


def format_cell(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ""
    if hasattr(value, "value"):
        return str(value.value)
    return str(value)


def to_jsonable(payload: Any) -> Any:
    if isinstance(payload, BaseModel):
        return payload.model_dump(mode="json", by_alias=True)
    if isinstance(payload, (list, tuple)):
        return [to_jsonable(item) for item in payload]
    if isinstance(payload, dict):
        return {key: to_jsonable(value) for key, value in payload.items()}
    return payload


class RunWriter:
    """Writes the files of one run under <output_dir>/<command>/<tag>/."""

    def __init__(self, output_dir: Path, command: str, tag: str):
        self.command = command
        self.tag = slug(tag)
        self.directory = Path(output_dir) / command / self.tag
        self.directory.mkdir(parents=True, exist_ok=True)
        self.started_at = _now()
        self._outputs: List[str] = []
        self._lock = threading.Lock()

    @property
    def outputs(self) -> List[str]:
        with self._lock:
            return list(self._outputs)

    def _register(self, path: Path) -> Path:
        with self._lock:
            name = path.relative_to(self.directory).as_posix()
            if name not in self._outputs:
                self._outputs.append(name)
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        path = self.directory / name
        with path.open("w", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow([format_cell(value) for value in row])
        return self._register(path)

    def write_json(self, name: str, payload: Any) -> Path:
        path = self.directory / name
        path.write_text(json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n")
        return self._register(path)

    def write_diagnostic(self, diagnostic: Diagnostic) -> Path:
        return self.write_json(DIAGNOSTIC_NAME, diagnostic)

    def finish(
        self,
        *,
        software_version: str,
        argv: Sequence[str],
        config: dict,
        exit_code: int,
        meshes: Optional[Sequence[int]] = None,
        dimensions: Optional[Sequence[int]] = None,
    ) -> RunManifest:
        manifest = RunManifest(
            software_version=software_version,
            command=self.command,
            tag=self.tag,
            argv=list(argv),
            config=config,
            meshes=sorted(set(meshes or [])),
            dimensions=sorted(set(dimensions or [])),
            started_at=self.started_at,
            finished_at=_now(),
            exit_code=exit_code,
            outputs=self.outputs,
        )
        (self.directory / MANIFEST_NAME).write_text(
            json.dumps(manifest.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
        )
        return manifest
