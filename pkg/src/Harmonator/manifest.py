"""Run manifests: what was run, with which configuration, and what it produced.

A manifest is validated against ``contracts/run_manifest.v1.json`` before it is written
and can be re-checked against the files on disk later.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any

import jsonschema
from pydantic import BaseModel, ConfigDict, Field

from Harmonator.canonical_json import canonical_hex, canonical_json_bytes
from Harmonator.errors import ManifestError

MANIFEST_NAME = "manifest.json"
SCHEMA_PATH = Path(__file__).resolve().parents[2] / "contracts" / "run_manifest.v1.json"


class RunManifest(BaseModel):
    manifest_version: int = 1
    command: str
    config: dict[str, Any]
    config_hash: str
    output_dir: str
    outputs: dict[str, str] = Field(description="file name -> SHA-256 hex")
    wall_ms: int = Field(ge=0)
    counters: dict[str, int] = Field(default_factory=dict)
    threads: int = 1

    model_config = ConfigDict(extra="forbid", frozen=True)

    def reproducibility_hash(self) -> str:
        """Hash over the command, configuration and output hashes only.

        Wall time, thread count and the output location are left out.
        """
        payload = {
            "command": self.command,
            "config_hash": self.config_hash,
            "outputs": self.outputs,
        }
        return canonical_hex(payload)


def _load_schema(schema_path: Path | None) -> dict[str, Any]:
    path = schema_path or SCHEMA_PATH
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot load manifest schema {path}: {exc}") from exc


def validate_manifest_schema(data: dict[str, Any], schema_path: Path | None = None) -> None:
    try:
        jsonschema.validate(data, _load_schema(schema_path))
    except jsonschema.ValidationError as exc:
        raise ManifestError(f"manifest schema validation failed: {exc.message}") from exc


def write_manifest(manifest: RunManifest, directory: Path) -> Path:
    data = manifest.model_dump(mode="json")
    validate_manifest_schema(data)
    path = Path(directory) / MANIFEST_NAME
    path.write_bytes(canonical_json_bytes(data))
    return path


def load_manifest(path: Path) -> RunManifest:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"cannot read manifest {path}: {exc}") from exc
    validate_manifest_schema(data)
    return RunManifest.model_validate(data)


def verify_output_hashes(manifest: RunManifest, directory: Path) -> list[str]:
    """Mismatch messages for the recorded outputs (empty when all files match)."""
    root = Path(directory).resolve()
    errors: list[str] = []
    for name, expected in sorted(manifest.outputs.items()):
        path = (root / name).resolve()
        try:
            path.relative_to(root)
        except ValueError:
            errors.append(f"{name} points outside the run directory")
            continue
        if not path.exists():
            errors.append(f"missing file: {name}")
            continue
        actual = hashlib.sha256(path.read_bytes()).hexdigest()
        if actual != expected:
            errors.append(f"hash mismatch for {name}: expected {expected}, got {actual}")
    return errors
