"""Delimited-text outputs with '#' header metadata.

Every file starts with ``# key: value`` lines (units, config hash, ...) followed by a
column header and whitespace-separated rows. Numbers are written with 17 significant
digits so identical runs produce identical bytes.
"""

from __future__ import annotations

import hashlib
from collections.abc import Mapping, Sequence
from pathlib import Path
from typing import Any

import numpy as np
import structlog
from numpy.typing import ArrayLike

log = structlog.get_logger()

FLOAT_FMT = "%.17g"


def _header(meta: Mapping[str, Any], columns: Sequence[str]) -> str:
    lines = [f"{k}: {meta[k]}" for k in sorted(meta)]
    lines.append(" ".join(columns))
    return "\n".join(lines)


class RunWriter:
    """Writes the files of one run into ``root`` and remembers their SHA-256."""

    def __init__(self, root: Path, meta: Mapping[str, Any] | None = None) -> None:
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.meta = dict(meta or {})
        self.hashes: dict[str, str] = {}

    def _record(self, name: str) -> Path:
        path = self.root / name
        self.hashes[name] = hashlib.sha256(path.read_bytes()).hexdigest()
        log.debug("export.file.written", file=name, sha256=self.hashes[name])
        return path

    def table(
        self,
        name: str,
        columns: Sequence[str],
        rows: ArrayLike,
        meta: Mapping[str, Any] | None = None,
    ) -> Path:
        data = np.atleast_2d(np.asarray(rows, dtype=float))
        if data.size and data.shape[1] != len(columns):
            raise ValueError(f"{name}: {data.shape[1]} columns for {len(columns)} names")
        header = _header({**self.meta, **(meta or {})}, columns)
        np.savetxt(self.root / name, data, fmt=FLOAT_FMT, header=header, comments="# ")
        return self._record(name)

    def text(self, name: str, body: str, meta: Mapping[str, Any] | None = None) -> Path:
        header = "".join(f"# {k}: {v}\n" for k, v in sorted({**self.meta, **(meta or {})}.items()))
        (self.root / name).write_text(header + body, encoding="utf-8")
        return self._record(name)


def nan_if_none(value: float | None) -> float:
    return float("nan") if value is None else float(value)
