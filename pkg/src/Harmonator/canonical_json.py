"""Deterministic JSON for configuration hashes and run manifests.

Keys are sorted, strings NFC-normalized, ``None`` fields dropped. A float equal to an
integer below 2**53 is written as that integer, so ``1.0`` and ``1`` hash alike; any
other finite float is written as its ``repr`` string, which parses back exactly.
"""

from __future__ import annotations

import hashlib
import json
import math
import unicodedata
from collections.abc import Mapping
from functools import singledispatch
from typing import Any

import numpy as np

_INT64 = (-(2**63), 2**63 - 1)
_EXACT_FLOAT_INT = 2**53


class CanonicalJSONError(ValueError):
    """Payload cannot be encoded canonically."""


def _nfc(text: str) -> str:
    return unicodedata.normalize("NFC", text)


@singledispatch
def _canon(value: Any) -> Any:
    # numpy scalars other than float64 land here
    item = getattr(value, "item", None)
    if callable(item):
        return _canon(item())
    raise CanonicalJSONError(f"cannot encode {type(value).__name__} canonically")


@_canon.register(type(None))
def _(value: None) -> None:
    return None


@_canon.register
def _(value: bool) -> bool:
    return value


@_canon.register
def _(value: str) -> str:
    return _nfc(value)


@_canon.register
def _(value: int) -> int:
    lo, hi = _INT64
    if not lo <= value <= hi:
        raise CanonicalJSONError(f"integer {value} does not fit in 64 bits")
    return value


@_canon.register
def _(value: float) -> int | str:
    if not math.isfinite(value):
        raise CanonicalJSONError(f"non-finite float {value!r}")
    if value.is_integer() and abs(value) < _EXACT_FLOAT_INT:
        return int(value)
    return repr(float(value))


@_canon.register(list)
@_canon.register(tuple)
def _(value: list[Any] | tuple[Any, ...]) -> list[Any]:
    return [_canon(v) for v in value]


@_canon.register
def _(value: np.ndarray) -> list[Any]:
    return [_canon(v) for v in value.tolist()]


@_canon.register(dict)
def _(value: dict[Any, Any]) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, raw in value.items():
        encoded = _canon(raw)
        if encoded is not None:
            out[_nfc(str(key))] = encoded
    return out


def canonical_json_bytes(payload: Mapping[str, Any] | None) -> bytes:
    """UTF-8 canonical encoding of ``payload``; ``None`` encodes as ``{}``."""
    text = json.dumps(
        _canon(dict(payload or {})),
        ensure_ascii=False,
        separators=(",", ":"),
        sort_keys=True,
        allow_nan=False,
    )
    return text.encode("utf-8")


def compute_canonical_hash(payload: Mapping[str, Any] | None) -> bytes:
    return hashlib.sha256(canonical_json_bytes(payload)).digest()


def canonical_hex(payload: Mapping[str, Any] | None) -> str:
    """Hex SHA-256 of the canonical encoding, as printed in output headers."""
    return compute_canonical_hash(payload).hex()


__all__ = [
    "CanonicalJSONError",
    "canonical_hex",
    "canonical_json_bytes",
    "compute_canonical_hash",
]
