"""Process-wide work counters and wall-time histograms.

Integrators count steps and derivative evaluations, sweeps count jobs, and the CLI
times each command. ``get_counters`` flattens everything into one ``str -> int`` map
for the run manifest. Sweep workers update counters concurrently, hence the lock.
"""

from __future__ import annotations

import bisect
import threading
import time
from collections import Counter
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass, field

DEFAULT_MS_BUCKETS: tuple[int, ...] = (10, 100, 1_000, 10_000, 60_000, 300_000)


@dataclass
class _Histogram:
    bounds: tuple[int, ...]
    hits: Counter[str] = field(default_factory=Counter)
    total: int = 0
    count: int = 0

    def observe(self, value: int) -> None:
        i = bisect.bisect_left(self.bounds, value)
        label = f"le_{self.bounds[i]}" if i < len(self.bounds) else f"gt_{self.bounds[-1]}"
        self.hits[label] += 1
        self.total += value
        self.count += 1

    def flatten(self, name: str) -> dict[str, int]:
        out = {f"histo.{name}.{label}": n for label, n in self.hits.items()}
        out[f"histo.{name}.sum"] = self.total
        out[f"histo.{name}.count"] = self.count
        return out


class _Registry:
    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._counters: Counter[str] = Counter()
        self._histograms: dict[str, _Histogram] = {}

    def inc(self, name: str, value: int) -> None:
        with self._lock:
            self._counters[name] += value

    def get(self, name: str) -> int:
        with self._lock:
            return self._counters[name]

    def observe(self, name: str, value: int, bounds: Sequence[int]) -> None:
        with self._lock:
            hist = self._histograms.setdefault(name, _Histogram(tuple(bounds)))
            hist.observe(value)

    def snapshot(self) -> dict[str, int]:
        with self._lock:
            out = {k: v for k, v in self._counters.items() if v}
            for name, hist in self._histograms.items():
                out.update(hist.flatten(name))
            return out

    def clear(self) -> None:
        with self._lock:
            self._counters.clear()
            self._histograms.clear()


_registry = _Registry()


def inc_counter(name: str, value: int = 1) -> None:
    _registry.inc(name, int(value))


def get_counter(name: str) -> int:
    return _registry.get(name)


def get_counters() -> dict[str, int]:
    return _registry.snapshot()


def reset_counters() -> None:
    _registry.clear()


def observe_histogram(name: str, value: int, *, buckets: Sequence[int] | None = None) -> None:
    """Bucket ``value`` under the first bound it does not exceed, else ``gt_<last>``.

    Bounds are fixed by the first observation of ``name``.
    """
    _registry.observe(name, int(value), buckets or DEFAULT_MS_BUCKETS)


@contextmanager
def timed(name: str) -> Iterator[dict[str, int]]:
    """Record the block's wall time in ms; the yielded dict gets ``elapsed_ms`` on exit."""
    result: dict[str, int] = {}
    start = time.perf_counter_ns()
    try:
        yield result
    finally:
        result["elapsed_ms"] = (time.perf_counter_ns() - start) // 1_000_000
        observe_histogram(name, result["elapsed_ms"])
