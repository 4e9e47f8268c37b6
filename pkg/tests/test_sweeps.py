import threading
import time

import pytest

from Harmonator.metrics import get_counter, reset_counters
from Harmonator.sweeps import run_ordered


def _slow_square(x: int) -> int:
    # later items finish first when run in parallel
    time.sleep(0.002 * (5 - x))
    return x * x


@pytest.mark.parametrize("threads", [1, 2, 5])
def test_results_keep_input_order(threads):
    assert run_ordered(_slow_square, range(5), threads) == [0, 1, 4, 9, 16]


def test_jobs_really_run_in_workers():
    seen: set[int] = set()

    def record(_: int) -> None:
        seen.add(threading.get_ident())
        time.sleep(0.01)

    run_ordered(record, range(4), threads=4)
    assert len(seen) > 1


def test_job_errors_propagate():
    def boom(x: int) -> int:
        if x == 2:
            raise RuntimeError("job 2 failed")
        return x

    with pytest.raises(RuntimeError, match="job 2"):
        run_ordered(boom, range(4), threads=2)


def test_thread_count_checked():
    with pytest.raises(ValueError):
        run_ordered(abs, [1], threads=0)


def test_jobs_are_counted():
    reset_counters()
    run_ordered(abs, [-1, -2, -3], threads=2)
    assert get_counter("sweeps.jobs") == 3
