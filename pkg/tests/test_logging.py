import json
import logging

import structlog
from structlog.contextvars import bind_contextvars, clear_contextvars

from Harmonator.config import load_settings
from Harmonator.logging import setup_logging


def _file_settings(tmp):
    return load_settings(
        logging_console="NONE",
        logging_file="DEBUG",
        logging_file_path=str(tmp / "logs" / "run.jsonl"),
    )


def test_file_log_lines_are_json_with_run_context(isolated_tmpdir, monkeypatch):
    monkeypatch.delenv("HARMONATOR_DISABLE_FILE_LOGS", raising=False)
    monkeypatch.setenv("HARMONATOR_TEST_ENABLE_FILE_LOGS", "1")
    settings = _file_settings(isolated_tmpdir)
    setup_logging(settings)
    try:
        bind_contextvars(command="simulate", config_hash="abc123")
        structlog.get_logger("harmonator.run").info("run.event", steps=3)
    finally:
        clear_contextvars()
        setup_logging(None)
    lines = (isolated_tmpdir / "logs" / "run.jsonl").read_text(encoding="utf-8").splitlines()
    record = json.loads(lines[-1])
    assert record["event"] == "run.event"
    assert record["steps"] == 3
    assert record["command"] == "simulate"
    assert record["level"] == "info"


def test_file_logs_suppressed_in_tests(isolated_tmpdir):
    setup_logging(_file_settings(isolated_tmpdir))
    try:
        logging.getLogger("harmonator.run").warning("dropped")
        assert not (isolated_tmpdir / "logs" / "run.jsonl").exists()
    finally:
        setup_logging(None)


def test_disabled_logging_installs_no_handlers(isolated_tmpdir):
    setup_logging(load_settings(logging_enabled=False))
    try:
        assert logging.getLogger().handlers == []
    finally:
        setup_logging(None)
