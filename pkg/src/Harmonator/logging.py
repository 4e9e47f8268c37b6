"""structlog on top of stdlib logging: JSON lines to stderr and an optional rotating file.

Events carry the run context bound by the CLI (``command``, ``config_hash``). numpy
``RuntimeWarning``s arrive through ``py.warnings`` so overflow in an integrator shows up
in the same stream as the abort it usually precedes.
"""

from __future__ import annotations

import logging
import os
from logging.handlers import RotatingFileHandler
from pathlib import Path

import structlog
from structlog.contextvars import merge_contextvars

from Harmonator.config import Settings

_OFF = "NONE"


def _level(name: str | None, default: int = logging.INFO) -> int:
    value = logging.getLevelName((name or "").upper())
    return value if isinstance(value, int) else default


def _file_logs_suppressed() -> bool:
    if os.getenv("HARMONATOR_DISABLE_FILE_LOGS") == "1":
        return True
    under_pytest = bool(os.getenv("PYTEST_CURRENT_TEST"))
    return under_pytest and os.getenv("HARMONATOR_TEST_ENABLE_FILE_LOGS") != "1"


def _json_formatter() -> structlog.stdlib.ProcessorFormatter:
    return structlog.stdlib.ProcessorFormatter(
        foreign_pre_chain=[structlog.stdlib.add_log_level, merge_contextvars],
        processors=[
            structlog.processors.TimeStamper(fmt="iso", utc=True),
            structlog.stdlib.add_log_level,
            merge_contextvars,
            structlog.processors.format_exc_info,
            structlog.stdlib.ProcessorFormatter.remove_processors_meta,
            structlog.processors.JSONRenderer(sort_keys=True),
        ],
    )


def _handlers(settings: Settings | None, root_level: int) -> list[logging.Handler]:
    if settings is not None and not settings.logging_enabled:
        return []
    formatter = _json_formatter()
    handlers: list[logging.Handler] = []

    console = settings.logging_console if settings is not None else logging.getLevelName(
        root_level
    )
    if console.upper() != _OFF:
        stream = logging.StreamHandler()
        stream.setLevel(_level(console, root_level))
        stream.setFormatter(formatter)
        handlers.append(stream)

    if settings is None or settings.logging_file.upper() == _OFF or _file_logs_suppressed():
        return handlers
    path = Path(settings.logging_file_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rotating = RotatingFileHandler(
        path,
        maxBytes=settings.logging_max_bytes,
        backupCount=settings.logging_backup_count,
        delay=True,
    )
    rotating.setLevel(_level(settings.logging_file, root_level))
    rotating.setFormatter(formatter)
    handlers.append(rotating)
    return handlers


def setup_logging(settings: Settings | None = None) -> None:
    """Configure logging for one CLI process. Safe to call again; handlers are replaced.

    Without settings: INFO to stderr, no file.
    """
    root_level = _level(settings.logging_level if settings else None)
    logging.captureWarnings(True)
    logging.basicConfig(level=root_level, handlers=_handlers(settings, root_level), force=True)
    logging.getLogger("py.warnings").setLevel(logging.WARNING)

    structlog.configure(
        processors=[
            merge_contextvars,
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_log_level,
            structlog.stdlib.PositionalArgumentsFormatter(),
            structlog.processors.StackInfoRenderer(),
            structlog.stdlib.ProcessorFormatter.wrap_for_formatter,
        ],
        logger_factory=structlog.stdlib.LoggerFactory(),
        wrapper_class=structlog.stdlib.BoundLogger,
        cache_logger_on_first_use=True,
    )
