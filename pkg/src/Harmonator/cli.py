"""Command-line front end.

Discovers the registered simulation commands and exposes each as a click subcommand
whose flags come from the command's option model.

Examples:
  harmonator simulate --preset resonant_comb --out runs/comb
  harmonator floquet-map --config my_map.toml --threads 4

Exit codes: 0 success, 2 configuration error, 3 numerical abort. Outputs are written to
a temporary sibling directory that is moved into place only when the command succeeds.
"""

from __future__ import annotations

import shutil
import tempfile
from pathlib import Path
from types import UnionType
from typing import Any, Union, get_args, get_origin

import click
import structlog
from structlog.contextvars import bind_contextvars, clear_contextvars

from Harmonator.command_loader import load_all_commands
from Harmonator.commanding import Command, Invocation, Option, RunOpts, all_commands
from Harmonator.config import Settings, load_settings
from Harmonator.errors import ConfigError, ManifestError, NumericalAbortError
from Harmonator.export import RunWriter
from Harmonator.logging import setup_logging
from Harmonator.manifest import RunManifest, write_manifest
from Harmonator.metrics import get_counters, reset_counters, timed
from Harmonator.runconfig import RunConfig, load_preset, load_run_config, parse_run_config

log = structlog.get_logger()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _click_type_for(annotation: Any):
    origin = get_origin(annotation)
    args = get_args(annotation)
    if origin is None:
        if annotation in (str, int, float):
            return annotation
        return str
    # Optional/Union -> use the first non-None arg
    if origin in (Union, UnionType) and args:
        base = next((a for a in args if a is not type(None)), str)
        return _click_type_for(base)
    return str


def _params_from_model(option_model: type[Option]) -> list[click.Parameter]:
    params: list[click.Parameter] = []
    for name, field in option_model.model_fields.items():
        flag = f"--{(field.alias or name).replace('_', '-')}"
        ann = field.annotation or str
        if ann is bool:
            params.append(click.Option([flag], is_flag=True, default=bool(field.default)))
            continue
        params.append(
            click.Option(
                [flag],
                type=_click_type_for(ann),
                default=field.default,
                show_default=field.default is not None,
                help=field.description or "",
            )
        )
    return params


def resolve_run_config(opts: RunOpts) -> RunConfig:
    overrides = {"stride": opts.stride}
    if opts.config and opts.preset:
        raise ConfigError("give either --config or --preset, not both")
    if opts.preset:
        return load_preset(opts.preset, **overrides)
    if opts.config:
        return load_run_config(Path(opts.config), **overrides)
    return parse_run_config("", **overrides)


def _deterministic_counters() -> dict[str, int]:
    return {k: v for k, v in get_counters().items() if not k.startswith("histo.")}


def run_command(cmd: Command, opts: RunOpts, settings: Settings) -> int:
    """Run one command end to end and return its exit code."""
    reset_counters()
    clear_contextvars()
    bind_contextvars(command=cmd.name)
    tmp: Path | None = None
    try:
        cfg = resolve_run_config(opts)
        config_hash = cfg.config_hash()
        bind_contextvars(config_hash=config_hash[:12])
        threads = opts.threads or settings.threads
        if threads < 1:
            raise ConfigError("threads must be >= 1", key="threads")
        out = Path(opts.out) if opts.out else Path(settings.output_dir) / (
            f"{cmd.name}-{config_hash[:12]}"
        )
        out.parent.mkdir(parents=True, exist_ok=True)
        tmp = Path(tempfile.mkdtemp(prefix=f".{out.name}.", dir=out.parent))
        writer = RunWriter(tmp, meta={"command": cmd.name, "config_hash": config_hash})
        inv = Invocation(
            name=cmd.name,
            options=opts.model_dump(),
            settings=settings,
            run_config=cfg,
            writer=writer,
            threads=threads,
        )
        log.info("cli.command.start", threads=threads, out=str(out))
        with timed(f"command.{cmd.name}") as elapsed:
            cmd.handler(inv, opts)
        manifest = RunManifest(
            command=cmd.name,
            config=cfg.model_dump(mode="json"),
            config_hash=config_hash,
            output_dir=str(out),
            outputs=dict(writer.hashes),
            wall_ms=elapsed["elapsed_ms"],
            counters=_deterministic_counters(),
            threads=threads,
        )
        write_manifest(manifest, tmp)
        if out.exists():
            shutil.rmtree(out)
        tmp.rename(out)
        tmp = None
        log.info("cli.command.completed", out=str(out), wall_ms=manifest.wall_ms)
        click.echo(str(out))
        return EXIT_OK
    except ConfigError as exc:
        log.error("cli.command.failed", reason="config", error=str(exc))
        click.echo(f"configuration error: {exc}", err=True)
        return EXIT_CONFIG
    except NumericalAbortError as exc:
        log.error("cli.command.failed", reason="numerical", error=str(exc), time=exc.time)
        click.echo(f"numerical abort: {exc}", err=True)
        return EXIT_NUMERICAL
    except ManifestError as exc:
        log.error("cli.command.failed", reason="manifest", error=str(exc))
        click.echo(f"manifest error: {exc}", err=True)
        return 1
    except ValueError as exc:
        # parameters that pass RunConfig but are rejected downstream (pulse, grid, spectra)
        log.error("cli.command.failed", reason="parameters", error=str(exc))
        click.echo(f"configuration error: {exc}", err=True)
        return EXIT_CONFIG
    finally:
        if tmp is not None:
            shutil.rmtree(tmp, ignore_errors=True)
        clear_contextvars()


def _make_click_command(cmd: Command) -> click.Command:
    def _callback(**kwargs: Any) -> None:
        settings = load_settings()
        setup_logging(settings)
        opts = cmd.option_model.model_validate(kwargs)
        code = run_command(cmd, opts, settings)  # type: ignore[arg-type]
        if code:
            raise click.exceptions.Exit(code)

    return click.Command(
        name=cmd.name,
        params=_params_from_model(cmd.option_model),
        callback=_callback,
        help=cmd.description,
    )


def build_app() -> click.Group:
    load_all_commands()
    app = click.Group(name="harmonator")
    for cmd in sorted(all_commands().values(), key=lambda c: c.name):
        app.add_command(_make_click_command(cmd))
    return app


def main() -> None:  # pragma: no cover
    build_app()()


if __name__ == "__main__":  # pragma: no cover
    main()
