"""Command registry. Modules under ``Harmonator.commands`` register handlers with
``@sim_command``; the CLI builds one click subcommand per entry."""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from typing import Any, TypeVar

from pydantic import BaseModel, ConfigDict, Field

from Harmonator.config import Settings
from Harmonator.export import RunWriter
from Harmonator.runconfig import RunConfig


@dataclass
class Invocation:
    """Everything a handler needs; ``writer`` points at the run's staging directory."""

    name: str
    options: dict[str, Any]
    settings: Settings
    run_config: RunConfig
    writer: RunWriter
    threads: int = 1


class Option(BaseModel):
    # fields become --flags; descriptions become help text
    model_config = ConfigDict(populate_by_name=True, extra="forbid")


class RunOpts(Option):
    config: str | None = Field(default=None, description="Run configuration file (TOML)")
    preset: str | None = Field(default=None, description="Named preset, e.g. resonant_comb")
    out: str | None = Field(default=None, description="Output directory")
    threads: int | None = Field(default=None, description="Worker threads for sweeps")
    stride: int | None = Field(default=None, description="Snapshot stride in steps")


Handler = Callable[[Invocation, Any], None]
H = TypeVar("H", bound=Handler)


@dataclass(frozen=True)
class Command:
    name: str
    description: str
    option_model: type[Option]
    handler: Handler


_commands: dict[str, Command] = {}


def sim_command(
    name: str, description: str, option_model: type[Option] = RunOpts
) -> Callable[[H], H]:
    def register(handler: H) -> H:
        existing = _commands.get(name)
        if existing is not None and existing.handler is not handler:
            raise ValueError(f"command {name!r} registered twice")
        _commands[name] = Command(name, description, option_model, handler)
        return handler

    return register


def all_commands() -> dict[str, Command]:
    return dict(_commands)


def find_command(name: str) -> Command | None:
    return _commands.get(name)
