"""Strict flat run configuration and named presets.

A run configuration is a TOML document holding only top-level ``key = value`` pairs.
Unknown keys, nested tables, wrong types and violated invariants are all rejected with a
``ConfigError`` naming the key and the line it appears on.
"""

from __future__ import annotations

import re
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from importlib import resources
from pathlib import Path
from typing import Any, Literal

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from Harmonator.canonical_json import canonical_hex
from Harmonator.errors import ConfigError
from Harmonator.model import (
    AtomParams,
    Envelope,
    ModeGrid,
    PulseParams,
    build_mode_grid,
    cycle_period,
)


class RunConfig(BaseModel):
    # --- model-core keys ---
    omega0: float = Field(default=1.0, gt=0)
    nu_over_omega0: float = Field(default=1.0, gt=0)
    drive_strength: float = Field(default=1.0, description="dE0 / (hbar omega0)")
    tau_cycles: float = Field(default=12.0, gt=0)
    envelope: Envelope = Envelope.SIN2
    n_modes: int = Field(default=600, ge=1)
    omega_max_over_nu: float = Field(default=30.0, gt=0)
    coupling_scale: float = Field(default=1e-3, ge=0)

    # --- supplementary keys ---
    ramp_cycles: float = Field(default=5.0, ge=0)
    atom_state: Literal["ground", "excited"] = "ground"
    seed_photons: float = Field(default=0.0, ge=0)
    seed_mode_frequency: float | None = Field(default=None, gt=0, description="omega_n/omega0")
    t_end_cycles: float | None = Field(default=None, ge=0)
    tail_cycles: float = Field(default=0.0, ge=0)
    dt_per_cycle: int | None = Field(default=None, ge=200)
    stride: int | None = Field(default=None, ge=1)
    window: Literal["hann", "rect"] | None = None
    mode_frequencies: list[float] = Field(default_factory=lambda: [8.0])
    m_max: int | None = Field(default=None, ge=1)
    e0_values: list[float] = Field(default_factory=lambda: [0.0])
    detuning_values: list[float] = Field(default_factory=lambda: [0.0])
    harmonics: list[float] = Field(default_factory=list)
    coherent_amplitudes: list[float] = Field(default_factory=list)
    nu_values: list[float] = Field(default_factory=list)
    reference_harmonic: float = Field(default=9.0, gt=0)

    model_config = ConfigDict(extra="forbid", frozen=True)

    @model_validator(mode="after")
    def _check_ramps(self) -> RunConfig:
        if self.envelope is Envelope.FLAT_TOP and 2.0 * self.ramp_cycles > self.tau_cycles:
            raise ValueError("2*ramp_cycles must not exceed tau_cycles for flat_top")
        if not 1 <= len(self.mode_frequencies) <= 2:
            raise ValueError("mode_frequencies must list one or two modes")
        if self.coherent_amplitudes and len(self.coherent_amplitudes) != len(
            self.mode_frequencies
        ):
            raise ValueError("coherent_amplitudes must match mode_frequencies in length")
        if any(v <= 0 for v in self.nu_values):
            raise ValueError("nu_values must be > 0")
        if any(d >= 1.0 for d in self.detuning_values):
            raise ValueError("detuning_values must be < 1 so the carrier omega0 - Delta stays > 0")
        return self

    # --- derived physical objects ---

    def atom(self) -> AtomParams:
        return AtomParams(omega0=self.omega0)

    def nu(self, nu_over_omega0: float | None = None) -> float:
        return (nu_over_omega0 or self.nu_over_omega0) * self.omega0

    def pulse(self, nu_over_omega0: float | None = None, e0: float | None = None) -> PulseParams:
        nu = self.nu(nu_over_omega0)
        strength = self.drive_strength if e0 is None else e0
        return PulseParams(
            e0_strength=strength * self.omega0,
            nu=nu,
            tau=self.tau_cycles * cycle_period(nu),
            envelope=self.envelope,
            ramp_cycles=self.ramp_cycles,
        )

    def mode_grid(self, nu_over_omega0: float | None = None) -> ModeGrid:
        return build_mode_grid(
            self.n_modes,
            self.omega_max_over_nu * self.nu(nu_over_omega0),
            self.coupling_scale,
            self.omega0,
        )

    def t_end(self, pulse: PulseParams) -> float:
        if self.t_end_cycles is not None:
            return self.t_end_cycles * pulse.period
        return pulse.tau + self.tail_cycles * pulse.period

    def carriers(self) -> list[float]:
        """Carrier frequencies (units of omega0) this run covers."""
        return list(self.nu_values) or [self.nu_over_omega0]

    def config_hash(self) -> str:
        return canonical_hex(self.model_dump(mode="json"))


_KEY_LINE_RE = r"^\s*{key}\s*="


def _line_of(text: str, key: str) -> int | None:
    pattern = re.compile(_KEY_LINE_RE.format(key=re.escape(key)), re.MULTILINE)
    m = pattern.search(text)
    if m is None:
        return None
    return text.count("\n", 0, m.start()) + 1


def _table_line(text: str, key: str) -> int | None:
    pos = text.find(f"[{key}]")
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def parse_run_config(text: str, **overrides: Any) -> RunConfig:
    """Parse and validate a flat run configuration document.

    ``overrides`` (e.g. CLI flags) are applied on top of the document and validated the
    same way.
    """
    try:
        data = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        line = getattr(exc, "lineno", None)
        raise ConfigError(f"malformed configuration: {exc}", line=line) from exc
    for key, value in data.items():
        if isinstance(value, dict):
            raise ConfigError(
                "nested tables are not allowed; use flat key = value pairs",
                key=key,
                line=_line_of(text, key) or _table_line(text, key),
            )
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return RunConfig.model_validate(data)
    except ValidationError as exc:
        err = exc.errors()[0]
        key = str(err["loc"][0]) if err.get("loc") else None
        reason = "unknown key" if err.get("type") == "extra_forbidden" else err.get("msg", "")
        raise ConfigError(
            f"invalid configuration: {reason}",
            key=key,
            line=_line_of(text, key) if key else None,
        ) from exc


def load_run_config(path: Path, **overrides: Any) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read configuration {path}: {exc}") from exc
    return parse_run_config(text, **overrides)


def preset_names() -> list[str]:
    folder = resources.files("Harmonator") / "presets"
    return sorted(p.name[:-5] for p in folder.iterdir() if p.name.endswith(".toml"))


def preset_text(name: str) -> str:
    if name not in preset_names():
        raise ConfigError(f"unknown preset '{name}'; available: {', '.join(preset_names())}")
    return (resources.files("Harmonator") / "presets" / f"{name}.toml").read_text(
        encoding="utf-8"
    )


def load_preset(name: str, **overrides: Any) -> RunConfig:
    return parse_run_config(preset_text(name), **overrides)
