"""Process-level settings: numerical defaults, run placement and logging.

Physical parameters of a run live in ``runconfig``; this module holds what a user
tunes per machine or per project. Sources, strongest first: keyword overrides, the
environment (``FOCK__M_MAX=14``), ``.env.local``/``.env`` in the current directory,
then ``config.toml`` in the current directory.
"""

from pathlib import Path
from typing import Any, Literal

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pydantic import BaseModel, Field
from pydantic_settings import BaseSettings, DotEnvSettingsSource, SettingsConfigDict

_NESTED_SECTIONS = ("integrator", "floquet", "spectra", "fock")
# (toml section, toml key) -> Settings field
_FLAT_KEYS = {
    ("app", "env"): "env",
    ("runs", "threads"): "threads",
    ("runs", "output_dir"): "output_dir",
    ("logging", "enabled"): "logging_enabled",
    ("logging", "level"): "logging_level",
    ("logging", "file_path"): "logging_file_path",
    ("logging", "max_bytes"): "logging_max_bytes",
    ("logging", "backup_count"): "logging_backup_count",
}


def _handler_level(value: object, default: str) -> str:
    """``console``/``to_file`` accept a level name or a boolean."""
    if isinstance(value, bool):
        return default if value else "NONE"
    if isinstance(value, str):
        return value.upper()
    return default


def _from_toml(path: Path = Path("config.toml")) -> dict[str, Any]:
    if not path.exists():
        return {}
    with path.open("rb") as fh:
        doc = tomllib.load(fh)

    out: dict[str, Any] = {
        field: doc[section][key]
        for (section, key), field in _FLAT_KEYS.items()
        if key in (doc.get(section) or {})
    }
    out.update({s: dict(doc[s]) for s in _NESTED_SECTIONS if doc.get(s)})

    log_doc = doc.get("logging") or {}
    if "console" in log_doc:
        out["logging_console"] = _handler_level(
            log_doc["console"], str(log_doc.get("level", "INFO")).upper()
        )
    if "to_file" in log_doc:
        out["logging_file"] = _handler_level(log_doc["to_file"], "NONE")
    return out


def _from_dotenv(settings_cls: type[BaseSettings]) -> dict[str, Any]:
    # resolved at load time so a chdir after import is honoured
    for name in (".env.local", ".env"):
        if Path(name).exists():
            source = DotEnvSettingsSource(settings_cls, env_file=name, env_nested_delimiter="__")
            return source()
    return {}


class IntegratorConfig(BaseModel):
    dt_per_cycle: int = Field(default=1000, ge=200)
    stride: int = Field(default=50, ge=1)
    tol_bloch: float = 1e-6
    tol_neg: float = 1e-12
    validity_monitor: bool = True
    validity_threshold: float = 1e-3


class FloquetConfig(BaseModel):
    steps_per_period: int = Field(default=4000, ge=100)
    samples_per_period: int = Field(default=4096, ge=64)
    oracle_blocks: int = Field(default=40, ge=1)


class SpectraConfig(BaseModel):
    window: Literal["hann", "rect"] = "hann"
    pad_factor: int = Field(default=4, ge=1)
    peak_threshold: float = 1e-6


class FockConfig(BaseModel):
    m_max: int = Field(default=10, ge=1)
    min_steps_per_cycle: int = Field(default=800, ge=200)
    q_floor: float = 1e-12
    edge_warn: float = 1e-10
    edge_abort: float = 1e-6
    average_cycles: float = 20.0


class Settings(BaseSettings):
    env: str = "dev"

    integrator: IntegratorConfig = IntegratorConfig()
    floquet: FloquetConfig = FloquetConfig()
    spectra: SpectraConfig = SpectraConfig()
    fock: FockConfig = FockConfig()

    threads: int = Field(default=1, ge=1)
    output_dir: str = "runs"

    logging_enabled: bool = True
    logging_level: str = "INFO"
    logging_console: str = "INFO"  # level name or NONE
    logging_file: str = "NONE"
    logging_file_path: str = "logs/harmonator.jsonl"
    logging_max_bytes: int = 5_000_000
    logging_backup_count: int = 5

    model_config = SettingsConfigDict(
        env_prefix="",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="ignore",
    )

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls,
        init_settings,
        env_settings,
        dotenv_settings,
        file_secret_settings,
    ):
        return (
            init_settings,
            env_settings,
            lambda: _from_dotenv(settings_cls),
            _from_toml,
            file_secret_settings,
        )


def load_settings(**overrides: Any) -> Settings:
    return Settings(**overrides)
