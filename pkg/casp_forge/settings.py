"""
Runtime settings read from the environment (see run-bench.sh)
"""

import os
from dataclasses import dataclass

from .errors import ConfigurationError

DEFAULT_BUDGET_S = 60.0


@dataclass(frozen=True)
class Settings:
    seed: int = 0
    budget_s: float = DEFAULT_BUDGET_S
    log_level: str = "WARNING"
    workers: int = 1


def _read(environ, name, cast, default):
    raw = environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return cast(raw.strip())
    except ValueError:
        raise ConfigurationError(name, raw)


def _level(raw):
    level = raw.upper()
    if level not in ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"):
        raise ValueError(raw)
    return level


def load_settings(environ=None):
    """
    Build Settings from CASP_FORGE_* environment variables

    Args:
        environ: mapping to read from, defaults to os.environ
    """
    environ = os.environ if environ is None else environ
    settings = Settings(
        seed=_read(environ, "CASP_FORGE_SEED", int, 0),
        budget_s=_read(environ, "CASP_FORGE_BUDGET_S", float, DEFAULT_BUDGET_S),
        log_level=_read(environ, "CASP_FORGE_LOG_LEVEL", _level, "WARNING"),
        workers=_read(environ, "CASP_FORGE_WORKERS", int, 1),
    )
    if settings.budget_s < 0:
        raise ConfigurationError("CASP_FORGE_BUDGET_S", environ.get("CASP_FORGE_BUDGET_S"))
    if settings.workers < 1:
        raise ConfigurationError("CASP_FORGE_WORKERS", environ.get("CASP_FORGE_WORKERS"))
    return settings
