"""Environment-driven settings shared by the CLI, API and worker."""

import logging
import os
import sys
from dataclasses import dataclass
from typing import Optional

from dotenv import load_dotenv

load_dotenv()

LOG_FORMAT = "%(levelname)-5.5s [%(name)s] %(message)s"


def _float_env(name: str, default: float) -> float:
    try:
        return float(os.getenv(name, str(default)))
    except Exception:
        return default


def _int_env(name: str, default: int) -> int:
    try:
        return int(os.getenv(name, str(default)))
    except Exception:
        return default


@dataclass(frozen=True)
class Settings:
    database_url: str
    broker_url: str
    result_backend: str
    redis_url: str
    result_cache: bool
    result_cache_ttl: int
    log_level: str
    default_tol: float
    time_prefactor: float


def get_settings() -> Settings:
    """Read settings from the environment (and .env) at call time."""
    broker = os.getenv("CELERY_BROKER_URL", "redis://redis:6379/0")
    return Settings(
        database_url=os.getenv("DATABASE_URL", "sqlite:///./svd_runs.db"),
        broker_url=broker,
        result_backend=os.getenv("CELERY_RESULT_BACKEND", broker),
        redis_url=os.getenv("REDIS_URL", "redis://redis:6379/1"),
        result_cache=os.getenv("RESULT_CACHE", "on").lower() not in (
            "off", "0", "false", "no"),
        result_cache_ttl=_int_env("RESULT_CACHE_TTL", 3600),
        log_level=os.getenv("LOG_LEVEL", "INFO").upper(),
        default_tol=_float_env("DEFAULT_TOL", 1e-4),
        time_prefactor=_float_env("TIME_PREFACTOR", 50.0),
    )


def configure_logging(level: Optional[str] = None) -> None:
    """Install one stderr handler on the root logger (replacing an earlier one)."""
    root = logging.getLogger()
    for handler in list(root.handlers):
        if getattr(handler, "_svd_console", False):
            root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler._svd_console = True
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level or get_settings().log_level)
