"""Runtime settings: environment (.env) plus config.yaml defaults."""
import logging
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv
from pydantic_settings import BaseSettings, SettingsConfigDict

from .errors import ConfigError
from .linalg_core import Tolerance

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Environment overrides, read with the PRODSYS_ prefix."""

    model_config = SettingsConfigDict(env_prefix="PRODSYS_", env_file=".env", extra="ignore")

    config_path: str = "config.yaml"
    cache_path: str = "./data/fiber_cache"
    cache_enabled: bool = True
    log_level: str = "INFO"
    reports_path: str = "./reports"


def load_settings(env_path: str = ".env") -> Settings:
    load_dotenv(env_path)
    return Settings()


def load_config(config_path: str = "config.yaml") -> Dict[str, Any]:
    """Load config.yaml; a missing file yields built-in defaults."""
    path = Path(config_path)
    if not path.exists():
        logger.debug(f"No config file at {config_path}, using defaults")
        return {}
    try:
        with open(path, 'r') as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"Failed to parse {config_path}: {e}") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{config_path} must contain a mapping at top level")
    return data


def tolerance_from(config: Dict[str, Any], overrides: Optional[Dict[str, float]] = None) -> Tolerance:
    """Tolerance from the config.yaml section, then per-experiment overrides."""
    values = dict(config.get('tolerance') or {})
    values.update(overrides or {})
    return Tolerance(**values)
