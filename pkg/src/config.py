"""Settings loading and logging setup."""

import copy
import logging
import os
from pathlib import Path
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

from src.errors import ConfigError

# Load environment variables from .env file
load_dotenv()

DEFAULT_SETTINGS_PATH = Path(__file__).parent.parent / "config" / "settings.yaml"

DEFAULTS: Dict[str, Any] = {
    "stego": {"k": 1},
    "cipher": {"default": "des-hybrid", "des_engine": "pycryptodome"},
    "rsa": {"bits": 1024, "public_exponent": 65537, "miller_rabin_rounds": 40},
    "bench": {
        "sizes": [102400, 863232],
        "modes": ["hybrid", "rsa-direct", "des-only"],
        "repetitions": 1,
        "rsa_bits": 512,
        "k": 2,
    },
    "logging": {
        "level": "WARNING",
        "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
    },
}


def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key] = _merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_settings(path: Optional[Path] = None) -> Dict[str, Any]:
    """Load settings from YAML and merge them over the built-in defaults.

    Args:
        path: Settings file. Defaults to ``$STEGOVAULT_CONFIG`` or
            ``config/settings.yaml``.

    Returns:
        Nested settings dictionary.

    Raises:
        ConfigError: If the file is not a YAML mapping.
    """
    if path is None:
        path = Path(os.getenv("STEGOVAULT_CONFIG", DEFAULT_SETTINGS_PATH))
    path = Path(path)
    if not path.exists():
        return copy.deepcopy(DEFAULTS)

    with open(path) as f:
        loaded = yaml.safe_load(f)

    if loaded is None:
        loaded = {}
    if not isinstance(loaded, dict):
        raise ConfigError(
            f"Configuration error: expected a mapping in {path}, "
            f"but got {type(loaded).__name__}. Please check the yaml file."
        )
    return _merge(DEFAULTS, loaded)


def setup_logging(settings: Dict[str, Any], verbose: bool = False) -> None:
    """Configure root logging on standard error."""
    level_name = os.getenv("STEGOVAULT_LOG_LEVEL", settings["logging"]["level"])
    level = logging.DEBUG if verbose else getattr(logging, str(level_name).upper(), logging.WARNING)
    logging.basicConfig(level=level, format=settings["logging"]["format"], force=True)
