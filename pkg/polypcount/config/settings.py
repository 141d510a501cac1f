"""Configuration management for polypcount."""

import json
import logging
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

from pydantic import Field, ValidationError
from pydantic_settings import BaseSettings, SettingsConfigDict

from ..clustering import ClusteringConfig
from ..errors import ConfigError
from ..evaluation import EvaluationConfig
from ..loss import LossConfig
from ..synth import ScenarioConfig
from ..trainer import TrainerConfig
from ..tracklets import FragmentConfig


logger = logging.getLogger(__name__)

SEARCH_PATHS = [
    "polypcount.json",
    ".polypcount.json",
    "~/.polypcount.json",
    "~/.config/polypcount/config.json",
]


class RunConfig(BaseSettings):
    """Every module's settings, plus the worker count."""

    model_config = SettingsConfigDict(
        env_prefix="POLYPCOUNT_",
        env_nested_delimiter="__",
        case_sensitive=False,
        extra="forbid",
    )

    tracklets: FragmentConfig = Field(default_factory=FragmentConfig)
    loss: LossConfig = Field(default_factory=LossConfig)
    trainer: TrainerConfig = Field(default_factory=TrainerConfig)
    clustering: ClusteringConfig = Field(default_factory=ClusteringConfig)
    evaluation: EvaluationConfig = Field(default_factory=EvaluationConfig)
    synth: ScenarioConfig = Field(default_factory=ScenarioConfig)
    jobs: int = Field(default_factory=lambda: os.cpu_count() or 1, ge=1)

    def results_dict(self) -> Dict[str, Any]:
        """Settings that can change results; ``jobs`` never does."""
        return self.model_dump(mode="json", exclude={"jobs"})


def unflatten(flat: Mapping[str, Any]) -> Dict[str, Any]:
    """Turn ``{"loss.tau": 0.1}`` into ``{"loss": {"tau": 0.1}}``; nested input passes through.

    Raises:
        ConfigError: If a key is both a value and a section
    """
    result: Dict[str, Any] = {}
    for key, value in flat.items():
        *parents, last = key.split(".")
        node = result
        for part in parents:
            node = node.setdefault(part, {})
            if not isinstance(node, dict):
                raise ConfigError(f"config key {key!r} conflicts with a value at {part!r}", key=key)
        if isinstance(value, Mapping):
            value = unflatten(value)
            if isinstance(node.get(last), dict):
                value = deep_merge(node[last], value)
        elif isinstance(node.get(last), dict):
            raise ConfigError(f"config key {key!r} conflicts with a section", key=key)
        node[last] = value
    return result


def flatten(nested: Mapping[str, Any], prefix: str = "") -> Dict[str, Any]:
    flat: Dict[str, Any] = {}
    for key, value in nested.items():
        name = f"{prefix}{key}"
        if isinstance(value, Mapping) and value:
            flat.update(flatten(value, f"{name}."))
        else:
            flat[name] = value
    return flat


def deep_merge(base: Mapping[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    merged = dict(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), Mapping):
            merged[key] = deep_merge(merged[key], value)
        else:
            merged[key] = value
    return merged


def load_json_config(config_path: str) -> dict:
    """Load configuration from JSON file.

    Args:
        config_path: Path to JSON configuration file

    Returns:
        Nested configuration dictionary

    Raises:
        ConfigError: If the file is missing or not a JSON object
    """
    try:
        with open(config_path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (FileNotFoundError, json.JSONDecodeError) as e:
        raise ConfigError(f"Error loading config file {config_path}: {e}", path=str(config_path))
    if not isinstance(data, dict):
        raise ConfigError(f"config file {config_path} must hold a JSON object", path=str(config_path))
    return unflatten(data)


def find_config_file() -> Optional[str]:
    """Find configuration file in common locations.

    Returns:
        Path to config file or None if not found
    """
    for path_str in SEARCH_PATHS:
        path = Path(path_str).expanduser()
        if path.exists() and path.is_file():
            return str(path)
    return None


def _validation_error(e: ValidationError, source: str) -> ConfigError:
    first = e.errors()[0]
    where = ".".join(str(p) for p in first["loc"])
    return ConfigError(f"invalid configuration ({source}): {where}: {first['msg']}",
                       errors=[{"key": ".".join(str(p) for p in err["loc"]), "message": err["msg"]}
                               for err in e.errors()])


def get_config(config_file: Optional[str] = None, overrides: Optional[Mapping[str, Any]] = None) -> RunConfig:
    """Load configuration from defaults, JSON file, environment and overrides.

    Precedence, lowest first: defaults, JSON file, ``POLYPCOUNT_*``
    environment variables, ``overrides`` (dotted keys; None values skipped).

    Args:
        config_file: Optional path to JSON config file; searched for when None
        overrides: Dotted-key values from command-line flags

    Returns:
        RunConfig

    Raises:
        ConfigError: On unreadable files, unknown keys or constraint violations
    """
    json_config_path = config_file or find_config_file()
    file_data = {}
    if json_config_path:
        file_data = load_json_config(json_config_path)
        logger.debug(f"Using config file {json_config_path}")

    try:
        env_data = RunConfig().model_dump(exclude_unset=True)
    except ValidationError as e:
        raise _validation_error(e, "environment")

    flag_data = unflatten({k: v for k, v in (overrides or {}).items() if v is not None})
    try:
        return RunConfig(**deep_merge(deep_merge(file_data, env_data), flag_data))
    except ValidationError as e:
        raise _validation_error(e, json_config_path or "flags")


def config_from_dict(data: Mapping[str, Any]) -> RunConfig:
    """Rebuild a RunConfig from a resolved dump (as stored in manifests)."""
    try:
        return RunConfig(**unflatten(dict(data)))
    except ValidationError as e:
        raise _validation_error(e, "manifest")


def create_sample_config(path: str = "polypcount.json") -> str:
    """Create a sample configuration file with every default, flat dotted keys.

    Args:
        path: Path where to create the sample config file

    Returns:
        The written path
    """
    sample = RunConfig(jobs=1).results_dict()
    sample["evaluation"].pop("grid")
    with open(path, 'w', encoding='utf-8') as f:
        json.dump(flatten(sample), f, indent=2)
        f.write("\n")
    return path
