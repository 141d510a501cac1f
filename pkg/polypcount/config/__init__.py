"""Configuration module."""

from .settings import (
    RunConfig,
    config_from_dict,
    create_sample_config,
    deep_merge,
    find_config_file,
    flatten,
    get_config,
    load_json_config,
    unflatten,
)

__all__ = [
    "RunConfig",
    "config_from_dict",
    "create_sample_config",
    "deep_merge",
    "find_config_file",
    "flatten",
    "get_config",
    "load_json_config",
    "unflatten",
]
