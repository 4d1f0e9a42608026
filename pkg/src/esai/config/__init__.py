"""Configuration files for scenes, refocus search and training."""

from .config_parser import (
    SceneConfig,
    SearchConfig,
    TrainSettings,
    build_config,
    config_to_lines,
    load_config,
    parse_overrides,
    read_config_file,
)

__all__ = [
    "SceneConfig",
    "SearchConfig",
    "TrainSettings",
    "build_config",
    "config_to_lines",
    "load_config",
    "parse_overrides",
    "read_config_file",
]
