"""Scene, search and training configuration files.

Two syntaxes are accepted: ``key=value`` text (``#`` comments, blank lines)
and, for ``.yml``/``.yaml`` files, a flat YAML mapping. Values are converted
to the field types of the target dataclass; unknown keys are rejected.
"""

from __future__ import annotations

import dataclasses
import logging
import types
import typing
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Mapping, MutableMapping, Optional, Type, TypeVar

import yaml

from esai.common.errors import ConfigError

LOGGER = logging.getLogger(__name__)

YAML_SUFFIXES = (".yml", ".yaml")
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}

ConfigT = TypeVar("ConfigT")


@dataclass(frozen=True)
class SceneConfig:
    """Synthetic scene, occluder and trajectory settings for the simulator."""

    width: int = 64
    height: int = 64
    fx: float = 320.0
    fy: float = 320.0
    depth: float = 0.6
    occluder_depth: float = 0.2
    texture: str = "blobs"
    texture_seed: int = 0
    texture_mean: float = 0.5
    texture_contrast: float = 0.6
    texture_scale: float = 4.0
    occluder: str = "fence"
    r_o: float = 0.85
    slat_count: int = 6
    stripes: int = 1
    r_t: Optional[float] = None
    slits: str = ""
    orientation: str = "vertical"
    occluder_intensity: float = 0.15
    occluder_jitter: float = 0.0
    eta: float = 0.2
    noise_rate: float = 0.0
    v: float = 0.177
    v_y: float = 0.0
    duration: float = 0.4
    t_ref: Optional[int] = None
    sample_rate: float = 10_000.0
    seed: int = 0


@dataclass(frozen=True)
class SearchConfig:
    """Auto-refocus search settings; ``psi_y_*`` left unset pins ψ_y to zero."""

    psi_x_min: float = -200.0
    psi_x_max: float = 200.0
    psi_y_min: Optional[float] = None
    psi_y_max: Optional[float] = None
    grid_points: int = 41
    refine_iters: int = 30
    metric: str = "variance"
    voting: str = "nearest"
    tau: float = 1.0


@dataclass(frozen=True)
class TrainSettings:
    """Hybrid reconstruction training settings, loss weights and LIF constants."""

    epochs: int = 40
    lr: float = 5e-4
    batch: int = 4
    intervals: int = 30
    seed: int = 0
    restart_period: int = 64
    beta_pix: float = 1.0
    beta_tv: float = 0.02
    beta_per: float = 0.0
    alpha: float = 0.9
    threshold: float = 1.0
    surrogate_width: float = 1.0
    validation_fraction: float = 0.2


def read_config_file(path: Path | str) -> Dict[str, str]:
    """Read ``path`` into a flat ``{key: value}`` mapping of strings."""

    path = Path(path)
    if not path.exists():
        raise ConfigError(f"configuration file not found: {path}")
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() in YAML_SUFFIXES:
        return _read_yaml(path, text)
    return _read_key_values(path, text)


def parse_overrides(pairs: Iterable[str]) -> Dict[str, str]:
    """Parse repeated ``key=value`` command-line overrides."""

    overrides: Dict[str, str] = {}
    for pair in pairs:
        if "=" not in pair:
            raise ConfigError(f"override must be key=value, got {pair!r}")
        key, value = (part.strip() for part in pair.split("=", 1))
        if not key:
            raise ConfigError(f"override has an empty key: {pair!r}")
        overrides[key] = value
    return overrides


def build_config(
    config_type: Type[ConfigT],
    values: Mapping[str, str],
    *,
    source: str = "<config>",
) -> ConfigT:
    """Convert string ``values`` into ``config_type``, rejecting unknown keys."""

    fields = {field.name: field for field in dataclasses.fields(config_type)}
    unknown = sorted(set(values) - set(fields))
    if unknown:
        raise ConfigError(f"{source}: unknown keys: {', '.join(unknown)}")
    hints = typing.get_type_hints(config_type)
    kwargs: Dict[str, object] = {}
    for key, raw in values.items():
        try:
            kwargs[key] = _convert(raw, hints[key])
        except ValueError as exc:
            raise ConfigError(f"{source}: invalid value for {key}: {raw!r} ({exc})") from exc
    return config_type(**kwargs)


def load_config(
    config_type: Type[ConfigT],
    path: Path | str | None = None,
    overrides: Mapping[str, str] | None = None,
) -> ConfigT:
    """Load ``config_type`` from an optional file with overrides applied on top."""

    values: Dict[str, str] = {}
    source = "<defaults>"
    if path is not None:
        values.update(read_config_file(path))
        source = str(path)
    if overrides:
        values.update(overrides)
    config = build_config(config_type, values, source=source)
    LOGGER.debug("Loaded %s from %s", config_type.__name__, source)
    return config


def config_to_lines(config: object) -> list[str]:
    """Render a config dataclass back into ``key=value`` lines."""

    lines = []
    for field in dataclasses.fields(config):
        value = getattr(config, field.name)
        if value is None:
            continue
        lines.append(f"{field.name}={value}")
    return lines


def _read_key_values(path: Path, text: str) -> Dict[str, str]:
    values: Dict[str, str] = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}: line {number}: expected key=value, got {raw_line.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if not key:
            raise ConfigError(f"{path}: line {number}: empty key")
        if key in values:
            raise ConfigError(f"{path}: line {number}: duplicate key {key!r}")
        values[key] = value
    return values


def _read_yaml(path: Path, text: str) -> Dict[str, str]:
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML") from exc
    if data is None:
        return {}
    if not isinstance(data, MutableMapping):
        raise ConfigError(f"{path}: configuration must be a mapping")
    values: Dict[str, str] = {}
    for key, value in data.items():
        if isinstance(value, (Mapping, list)):
            raise ConfigError(f"{path}: key {key!r} must hold a scalar value")
        values[str(key)] = "" if value is None else str(value)
    return values


def _convert(raw: str, hint: object) -> object:
    optional = False
    origin = typing.get_origin(hint)
    if origin in (typing.Union, types.UnionType):
        arguments = [argument for argument in typing.get_args(hint) if argument is not type(None)]
        optional = len(arguments) < len(typing.get_args(hint))
        hint = arguments[0]
    text = raw.strip()
    if optional and text.lower() in ("", "none"):
        return None
    if hint is bool:
        lowered = text.lower()
        if lowered in _TRUE:
            return True
        if lowered in _FALSE:
            return False
        raise ValueError("expected a boolean")
    if hint is int:
        return int(text)
    if hint is float:
        return float(text)
    return text


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
