"""Engine configuration: identity, gains, catalog, display tables.

Everything tunable lives in one EngineConfig value so a session, a trace
header and a config file all describe the engine the same way. Files are
plain JSON; any omitted field keeps its default. Resolution order for
the CLI and server is: explicit --config path, then the EMOACT_CONFIG
environment variable, then built-in defaults.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .emotion import DEFAULT_ACTIVITY_COUPLING
from .epa import DEFAULT_CATALOG, EmotionCatalog, EmotionLabel, EpaVector
from .expression import (
    ANIMATION_COOLDOWN_MS,
    DEFAULT_ANIMATIONS,
    DEFAULT_EYE_COLORS,
    DisplayPolicy,
    validate_expression_tables,
)
from .impression import DEFAULT_GAINS, ImpressionGains

CONFIG_SCHEMA_VERSION = 1
CONFIG_ENV_VAR = "EMOACT_CONFIG"

DEFAULT_IDENTITY = EpaVector(1.5, 1.5, 1.0)
DEFAULT_SEED = 0

_POLICY_NAMES = {
    "low": DisplayPolicy.LOW_FREQUENCY,
    "high": DisplayPolicy.HIGH_FREQUENCY,
}


class ConfigError(ValueError):
    """The configuration file cannot be used."""


def policy_from_name(name: str) -> DisplayPolicy:
    try:
        return _POLICY_NAMES[name]
    except KeyError:
        raise ConfigError(f"unknown policy {name!r}, expected 'low' or 'high'") from None


def policy_name(policy: DisplayPolicy) -> str:
    return "low" if policy is DisplayPolicy.LOW_FREQUENCY else "high"


@dataclass(frozen=True)
class EngineConfig:
    identity: EpaVector = DEFAULT_IDENTITY
    activity_coupling: float = DEFAULT_ACTIVITY_COUPLING
    gains: ImpressionGains = DEFAULT_GAINS
    catalog: EmotionCatalog = DEFAULT_CATALOG
    eye_colors: dict[EmotionLabel, str] = field(default_factory=lambda: dict(DEFAULT_EYE_COLORS))
    animations: dict[EmotionLabel, tuple[str, ...]] = field(
        default_factory=lambda: dict(DEFAULT_ANIMATIONS)
    )
    cooldown_ms: int = ANIMATION_COOLDOWN_MS
    policy: DisplayPolicy = DisplayPolicy.HIGH_FREQUENCY
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        validate_expression_tables(self.eye_colors, self.animations)
        if self.cooldown_ms < 0:
            raise ConfigError(f"cooldown_ms must be non-negative, got {self.cooldown_ms}")

    def replace(self, **overrides) -> "EngineConfig":
        merged = {
            "identity": self.identity,
            "activity_coupling": self.activity_coupling,
            "gains": self.gains,
            "catalog": self.catalog,
            "eye_colors": self.eye_colors,
            "animations": self.animations,
            "cooldown_ms": self.cooldown_ms,
            "policy": self.policy,
            "seed": self.seed,
        }
        merged.update(overrides)
        return EngineConfig(**merged)

    def to_dict(self) -> dict:
        return {
            "v": CONFIG_SCHEMA_VERSION,
            "identity": self.identity.as_dict(),
            "activity_coupling": self.activity_coupling,
            "gains": self.gains.to_dict(),
            "catalog": self.catalog.to_dict(),
            "eye_colors": {label.value: color for label, color in self.eye_colors.items()},
            "animations": {label.value: list(ids) for label, ids in self.animations.items()},
            "cooldown_ms": self.cooldown_ms,
            "policy": policy_name(self.policy),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "EngineConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        version = data.get("v", CONFIG_SCHEMA_VERSION)
        if version != CONFIG_SCHEMA_VERSION:
            raise ConfigError(f"unsupported config version {version!r}")
        kwargs: dict = {}
        try:
            if "identity" in data:
                kwargs["identity"] = EpaVector.from_dict(data["identity"])
            if "activity_coupling" in data:
                kwargs["activity_coupling"] = float(data["activity_coupling"])
            if "gains" in data:
                kwargs["gains"] = ImpressionGains.from_dict(data["gains"])
            if "catalog" in data:
                kwargs["catalog"] = EmotionCatalog.from_dict(data["catalog"])
            if "eye_colors" in data:
                kwargs["eye_colors"] = {
                    EmotionLabel(name): str(color) for name, color in data["eye_colors"].items()
                }
            if "animations" in data:
                kwargs["animations"] = {
                    EmotionLabel(name): tuple(str(a) for a in ids)
                    for name, ids in data["animations"].items()
                }
            if "cooldown_ms" in data:
                kwargs["cooldown_ms"] = int(data["cooldown_ms"])
            if "policy" in data:
                kwargs["policy"] = policy_from_name(str(data["policy"]))
            if "seed" in data:
                kwargs["seed"] = int(data["seed"])
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"bad config value: {exc}") from exc
        try:
            return cls(**kwargs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


DEFAULT_CONFIG = EngineConfig()


def load_config(path: str | Path | None = None) -> EngineConfig:
    """Resolve the active configuration.

    An explicit path wins; otherwise the EMOACT_CONFIG environment
    variable is consulted; otherwise defaults apply.
    """
    if path is None:
        env = os.environ.get(CONFIG_ENV_VAR)
        if env:
            path = env
    if path is None:
        return DEFAULT_CONFIG
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file is not valid JSON: {exc}") from exc
    return EngineConfig.from_dict(data)
