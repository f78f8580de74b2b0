"""Suite configuration files (YAML or JSON)."""

from __future__ import annotations

import os
from dataclasses import fields
from pathlib import Path

import yaml

from .harness import SuiteConfig
from .learners import LearnerConfig

OUTPUT_ENV = "MALBENCH_OUTPUT_DIR"
DEFAULT_OUTPUT = "malbench-output"

SUITE_KEYS = {f.name for f in fields(SuiteConfig)} - {"learner"}
LEARNER_KEYS = {f.name for f in fields(LearnerConfig)}


class ConfigError(ValueError):
    pass


def output_dir(explicit: str | None = None) -> Path:
    return Path(explicit or os.environ.get(OUTPUT_ENV) or DEFAULT_OUTPUT)


def parse_config(values: dict) -> SuiteConfig:
    """Build a SuiteConfig from a flat mapping; learner keys may also sit under ``learner``."""
    values = dict(values or {})
    nested = values.pop("learner", None) or {}
    if not isinstance(nested, dict):
        raise ConfigError("'learner' must be a mapping")
    suite_part, learner_part = {}, dict(nested)
    for key, value in values.items():
        if key in SUITE_KEYS:
            suite_part[key] = value
        elif key in LEARNER_KEYS:
            learner_part[key] = value
        else:
            raise ConfigError(f"unknown config key: {key}")
    for key in learner_part:
        if key not in LEARNER_KEYS:
            raise ConfigError(f"unknown config key: learner.{key}")
    roster = suite_part.get("roster")
    if isinstance(roster, str):
        suite_part["roster"] = tuple(s.strip() for s in roster.split(",") if s.strip())
    elif roster is not None:
        suite_part["roster"] = tuple(roster)
    try:
        learner = LearnerConfig(**learner_part)
        return SuiteConfig(learner=learner, **suite_part)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path, overrides: dict | None = None) -> SuiteConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        values = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}") from None
    if not isinstance(values, dict):
        raise ConfigError("config must be a mapping of keys to values")
    values.update({k: v for k, v in (overrides or {}).items() if v is not None})
    return parse_config(values)
