"""Experiment configuration: INI files with nested sections, canonical emission.

Configs are plain key-value sections (configparser dialect).  Parsing and
emission round-trip exactly, and the config hash is the SHA-256 of the
canonical emitted text, so identical configs hash identically regardless of
formatting in the source file.
"""

from __future__ import annotations

import configparser
import hashlib
import io
from dataclasses import dataclass, field

__all__ = ["ExperimentConfig", "ConfigError", "parse_config", "parse_config_text", "emit_config", "config_hash"]

EXPERIMENT_KINDS = ("elliptic", "dynamic", "sweep", "counterexample", "laplace", "cubic")


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


@dataclass
class ExperimentConfig:
    """Ordered sections of string key-value pairs with typed accessors."""

    sections: dict[str, dict[str, str]] = field(default_factory=dict)

    # -- typed getters -------------------------------------------------
    def _raw(self, section: str, key: str, default=None):
        try:
            return self.sections[section][key]
        except KeyError:
            if default is not None:
                return default
            raise ConfigError(f"missing [{section}] {key}") from None

    def get(self, section: str, key: str, default: str | None = None) -> str:
        return str(self._raw(section, key, default))

    def get_float(self, section: str, key: str, default: float | None = None) -> float:
        raw = self._raw(section, key, default)
        try:
            return float(raw)
        except (TypeError, ValueError):
            raise ConfigError(f"[{section}] {key} must be a number, got {raw!r}") from None

    def get_int(self, section: str, key: str, default: int | None = None) -> int:
        raw = self._raw(section, key, default)
        try:
            return int(str(raw))
        except (TypeError, ValueError):
            raise ConfigError(f"[{section}] {key} must be an integer, got {raw!r}") from None

    def get_floats(self, section: str, key: str, default: str | None = None) -> list[float]:
        raw = str(self._raw(section, key, default))
        try:
            return [float(tok) for tok in raw.split(",") if tok.strip()]
        except ValueError:
            raise ConfigError(f"[{section}] {key} must be a comma-separated number list") from None

    def get_ints(self, section: str, key: str, default: str | None = None) -> list[int]:
        return [int(v) for v in self.get_floats(section, key, default)]

    def section(self, name: str) -> dict[str, str]:
        return self.sections.get(name, {})

    @property
    def kind(self) -> str:
        kind = self.get("experiment", "kind")
        if kind not in EXPERIMENT_KINDS:
            raise ConfigError(f"unknown experiment kind {kind!r}")
        return kind

    @property
    def seed(self) -> int:
        return self.get_int("experiment", "seed", 0)

    @property
    def workers(self) -> int:
        return max(1, self.get_int("experiment", "workers", 1))


def parse_config_text(text: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from None
    sections = {
        name: {k: v.strip() for k, v in parser.items(name)} for name in parser.sections()
    }
    if "experiment" not in sections:
        raise ConfigError("config needs an [experiment] section")
    return ExperimentConfig(sections)


def parse_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read())


def emit_config(cfg: ExperimentConfig) -> str:
    """Canonical text form: section order preserved, one key per line."""
    out = io.StringIO()
    for name, body in cfg.sections.items():
        out.write(f"[{name}]\n")
        for key, val in body.items():
            out.write(f"{key} = {val}\n")
        out.write("\n")
    return out.getvalue()


def config_hash(cfg: ExperimentConfig) -> str:
    return hashlib.sha256(emit_config(cfg).encode()).hexdigest()
