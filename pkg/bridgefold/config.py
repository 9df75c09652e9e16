from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional
import os

import yaml


ENV_PREFIX = "BRIDGEFOLD_"
SEARCH_PATH = (Path("./config/config.yaml"), Path("./config.yaml"))
TRUE_WORDS = frozenset({"1", "true", "yes", "y", "on"})


@dataclass(frozen=True)
class OutputSettings:
    format: str  # text|json
    trace_path: Optional[Path]


@dataclass(frozen=True)
class FoldSettings:
    max_steps: Optional[int]  # None: bound derived from the initial graph
    exact_torus: bool


@dataclass(frozen=True)
class Settings:
    output: OutputSettings
    fold: FoldSettings
    log_level: str


class _Layers:
    """A YAML mapping under BRIDGEFOLD_* overrides, addressed by dotted key.

    "fold.max_steps" reads fold: max_steps: from the file and is overridden
    by BRIDGEFOLD_MAX_STEPS; the env name is the last key segment.
    """

    def __init__(self, data: Mapping[str, Any], environ: Mapping[str, str]):
        self._data = data
        self._environ = environ

    def env(self, key: str) -> Optional[str]:
        value = self._environ.get(ENV_PREFIX + key.rsplit(".", 1)[-1].upper())
        return value or None

    def file(self, key: str) -> Any:
        node: Any = self._data
        for part in key.split("."):
            if not isinstance(node, Mapping) or part not in node:
                return None
            node = node[part]
        return node

    def text(self, key: str, default: str) -> str:
        value = self.env(key) or self.file(key)
        return str(value).strip() if value not in (None, "") else default

    def count(self, key: str) -> Optional[int]:
        from_file = self.file(key)
        try:
            fallback = None if from_file in (None, "") else int(from_file)
        except (TypeError, ValueError):
            raise ValueError(f"Invalid {key}: {from_file!r}") from None
        override = self.env(key)
        if override is not None and override.lstrip("+-").isdigit():
            return int(override)
        # an unreadable override leaves the file value in place
        return fallback

    def flag(self, key: str) -> bool:
        value = self.env(key)
        if value is None:
            value = self.file(key)
        if isinstance(value, (bool, int)):
            return bool(value)
        return value is not None and str(value).strip().lower() in TRUE_WORDS


def _read_config_file(config_path: Optional[str], environ: Mapping[str, str]) -> dict[str, Any]:
    named = [p for p in (config_path, environ.get(ENV_PREFIX + "CONFIG")) if p]
    for path in [Path(p) for p in named] + list(SEARCH_PATH):
        if path.is_file():
            data = yaml.safe_load(path.read_text(encoding="utf-8"))
            return data if isinstance(data, dict) else {}
    return {}


def load_settings(config_path: Optional[str] = None, environ: Optional[Mapping[str, str]] = None) -> Settings:
    environ = os.environ if environ is None else environ
    layers = _Layers(_read_config_file(config_path, environ), environ)

    output_format = layers.text("output.format", "text").lower()
    trace_raw = layers.text("output.trace_path", "")
    max_steps = layers.count("fold.max_steps")

    if output_format not in ("text", "json"):
        raise ValueError(f"Invalid output format: {output_format}")
    if max_steps is not None and max_steps <= 0:
        raise ValueError(f"Invalid max steps: {max_steps}")

    return Settings(
        output=OutputSettings(format=output_format, trace_path=Path(trace_raw) if trace_raw else None),
        fold=FoldSettings(max_steps=max_steps, exact_torus=layers.flag("fold.exact_torus")),
        log_level=layers.text("log_level", "INFO").upper(),
    )
