"""Service configuration: TOML file over sane defaults.

Only keys present in the file override defaults; unknown keys are
rejected so typos fail loudly at startup rather than silently running
with defaults.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib
from pathlib import Path

from .errors import ValidationError


@dataclass
class AppConfig:
    port: int = 8000
    palette: list[str] = field(default_factory=lambda: ["yellow", "green", "red"])
    k: int = 4
    n_top: int = 150
    threshold: float = 0.6
    iterations: int = 500
    lda_seed: int = 7
    keywords_per_topic: int = 5

    def __post_init__(self):
        if self.port <= 0 or self.port > 65535:
            raise ValidationError(f"port out of range: {self.port}")
        if self.k < 1:
            raise ValidationError(f"k must be >= 1, got {self.k}")
        if self.n_top < 1:
            raise ValidationError(f"n_top must be >= 1, got {self.n_top}")
        if not 0.0 < self.threshold <= 1.0:
            raise ValidationError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.iterations < 1:
            raise ValidationError(f"iterations must be >= 1, got {self.iterations}")
        if self.keywords_per_topic < 0:
            raise ValidationError("keywords_per_topic must be >= 0")


def load_config(path: str | Path | None = None) -> AppConfig:
    if path is None:
        return AppConfig()
    raw = tomllib.loads(Path(path).read_text("utf-8"))
    known = {f.name for f in fields(AppConfig)}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    return AppConfig(**raw)
