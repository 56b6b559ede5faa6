"""Pipeline configuration: defaults, flat ``key = value`` config files and
command-line overrides (flags win over the file, the file over defaults)."""

from __future__ import annotations

from dataclasses import dataclass, fields
from pathlib import Path
from typing import Mapping

from . import resources
from .resources import Resources
from .svm import TrainConfig


@dataclass
class PipelineConfig:
    segmentation_lexicon: Path = resources.DEFAULT_PATHS["segmentation_lexicon"]
    terminology_lexicon: Path = resources.DEFAULT_PATHS["terminology_lexicon"]
    stopword_list: Path = resources.DEFAULT_PATHS["stopword_list"]
    ad_keywords: Path = resources.DEFAULT_PATHS["ad_keywords"]
    char_map: Path = resources.DEFAULT_PATHS["char_map"]
    tag_lexicon: Path = resources.DEFAULT_PATHS["tag_lexicon"]
    K: int = 3000
    C: float = 1.0
    wi: float = 0.9
    gamma_min: float = 0.5
    k_folds: int = 5
    seed: int = 42
    leaky_selection: bool = False

    def __post_init__(self) -> None:
        if self.K < 1:
            raise ValueError("K must be at least 1")
        if not self.C > 0:
            raise ValueError("C must be positive")
        if not 0 < self.wi <= 1:
            raise ValueError("wi must be in (0, 1]")
        if not 0.5 <= self.gamma_min <= 1.0:
            raise ValueError("gamma_min must be in [0.5, 1.0]")
        if self.k_folds < 2:
            raise ValueError("k_folds must be at least 2")

    def train_config(self) -> TrainConfig:
        return TrainConfig(C=self.C, wi=self.wi, seed=self.seed)

    def resource_paths(self) -> dict[str, Path]:
        return {
            "segmentation_lexicon": self.segmentation_lexicon,
            "terminology_lexicon": self.terminology_lexicon,
            "stopword_list": self.stopword_list,
            "ad_keywords": self.ad_keywords,
            "char_map": self.char_map,
            "tag_lexicon": self.tag_lexicon,
        }

    def load_resources(self) -> Resources:
        return resources.load_resources(self.resource_paths())


_PATH_KEYS = {
    "segmentation_lexicon",
    "terminology_lexicon",
    "stopword_list",
    "ad_keywords",
    "char_map",
    "tag_lexicon",
}
_VALID_KEYS = {f.name for f in fields(PipelineConfig)}


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a flat ``key = value`` file; # starts a comment line."""
    values: dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in _VALID_KEYS:
            raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
        values[key] = value
    return values


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _convert(key: str, value: str) -> object:
    if key in _PATH_KEYS:
        return Path(value)
    if key in ("K", "k_folds", "seed"):
        return int(value)
    if key in ("C", "wi", "gamma_min"):
        return float(value)
    if key == "leaky_selection":
        return _parse_bool(value)
    raise ValueError(f"unknown config key {key!r}")


def build_config(
    file_values: Mapping[str, str] | None = None,
    overrides: Mapping[str, object] | None = None,
) -> PipelineConfig:
    kwargs: dict[str, object] = {}
    for key, raw in (file_values or {}).items():
        kwargs[key] = _convert(key, raw)
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _VALID_KEYS:
            raise ValueError(f"unknown config key {key!r}")
        kwargs[key] = value
    return PipelineConfig(**kwargs)  # type: ignore[arg-type]
