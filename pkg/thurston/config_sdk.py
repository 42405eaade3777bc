from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Mapping, Optional
import copy

import toml

from .config import (
    DEFAULT_DEPTH_CAP,
    DEFAULT_LEVEL_CAP,
    DEFAULT_OUTPUT_FORMAT,
    DEFAULT_SEED,
    OUTPUT_FORMATS,
    cache_dir_from_env,
)


VALID_CONFIG_KEYS: tuple[str, ...] = (
    "rule_path",
    "command",
    "level_cap",
    "depth_cap",
    "seed",
    "cache_dir",
    "output_format",
    "float_columns",
    "stats",
    "progress",
    "options",
)


@dataclass(frozen=True)
class CommandSpec:
    """Metadata that describes which options a command understands."""

    name: str
    description: str
    supported_options: tuple[str, ...] = ()
    notes: Optional[str] = None

    def supports(self, option: str) -> bool:
        return option in self.supported_options


COMMAND_REGISTRY: Dict[str, CommandSpec] = {
    "validate": CommandSpec(
        name="validate",
        description="List every violated rule invariant.",
    ),
    "info": CommandSpec(
        name="info",
        description="Tile-class counts, w, b, deg(f|C) and entropy of a rule.",
    ),
    "critical": CommandSpec(
        name="critical",
        description="Critical vertices, postcritical orbits and kappa.",
    ),
    "subdivide": CommandSpec(
        name="subdivide",
        description="Build the cell decomposition at a level.",
        supported_options=("level", "counts", "check", "dump"),
    ),
    "check": CommandSpec(
        name="check",
        description="Structural checks of every level up to n.",
        supported_options=("level",),
    ),
    "cover-edge": CommandSpec(
        name="cover-edge",
        description="Tiles covering an edge through vertex flowers.",
        supported_options=("edge", "edge_level", "k"),
    ),
    "expansion": CommandSpec(
        name="expansion",
        description="Smallest level with no tile joining opposite sides.",
        supported_options=("max_n",),
    ),
    "iterate": CommandSpec(
        name="iterate",
        description="Rule of the n-th iterate.",
        supported_options=("n", "output"),
    ),
    "circle": CommandSpec(
        name="circle",
        description="Fixed sites of f restricted to C.",
    ),
    "fixed-points": CommandSpec(
        name="fixed-points",
        description="Fixed points of an iterate with weights.",
        supported_options=("iterate", "depth"),
    ),
    "preperiodic": CommandSpec(
        name="preperiodic",
        description="Census of points with f^m(x) = f^n(x).",
        supported_options=("m", "n", "depth"),
    ),
    "moebius": CommandSpec(
        name="moebius",
        description="Points of exact period n from the Moebius formula.",
        supported_options=("n", "cross_check"),
        notes="Rejects rules with periodic critical points.",
    ),
    "bound": CommandSpec(
        name="bound",
        description="Degree-sum bound for all vertices of a level.",
        supported_options=("level",),
    ),
    "mome": CommandSpec(
        name="mome",
        description="Measure of maximal entropy on a tile algebra.",
        supported_options=("level",),
    ),
    "equidist": CommandSpec(
        name="equidist",
        description="Preimage or preperiodic measure compared with mome.",
        supported_options=("kind", "i", "level", "m", "n"),
    ),
    "sample": CommandSpec(
        name="sample",
        description="Random backward orbit compared with mome.",
        supported_options=("steps", "level", "window"),
    ),
    "code": CommandSpec(
        name="code",
        description="Tile and preimage point of a word.",
        supported_options=("word", "level"),
    ),
    "experiment": CommandSpec(
        name="experiment",
        description="CSV series for plotting.",
        supported_options=("series", "level", "count", "steps", "checkpoints", "seeds"),
    ),
    "cache": CommandSpec(
        name="cache",
        description="Precompute complexes into the cache directory.",
        supported_options=("level", "clear"),
    ),
}


class ConfigValidationError(ValueError):
    pass


def _copy_value(value: Any) -> Any:
    if value is None:
        return None
    return copy.deepcopy(value)


@dataclass
class RunConfig:
    rule_path: Optional[str] = None
    command: Optional[str] = None
    level_cap: int = DEFAULT_LEVEL_CAP
    depth_cap: int = DEFAULT_DEPTH_CAP
    seed: int = DEFAULT_SEED
    cache_dir: Optional[str] = None
    output_format: str = DEFAULT_OUTPUT_FORMAT
    float_columns: bool = False
    stats: bool = False
    progress: bool = False
    options: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_dict(
        cls, data: Mapping[str, Any], *, strict: bool = False
    ) -> "RunConfig":
        unknown_keys = [key for key in data.keys() if key not in VALID_CONFIG_KEYS]
        if unknown_keys:
            raise ConfigValidationError(
                f"Unknown config keys: {', '.join(sorted(unknown_keys))}. "
                f"Valid keys: {', '.join(VALID_CONFIG_KEYS)}"
            )
        kwargs: Dict[str, Any] = {}
        for key in VALID_CONFIG_KEYS:
            if key in data:
                kwargs[key] = _copy_value(data[key])
        config = cls(**kwargs)
        if strict:
            config.validate()
        return config

    @classmethod
    def from_toml(cls, path: str, *, strict: bool = False) -> "RunConfig":
        try:
            raw_config = toml.load(path)
        except toml.TomlDecodeError as exc:
            raise ConfigValidationError(f"cannot parse config file {path}: {exc}")
        return cls.from_dict(raw_config, strict=strict)

    def to_dict(self) -> Dict[str, Any]:
        data: Dict[str, Any] = {}

        def maybe_set(key: str, value: Any) -> None:
            if value is None:
                return
            data[key] = _copy_value(value)

        for key in VALID_CONFIG_KEYS:
            maybe_set(key, getattr(self, key))
        if not self.options:
            data.pop("options", None)
        return data

    def merged(self, overrides: Mapping[str, Any]) -> "RunConfig":
        """Copy with every non-None override applied; options are merged."""
        data = self.to_dict()
        options = dict(self.options)
        for key, value in overrides.items():
            if value is None:
                continue
            if key == "options":
                options.update({k: v for k, v in value.items() if v is not None})
            else:
                data[key] = value
        data["options"] = options
        return RunConfig.from_dict(data)

    def resolved_cache_dir(self) -> Optional[str]:
        return self.cache_dir or cache_dir_from_env()

    def validate(self) -> None:
        for key in ("level_cap", "depth_cap"):
            value = getattr(self, key)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise ConfigValidationError(f"{key} must be a positive integer, got {value!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigValidationError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ConfigValidationError(
                f"Unknown output format '{self.output_format}'. "
                f"Supported formats: {', '.join(OUTPUT_FORMATS)}"
            )
        if self.command is None:
            return
        spec = describe_command(self.command)
        for key in self.options.keys():
            if not spec.supports(key):
                raise ConfigValidationError(
                    f"Unsupported option '{key}' for command '{self.command}'. "
                    f"Supported options: {spec.supported_options or 'None'}"
                )


def describe_command(name: str) -> CommandSpec:
    if name not in COMMAND_REGISTRY:
        raise ConfigValidationError(f"Unknown command '{name}'.")
    return COMMAND_REGISTRY[name]


def list_commands() -> Iterable[CommandSpec]:
    return COMMAND_REGISTRY.values()
