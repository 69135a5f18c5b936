"""Experiment configuration: dataclasses plus a YAML loader with schema checks.

The defaults reproduce the published simulation settings. Values the
original setup leaves open (transmit power, frame coding, accuracy curve)
are marked as such in ``configs/defaults.yaml``.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any

import yaml

from .core import SystemConfig
from .dnn import (
    AccuracyModel,
    AffineComplexity,
    ComplexityModel,
    LayeredComplexity,
    LayerSpec,
    SaturatingAccuracy,
    TabularAccuracy,
    TabularComplexity,
    resnet18_layers,
)
from .offload import METHODS, Models

CONFIG_ENV = "VIDOFFLOAD_CONFIG"


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class FrameSpec:
    height: int = 112
    width: int = 112
    channels: int = 3
    bytes_per_sample: float = 1.0
    compression: float = 0.05  # coded size / raw size

    @property
    def bits(self) -> float:
        return self.height * self.width * self.channels * self.bytes_per_sample * 8 * self.compression


@dataclass(frozen=True)
class DeviceDefaults:
    count: int = 20
    f_local_max_Hz: float = 1.8e9
    tx_power_W: float = 0.1
    accuracy_req: float = 0.90
    m_max: int = 16
    min_distance_m: float = 1.0
    frame: FrameSpec = field(default_factory=FrameSpec)


@dataclass(frozen=True)
class ComplexitySpec:
    kind: str = "layered"  # layered | tabular | affine
    preset: str | None = "resnet18"
    num_classes: int = 27
    layers: tuple | None = None
    table: dict | None = None
    c0: float = 0.0
    c1: float = 0.0

    def build(self, height: int, width: int, channels: int, m_max: int) -> ComplexityModel:
        if self.kind == "layered":
            if self.layers:
                layers = tuple(l if isinstance(l, LayerSpec) else LayerSpec(**l) for l in self.layers)
            elif self.preset == "resnet18":
                layers = tuple(resnet18_layers(self.num_classes, channels))
            else:
                raise ConfigError(f"unknown layer preset {self.preset!r}")
            return LayeredComplexity(layers, height, width, channels, m_max)
        if self.kind == "tabular":
            if not self.table:
                raise ConfigError("tabular complexity needs a table")
            return TabularComplexity(self.table)
        if self.kind == "affine":
            return AffineComplexity(self.c0, self.c1, m_max)
        raise ConfigError(f"unknown complexity kind {self.kind!r}")


@dataclass(frozen=True)
class AccuracySpec:
    kind: str = "saturating"  # saturating | tabular
    a: float = 0.95
    b: float = 0.5
    c: float = 0.4
    table: dict | None = None
    fit: bool = False  # fit a saturating curve to ``table``

    def build(self) -> AccuracyModel:
        if self.kind == "saturating":
            if self.fit:
                if not self.table:
                    raise ConfigError("fitting a saturating curve needs a table")
                return SaturatingAccuracy.fit(self.table)
            return SaturatingAccuracy(self.a, self.b, self.c)
        if self.kind == "tabular":
            if not self.table:
                raise ConfigError("tabular accuracy needs a table")
            return TabularAccuracy(self.table)
        raise ConfigError(f"unknown accuracy kind {self.kind!r}")


@dataclass(frozen=True)
class RunSpec:
    seed: int = 2022
    trials: int = 100
    methods: tuple[str, ...] = ("greedy", "local-all", "edge-all", "random")
    random_p: float = 0.5
    enum_cap: int = 14
    workers: int = 1


@dataclass(frozen=True)
class ExperimentConfig:
    system: SystemConfig = field(default_factory=SystemConfig)
    devices: DeviceDefaults = field(default_factory=DeviceDefaults)
    complexity: ComplexitySpec = field(default_factory=ComplexitySpec)
    accuracy: AccuracySpec = field(default_factory=AccuracySpec)
    experiment: RunSpec = field(default_factory=RunSpec)

    def models(self) -> Models:
        f = self.devices.frame
        return Models(
            self.complexity.build(f.height, f.width, f.channels, self.devices.m_max),
            self.accuracy.build(),
        )

    def with_updates(self, **sections) -> "ExperimentConfig":
        """``cfg.with_updates(system={"beta1": 0.3, "beta2": 0.7})``"""
        out = self
        for name, changes in sections.items():
            out = replace(out, **{name: replace(getattr(out, name), **changes)})
        return out


_SECTIONS = {
    "system": SystemConfig,
    "devices": DeviceDefaults,
    "complexity": ComplexitySpec,
    "accuracy": AccuracySpec,
    "experiment": RunSpec,
}


def _coerce(cls, raw: dict, where: str):
    if not isinstance(raw, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(raw).__name__}")
    known = {f.name: f for f in fields(cls)}
    unknown = sorted(set(raw) - set(known))
    if unknown:
        raise ConfigError(f"{where}: unknown keys {unknown}")
    kwargs: dict[str, Any] = {}
    for name, value in raw.items():
        default = getattr(cls(), name) if name != "frame" else None
        if name == "frame":
            kwargs[name] = _coerce(FrameSpec, value, f"{where}.frame")
        elif name == "table" and value is not None:
            kwargs[name] = _table(value, f"{where}.table")
        elif name in ("methods", "layers") and value is not None:
            kwargs[name] = tuple(value)
        elif isinstance(default, bool):
            kwargs[name] = bool(value)
        elif isinstance(default, int) and not isinstance(value, bool):
            try:
                if float(value) != int(float(value)):
                    raise ValueError
                kwargs[name] = int(float(value))
            except (TypeError, ValueError):
                raise ConfigError(f"{where}.{name}: expected an integer, got {value!r}") from None
        elif isinstance(default, float):
            try:
                kwargs[name] = float(value)  # YAML reads 5e6 as a string
            except (TypeError, ValueError):
                raise ConfigError(f"{where}.{name}: expected a number, got {value!r}") from None
        else:
            kwargs[name] = value
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _table(value, where: str) -> dict[int, float]:
    """Tables are written either as a mapping or as ``[[M, value], ...]``."""
    try:
        items = value.items() if isinstance(value, dict) else value
        return {int(k): float(v) for k, v in items}
    except (TypeError, ValueError):
        raise ConfigError(f"{where}: expected M -> value pairs") from None


def config_from_dict(raw: dict | None) -> ExperimentConfig:
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    unknown = sorted(set(raw) - set(_SECTIONS))
    if unknown:
        raise ConfigError(f"unknown top-level sections {unknown}")
    cfg = ExperimentConfig(**{k: _coerce(_SECTIONS[k], v or {}, k) for k, v in raw.items()})
    bad = [m for m in cfg.experiment.methods if m not in METHODS]
    if bad:
        raise ConfigError(f"experiment.methods: unknown methods {bad}; choose from {METHODS}")
    return cfg


def load_config(path: str | os.PathLike | None = None) -> ExperimentConfig:
    """Load a YAML config; no path (and no env var) means built-in defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return ExperimentConfig()
    text = Path(path).read_text()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    return config_from_dict(raw)


def config_to_dict(cfg: ExperimentConfig) -> dict:
    out = dataclasses.asdict(cfg)
    out["experiment"]["methods"] = list(cfg.experiment.methods)
    return out
