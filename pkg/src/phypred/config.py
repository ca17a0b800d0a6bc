"""Run configuration: dataclasses, plain-text config files, dotted overrides.

Config files are ``key = value`` lines with ``#`` comments; nesting uses
dotted keys (``model.patch_size = 4``).  Every field has a default and
unknown keys are rejected.  The same dotted syntax drives ``--set``
overrides on the command line.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .losses import LossWeights
from .model import ModelConfig

GENERATORS = ("blobs", "advection", "navier_stokes", "none")


@dataclass
class OptimSettings:
    lr: float = 2e-3
    steps: int = 200
    batch_size: int = 2
    clip_norm: float = 1.0
    moment_only: bool = False  # data-free mode: optimize the moment penalty only

    def __post_init__(self):
        if self.lr < 0 or self.steps < 0 or self.batch_size < 1:
            raise ConfigError(f"invalid optimizer settings: lr={self.lr}, "
                              f"steps={self.steps}, batch={self.batch_size}")
        if self.clip_norm <= 0:
            raise ConfigError(f"clip_norm must be positive, got {self.clip_norm}")


@dataclass
class DataSettings:
    generator: str = "blobs"
    n_train: int = 200
    n_eval: int = 32
    t_in: int = 10
    t_out: int = 10
    h: int = 64
    w: int = 64
    seed: int = 1234
    n_blobs: int = 2
    velocity_x: float = 0.6
    velocity_y: float = 0.3
    nu: float = 0.05
    ns_nu: float = 1e-3

    def __post_init__(self):
        if self.generator not in GENERATORS:
            raise ConfigError(f"generator must be one of {GENERATORS}, got "
                              f"{self.generator!r}")
        if self.t_in < 1 or self.t_out < 1:
            raise ConfigError(f"need t_in,t_out >= 1, got {self.t_in},{self.t_out}")


@dataclass
class RunConfig:
    model: ModelConfig = field(default_factory=ModelConfig)
    optim: OptimSettings = field(default_factory=OptimSettings)
    data: DataSettings = field(default_factory=DataSettings)
    loss: LossWeights = field(default_factory=LossWeights)
    seed: int = 0
    out_dir: str = "runs/default"


_SECTIONS = {"model": ModelConfig, "optim": OptimSettings,
             "data": DataSettings, "loss": LossWeights}
_TOP_LEVEL = {"seed": int, "out_dir": str}


def _coerce(raw: str, typ, key: str):
    raw = raw.strip()
    if typ is bool:
        low = raw.lower()
        if low in ("true", "1", "yes", "on"):
            return True
        if low in ("false", "0", "no", "off"):
            return False
        raise ConfigError(f"cannot parse boolean for {key!r}: {raw!r}")
    try:
        return typ(raw)
    except ValueError:
        raise ConfigError(f"cannot parse {typ.__name__} for {key!r}: "
                          f"{raw!r}") from None


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines into a flat {dotted key: raw string} dict."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got "
                              f"{line.strip()!r}")
        key, value = stripped.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def build_run_config(file_path=None, overrides=None) -> RunConfig:
    """Defaults, then config file entries, then --set overrides."""
    flat: dict = {}
    if file_path is not None:
        flat.update(parse_config_text(Path(file_path).read_text()))
    for item in overrides or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, value = item.split("=", 1)
        flat[key.strip()] = value.strip()

    section_values: dict = {name: {} for name in _SECTIONS}
    top: dict = {}
    for key, raw in flat.items():
        if key in _TOP_LEVEL:
            top[key] = _coerce(raw, _TOP_LEVEL[key], key)
            continue
        if "." not in key:
            raise ConfigError(f"unknown configuration key {key!r}")
        section, fname = key.split(".", 1)
        cls = _SECTIONS.get(section)
        if cls is None:
            raise ConfigError(f"unknown configuration section {section!r} in "
                              f"{key!r}")
        fields = {f.name: f.type for f in dataclasses.fields(cls)}
        if fname not in fields:
            raise ConfigError(f"unknown configuration key {key!r}")
        ftype = {f.name: f for f in dataclasses.fields(cls)}[fname].type
        typ = {"int": int, "float": float, "str": str, "bool": bool}.get(
            ftype, ftype) if isinstance(ftype, str) else ftype
        section_values[section][fname] = _coerce(raw, typ, key)

    try:
        return RunConfig(
            model=ModelConfig(**section_values["model"]),
            optim=OptimSettings(**section_values["optim"]),
            data=DataSettings(**section_values["data"]),
            loss=LossWeights(**section_values["loss"]),
            **top,
        )
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def dump_run_config(cfg: RunConfig) -> str:
    """Render a RunConfig as a parseable config file."""
    lines = [f"seed = {cfg.seed}", f"out_dir = {cfg.out_dir}"]
    for section in ("model", "optim", "data", "loss"):
        obj = getattr(cfg, section)
        for f in dataclasses.fields(obj):
            lines.append(f"{section}.{f.name} = {getattr(obj, f.name)}")
    return "\n".join(lines) + "\n"
