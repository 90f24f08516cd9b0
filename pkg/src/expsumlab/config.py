"""Run configuration: defaults, config-file parsing, validation.

Config files are plain key=value lines ('#' comments allowed).  Flags
override file values, which override environment, which overrides the
built-in defaults.  Unknown keys are rejected so typos cannot silently
change an experiment.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

CACHE_ENV_VAR = "EXPSUMLAB_CACHE_DIR"


@dataclass
class RunConfig:
    cache_dir: Optional[str] = None
    threads: int = 1
    seed: int = 0
    output_format: str = "csv"          # csv | json
    prime_cap: int = 1 << 22            # per-table cap
    sweep_cap: int = 30_000
    extension_cap: int = 64
    dichotomy_threshold: float = 10.0
    figures_dir: Optional[str] = None

    def validate(self) -> None:
        if self.output_format not in ("csv", "json"):
            raise ValueError(f"output_format must be csv or json, got {self.output_format!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.prime_cap < 3 or self.sweep_cap < 10:
            raise ValueError("caps are implausibly small")
        if self.dichotomy_threshold <= 0:
            raise ValueError("dichotomy_threshold must be positive")


_INT_KEYS = {"threads", "seed", "prime_cap", "sweep_cap", "extension_cap"}
_FLOAT_KEYS = {"dichotomy_threshold"}


def parse_config_file(path: str | Path) -> dict:
    known = {f.name for f in fields(RunConfig)}
    out: dict = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if key not in known:
            raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
        if key in _INT_KEYS:
            out[key] = int(value)
        elif key in _FLOAT_KEYS:
            out[key] = float(value)
        else:
            out[key] = value
    return out


def build_config(
    config_file: Optional[str] = None, **overrides
) -> RunConfig:
    values: dict = {}
    env_cache = os.environ.get(CACHE_ENV_VAR)
    if env_cache:
        values["cache_dir"] = env_cache
    if config_file:
        values.update(parse_config_file(config_file))
    for key, val in overrides.items():
        if val is not None:
            values[key] = val
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg
