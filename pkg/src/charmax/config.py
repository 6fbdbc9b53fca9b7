"""Run configuration: the free constants of the construction plus search knobs.

Files hold ``key=value`` lines (``#`` starts a comment); command-line flags
override file values.
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

FORMATS = ("json", "csv", "text")


@dataclass(frozen=True)
class RunConfig:
    seed: int = 0
    B: float = 1.0
    fouvry_exponent: float = 0.6687
    delta_param: float = 1.0
    delta1: float = 1.0
    s_cap: int = 8
    restarts: int = 2
    iters: int = 20
    search_budget: int = 200
    heuristic_restarts: int = 50
    heuristic_iters: int = 50
    exact_budget: int = 5000
    tau_grid: int = 64
    c1: float = 0.1
    c2: float = 0.01
    format: str | None = None

    def __post_init__(self):
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "format":
                if value is not None and value not in FORMATS:
                    raise ValueError(f"format must be one of {FORMATS}")
            elif f.name == "seed":
                if value < 0:
                    raise ValueError("seed must be nonnegative")
            elif f.name == "search_budget":
                if value < 0:
                    raise ValueError("search_budget must be nonnegative")
            elif value <= 0:
                raise ValueError(f"{f.name} must be positive")
        if not 0 < self.fouvry_exponent < 1:
            raise ValueError("fouvry_exponent must lie in (0, 1)")

    def replace(self, **changes) -> RunConfig:
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)


def _coerce(name: str, raw: str):
    types = {f.name: f.type for f in dataclasses.fields(RunConfig)}
    if name not in types:
        raise ValueError(f"unknown config key {name!r}")
    kind = types[name]
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    return raw


def parse_config(text: str) -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line {lineno}: expected key=value")
        key, raw = (part.strip() for part in line.split("=", 1))
        values[key] = _coerce(key, raw)
    return values


def load_config(path: str | None = None, **overrides) -> RunConfig:
    values = {}
    if path:
        with open(path, encoding="utf-8") as fh:
            values = parse_config(fh.read())
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)
