"""Run configuration shared by the command line and sweep bundles."""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields
from pathlib import Path

from .algebra import DEFAULT_TERM_BUDGET, ContractError
from .models import TRACKS


class ConfigError(ContractError):
    pass


@dataclass
class RunConfig:
    N: int = 4
    track: str = "rr"
    L: int | None = None
    n: int = 1
    n_max: int = 2
    degree: int = 1
    grid: int | None = None
    refine: int | None = None
    budget: int = DEFAULT_TERM_BUDGET
    basis_cap: int = 10 ** 5
    cache_dir: str | None = None
    seed: int = 0
    out: str | None = None
    threads: int = 1
    samples: int = 20
    tasks: tuple = ()

    def __post_init__(self):
        self.tasks = tuple(self.tasks)
        self.validate()

    def validate(self):
        if self.track not in TRACKS:
            raise ConfigError(f"track must be one of {TRACKS}, got {self.track!r}")
        if self.track == "rr" and self.N != 4:
            raise ConfigError("the rr track exists for N = 4 only")
        if self.N < 4:
            raise ConfigError("N must be at least 4")
        if self.L is not None and self.L < self.N - 1:
            raise ConfigError(f"L must be at least N - 1 = {self.N - 1}")
        for name in ("n", "n_max", "threads", "samples", "budget", "basis_cap"):
            if getattr(self, name) < 1:
                raise ConfigError(f"{name} must be positive")
        if self.degree < 0:
            raise ConfigError("degree must be non-negative")
        if self.grid is not None and self.grid < 2:
            raise ConfigError("grid needs at least 2 points per leg")
        if self.refine is not None and self.refine < 0:
            raise ConfigError("refine must be non-negative")
        from .experiments import SWEEP_TASKS
        bad = [t for t in self.tasks if t not in SWEEP_TASKS]
        if bad:
            raise ConfigError(f"unknown tasks {bad}; choose from {SWEEP_TASKS}")

    def to_json(self) -> dict:
        d = asdict(self)
        d["tasks"] = list(self.tasks)
        return d

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {f.name: f for f in fields(cls)}
        kwargs = {}
        for key, raw in values.items():
            key = key.replace("-", "_")
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            kwargs[key] = _coerce(key, raw)
        return cls(**kwargs)


_INT_KEYS = {"N", "L", "n", "n_max", "degree", "grid", "refine", "budget", "basis_cap", "seed", "threads", "samples"}


def _coerce(key: str, raw):
    if not isinstance(raw, str):
        return raw
    raw = raw.strip()
    if raw.lower() in ("", "none", "null"):
        return None
    if key in _INT_KEYS:
        try:
            return int(raw)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {raw!r}") from None
    if key == "tasks":
        return tuple(t for t in raw.replace(",", " ").split() if t)
    return raw


def read_config_file(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out
