"""Experiment configuration: a flat ``key = value`` text format.

Blank lines and lines starting with ``#`` are ignored.  List-valued keys
take comma-separated values.  Unknown keys are an error.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

__all__ = [
    "ExperimentConfig",
    "ConfigError",
    "parse_config_text",
    "load_config",
    "defaults_for",
    "EXPERIMENTS",
]

EXPERIMENTS = ("density", "ergodicity", "transversality", "solvers", "twist-algebra")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    """Settings for one experiment run.

    ``samples`` is the main sample count (Monte Carlo draws, sweep points,
    solver targets or genus-two representations depending on the
    experiment); ``ensemble`` the fiber ensemble size and ``points`` a
    secondary count (one-holed torus points, solver sub-batches).
    """

    experiment: str = "density"
    group: str = "SU2"
    samples: int = 1_000_000
    points: int = 1000
    ensemble: int = 1000
    orbit_length: int = 100_000
    classes: int = 5
    batches: int = 100
    bins: int = 100
    cutoffs: tuple[int, ...] = ()
    moves: str = "twists"
    special_classes: bool = True
    margin: float = 1e-3
    z_max: float = 3.0
    tol: float = 1e-10
    grid: int = 400
    candidates: int = 2000
    degenerate: int = 20
    seed: int = 0
    workers: int = 1
    out: str = ""
    format: str = "csv"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")
        for name in (
            "samples", "points", "ensemble", "orbit_length", "classes", "batches",
            "bins", "grid", "candidates", "degenerate", "workers",
        ):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")
        if any(c <= 0 for c in self.cutoffs):
            raise ConfigError("cutoffs must be positive")
        if self.format not in ("csv", "json"):
            raise ConfigError("format is csv or json")
        if self.moves not in ("twists", "id"):
            raise ConfigError("moves is 'twists' or 'id'")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must fit in 64 bits")

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)

    def echo(self) -> dict:
        """Settings that determine the output (everything but the path)."""
        d = dataclasses.asdict(self)
        d.pop("out")
        d["cutoffs"] = list(self.cutoffs)
        return d


_DEFAULTS = {
    "density": {"samples": 1_000_000},
    "ergodicity": {"samples": 1},
    "transversality": {"samples": 1000, "points": 200},
    "solvers": {"samples": 1000, "points": 1000},
    "twist-algebra": {"samples": 10_000, "points": 100_000},
}


def defaults_for(experiment: str) -> ExperimentConfig:
    """Defaults of ``experiment``; sample counts differ between experiments."""
    if experiment not in _DEFAULTS:
        raise ConfigError(f"unknown experiment {experiment!r}")
    return ExperimentConfig(experiment=experiment, **_DEFAULTS[experiment])


def _convert(name: str, text: str):
    f = {f.name: f for f in dataclasses.fields(ExperimentConfig)}.get(name)
    if f is None:
        raise ConfigError(f"unknown key {name!r}")
    default = f.default
    try:
        if isinstance(default, bool):
            low = text.lower()
            if low not in ("true", "false", "1", "0", "yes", "no"):
                raise ValueError(text)
            return low in ("true", "1", "yes")
        if isinstance(default, int):
            return int(text.replace("_", ""), 0)
        if isinstance(default, float):
            return float(text)
        if isinstance(default, tuple):
            return tuple(int(x.replace("_", "")) for x in text.split(",") if x.strip())
    except ValueError:
        raise ConfigError(f"bad value for {name}: {text!r}") from None
    return text


def parse_config_text(text: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        values[key.replace("-", "_")] = _convert(key.replace("-", "_"), val)
    base = base or ExperimentConfig()
    return base.replace(**values)


def load_config(path, base: ExperimentConfig | None = None) -> ExperimentConfig:
    return parse_config_text(Path(path).read_text(), base)
