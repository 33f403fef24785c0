"""Experiment configuration: validation and loading from INI or JSON."""

from __future__ import annotations

import configparser
import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

EXPERIMENTS = (
    "large-components",
    "nests",
    "separation",
    "supnorm-tail",
    "univariate-roots",
    "bounds",
    "barrier-stability",
)


class ConfigError(ValueError):
    """Invalid experiment configuration (raised before any sampling)."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything that determines an experiment's output.

    ``f`` lists scales f(d) (the annulus and nest constructions), ``epsilon``
    and ``m`` set the separated point configurations, ``radius`` the disk used
    for nest depth (default sqrt(4 f / d)), ``kinds`` the references used by
    ``bounds`` and ``barrier-stability``.  ``block_size`` fixes how trials are
    grouped into work units and is part of the result's identity; ``workers``
    is not.
    """

    experiment: str
    d: tuple[int, ...]
    f: tuple[float, ...] = (1.0,)
    alpha: float = 0.9
    epsilon: float = 0.3
    m: int = 2
    trials: int = 100
    master_seed: int = 0
    resolution: int | None = None
    radius: float | None = None
    kinds: tuple[str, ...] = ("P0", "P1", "P2")
    subspace: str = "P2"
    variance_convention: str = "half"
    block_size: int = 50
    workers: int = 1
    out: str | None = None
    format: str = "csv"
    extra: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "d", tuple(int(v) for v in _as_tuple(self.d)))
        object.__setattr__(self, "f", tuple(float(v) for v in _as_tuple(self.f)))
        object.__setattr__(self, "kinds", tuple(str(v) for v in _as_tuple(self.kinds)))
        self.validate()

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if not self.d:
            raise ConfigError("need at least one degree")
        min_d = 1 if self.experiment == "univariate-roots" else 2
        if min(self.d) < min_d:
            raise ConfigError(f"degrees must be >= {min_d}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not self.f or min(self.f) < 1.0:
            raise ConfigError("f values must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must lie in (0, 1)")
        if not 0.0 < self.epsilon < 0.5:
            raise ConfigError("epsilon must lie in (0, 1/2)")
        if self.m < 1:
            raise ConfigError("m must be >= 1")
        if self.resolution is not None and self.resolution < 8:
            raise ConfigError("resolution must be >= 8")
        if self.radius is not None and not 0.0 < self.radius < 50.0:
            raise ConfigError("radius must lie in (0, 50)")
        if any(k not in ("P0", "P1", "P2") for k in self.kinds):
            raise ConfigError("kinds must be drawn from P0, P1, P2")
        if self.subspace not in ("X0", "P2"):
            raise ConfigError("subspace must be X0 or P2")
        if self.variance_convention not in ("half", "unit"):
            raise ConfigError("variance_convention must be half or unit")
        if self.block_size < 1 or self.workers < 1:
            raise ConfigError("block_size and workers must be >= 1")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.master_seed < 0:
            raise ConfigError("master_seed must be non-negative")
        if self.experiment in ("large-components", "bounds", "barrier-stability", "nests"):
            for d in self.d:
                for f in self.f:
                    if f > d:
                        raise ConfigError(f"f = {f} exceeds d = {d}")

    def as_dict(self) -> dict:
        out = asdict(self)
        out.pop("extra")
        out.update(self.extra)
        return out

    def replace(self, **kw) -> "ExperimentConfig":
        cur = {fl.name: getattr(self, fl.name) for fl in fields(self)}
        cur.update(kw)
        return ExperimentConfig(**cur)


def _as_tuple(v) -> tuple:
    if isinstance(v, str):
        return tuple(s.strip() for s in v.split(",") if s.strip())
    if isinstance(v, (list, tuple)):
        return tuple(v)
    return (v,)


_INT = {"m", "trials", "master_seed", "resolution", "block_size", "workers"}
_FLOAT = {"alpha", "epsilon", "radius"}


def _coerce(key: str, raw: str):
    raw = raw.strip()
    if raw.lower() in ("", "none", "null"):
        return None
    if key in _INT:
        return int(raw)
    if key in _FLOAT:
        return float(raw)
    return raw


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    """Read a flat key = value file (INI, section ``[experiment]`` optional)
    or a JSON object; keyword overrides win over the file."""
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(text)
            if not isinstance(data, dict):
                raise ConfigError("JSON config must be an object")
        else:
            cp = configparser.ConfigParser()
            if not text.lstrip().startswith("["):
                text = "[experiment]\n" + text
            cp.read_string(text)
            sect = cp["experiment"] if cp.has_section("experiment") else cp[cp.sections()[0]]
            data = {k: _coerce(k, v) for k, v in sect.items()}
    except (json.JSONDecodeError, configparser.Error) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    data.update({k: v for k, v in overrides.items() if v is not None})
    known = {fl.name for fl in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    try:
        return ExperimentConfig(**{k: v for k, v in data.items() if v is not None or k in ("resolution", "radius", "out")})
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
