"""
Defaults and experiment configuration.

All numeric defaults of the package live here. An ExperimentConfig is layered
from the experiment's own defaults, an optional JSON file, CLI flags and finally
the BALLERG_SEED environment variable.
"""
import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional

from .exceptions import ConfigError

# Forward shifts may grow a vector up to this many coordinates.
DEFAULT_DIM_CAP = 256
# Working dimension of sampled points.
DEFAULT_DIM = 8
# Seminorm sphere samples.
DEFAULT_RADIUS = 0.5
DEFAULT_COUNT = 2000
DEFAULT_SEED = 20240601
# Traces.
DEFAULT_N_MAX = 40
DEFAULT_TOL = 1e-6
PERSISTENCE_FACTOR = 10.0
# B_X-stability evidence threshold: sup orbit norm must stay below 1 - delta.
DEFAULT_DELTA = 1e-3
# Picard iteration.
FIXED_POINT_TOL = 1e-12
FIXED_POINT_MAX_ITER = 10_000
# Numerical guards.
HULL_TOL = 1e-12
SINGULARITY_GUARD = 1e-14
CONVERGED_FLOOR = 1e-14
SCHWARZ_ORIGIN_TOL = 1e-12
NORMALIZATION_TOL = 1e-9
# Above this many orbit points the separation is computed on a deterministic subsample.
MAX_SEPARATION_POINTS = 4000

SEED_ENV_VAR = "BALLERG_SEED"

_ALLOWED_KEYS = {
    "experiment",
    "symbol",
    "dim_cap",
    "spec",
    "dictionary",
    "n_max",
    "tol",
    "delta",
    "output_dir",
    "params",
}
_SPEC_KEYS = {"t", "count", "seed", "dim", "space"}


@dataclass(frozen=True)
class SpecConfig:
    """Parameters of the sphere sample used for seminorms."""

    t: float = DEFAULT_RADIUS
    count: int = DEFAULT_COUNT
    seed: int = DEFAULT_SEED
    dim: int = DEFAULT_DIM
    space: Any = field(default_factory=lambda: {"lp": 2})


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything a single experiment run needs."""

    experiment: str
    symbol: Optional[Dict[str, Any]] = None
    dim_cap: int = DEFAULT_DIM_CAP
    spec: SpecConfig = field(default_factory=SpecConfig)
    dictionary: Optional[Path] = None
    n_max: int = DEFAULT_N_MAX
    tol: float = DEFAULT_TOL
    delta: float = DEFAULT_DELTA
    output_dir: Optional[Path] = None
    params: Dict[str, Any] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return self.spec.seed

    def param(self, name: str, default: Any) -> Any:
        """Return an experiment parameter, falling back to ``default``."""
        return self.params.get(name, default)

    def validate(self) -> "ExperimentConfig":
        """Check value ranges and referenced files; returns self for chaining."""
        if self.dim_cap < 1:
            raise ConfigError(f"dim_cap must be positive, got {self.dim_cap}")
        if not 0.0 < self.spec.t < 1.0:
            raise ConfigError(f"spec.t must lie in (0, 1), got {self.spec.t}")
        if self.spec.count < 1:
            raise ConfigError(f"spec.count must be at least 1, got {self.spec.count}")
        if isinstance(self.spec.seed, bool) or not isinstance(self.spec.seed, int) or self.spec.seed < 0:
            raise ConfigError(f"seed must be a non-negative integer, got {self.spec.seed!r}")
        if self.spec.dim < 1:
            raise ConfigError(f"spec.dim must be at least 1, got {self.spec.dim}")
        if self.n_max < 1:
            raise ConfigError(f"n_max must be at least 1, got {self.n_max}")
        if self.tol <= 0 or self.delta <= 0:
            raise ConfigError("tol and delta must be positive")
        if self.dictionary is not None and not self.dictionary.is_file():
            raise ConfigError(f"Dictionary file not found: {self.dictionary}")
        return self


def load_config_file(path: Path) -> Dict[str, Any]:
    """Read a JSON config file and resolve relative file references against its directory."""
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = json.load(f)
    except (json.JSONDecodeError, OSError) as e:
        raise ConfigError(f"Could not read config {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must contain a JSON object")
    unknown = set(data) - _ALLOWED_KEYS
    if unknown:
        raise ConfigError(f"Unknown config keys: {', '.join(sorted(unknown))}")
    if "spec" in data:
        bad = set(data["spec"]) - _SPEC_KEYS
        if bad:
            raise ConfigError(f"Unknown spec keys: {', '.join(sorted(bad))}")
    if data.get("dictionary"):
        dictionary = Path(data["dictionary"])
        if not dictionary.is_absolute():
            dictionary = path.parent / dictionary
        data["dictionary"] = dictionary
    return data


def build_config(
    experiment: str,
    defaults: Optional[Dict[str, Any]] = None,
    overrides: Optional[Dict[str, Any]] = None,
    environ: Optional[Dict[str, str]] = None,
) -> ExperimentConfig:
    """Layer experiment defaults, file/CLI overrides and the seed environment variable."""
    merged: Dict[str, Any] = {}
    spec: Dict[str, Any] = {}
    params: Dict[str, Any] = {}
    for layer in (defaults or {}, overrides or {}):
        for key, value in layer.items():
            if key in ("spec", "params") and not isinstance(value, dict):
                raise ConfigError(f"'{key}' must be a JSON object, got {value!r}")
            if key == "spec":
                spec.update(value)
            elif key == "params":
                params.update(value)
            elif value is not None:
                merged[key] = value

    environ = os.environ if environ is None else environ
    if environ.get(SEED_ENV_VAR):
        try:
            spec["seed"] = int(environ[SEED_ENV_VAR])
        except ValueError as e:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {environ[SEED_ENV_VAR]!r}") from e

    merged.pop("experiment", None)
    try:
        config = ExperimentConfig(
            experiment=experiment,
            spec=SpecConfig(**spec),
            params=params,
            **merged,
        )
        if config.dictionary is not None:
            config = replace(config, dictionary=Path(config.dictionary))
        if config.output_dir is not None:
            config = replace(config, output_dir=Path(config.output_dir))
        return config.validate()
    except TypeError as e:
        raise ConfigError(f"Invalid config: {e}") from e
