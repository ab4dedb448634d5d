import json
import os
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, Field, ValidationError

from src.errors import ConfigError


class NormConfig(BaseModel):
    form: str = Field(default="pnorm", description="polygonal, pnorm, euclidean, ellipse, sum, faceted, hexagon, example")
    p: Optional[float] = Field(default=2.0, description="Exponent for the p-norm form; the string 'inf' selects the max-norm")
    vertices: Optional[List[List[float]]] = Field(default=None, description="Unit-ball vertices for the polygonal form")
    matrix: Optional[List[List[float]]] = Field(default=None, description="Shape matrix for the ellipse form")
    terms: Optional[List[Dict[str, Any]]] = Field(default=None, description="[{'weight': w, 'norm': {...}}, ...] for the sum form")
    arcs: Optional[List[List[float]]] = Field(default=None, description="[[centre_angle, width], ...] for the faceted-disk form")
    regularize: Optional[float] = Field(default=None, description="Add eps * l2 to the norm")

    def to_norm_dict(self) -> Dict[str, Any]:
        return self.model_dump(exclude_none=True, exclude={"regularize"})


class DomainConfig(BaseModel):
    shape: str = Field(default="disk", description="disk, ellipse, superellipse, square, stadium, lens, polygon")
    radius: float = 1.0
    semi_axes: List[float] = Field(default_factory=lambda: [2.0, 1.0])
    exponent: float = 4.0
    half_length: float = 1.0
    incidence: float = Field(default=0.19634954084936207, description="Corner incidence angle for the lens (pi/16)")
    boundary: Optional[List[List[float]]] = None
    samples: int = 256
    beta: Optional[float] = None


class BoundaryDataConfig(BaseModel):
    kind: str = Field(default="cos", description="cos, linear, two_bump, cap, constant")
    direction: List[float] = Field(default_factory=lambda: [1.0, 0.0])
    value: float = 0.0
    heights: List[float] = Field(default_factory=lambda: [1.0, 0.6])
    cap_height: float = 1.0
    cap_width: float = 0.5


class SolverConfig(BaseModel):
    levels: int = 101
    value_tol: float = 1e-9
    tie_tol: float = 1e-12
    eps_schedule: List[float] = Field(default_factory=lambda: [2.0 ** -k for k in range(11)])
    cauchy_tol: float = 1e-3
    sample_grid: int = 64
    modulus_pairs: int = 100000
    seed: int = 0


class OracleConfig(BaseModel):
    grid: int = 128
    iters: int = 2000
    tol: float = 1e-4
    init_sweeps: int = 100
    divergence_window: int = 100
    burn_in: int = 50
    polygon_vertices: int = 64
    noise: float = 0.0


class OutputConfig(BaseModel):
    out_dir: str = "outputs"
    raster_resolution: int = 128
    svg: bool = True


class AppConfig(BaseModel):
    norm: NormConfig = Field(default_factory=NormConfig)
    domain: DomainConfig = Field(default_factory=DomainConfig)
    boundary_data: BoundaryDataConfig = Field(default_factory=BoundaryDataConfig)
    solver: SolverConfig = Field(default_factory=SolverConfig)
    oracle: OracleConfig = Field(default_factory=OracleConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    log_level: str = "INFO"


ENV_PREFIX = "LEASTGRAD_"


def _apply_env_overrides(config_data: Dict[str, Any]) -> Dict[str, Any]:
    # Environment variables override the config file
    env_log = os.environ.get(f"{ENV_PREFIX}LOG_LEVEL")
    if env_log:
        config_data["log_level"] = env_log

    env_levels = os.environ.get(f"{ENV_PREFIX}LEVELS")
    if env_levels:
        config_data.setdefault("solver", {})["levels"] = int(env_levels)

    env_seed = os.environ.get(f"{ENV_PREFIX}SEED")
    if env_seed:
        config_data.setdefault("solver", {})["seed"] = int(env_seed)

    env_grid = os.environ.get(f"{ENV_PREFIX}GRID")
    if env_grid:
        config_data.setdefault("oracle", {})["grid"] = int(env_grid)

    env_out = os.environ.get(f"{ENV_PREFIX}OUT_DIR")
    if env_out:
        config_data.setdefault("output", {})["out_dir"] = env_out
    return config_data


def load_config(json_path: Optional[str] = None) -> AppConfig:
    """
    Build the experiment configuration: defaults, then the JSON file (if a path
    is given, it must exist), then LEASTGRAD_* environment overrides.
    """
    load_dotenv()
    config_data: Dict[str, Any] = {}
    if json_path is not None:
        if not os.path.exists(json_path):
            raise ConfigError(f"Config file not found: {json_path}")
        try:
            with open(json_path, "r", encoding="utf-8") as f:
                config_data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Could not parse {json_path}: {e}") from e
        if not isinstance(config_data, dict):
            raise ConfigError(f"{json_path} must hold a JSON object")

    try:
        config_data = _apply_env_overrides(config_data)
        return AppConfig(**config_data)
    except (ValidationError, ValueError) as e:
        raise ConfigError(f"Invalid configuration: {e}") from e


CONFIG = load_config()
