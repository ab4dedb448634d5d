from src.grid_oracle.grid import GridFunction
from src.grid_oracle.projection import PolarBallProjector, polar_value, project_polar_ball, project_polygon
from src.grid_oracle.solver import OracleResult, compare, harmonic_start, minimize_tv, restart_spread

__all__ = [
    "GridFunction", "OracleResult", "PolarBallProjector", "compare", "harmonic_start",
    "minimize_tv", "polar_value", "project_polar_ball", "project_polygon", "restart_spread",
]
