from src.chord_solver.family import LevelSet, LevelSetFamily
from src.chord_solver.levels import ENTER, EXIT, LevelArcs, level_arcs
from src.chord_solver.matching import enumerate_noncrossing, matching_cost, optimal_matching
from src.chord_solver.solver import (
    RegularizationReport,
    evaluate,
    interior_ball_check,
    level_grid,
    modulus_check,
    solve_level,
    solve_regularized,
    solve_strict,
    trace_check,
)
