from src.functional.energy import (
    EnergyReport,
    LevelFamily,
    PiecewiseSolution,
    Polyline,
    anisotropic_length,
    boundary_penalty,
    coarea_tv,
    energy_report,
    jensen_lower_bound,
    level_cell_widths,
    relaxed_energy,
)
