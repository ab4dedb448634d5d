from src.domain.boundary import (
    BoundaryFunction,
    HoelderModulus,
    LipschitzModulus,
    Modulus,
    TabulatedModulus,
    boundary_data_from_config,
    cap_data,
    constant_data,
    cos_data,
    estimate_lipschitz,
    linear_data,
    tabulated_modulus,
    two_bump_data,
)
from src.domain.convex import (
    ConvexDomain,
    Line,
    SupportingLine,
    chord_intersections,
    is_strictly_convex,
    regularity_constant,
    supporting_line,
    uniform_convexity_coefficient,
)
from src.domain.shapes import disk, domain_from_config, ellipse, lens, polygon, square, stadium, superellipse
