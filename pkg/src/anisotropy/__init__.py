from src.anisotropy.distance import SupDistance, sup_distance
from src.anisotropy.norms import (
    AnisotropyNorm,
    EllipseNorm,
    Facet,
    FacetedDiskNorm,
    PNorm,
    PolygonalNorm,
    SumNorm,
    ellipse,
    evaluate,
    example_two_facet,
    faceted_disk,
    facet_for_direction,
    facets,
    hexagon,
    is_strictly_convex,
    l1,
    l2,
    linf,
    lp,
    norm_from_dict,
    polar,
    regularize,
)

__all__ = [
    "AnisotropyNorm", "EllipseNorm", "Facet", "FacetedDiskNorm", "PNorm", "PolygonalNorm",
    "SumNorm", "SupDistance", "ellipse", "evaluate", "example_two_facet", "faceted_disk",
    "facet_for_direction", "facets", "hexagon", "is_strictly_convex", "l1", "l2", "linf", "lp",
    "norm_from_dict", "polar", "regularize", "sup_distance",
]
