"""Classification of the barrier condition for a norm and a convex domain."""
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, List, Optional

import numpy as np

from src.anisotropy import AnisotropyNorm, Facet
from src.domain import ConvexDomain
from src.utils import get_logger

logger = get_logger(__name__)

SATISFIED = "satisfied"
VIOLATED = "violated"
INDETERMINATE = "indeterminate"

STRICT_TOL = 1e-9


@dataclass
class BarrierResult:
    status: str
    reason: str
    witness: Optional[Dict] = None
    corners: List[Dict] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return asdict(self)


def _flat_witness(domain: ConvexDomain) -> Dict:
    k = int(np.argmin(domain.turning))
    return {"x0": domain.vertices[k].tolist(), "normal": domain.vertex_normals[k].tolist(), "kind": "segment"}


def _wedge(domain: ConvexDomain, facet: Facet, k: int) -> Dict:
    """
    The set V cut from the domain by the segments x1 x0 and x0 x2, where x1, x2
    are the boundary points at distance eps from x0 and all normals in between
    stay on the facet.
    """
    n = len(domain)
    x0 = 0.5 * (domain.vertices[k] + domain.vertices[(k + 1) % n])
    reach = []
    for step in (1, -1):
        j = k
        while facet.contains_direction(domain.edge_normals[j % n], closed=False, tol=STRICT_TOL):
            j += step
            if abs(j - k) >= n // 2:
                break
        end = domain.vertices[j % n] if step == 1 else domain.vertices[(j + 1) % n]
        reach.append(float(np.linalg.norm(end - x0)))
    eps = 0.5 * min(reach)
    dist = np.linalg.norm(domain.vertices - x0, axis=1)
    after = [(k + 1 + i) % n for i in range(n // 2)]
    before = [(k - i) % n for i in range(n // 2)]
    x2 = domain.vertices[next((i for i in after if dist[i] >= eps), after[-1])]
    x1 = domain.vertices[next((i for i in before if dist[i] >= eps), before[-1])]
    return {
        "x0": x0.tolist(),
        "normal": domain.edge_normals[k].tolist(),
        "eps": eps,
        "x1": x1.tolist(),
        "x2": x2.tolist(),
        "kind": "wedge",
    }


def barrier_check(norm: AnisotropyNorm, domain: ConvexDomain) -> BarrierResult:
    """
    violated: the domain has a flat piece, or a smooth stretch of boundary has
    outward normals inside a facet's open normal arc (witness: the wedge V).
    satisfied: norm and domain strictly convex, or facet arcs meet boundary
    normals only at corners whose half-angle is below half the facet width.
    Anything else is indeterminate.
    """
    if not domain.is_strictly_convex:
        return BarrierResult(VIOLATED, "the boundary contains a segment, which is a minimal surface",
                             _flat_witness(domain))
    facets = norm.facets()
    if not facets:
        return BarrierResult(SATISFIED, "strictly convex norm on a strictly convex domain")

    corners = set(domain.corners().tolist())
    n = len(domain)

    for facet in facets:
        mid = facet.mid_direction
        hits = [k for k in range(n)
                if facet.contains_direction(domain.edge_normals[k], closed=False, tol=STRICT_TOL)]
        if hits:
            # the edge whose normal is closest to the middle of the arc
            k = max(hits, key=lambda i: abs(float(domain.edge_normals[i] @ mid)))
            logger.info(f"[BARRIER] boundary normal {domain.edge_normals[k].round(4).tolist()} lies on a facet")
            return BarrierResult(VIOLATED, "a smooth boundary stretch has normals on a facet of the unit ball",
                                 _wedge(domain, facet, k))

    report = []
    undecided = False
    for i in sorted(corners):
        lo_n, hi_n = domain.corner_normals(i)
        lo = math.atan2(lo_n[1], lo_n[0])
        span = (math.atan2(hi_n[1], hi_n[0]) - lo) % (2 * math.pi)
        incidence = 0.5 * (math.pi - float(domain.turning[i]))
        for facet in facets:
            angles = lo + span * np.linspace(0.0, 1.0, 257)
            dirs = np.stack([np.cos(angles), np.sin(angles)], axis=1)
            if not any(facet.contains_direction(d, closed=False, tol=STRICT_TOL) for d in dirs):
                continue
            ok = incidence < 0.5 * facet.width
            undecided |= not ok
            report.append({
                "corner": domain.vertices[i].tolist(),
                "incidence": incidence,
                "facet_width": facet.width,
                "narrow_enough": ok,
            })
    if undecided:
        return BarrierResult(INDETERMINATE, "a corner meets a facet arc with an incidence wider than half the facet",
                             corners=report)
    return BarrierResult(SATISFIED, "facet normals occur only at corners narrower than the facets", corners=report)
