import os
from typing import Any, Dict, List, Optional

import numpy as np

from src.anisotropy import AnisotropyNorm, norm_from_dict, regularize
from src.chord_solver import (
    LevelSetFamily,
    interior_ball_check,
    modulus_check,
    solve_regularized,
    solve_strict,
    trace_check,
)
from src.config import AppConfig, CONFIG
from src.counterexamples import (
    barrier_check,
    facet_perturbation,
    non_sbv_minimizer,
    non_w11_minimizer,
    nonunique_pair,
    perturbation_report,
    resolve_facet,
    vanishing_l1_family,
)
from src.domain import BoundaryFunction, ConvexDomain, Line, boundary_data_from_config, domain_from_config
from src.errors import ConfigError
from src.functional import energy_report
from src.gamma_harness import (
    gamma_bound_check,
    liminf_experiment,
    pointwise_uniform_check,
    random_grid_function,
    random_norm,
    recovery_experiment,
)
from src.grid_oracle import OracleResult, compare, minimize_tv
from src.reporting.exporter import Exporter
from src.utils import get_logger

logger = get_logger(__name__)

PATHOLOGIES = ("nonunique", "non-w11", "non-sbv", "vanishing-l1")
GAMMA_CHECKS = ("bound", "liminf", "recovery", "pointwise")
CHORD_SHRINK = 0.8
BOUND_TRIALS = 20
POINTWISE_MEMBERS = 8


class ExperimentPipeline:
    def __init__(self, config: Optional[AppConfig] = None, out_dir: Optional[str] = None):
        self.config = config or CONFIG
        self.out_dir = out_dir or self.config.output.out_dir
        self.norm: Optional[AnisotropyNorm] = None
        self.domain: Optional[ConvexDomain] = None
        self.f: Optional[BoundaryFunction] = None
        self._family: Optional[LevelSetFamily] = None
        self._regularization: Optional[Dict] = None
        self._loaded = False

    def load_resources(self):
        if self._loaded:
            return
        logger.info("[PIPELINE] Building norm, domain and boundary data...")
        cfg = self.config
        try:
            norm = norm_from_dict(cfg.norm.to_norm_dict())
        except (KeyError, TypeError) as e:
            raise ConfigError(f"Incomplete norm section: {e}") from e
        if cfg.norm.regularize:
            norm = regularize(norm, cfg.norm.regularize)
        self.norm = norm
        self.domain = domain_from_config(cfg.domain)
        self.f = boundary_data_from_config(self.domain, cfg.boundary_data)
        logger.info(f"[PIPELINE] norm={self.norm!r} domain={self.domain!r} data={self.f.name}")
        self._loaded = True

    def _path(self, name: str) -> str:
        return os.path.join(self.out_dir, name)

    # --- commands -------------------------------------------------------

    def norm_info(self) -> Dict[str, Any]:
        self.load_resources()
        norm = self.norm
        info = {
            "norm": norm.to_dict(),
            "strictly_convex": norm.is_strictly_convex,
            "lambda": norm.lambda_lower,
            "gamma": norm.gamma_upper,
            "facets": [
                {
                    "endpoints": [list(p) for p in fc.endpoints],
                    "normal_arc": list(fc.normal_arc),
                    "width": fc.width,
                    "dual_vertex": list(fc.dual_vertex),
                }
                for fc in norm.facets()
            ],
            "polar": norm.polar().to_dict(),
        }
        Exporter.save_json(info, self._path("norm_info.json"))
        return info

    def _solve(self) -> LevelSetFamily:
        if self._family is not None:
            return self._family
        self.load_resources()
        s = self.config.solver
        if self.norm.is_strictly_convex:
            family = solve_strict(self.norm, self.domain, self.f, s.levels, s.value_tol, s.tie_tol)
            self._regularization = None
        else:
            family, report = solve_regularized(self.norm, self.domain, self.f, s.eps_schedule, s.levels,
                                               s.cauchy_tol, s.sample_grid, s.value_tol, s.tie_tol)
            self._regularization = report.to_dict()
        self._family = family
        return family

    def solve(self) -> Dict[str, Any]:
        family = self._solve()
        res = self.config.output.raster_resolution
        xs, ys, U = family.raster(res)
        Exporter.save_raster_csv(xs, ys, U, self._path("solution_raster.csv"))
        levels = family.level_geometry()
        Exporter.save_level_geometry(levels, self._path("levels.json"))
        report = {
            "energy": energy_report(self.norm, self.domain, family, self.f),
            "trace": trace_check(family, self.f),
            "nesting": family.check_nesting(seed=self.config.solver.seed),
            "interior_ball": interior_ball_check(family, seed=self.config.solver.seed),
            "levels": len(family),
            "regularization": self._regularization,
        }
        Exporter.save_json(report, self._path("solve_report.json"))
        if self.config.output.svg:
            Exporter.render_svg(self.domain, [{"levels": levels}], self._path("solution.svg"), title="level chords")
        return report

    def _oracle(self) -> OracleResult:
        self.load_resources()
        o = self.config.oracle
        return minimize_tv(self.norm, self.domain, self.f, o.grid, o.iters, o.tol,
                           seed=self.config.solver.seed, noise=o.noise, init_sweeps=o.init_sweeps,
                           divergence_window=o.divergence_window, burn_in=o.burn_in,
                           polygon_vertices=o.polygon_vertices)

    def oracle(self) -> Dict[str, Any]:
        result = self._oracle()
        grid = result.grid
        Exporter.save_raster_csv(grid.xs, grid.ys, grid.values, self._path("oracle_raster.csv"), mask=grid.interior)
        Exporter.save_energy_trace(result.energies, result.gaps, self._path("energy_trace.csv"))
        report = result.to_dict()
        report["energy_report"] = energy_report(self.norm, self.domain, grid, self.f)
        Exporter.save_json(report, self._path("oracle_report.json"))
        return report

    def compare(self) -> Dict[str, Any]:
        family = self._solve()
        result = self._oracle()
        report = compare(family, result.grid, self.norm)
        report["oracle"] = result.to_dict()
        Exporter.save_json(report, self._path("compare_report.json"))
        return report

    def perturb(self, shape: str = "triangle") -> Dict[str, Any]:
        self.load_resources()
        facet = resolve_facet(self.norm)
        nu = facet.mid_direction
        c = self.domain.centroid
        ends = self.domain.chord_intersections(Line.with_normal(nu, float(c @ nu)))
        if len(ends) < 2:
            raise ConfigError("No chord through the domain centroid for the facet direction")
        p1, p2 = (c + CHORD_SHRINK * (e - c) for e in ends)
        chain = facet_perturbation(self.norm, self.domain, facet, (p1, p2), shape=shape)
        report = perturbation_report(self.norm, (p1, p2), chain)
        report["shape"] = shape
        report["normal_arc"] = list(facet.normal_arc)
        Exporter.save_json(report, self._path("perturb_report.json"))
        if self.config.output.svg:
            layers = [
                {"levels": [{"t": 0.0, "curves": [[p1.tolist(), p2.tolist()]]}], "dashed": True},
                {"levels": [{"t": 1.0, "curves": [chain.vertices.tolist()]}], "width": 2.0},
            ]
            Exporter.render_svg(self.domain, layers, self._path("perturb.svg"), title=f"{shape} perturbation")
        return report

    def pathology(self, kind: str) -> Dict[str, Any]:
        if kind not in PATHOLOGIES:
            raise ConfigError(f"Unknown pathology '{kind}', expected one of {PATHOLOGIES}")
        self.load_resources()
        levels = self.config.solver.levels
        name = kind.replace("-", "_")
        if kind == "vanishing-l1":
            fam = vanishing_l1_family(self.norm, self.domain, levels=levels)
            report = fam.report
            layers = [{"levels": u.level_geometry(), "dashed": k == 0} for k, u in enumerate(fam.solutions)]
        else:
            builder = {"nonunique": nonunique_pair, "non-w11": non_w11_minimizer, "non-sbv": non_sbv_minimizer}[kind]
            cons = builder(self.norm, self.domain, levels=levels)
            report = dict(cons.report, kind=cons.kind)
            layers = [
                {"levels": cons.baseline.level_geometry(), "dashed": True},
                {"levels": cons.solution.level_geometry()},
            ]
        Exporter.save_json(report, self._path(f"{name}_report.json"))
        if self.config.output.svg:
            Exporter.render_svg(self.domain, layers, self._path(f"{name}.svg"), title=kind)
        return report

    def barrier(self) -> Dict[str, Any]:
        self.load_resources()
        report = barrier_check(self.norm, self.domain).to_dict()
        Exporter.save_json(report, self._path("barrier_report.json"))
        return report

    def gamma(self, check: str) -> Dict[str, Any]:
        if check not in GAMMA_CHECKS:
            raise ConfigError(f"Unknown gamma check '{check}', expected one of {GAMMA_CHECKS}")
        self.load_resources()
        s = self.config.solver
        if check == "bound":
            rng = np.random.default_rng(s.seed)
            trials: List[Dict] = []
            for _ in range(BOUND_TRIALS):
                a, b = random_norm(rng), random_norm(rng)
                u = random_grid_function(rng, self.domain, self.f, self.config.oracle.grid // 4)
                trials.append(gamma_bound_check(a, b, u, self.f, self.domain))
            report = {
                "trials": len(trials),
                "all_hold": all(t["holds"] for t in trials),
                "max_ratio": max(t["ratio"] for t in trials),
                "rows": trials,
            }
        elif check == "liminf":
            report = liminf_experiment(self.norm, self.domain, self.f, s.eps_schedule, s.levels)
            Exporter.save_convergence_table(report["schedule"], self._path("liminf_table.csv"),
                                            columns=("eps", "energy", "boundary"))
        elif check == "recovery":
            family = self._solve()
            report = recovery_experiment(self.norm, self.domain, self.f, family, list(s.eps_schedule) + [0.0])
            Exporter.save_convergence_table(report["table"], self._path("recovery_table.csv"))
        else:
            sequence = [regularize(self.norm, 1.0 / n) for n in range(1, POINTWISE_MEMBERS + 1)]
            report = pointwise_uniform_check(sequence, self.norm)
            Exporter.save_convergence_table(report["rows"], self._path("pointwise_table.csv"),
                                            columns=("index", "sampled_gap", "uniform_bound", "sup_distance"))
        Exporter.save_json(report, self._path(f"gamma_{check}.json"))
        return report

    def regularity(self) -> Dict[str, Any]:
        family = self._solve()
        s = self.config.solver
        report = modulus_check(family, self.domain, self.f.modulus, beta_mode=self.domain.beta is not None,
                               pairs=s.modulus_pairs, seed=s.seed)
        Exporter.save_json(report, self._path("regularity_report.json"))
        return report
