"""
Command-line front end.

    python main.py solve --config experiments/disk_cos_l2.json --out outputs/run1
    python main.py pathology nonunique --config experiments/l1_disk.json
    python main.py gamma liminf --levels 61

Exit codes: 0 on success, 2 for configuration and argument errors, 1 for any
other toolkit error.
"""
import argparse
import sys
from typing import Any, Dict, List, Optional

from src.config import AppConfig, load_config
from src.errors import ConfigError, LeastGradientError
from src.pipeline import GAMMA_CHECKS, PATHOLOGIES, ExperimentPipeline
from src.utils import get_logger, setup_logging

logger = get_logger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

COMMANDS = {
    "norm-info": "facets, ellipticity bounds and polar of the configured norm",
    "solve": "chord solver; writes the u raster (CSV), level geometry (JSON) and an SVG",
    "oracle": "grid minimization; writes the raster and the energy trace (CSV)",
    "compare": "chord solver against the grid oracle",
    "perturb": "equal-length polygonal perturbation of a chord along a facet",
    "pathology": "competitor minimizers for faceted norms",
    "barrier": "barrier condition for the configured norm and domain",
    "gamma": "numerical checks of convergence of the functionals",
    "regularity": "modulus-of-continuity check of the chord solution",
}


def _common_flags() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None,
                        help="experiment JSON with sections norm, domain, boundary_data, solver, oracle, output "
                             "(default: built-in defaults, l2 norm, unit disk, cos data)")
    common.add_argument("--out", default=None, help="output directory (default: output.out_dir, 'outputs')")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized checks (default: solver.seed, 0)")
    common.add_argument("--levels", type=int, default=None, help="number of levels t_j (default: solver.levels, 101)")
    common.add_argument("--grid", type=int, default=None, help="oracle grid resolution N (default: oracle.grid, 128)")
    common.add_argument("--log-level", default=None, help="DEBUG, INFO, WARNING (default: log_level, INFO)")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_flags()
    parser = argparse.ArgumentParser(prog="leastgrad", description="Planar anisotropic least gradient toolkit")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for name, text in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        if name == "pathology":
            p.add_argument("kind", choices=PATHOLOGIES)
        elif name == "gamma":
            p.add_argument("check", choices=GAMMA_CHECKS)
        elif name == "perturb":
            p.add_argument("--shape", choices=("triangle", "staircase"), default="triangle")
    return parser


def _apply_flags(config: AppConfig, args: argparse.Namespace) -> AppConfig:
    if args.seed is not None:
        config.solver.seed = args.seed
    if args.levels is not None:
        if args.levels < 2:
            raise ConfigError(f"--levels must be at least 2, got {args.levels}")
        config.solver.levels = args.levels
    if args.grid is not None:
        config.oracle.grid = args.grid
    if args.out is not None:
        config.output.out_dir = args.out
    if args.log_level is not None:
        config.log_level = args.log_level
    return config


def dispatch(pipeline: ExperimentPipeline, args: argparse.Namespace) -> Dict[str, Any]:
    command = args.command
    if command == "norm-info":
        return pipeline.norm_info()
    if command == "solve":
        return pipeline.solve()
    if command == "oracle":
        return pipeline.oracle()
    if command == "compare":
        return pipeline.compare()
    if command == "perturb":
        return pipeline.perturb(args.shape)
    if command == "pathology":
        return pipeline.pathology(args.kind)
    if command == "barrier":
        return pipeline.barrier()
    if command == "gamma":
        return pipeline.gamma(args.check)
    if command == "regularity":
        return pipeline.regularity()
    raise ConfigError(f"Unknown command '{command}'")


def run(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code or 0)

    try:
        config = _apply_flags(load_config(args.config), args)
    except ConfigError as e:
        print(f"[MAIN] Configuration error: {e}", file=sys.stderr)
        return EXIT_USAGE

    setup_logging(config.log_level)
    pipeline = ExperimentPipeline(config)
    try:
        result = dispatch(pipeline, args)
    except ConfigError as e:
        logger.error(f"[MAIN] Configuration error: {e}")
        return EXIT_USAGE
    except LeastGradientError as e:
        logger.error(f"[MAIN] {type(e).__name__}: {e}")
        return EXIT_FAILURE

    print(f"[MAIN] {args.command} done, artifacts in {pipeline.out_dir}")
    for key in sorted(k for k, v in result.items() if isinstance(v, (bool, int, float, str)) or v is None):
        print(f"  {key}: {result[key]}")
    return EXIT_OK
