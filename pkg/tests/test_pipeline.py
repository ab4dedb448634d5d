import json
import os

import pytest

from src.config import AppConfig, DomainConfig, NormConfig, OracleConfig, OutputConfig, SolverConfig
from src.errors import ConfigError, NoFacetError
from src.pipeline import ExperimentPipeline


def _pipeline(tmp_path, **sections):
    sections.setdefault("output", OutputConfig(raster_resolution=32, svg=True))
    return ExperimentPipeline(AppConfig(**sections), out_dir=str(tmp_path))


def test_norm_info_lists_facets(tmp_path):
    pipeline = _pipeline(tmp_path, norm=NormConfig(form="l1"))
    info = pipeline.norm_info()
    assert len(info["facets"]) == 4
    assert not info["strictly_convex"]
    assert info["gamma"] == pytest.approx(2 ** 0.5)
    assert os.path.exists(tmp_path / "norm_info.json")


def test_solve_writes_artifacts(tmp_path):
    pipeline = _pipeline(tmp_path, solver=SolverConfig(levels=21))
    report = pipeline.solve()
    assert report["levels"] == 21
    assert report["regularization"] is None
    assert report["nesting"]["nested"]
    for name in ("solution_raster.csv", "levels.json", "solve_report.json", "solution.svg"):
        assert os.path.exists(tmp_path / name), name
    with open(tmp_path / "levels.json", encoding="utf-8") as f:
        assert len(json.load(f)["levels"]) == 21


def test_solve_is_deterministic(tmp_path):
    first = _pipeline(tmp_path / "a", solver=SolverConfig(levels=21)).solve()
    second = _pipeline(tmp_path / "b", solver=SolverConfig(levels=21)).solve()
    assert (tmp_path / "a" / "solve_report.json").read_text() == (tmp_path / "b" / "solve_report.json").read_text()
    assert first["energy"] == second["energy"]


def test_oracle_seed_matters_only_with_noise(tmp_path):
    def run(seed, noise):
        oracle = OracleConfig(grid=32, iters=5, tol=0.0, noise=noise)
        return _pipeline(tmp_path / f"{seed}-{noise}", oracle=oracle, solver=SolverConfig(seed=seed)).oracle()

    assert run(0, 0.0)["energy"] == run(1, 0.0)["energy"]
    assert run(0, 0.1)["energy"] != run(1, 0.1)["energy"]
    assert os.path.exists(tmp_path / "0-0.1" / "energy_trace.csv")


def test_barrier_report(tmp_path):
    report = _pipeline(tmp_path, norm=NormConfig(form="l1")).barrier()
    assert report["status"] == "violated"
    assert os.path.exists(tmp_path / "barrier_report.json")
    report = _pipeline(tmp_path, domain=DomainConfig(shape="square")).barrier()
    assert report["witness"]["kind"] == "segment"


def test_perturb_needs_a_facet(tmp_path):
    report = _pipeline(tmp_path, norm=NormConfig(form="l1")).perturb("staircase")
    assert report["difference"] <= 1e-12
    assert os.path.exists(tmp_path / "perturb.svg")
    with pytest.raises(NoFacetError):
        _pipeline(tmp_path).perturb()


def test_unknown_pathology_and_check(tmp_path):
    pipeline = _pipeline(tmp_path, norm=NormConfig(form="l1"))
    with pytest.raises(ConfigError):
        pipeline.pathology("wild")
    with pytest.raises(ConfigError):
        pipeline.gamma("limsup")


def test_pointwise_gamma_check(tmp_path):
    report = _pipeline(tmp_path, norm=NormConfig(form="hexagon")).gamma("pointwise")
    assert report["bound_holds"]
    assert os.path.exists(tmp_path / "pointwise_table.csv")
    assert os.path.exists(tmp_path / "gamma_pointwise.json")
