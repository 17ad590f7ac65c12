import json
import math

import pytest

from pconcave_app.cli import main
from pconcave_app.config import AppConfig
from pconcave_app.errors import EXIT_PASS, EXIT_USAGE, PConcaveError, UsageError
from pconcave_app.gridio import read_grid_csv, write_grid_csv


@pytest.fixture
def app(tmp_path):
    return AppConfig(out_dir=str(tmp_path / "results"))


def test_geom_prints_a_summary(app, capsys):
    assert main(["geom", "square 1", "--body1", "disc 0 0 1", "--m", "4"], app=app) == EXIT_PASS
    summary = json.loads(capsys.readouterr().out)
    assert summary["body"]["area"] == pytest.approx(4.0)
    assert summary["body"]["mean_width"] == pytest.approx(8.0 / math.pi)
    assert summary["combination"]["area"] == pytest.approx(3.0 + math.pi / 4.0, abs=1e-6)
    assert summary["hausdorff"] == pytest.approx(math.sqrt(2.0) - 1.0, abs=1e-9)
    assert summary["rotation_mean"]["m"] == 4


def test_geom_writes_json_when_asked(app, tmp_path, capsys):
    assert main(["geom", "disc 0 0 2", "--out", str(tmp_path)], app=app) == EXIT_PASS
    saved = json.loads((tmp_path / "geom.json").read_text())
    assert saved == json.loads(capsys.readouterr().out)


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["geom"],
        ["solve", "disc 0 0"],
        ["solve", "square 1", "--h", "5"],
        ["verify"],
        ["verify", "no-such-preset"],
        ["verify", "geometry-suite", "--format", "xml"],
        ["solve", "disc 0 0 1", "--h", "1/8", "--operator", "pucci_minus", "--stencil-radius", "0.5"],
    ],
)
def test_usage_problems_exit_with_three(app, argv):
    assert main(argv, app=app) == EXIT_USAGE


def test_solve_writes_the_grid(app, tmp_path, capsys):
    assert main(["solve", "disc 0 0 1", "--h", "1/8", "--out", str(tmp_path)], app=app) == EXIT_PASS
    u = read_grid_csv(tmp_path / "solution.csv")
    assert u.h == 0.125
    assert u.meta["operator"] == "poisson"
    assert capsys.readouterr().out.startswith("max=")


def test_convolve_from_saved_fields(app, tmp_path, square_torsion, disc_torsion):
    write_grid_csv(square_torsion, tmp_path / "u0.csv")
    write_grid_csv(disc_torsion, tmp_path / "u1.csv")
    argv = ["convolve", "--field0", str(tmp_path / "u0.csv"), "--field1", str(tmp_path / "u1.csv"), "--p", "0.5", "--out", str(tmp_path / "conv")]
    assert main(argv, app=app) == EXIT_PASS
    assert (tmp_path / "conv" / "convolution.csv").exists()
    assert (tmp_path / "conv" / "argmax.csv").exists()


def test_convolve_needs_a_body_or_a_field(app):
    assert main(["convolve", "square 1"], app=app) == EXIT_USAGE


def test_rearrange_writes_one_grid(app, tmp_path):
    assert main(["rearrange", "disc 0 0 1", "--h", "1/8", "--m", "2", "--out", str(tmp_path)], app=app) == EXIT_PASS
    rearranged = read_grid_csv(tmp_path / "rearranged_m2.csv")
    assert rearranged.meta["m"] == "2"


def test_verify_writes_the_report(app, tmp_path, capsys):
    code = main(["verify", "geometry-suite", "--format", "csv"], app=app)
    assert code == EXIT_PASS
    assert (tmp_path / "results" / "geometry-suite.csv").exists()
    assert capsys.readouterr().out.startswith("geometry_suite: pass")


def test_verify_batch(app, tmp_path):
    jobs = tmp_path / "jobs.txt"
    jobs.write_text("# quick\ngeometry-suite\n")
    assert main(["verify", "--batch", str(jobs), "--seed", "3", "--out", str(tmp_path / "batch")], app=app) == EXIT_PASS
    assert json.loads((tmp_path / "batch" / "geometry-suite.json").read_text())["config_echo"]["seed"] == "3"


def test_pucci_solve_records_the_stencil_radius(app, tmp_path):
    argv = ["solve", "disc 0 0 1", "--h", "1/8", "--operator", "pucci_minus", "--Lambda", "2", "--stencil-radius", "3", "--out", str(tmp_path)]
    assert main(argv, app=app) == EXIT_PASS
    u = read_grid_csv(tmp_path / "solution.csv")
    assert float(u.meta["stencil_radius"]) == 3.0


def test_usage_error_is_part_of_the_hierarchy():
    assert issubclass(UsageError, PConcaveError)
