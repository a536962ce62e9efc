"""CLI: scenario validation, commands, exit codes, output format."""

import os

import pytest
from click.testing import CliRunner

from geopol.cli import main
from geopol.errors import ConfigError
from geopol.scenario import parse_scenario

FLAT_SCENARIO = """
[model]
kind = "euclidean"
dim = 2

[points]
values = [[0.1, 0.2, 0.5, -0.2]]

[s]
values = [[0.0, 1.0], [0.5, -1.0], [0.3, 0.0]]

[checks]
names = ["pullbacks", "siegel", "real_polarization", "canonical_metric"]
samples = 2

[output]
path = "default_out.csv"
"""

HYP_SWEEP_SCENARIO = """
[model]
kind = "constant_curvature"
dim = 2
curvature = -1.0

[points]
values = [[0.0, 0.0, 0.0, 1.0]]

[s]
[s.grid]
re = [0.0, 0.0, 1]
im = [1.4, 1.8, 41]

[output]
path = "sweep.csv"
"""


@pytest.fixture
def runner():
    return CliRunner()


def scenario_file(tmp_path, text, name="scen.toml"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_rows(path):
    with open(path) as fh:
        lines = [ln.rstrip("\n") for ln in fh]
    header = [ln for ln in lines if ln.startswith("#")]
    body = [ln for ln in lines if not ln.startswith("#")]
    return header, body[0].split(","), [ln.split(",") for ln in body[1:]]


def test_scenario_strictness():
    with pytest.raises(ConfigError):
        parse_scenario("[model]\nkind = 'euclidean'\ndim = 2\nbogus = 1\n")
    with pytest.raises(ConfigError):
        parse_scenario("[model]\nkind = 'nope'\n")
    with pytest.raises(ConfigError):
        parse_scenario("[mystery]\nx = 1\n")
    with pytest.raises(ConfigError):
        parse_scenario("not toml [[")
    with pytest.raises(ConfigError):
        parse_scenario("[model]\nkind = 'euclidean'\ndim = 2\n"
                       "[checks]\nnames = ['bogus']\n")


def test_phi_command(tmp_path, runner):
    scen = scenario_file(tmp_path, FLAT_SCENARIO)
    out = str(tmp_path / "phi.csv")
    result = runner.invoke(main, ["phi", "--scenario", scen, "--out", out])
    assert result.exit_code == 0, result.output
    header, cols, rows = read_rows(out)
    assert any("scenario-sha256" in ln for ln in header)
    assert any("seed: 0" in ln for ln in header)
    assert cols[0] == "point_index" and "phi00_re" in cols and "status" in cols
    assert len(rows) == 3
    by_status = {row[-1] for row in rows}
    assert by_status == {"ok", "real-polarization"}
    # phi = s I for the flat model
    ok = [row for row in rows if row[-1] == "ok"][0]
    i_re = cols.index("phi00_re")
    assert abs(float(ok[i_re]) - 0.0) < 1e-12
    assert abs(float(ok[i_re + 1]) - 1.0) < 1e-10


def test_phi_empty_points_exit_zero(tmp_path, runner):
    scen = scenario_file(tmp_path, """
[model]
kind = "euclidean"
dim = 1

[s]
values = [[0.0, 1.0]]

[output]
path = "o.csv"
""")
    out = str(tmp_path / "empty.csv")
    result = runner.invoke(main, ["phi", "--scenario", scen, "--out", out])
    assert result.exit_code == 0
    _, _, rows = read_rows(out)
    assert rows == []


def test_phi_pole_status(tmp_path, runner):
    scen = scenario_file(tmp_path, """
[model]
kind = "constant_curvature"
dim = 2
curvature = -1.0

[points]
values = [[0.0, 0.0, 0.0, 1.0]]

[s]
values = [[0.0, 2.0]]

[output]
path = "o.csv"
""")
    out = str(tmp_path / "pole.csv")
    result = runner.invoke(main, ["phi", "--scenario", scen, "--out", out])
    assert result.exit_code == 0
    _, cols, rows = read_rows(out)
    assert rows[0][-1] == "pole-on-path"


def test_verify_command_pass_and_fail(tmp_path, runner):
    scen = scenario_file(tmp_path, FLAT_SCENARIO)
    out = str(tmp_path / "verify.csv")
    result = runner.invoke(main, ["verify", "--scenario", scen, "--out", out])
    assert result.exit_code == 0, result.output
    _, cols, rows = read_rows(out)
    assert all(row[cols.index("passed")] == "1" for row in rows)

    # absurd tolerance forces failures and exit code 1
    failing = FLAT_SCENARIO.replace(
        "[output]", "[checks.tolerances]\npullbacks = 1e-20\n\n[output]")
    scen2 = scenario_file(tmp_path, failing, name="fail.toml")
    result = runner.invoke(main, ["verify", "--scenario", scen2,
                                  "--out", str(tmp_path / "v2.csv")])
    assert result.exit_code == 1
    assert "FAIL" in result.output


def test_verify_unknown_check_exit_two(tmp_path, runner):
    scen = scenario_file(tmp_path, FLAT_SCENARIO.replace(
        '"pullbacks"', '"made_up"'))
    result = runner.invoke(main, ["verify", "--scenario", scen, "--out", "-"])
    assert result.exit_code == 2


def test_missing_scenario_exit_two(runner):
    result = runner.invoke(main, ["phi", "--scenario", "/nonexistent.toml"])
    assert result.exit_code == 2


def test_sweep_command_and_boundary(tmp_path, runner):
    scen = scenario_file(tmp_path, HYP_SWEEP_SCENARIO)
    out = str(tmp_path / "sweep.csv")
    result = runner.invoke(main, ["sweep", "--scenario", scen, "--out", out])
    assert result.exit_code == 0, result.output
    _, cols, rows = read_rows(out)
    i_in, i_im = cols.index("inside"), cols.index("im_s")
    onset = next(float(r[i_im]) for r in rows if r[i_in] == "0")
    import math
    assert abs(onset - math.pi / 2) <= 0.01 + 1e-12


def test_sweep_needs_grid(tmp_path, runner):
    scen = scenario_file(tmp_path, FLAT_SCENARIO)
    result = runner.invoke(main, ["sweep", "--scenario", scen, "--out", "-"])
    assert result.exit_code == 2


def test_determinism_and_atomic_overwrite(tmp_path, runner):
    scen = scenario_file(tmp_path, FLAT_SCENARIO)
    out = str(tmp_path / "det.csv")
    runner.invoke(main, ["verify", "--scenario", scen, "--out", out,
                         "--seed", "7"])
    first = open(out).read()
    runner.invoke(main, ["verify", "--scenario", scen, "--out", out,
                         "--seed", "7"])
    second = open(out).read()
    assert first == second  # overwritten, not appended; bit-identical
    assert first.count("seed: 7") == 1
    leftovers = [f for f in os.listdir(tmp_path) if f.startswith(".geopol-")]
    assert leftovers == []


def test_random_point_sampling(tmp_path, runner):
    scen = scenario_file(tmp_path, """
[model]
kind = "euclidean"
dim = 2

[points]
count = 3
speed_range = [0.2, 0.5]

[s]
values = [[0.0, 1.0]]

[output]
path = "o.csv"
""")
    out = str(tmp_path / "rand.csv")
    result = runner.invoke(main, ["phi", "--scenario", scen, "--out", out])
    assert result.exit_code == 0
    _, _, rows = read_rows(out)
    assert len(rows) == 3
