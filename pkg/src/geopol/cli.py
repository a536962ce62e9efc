"""Batch front-end: phi tables, verification suites, domain sweeps.

All commands read a scenario file (see :mod:`geopol.scenario`) and emit CSV
with '#'-prefixed header lines carrying the scenario hash, library version,
seed and backend.  Output files are replaced atomically; a fixed seed makes
runs bit-reproducible.  Exit codes: 0 success, 1 verification failure,
2 usage or configuration error.
"""

from __future__ import annotations

import math
import os
import sys
import tempfile

import click
import numpy as np

from . import __version__, _kernel, adapted, verify
from .errors import ConfigError, GeopolError
from .scenario import load_scenario, sample_scenario_points


class ScenarioError(click.ClickException):
    """Configuration problem; exits with the usage-error code."""

    exit_code = 2


def _fmt(x) -> str:
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def _write_csv(out, header_lines, columns, rows):
    """Write CSV with commented header; atomic replace for real paths."""
    def emit(fh):
        for line in header_lines:
            fh.write(f"# {line}\n")
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(val) for val in row) + "\n")

    if out == "-":
        emit(sys.stdout)
        return
    directory = os.path.dirname(os.path.abspath(out)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".geopol-", suffix=".csv")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            emit(fh)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _common_header(command, scen, seed, tol_scale):
    return [
        f"geopol {command} v{__version__}",
        f"scenario-sha256: {scen.digest}",
        f"seed: {seed}",
        f"tol-scale: {tol_scale:.17g}",
        f"backend: {_kernel.BACKEND}",
        f"model: {scen.model.name}",
    ]


def _load(scenario_path):
    try:
        return load_scenario(scenario_path)
    except ConfigError as exc:
        raise ScenarioError(str(exc)) from exc


def scenario_options(fn):
    fn = click.option("--scenario", "scenario_path", required=True,
                      type=click.Path(exists=True, dir_okay=False),
                      help="Scenario TOML file.")(fn)
    fn = click.option("--out", "out", default=None,
                      help="Output CSV path ('-' for stdout); defaults to the "
                           "scenario's output.path.")(fn)
    fn = click.option("--seed", default=0, type=click.IntRange(min=0),
                      show_default=True, help="RNG seed for sampling.")(fn)
    fn = click.option("--tol-scale", default=1.0, type=float, show_default=True,
                      help="Multiplier applied to all check tolerances.")(fn)
    return fn


def _resolve_out(scen, out):
    out = out or scen.output_path or "-"
    return out


class _Cli(click.Group):
    def invoke(self, ctx):
        try:
            return super().invoke(ctx)
        except click.ClickException:
            raise
        except ConfigError as exc:
            raise ScenarioError(str(exc)) from exc


@click.group(cls=_Cli, name="geopol")
@click.version_option(__version__)
def main():
    """Polarization-family computations on manifolds of geodesics."""


@main.command("phi")
@scenario_options
def cmd_phi(scenario_path, out, seed, tol_scale):
    """Tabulate the phi matrix over the scenario's points and s-values.

    Rows whose continuation fails carry a status tag and NaN entries; the
    run continues and still exits 0.
    """
    scen = _load(scenario_path)
    m = scen.model.m
    points = sample_scenario_points(scen, seed)
    columns = ["point_index"]
    columns += [f"q{i}" for i in range(m)] + [f"p{i}" for i in range(m)]
    columns += ["re_s", "im_s"]
    columns += [f"phi{i}{j}_{part}" for i in range(m) for j in range(m)
                for part in ("re", "im")]
    columns += ["sym_residual"] + [f"im_eig{i}" for i in range(m)] + ["status"]
    rows = []
    for idx, x in enumerate(points):
        for s in scen.s_values:
            base = [idx, *x.q, *x.p, s.real, s.imag]
            if s.imag == 0.0:
                rows.append(base + [math.nan] * (2 * m * m + 1 + m)
                            + ["real-polarization"])
                continue
            try:
                phi = adapted.phi_at(x, s)
            except GeopolError as exc:
                status = _status_of(exc)
                rows.append(base + [math.nan] * (2 * m * m + 1 + m) + [status])
                continue
            vals = []
            for i in range(m):
                for j in range(m):
                    vals += [phi.value[i, j].real, phi.value[i, j].imag]
            rows.append(base + vals + [phi.sym_residual(),
                                       *phi.im_eigenvalues(), "ok"])
    _write_csv(_resolve_out(scen, out),
               _common_header("phi", scen, seed, tol_scale), columns, rows)


def _status_of(exc: GeopolError) -> str:
    from .errors import (AnalyticityDomainError, IntegrationError,
                         OverflowGuardError, PoleOnPathError,
                         SingularEndpointError)
    if isinstance(exc, PoleOnPathError):
        return "pole-on-path"
    if isinstance(exc, SingularEndpointError):
        return "singular-endpoint"
    if isinstance(exc, AnalyticityDomainError):
        return "analyticity-domain"
    if isinstance(exc, (IntegrationError, OverflowGuardError)):
        return "integration-failure"
    return "error"


@main.command("verify")
@scenario_options
def cmd_verify(scenario_path, out, seed, tol_scale):
    """Run the verification battery; exit 1 if any check fails."""
    scen = _load(scenario_path)
    reports = verify.run_suite(models=[scen.model], checks=scen.check_names,
                               n_samples=scen.check_samples, seed=seed,
                               tol_scale=tol_scale,
                               tol_overrides=scen.tolerance_overrides)
    columns = ["check", "model", "residual", "tolerance", "passed", "context"]
    rows = []
    for rep in reports:
        ctx = ";".join(f"{k}={v}" for k, v in rep.context.items() if k != "model")
        rows.append([rep.name, rep.context.get("model", scen.model.name),
                     rep.residual, rep.tolerance, rep.passed, ctx.replace(",", " ")])
    _write_csv(_resolve_out(scen, out),
               _common_header("verify", scen, seed, tol_scale), columns, rows)
    failed = [rep for rep in reports if not rep.passed]
    for rep in failed:
        click.echo(f"FAIL {rep.name}: residual {rep.residual:.3e} > "
                   f"tolerance {rep.tolerance:.3e}", err=True)
    if failed:
        sys.exit(1)


@main.command("sweep")
@scenario_options
def cmd_sweep(scenario_path, out, seed, tol_scale):
    """Map the polarized domain over the scenario's s-grid."""
    scen = _load(scenario_path)
    if scen.s_grid is None:
        raise ScenarioError("sweep needs an [s.grid] table in the scenario")
    points = sample_scenario_points(scen, seed)
    columns = ["point_index", "re_s", "im_s", "v", "margin", "inside", "status"]
    rows = []
    for row in verify.sweep_domain(scen.model, points,
                                   scen.s_grid.re_values(),
                                   scen.s_grid.im_values()):
        rows.append([row["point_index"], row["re_s"], row["im_s"], row["v"],
                     row["margin"], row["inside"], row["status"]])
    _write_csv(_resolve_out(scen, out),
               _common_header("sweep", scen, seed, tol_scale), columns, rows)


if __name__ == "__main__":
    main()
