"""Scenario files: the batch-run configuration format of the CLI.

A scenario is a single TOML document with nested tables; unknown keys are
rejected so that runs stay reproducible.  Layout:

    [model]
    kind = "constant_curvature"      # euclidean | constant_curvature |
                                     # surface_of_revolution
    dim = 2                          # euclidean / constant_curvature
    curvature = -1.0                 # constant_curvature
    profile = "torus"                # revolution: torus | cosh | poly
    profile_params = [3.0]           # torus: big radius; cosh: scale;
                                     # poly: coefficient list
    u_range = [-3.1, 3.1]            # optional revolution chart override
    analytic_strip = 1.25            # optional revolution strip override

    [points]                         # either explicit values...
    values = [[0.1, 0.0, 0.5, 0.2]]  # rows (q..., p...)
    count = 8                        # ...or quasi-random sampling
    speed_range = [0.1, 1.0]

    [s]
    values = [[0.0, 1.0], [1.0, 2.0]]   # rows (Re s, Im s), for phi
    [s.grid]                            # for sweep
    re = [0.0, 0.0, 1]                  # min, max, count
    im = [0.01, 2.5, 250]

    [checks]                         # for verify
    names = ["pullbacks", "siegel"]  # default: all
    samples = 32
    [checks.tolerances]
    kahler = 2e-4

    [output]
    path = "out.csv"
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .models import (ConstantCurvature, Euclidean, ModelMetric,
                     SurfaceOfRevolution)
from .geometry import cosh_profile, poly_profile, torus_profile
from .verify import CHECK_NAMES

__all__ = ["Scenario", "SGrid", "load_scenario", "parse_scenario"]


@dataclass
class SGrid:
    re_min: float
    re_max: float
    re_n: int
    im_min: float
    im_max: float
    im_n: int

    def re_values(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.re_n)

    def im_values(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.im_n)


@dataclass
class Scenario:
    model: ModelMetric
    points: list
    point_count: int
    speed_range: tuple
    s_values: list
    s_grid: Optional[SGrid]
    check_names: list
    check_samples: int
    tolerance_overrides: dict
    output_path: Optional[str]
    digest: str
    raw: dict = field(repr=False, default_factory=dict)


def _require_keys(table: dict, allowed: set, where: str) -> None:
    unknown = set(table) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in [{where}]: {sorted(unknown)}")


def _parse_model(table: dict) -> ModelMetric:
    _require_keys(table, {"kind", "dim", "curvature", "profile",
                          "profile_params", "u_range", "analytic_strip"},
                  "model")
    kind = table.get("kind")
    if kind == "euclidean":
        if "dim" not in table:
            raise ConfigError("[model] euclidean needs dim")
        return Euclidean(int(table["dim"]))
    if kind == "constant_curvature":
        if "dim" not in table or "curvature" not in table:
            raise ConfigError("[model] constant_curvature needs dim and curvature")
        return ConstantCurvature(int(table["dim"]), float(table["curvature"]))
    if kind == "surface_of_revolution":
        pname = table.get("profile")
        params = table.get("profile_params", [])
        kwargs = {}
        if "u_range" in table:
            lo, hi = table["u_range"]
            kwargs["u_min"], kwargs["u_max"] = float(lo), float(hi)
        if "analytic_strip" in table:
            kwargs["strip"] = float(table["analytic_strip"])
        try:
            if pname == "torus":
                profile = torus_profile(float(params[0]) if params else 3.0, **kwargs)
            elif pname == "cosh":
                profile = cosh_profile(float(params[0]) if params else 1.0, **kwargs)
            elif pname == "poly":
                if not params:
                    raise ConfigError("[model] poly profile needs coefficients")
                profile = poly_profile([float(a) for a in params], **kwargs)
            else:
                raise ConfigError(f"[model] unknown profile {pname!r}")
        except ValueError as exc:
            raise ConfigError(f"[model] invalid profile: {exc}") from exc
        return SurfaceOfRevolution(profile)
    raise ConfigError(f"[model] unknown kind {kind!r}")


def _parse_points(table: dict, model: ModelMetric):
    _require_keys(table, {"values", "count", "speed_range"}, "points")
    points = []
    for row in table.get("values", []):
        row = [float(a) for a in row]
        if len(row) != 2 * model.m:
            raise ConfigError(
                f"[points] rows must have 2*dim = {2 * model.m} entries")
        try:
            points.append(model.point(row[:model.m], row[model.m:]))
        except Exception as exc:
            raise ConfigError(f"[points] invalid point {row}: {exc}") from exc
    count = int(table.get("count", 0))
    speed = table.get("speed_range", [0.1, 1.0])
    if len(speed) != 2 or not (0.0 <= speed[0] <= speed[1]):
        raise ConfigError("[points] speed_range must be [lo, hi] with 0 <= lo <= hi")
    return points, count, (float(speed[0]), float(speed[1]))


def _parse_s(table: dict):
    _require_keys(table, {"values", "grid"}, "s")
    values = []
    for row in table.get("values", []):
        if len(row) != 2:
            raise ConfigError("[s] values rows are (Re s, Im s) pairs")
        values.append(complex(float(row[0]), float(row[1])))
    grid = None
    if "grid" in table:
        gt = table["grid"]
        _require_keys(gt, {"re", "im"}, "s.grid")
        if "re" not in gt or "im" not in gt:
            raise ConfigError("[s.grid] needs re and im triples (min, max, count)")
        re, im = gt["re"], gt["im"]
        if len(re) != 3 or len(im) != 3:
            raise ConfigError("[s.grid] re/im must be (min, max, count)")
        grid = SGrid(float(re[0]), float(re[1]), int(re[2]),
                     float(im[0]), float(im[1]), int(im[2]))
        if grid.re_n < 1 or grid.im_n < 1:
            raise ConfigError("[s.grid] counts must be positive")
    return values, grid


def _parse_checks(table: dict):
    _require_keys(table, {"names", "samples", "tolerances"}, "checks")
    names = list(table.get("names", CHECK_NAMES))
    for name in names:
        if name not in CHECK_NAMES:
            raise ConfigError(f"[checks] unknown check name {name!r}; "
                              f"known: {', '.join(CHECK_NAMES)}")
    samples = int(table.get("samples", 32))
    tols = {}
    for key, val in table.get("tolerances", {}).items():
        if key not in CHECK_NAMES:
            raise ConfigError(f"[checks.tolerances] unknown check name {key!r}")
        tols[key] = float(val)
    return names, samples, tols


def parse_scenario(text: bytes | str) -> Scenario:
    """Parse and validate a scenario document (strict: unknown keys error)."""
    if isinstance(text, str):
        text = text.encode("utf-8")
    digest = hashlib.sha256(text).hexdigest()[:16]
    try:
        doc = tomllib.loads(text.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"scenario is not valid TOML: {exc}") from exc
    _require_keys(doc, {"model", "points", "s", "checks", "output"}, "<root>")
    if "model" not in doc:
        raise ConfigError("scenario needs a [model] table")
    model = _parse_model(doc["model"])
    points, count, speed_range = _parse_points(doc.get("points", {}), model)
    s_values, s_grid = _parse_s(doc.get("s", {}))
    check_names, check_samples, tols = _parse_checks(doc.get("checks", {}))
    out_table = doc.get("output", {})
    _require_keys(out_table, {"path"}, "output")
    return Scenario(model=model, points=points, point_count=count,
                    speed_range=speed_range, s_values=s_values, s_grid=s_grid,
                    check_names=check_names, check_samples=check_samples,
                    tolerance_overrides=tols,
                    output_path=out_table.get("path"), digest=digest, raw=doc)


def load_scenario(path: str) -> Scenario:
    try:
        with open(path, "rb") as fh:
            return parse_scenario(fh.read())
    except OSError as exc:
        raise ConfigError(f"cannot read scenario file {path}: {exc}") from exc


def sample_scenario_points(scenario: Scenario, seed: int) -> list:
    """Explicit points plus `count` quasi-random draws (deterministic)."""
    from .verify import SampleStream

    points = list(scenario.points)
    if scenario.point_count > 0:
        stream = SampleStream(scenario.model, seed=seed)
        lo, hi = scenario.speed_range
        hi = max(hi, lo + 1e-12)
        for _ in range(scenario.point_count):
            x, _, _ = stream.draw(v_range=(lo, hi))
            points.append(x)
    return points
