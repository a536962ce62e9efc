"""Catalog of real-analytic model Riemannian manifolds.

Three chart conventions are used: Euclidean space in global coordinates,
constant-curvature space forms in geodesic normal coordinates around a base
point, and surfaces of revolution in the (u, theta) strip chart with metric
du^2 + r(u)^2 dtheta^2.

Each model supplies pointwise metric data (tensor, derivatives, Christoffel
symbols), orthonormal frames whose leading vector is parallel to the
velocity, the geodesic flow (closed form where the variant admits one, with
the numeric path always available for cross-checks), parallel frame
transport along geodesics, and the Jacobi curvature operator along a
geodesic together with its complex-analytic extension in the time parameter.

A point of the manifold of geodesics is represented by its initial data
(q, p) in the chart; the curve itself is t -> flow_t(q, p).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import geometry, _kernel
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import (AnalyticityDomainError, ChartExitError, IntegrationError,
                     OverflowGuardError)
from .geometry import Profile, cosh_profile, poly_profile, torus_profile

__all__ = [
    "GeodesicPoint", "CurvatureAlongGeodesic", "ModelMetric",
    "Euclidean", "ConstantCurvature", "SurfaceOfRevolution",
    "geodesic_flow", "speed_squared", "curvature_along",
    "poly_profile", "cosh_profile", "torus_profile",
]


@dataclass
class GeodesicPoint:
    """A geodesic, identified by its initial data (q, p) in a chart."""

    q: np.ndarray
    p: np.ndarray
    metric: "ModelMetric"

    def __post_init__(self):
        self.q = np.asarray(self.q, dtype=float)
        self.p = np.asarray(self.p, dtype=float)

    @property
    def v(self) -> float:
        """Speed squared; constant along the geodesic."""
        return self.metric.speed_squared(self)

    def __repr__(self):
        return f"GeodesicPoint(q={self.q.tolist()}, p={self.p.tolist()}, metric={self.metric.name})"


@dataclass
class CurvatureAlongGeodesic:
    """Jacobi operator R(tau) along a geodesic, in the parallel frame.

    The frame has its first vector parallel to the velocity, so the first
    row and column of R vanish.  ``strip`` is the half-width of the declared
    analyticity strip around the real time axis (inf for the constant case).
    Calling the object evaluates R at real or complex time; for surfaces of
    revolution this continues the geodesic itself to complex time first.
    """

    m: int
    v: float
    strip: float
    constant: Optional[np.ndarray] = None
    profile: Optional[Profile] = None
    geo_init: Optional[np.ndarray] = None
    config: SolverConfig = field(default_factory=lambda: DEFAULT_CONFIG)

    @property
    def is_constant(self) -> bool:
        return self.constant is not None

    def check_domain(self, tau) -> None:
        if abs(complex(tau).imag) > self.strip:
            raise AnalyticityDomainError(
                f"time {tau} outside the declared analyticity strip "
                f"|Im tau| <= {self.strip}")

    def __call__(self, tau) -> np.ndarray:
        tau = complex(tau)
        self.check_domain(tau)
        if self.is_constant:
            return self.constant.astype(complex)
        u = self._geodesic_at(tau)[0]
        r, _, d2 = geometry.profile_eval(self.profile.kind, self.profile.coefs, u)
        out = np.zeros((2, 2), dtype=complex)
        out[1, 1] = (-d2 / r) * self.v
        return out

    def _geodesic_at(self, tau: complex) -> np.ndarray:
        cfg = self.config
        y0 = np.zeros(4 + 4, dtype=complex)  # dummy single Jacobi column
        y0[:4] = self.geo_init
        iparams = np.array([self.profile.kind, len(self.profile.coefs), 1],
                           dtype=np.int64)
        fparams = np.concatenate(([self.v], self.profile.coefs))
        status, y_end, *_ = _kernel.integrate_path(
            _kernel.SYS_JACOBI_REVOLUTION, iparams, fparams, y0,
            np.array([0.0, tau], dtype=complex),
            rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step,
            guard=cfg.overflow_guard, record=False)
        _raise_for_status(status, f"geodesic continuation to {tau}")
        return y_end[:4]


def _raise_for_status(status: int, what: str) -> None:
    if status == _kernel.STATUS_UNDERFLOW:
        raise IntegrationError(f"step size underflow during {what}")
    if status == _kernel.STATUS_OVERFLOW:
        raise OverflowGuardError(f"state exceeded the overflow guard during {what}")


class ModelMetric:
    """Base class of the model catalog.

    Instances are immutable after construction and safe to share; all
    evaluation methods are pure functions of their arguments.
    """

    m: int
    name: str

    # -- pointwise chart data -------------------------------------------

    def metric(self, q: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def inv_metric(self, q: np.ndarray) -> np.ndarray:
        return np.linalg.inv(self.metric(q))

    def dmetric(self, q: np.ndarray) -> np.ndarray:
        """dg[k, i, j] = d g_ij / d q_k."""
        raise NotImplementedError

    def christoffel(self, q: np.ndarray) -> np.ndarray:
        """gamma[l, i, j], symmetric in (i, j)."""
        raise NotImplementedError

    def point(self, q, p) -> GeodesicPoint:
        q = np.atleast_1d(np.asarray(q, dtype=float))
        p = np.atleast_1d(np.asarray(p, dtype=float))
        if q.shape != (self.m,) or p.shape != (self.m,):
            raise ValueError(f"expected coordinate arrays of length {self.m}")
        self.check_chart(q)
        return GeodesicPoint(q, p, self)

    def check_chart(self, q: np.ndarray) -> None:
        pass

    def speed_squared(self, x: GeodesicPoint) -> float:
        return float(x.p @ self.metric(x.q) @ x.p)

    # -- frames ----------------------------------------------------------

    def frame_at(self, x: GeodesicPoint) -> np.ndarray:
        """Orthonormal frame (columns) at x, first vector along p when p != 0.

        For two-dimensional models with nonzero speed the second vector is
        the +90 degree oriented normal, which makes the frame returned by
        flow_with_frame parallel along the geodesic.
        """
        g = self.metric(x.q)
        v = self.speed_squared(x)
        if self.m == 2 and v > 0.0:
            e1 = x.p / math.sqrt(v)
            return np.column_stack([e1, geometry.oriented_normal_2d(g, e1)])
        return geometry.gram_schmidt_frame(g, x.p if v > 0.0 else None)

    # -- flows -----------------------------------------------------------

    def geodesic_flow(self, x: GeodesicPoint, t: float, numeric: bool = False,
                      config: SolverConfig | None = None) -> GeodesicPoint:
        raise NotImplementedError

    def flow_with_frame(self, x: GeodesicPoint, t: float,
                        config: SolverConfig | None = None):
        """Flow and parallel-transport the frame of ``frame_at``.

        Returns (flowed point, frame matrix at the flowed point).
        """
        raise NotImplementedError

    def curvature_along(self, x: GeodesicPoint,
                        config: SolverConfig | None = None) -> CurvatureAlongGeodesic:
        raise NotImplementedError

    # -- tangent-data conversions ----------------------------------------

    def to_frame_data(self, x: GeodesicPoint, dq: np.ndarray, dp: np.ndarray):
        """Chart variation (dq, dp) -> Jacobi data (value, derivative) in the
        parallel orthonormal frame at time 0."""
        g = self.metric(x.q)
        e = self.frame_at(x)
        f = e.T @ g
        gamma_p = np.einsum("lij,j->li", self.christoffel(x.q), x.p)
        return f @ dq, f @ (dp + gamma_p @ dq)

    def from_frame_data(self, x: GeodesicPoint, y0: np.ndarray, yp0: np.ndarray):
        """Inverse of to_frame_data."""
        e = self.frame_at(x)
        gamma_p = np.einsum("lij,j->li", self.christoffel(x.q), x.p)
        dq = e @ y0
        return dq, e @ yp0 - gamma_p @ dq

    # -- sampling hints ----------------------------------------------------

    def sample_box(self) -> tuple:
        """(q_low, q_high) box of chart coordinates safe for random sampling."""
        raise NotImplementedError

    def __repr__(self):
        return self.name


class Euclidean(ModelMetric):
    """Flat space in global coordinates; geodesics are straight lines."""

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("dimension must be at least 1")
        self.m = int(m)
        self.name = f"euclidean(m={m})"

    def metric(self, q):
        return np.eye(self.m)

    def inv_metric(self, q):
        return np.eye(self.m)

    def dmetric(self, q):
        return np.zeros((self.m,) * 3)

    def christoffel(self, q):
        return np.zeros((self.m,) * 3)

    def geodesic_flow(self, x, t, numeric=False, config=None):
        if numeric:
            return _cc_numeric_flow(self, 0.0, x, t, config)[0]
        return GeodesicPoint(x.q + t * x.p, x.p.copy(), self)

    def flow_with_frame(self, x, t, config=None):
        return self.geodesic_flow(x, t), self.frame_at(x)

    def curvature_along(self, x, config=None):
        return CurvatureAlongGeodesic(self.m, self.speed_squared(x),
                                      math.inf, constant=np.zeros((self.m, self.m)))

    def sample_box(self):
        return -np.ones(self.m), np.ones(self.m)


def _cc_numeric_flow(model, c, x, t, config):
    """Numeric chart flow with frame transport for flat/space-form models."""
    cfg = config or DEFAULT_CONFIG
    m = model.m
    e0 = model.frame_at(x)
    y0 = np.concatenate([x.q, x.p, e0.ravel()]).astype(complex)
    status, y_end, *_ = _kernel.integrate_path(
        _kernel.SYS_GEODESIC_CC, np.array([m], dtype=np.int64),
        np.array([c], dtype=float), y0, np.array([0.0, t], dtype=complex),
        rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step,
        guard=cfg.overflow_guard, record=False)
    _raise_for_status(status, "numeric geodesic flow")
    q1 = y_end[:m].real
    p1 = y_end[m:2 * m].real
    e1 = y_end[2 * m:].real.reshape(m, m)
    return GeodesicPoint(q1, p1, model), e1


class ConstantCurvature(ModelMetric):
    """Space form of curvature c != 0, in geodesic normal coordinates.

    The chart covers the ball of radius pi/sqrt(c) for c > 0 (all of the
    plane for c < 0); checks in this package stay well inside, where the
    closed-form flow through the quadric embedding is exact.
    """

    def __init__(self, m: int, c: float):
        if m < 2:
            raise ValueError("constant curvature needs dimension >= 2")
        if c == 0.0:
            raise ValueError("use Euclidean for zero curvature")
        self.m = int(m)
        self.c = float(c)
        self.chart_radius = math.pi / math.sqrt(c) if c > 0 else math.inf
        self.name = f"constant_curvature(m={m}, c={c:g})"

    def metric(self, q):
        return geometry.cc_metric(q, self.c)

    def inv_metric(self, q):
        return geometry.cc_inv_metric(q, self.c)

    def dmetric(self, q):
        return geometry.cc_dmetric(q, self.c)

    def christoffel(self, q):
        return geometry.cc_christoffel(q, self.c)

    def check_chart(self, q):
        r = float(np.linalg.norm(q))
        if r > self.chart_radius:
            raise ChartExitError(
                f"|q| = {r:g} outside the normal chart (radius {self.chart_radius:g})")

    def geodesic_flow(self, x, t, numeric=False, config=None):
        if numeric:
            return _cc_numeric_flow(self, self.c, x, t, config)[0]
        q1, p1 = geometry.cc_flow_closed(x.q, x.p, self.c, t)
        return GeodesicPoint(q1, p1, self)

    def flow_with_frame(self, x, t, config=None):
        v = self.speed_squared(x)
        if v == 0.0 or t == 0.0:
            return self.geodesic_flow(x, t), self.frame_at(x)
        if self.m == 2:
            x1 = self.geodesic_flow(x, t)
            e1 = x1.p / math.sqrt(v)
            g1 = self.metric(x1.q)
            return x1, np.column_stack([e1, geometry.oriented_normal_2d(g1, e1)])
        return _cc_numeric_flow(self, self.c, x, t, config)

    def curvature_along(self, x, config=None):
        v = self.speed_squared(x)
        r = self.c * v * np.eye(self.m)
        r[0, 0] = 0.0
        return CurvatureAlongGeodesic(self.m, v, math.inf, constant=r)

    def sample_box(self):
        half = min(0.8, 0.3 * self.chart_radius)
        return -half * np.ones(self.m), half * np.ones(self.m)


class SurfaceOfRevolution(ModelMetric):
    """Abstract surface with metric du^2 + r(u)^2 dtheta^2 on a u-strip.

    ``profile`` supplies the analytic radius r(u) together with its chart
    interval and the declared analyticity strip used when geodesics are
    continued to complex time.  Flows that leave the u-interval raise
    ChartExitError.
    """

    def __init__(self, profile: Profile):
        self.m = 2
        self.profile = profile
        self.name = f"surface_of_revolution(kind={profile.kind})"

    def metric(self, q):
        r = self.profile.value(float(q[0]))
        return np.diag([1.0, r * r])

    def inv_metric(self, q):
        r = self.profile.value(float(q[0]))
        return np.diag([1.0, 1.0 / (r * r)])

    def dmetric(self, q):
        r = self.profile.value(float(q[0]))
        d1 = self.profile.d1(float(q[0]))
        dg = np.zeros((2, 2, 2))
        dg[0, 1, 1] = 2.0 * r * d1
        return dg

    def christoffel(self, q):
        return geometry.rev_christoffel(float(q[0]), self.profile)

    def check_chart(self, q):
        u = float(q[0])
        if not (self.profile.u_min <= u <= self.profile.u_max):
            raise ChartExitError(
                f"u = {u:g} outside the chart interval "
                f"[{self.profile.u_min:g}, {self.profile.u_max:g}]")

    def _numeric_flow(self, x, t, config):
        cfg = config or DEFAULT_CONFIG
        y0 = np.concatenate([x.q, x.p, np.eye(2).ravel()]).astype(complex)
        iparams = np.array([self.profile.kind, len(self.profile.coefs)],
                           dtype=np.int64)
        status, y_end, taus, ys, *_ = _kernel.integrate_path(
            _kernel.SYS_GEODESIC_REVOLUTION, iparams,
            np.array(self.profile.coefs, dtype=float), y0,
            np.array([0.0, t], dtype=complex),
            rtol=cfg.rtol, atol=cfg.atol, max_step=cfg.max_step,
            guard=cfg.overflow_guard, record=True)
        _raise_for_status(status, "geodesic flow on the revolution surface")
        u_traj = ys[:, 0].real
        if u_traj.size and (u_traj.min() < self.profile.u_min
                            or u_traj.max() > self.profile.u_max):
            raise ChartExitError(
                "geodesic left the u-interval of the chart during the flow")
        q1 = y_end[:2].real
        p1 = y_end[2:4].real
        e1 = y_end[4:].real.reshape(2, 2)
        return GeodesicPoint(q1, p1, self), e1

    def geodesic_flow(self, x, t, numeric=True, config=None):
        return self._numeric_flow(x, t, config)[0]

    def flow_with_frame(self, x, t, config=None):
        v = self.speed_squared(x)
        x1, _ = self._numeric_flow(x, t, config)
        if v == 0.0:
            return x1, self.frame_at(x)
        e1 = x1.p / math.sqrt(v)
        g1 = self.metric(x1.q)
        return x1, np.column_stack([e1, geometry.oriented_normal_2d(g1, e1)])

    def curvature_along(self, x, config=None):
        v = self.speed_squared(x)
        if v == 0.0:
            return CurvatureAlongGeodesic(2, 0.0, math.inf,
                                          constant=np.zeros((2, 2)))
        return CurvatureAlongGeodesic(
            2, v, self.profile.strip, profile=self.profile,
            geo_init=np.concatenate([x.q, x.p]).astype(complex),
            config=config or DEFAULT_CONFIG)

    def sample_box(self):
        lo_u, hi_u = self.profile.u_min, self.profile.u_max
        span = hi_u - lo_u
        return (np.array([lo_u + 0.25 * span, -math.pi]),
                np.array([hi_u - 0.25 * span, math.pi]))


# -- module-level operation surface --------------------------------------

def geodesic_flow(metric: ModelMetric, x: GeodesicPoint, t: float,
                  numeric: bool = False, config: SolverConfig | None = None):
    """Flow the geodesic x for time t; preserves the speed squared."""
    return metric.geodesic_flow(x, t, numeric=numeric, config=config)


def speed_squared(metric: ModelMetric, x: GeodesicPoint) -> float:
    """The function v >= 0 on the manifold of geodesics."""
    return metric.speed_squared(x)


def curvature_along(metric: ModelMetric, x: GeodesicPoint,
                    config: SolverConfig | None = None) -> CurvatureAlongGeodesic:
    """Jacobi operator along the geodesic through x, with complex extension."""
    return metric.curvature_along(x, config=config)
