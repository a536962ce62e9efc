"""Matrix Jacobi equation Y'' + R(t) Y = 0 along geodesics.

Solves in real time and continues solutions analytically to complex time
along polyline paths.  Matrix solutions are entire in time wherever the
curvature operator is analytic, so path independence holds within the
declared analyticity domain; what can degenerate is invertibility of the
value matrix, whose zero set is monitored by the pole detector.

The engine integrates m x k matrix data (k columns = k independent Jacobi
fields); the fundamental system uses k = 2m with horizontal solutions in the
leading block and vertical ones in the trailing block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernel
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import AnalyticityDomainError, IntegrationError, OverflowGuardError, PoleOnPathError
from .models import CurvatureAlongGeodesic

__all__ = [
    "JacobiState", "ContinuationPath", "PoleReport", "ContinuationRecord",
    "solve_real", "continue_complex", "wronskian",
    "horizontal_state", "vertical_state", "fundamental_state",
    "path_with_detour",
]


@dataclass
class JacobiState:
    """Values and derivatives of k Jacobi fields at one (complex) time."""

    Y: np.ndarray
    Yp: np.ndarray
    tau: complex = 0.0

    def __post_init__(self):
        self.Y = np.atleast_2d(np.asarray(self.Y, dtype=complex))
        self.Yp = np.atleast_2d(np.asarray(self.Yp, dtype=complex))
        if self.Y.shape != self.Yp.shape:
            raise ValueError("value and derivative blocks must share a shape")
        self.tau = complex(self.tau)

    @property
    def m(self) -> int:
        return self.Y.shape[0]

    @property
    def k(self) -> int:
        return self.Y.shape[1]


def horizontal_state(m: int) -> JacobiState:
    """Y(0) = I, Y'(0) = 0."""
    return JacobiState(np.eye(m), np.zeros((m, m)), 0.0)


def vertical_state(m: int) -> JacobiState:
    """Y(0) = 0, Y'(0) = I."""
    return JacobiState(np.zeros((m, m)), np.eye(m), 0.0)


def fundamental_state(m: int) -> JacobiState:
    """Horizontal block in columns :m, vertical block in columns m:."""
    return JacobiState(np.hstack([np.eye(m), np.zeros((m, m))]),
                       np.hstack([np.zeros((m, m)), np.eye(m)]), 0.0)


@dataclass(frozen=True)
class ContinuationPath:
    """Polyline of complex time values starting at 0."""

    waypoints: tuple

    def __post_init__(self):
        wps = tuple(complex(w) for w in self.waypoints)
        object.__setattr__(self, "waypoints", wps)
        if len(wps) < 2:
            raise ValueError("a path needs at least two waypoints")
        if wps[0] != 0.0:
            raise ValueError("continuation paths start at time 0")
        for a, b in zip(wps, wps[1:]):
            if a == b:
                raise ValueError("consecutive waypoints must be distinct")

    @classmethod
    def straight(cls, end: complex) -> "ContinuationPath":
        return cls((0.0, complex(end)))

    @property
    def end(self) -> complex:
        return self.waypoints[-1]

    @property
    def length(self) -> float:
        return sum(abs(b - a) for a, b in zip(self.waypoints, self.waypoints[1:]))

    @property
    def max_abs_imag(self) -> float:
        return max(abs(w.imag) for w in self.waypoints)


@dataclass
class PoleReport:
    """Estimated singularity of the Jacobi value matrix near a path.

    ``location`` is the interpolated zero of det Y; ``taus``/``sigma_min``
    trace the smallest singular value of Y along the accepted nodes.
    """

    location: complex
    taus: np.ndarray
    sigma_min: np.ndarray


@dataclass
class ContinuationRecord:
    """Accepted integration nodes of one solve."""

    taus: np.ndarray
    Y: np.ndarray    # (n_nodes, m, k)
    Yp: np.ndarray

    def state_at(self, i: int) -> JacobiState:
        return JacobiState(self.Y[i], self.Yp[i], self.taus[i])


def _integrate(R: CurvatureAlongGeodesic, init: JacobiState, waypoints,
               config: SolverConfig, record: bool):
    m, k = init.m, init.k
    if m != R.m:
        raise ValueError(f"initial data dimension {m} does not match the "
                         f"curvature operator dimension {R.m}")
    wps = np.asarray(waypoints, dtype=complex)
    max_im = float(np.abs(wps.imag).max())
    if max_im > R.strip:
        raise AnalyticityDomainError(
            f"path reaches |Im tau| = {max_im:g}, beyond the declared "
            f"analyticity strip {R.strip:g}")
    if R.is_constant:
        system = _kernel.SYS_JACOBI_CONST
        iparams = np.array([m, k], dtype=np.int64)
        fparams = np.asarray(R.constant, dtype=float).ravel()
        y0 = np.concatenate([init.Y.ravel(), init.Yp.ravel()])
        offset = 0
    else:
        system = _kernel.SYS_JACOBI_REVOLUTION
        iparams = np.array([R.profile.kind, len(R.profile.coefs), k],
                           dtype=np.int64)
        fparams = np.concatenate(([R.v], R.profile.coefs))
        y0 = np.concatenate([R.geo_init, init.Y.ravel(), init.Yp.ravel()])
        offset = 4
    status, y_end, taus, ys, *_ = _kernel.integrate_path(
        system, iparams, fparams, y0, wps,
        rtol=config.rtol, atol=config.atol, max_step=config.max_step,
        guard=config.overflow_guard, record=record)
    if status == _kernel.STATUS_UNDERFLOW:
        raise IntegrationError("step size underflow during the Jacobi solve")
    if status == _kernel.STATUS_OVERFLOW:
        raise OverflowGuardError(
            "Jacobi solution exceeded the overflow guard (likely a movable "
            "singularity of the underlying geodesic continuation)")
    mk = m * k
    final = JacobiState(y_end[offset:offset + mk].reshape(m, k),
                        y_end[offset + mk:offset + 2 * mk].reshape(m, k),
                        wps[-1])
    rec = None
    if record:
        rec = ContinuationRecord(
            taus,
            ys[:, offset:offset + mk].reshape(-1, m, k),
            ys[:, offset + mk:offset + 2 * mk].reshape(-1, m, k))
    return final, rec


def solve_real(R: CurvatureAlongGeodesic, init: JacobiState, t: float,
               config: SolverConfig = DEFAULT_CONFIG, full_output: bool = False):
    """Solve to real time t; Wronskian-conserving."""
    if t == 0.0:
        out = JacobiState(init.Y.copy(), init.Yp.copy(), 0.0)
        return (out, ContinuationRecord(np.array([0.0 + 0.0j]),
                                        init.Y[None], init.Yp[None])) if full_output else out
    final, rec = _integrate(R, init, [0.0, float(t)], config, record=full_output)
    return (final, rec) if full_output else final


def continue_complex(R: CurvatureAlongGeodesic, init: JacobiState, path,
                     config: SolverConfig = DEFAULT_CONFIG,
                     monitor_poles: bool = False, full_output: bool = False):
    """Continue along a path in complex time.

    With ``monitor_poles`` the smallest singular value of the leading m x m
    value block is tracked along the nodes and interpolated zeros of its
    determinant near the path raise :class:`PoleOnPathError` (requires
    k >= m, e.g. the fundamental system).
    """
    if isinstance(path, (complex, float, int)):
        path = ContinuationPath.straight(path)
    final, rec = _integrate(R, init, path.waypoints, config,
                            record=monitor_poles or full_output)
    if monitor_poles:
        if init.k < init.m:
            raise ValueError("pole monitoring needs at least m columns")
        report = _detect_poles(rec, init.m, path, config)
        if report is not None:
            raise PoleOnPathError(
                f"Jacobi value matrix degenerates near tau = {report.location:.6g}",
                report=report)
    return (final, rec) if full_output else final


def wronskian(A: JacobiState, B: JacobiState) -> np.ndarray:
    """W = Y_A^T Y'_B - Y'_A^T Y_B; constant in time for a symmetric R."""
    if A.m != B.m:
        raise ValueError("states live on different fibre dimensions")
    return A.Y.T @ B.Yp - A.Yp.T @ B.Y


# -- pole detection ---------------------------------------------------------

def _sigma_min(mat: np.ndarray) -> float:
    return float(np.linalg.svd(mat, compute_uv=False)[-1])


def _detect_poles(rec: ContinuationRecord, m: int, path: ContinuationPath,
                  config: SolverConfig) -> Optional[PoleReport]:
    blocks = rec.Y[:, :, :m]
    dblocks = rec.Yp[:, :, :m]
    n = blocks.shape[0]
    svs = np.array([_sigma_min(blocks[i]) for i in range(n)])
    taus = rec.taus
    end = path.end

    def report(loc):
        return PoleReport(complex(loc), taus.copy(), svs)

    for i in range(n):
        if svs[i] < config.pole_threshold:
            if abs(taus[i] - end) > 0.5 * config.pole_clearance:
                return report(taus[i])

    # Hermite-interpolated zeros of det Y between nodes
    dets = np.array([np.linalg.det(blocks[i]) for i in range(n)])
    scale = max(np.abs(dets).max(), 1e-300)
    dders = np.empty(n, dtype=complex)
    for i in range(n):
        if svs[i] > 1e-9:
            dders[i] = dets[i] * np.trace(np.linalg.solve(blocks[i], dblocks[i]))
        else:
            dders[i] = 0.0
    for i in range(n - 1):
        dt = taus[i + 1] - taus[i]
        f0, f1 = dets[i] / scale, dets[i + 1] / scale
        d0, d1 = dders[i] * dt / scale, dders[i + 1] * dt / scale
        coeffs = np.array([
            2.0 * f0 + d0 - 2.0 * f1 + d1,
            -3.0 * f0 - 2.0 * d0 + 3.0 * f1 - d1,
            d0,
            f0,
        ])
        lead = np.abs(coeffs)
        if lead.max() < 1e-250:
            continue
        nz = np.nonzero(lead > 1e-14 * lead.max())[0]
        trimmed = coeffs[nz[0]:]
        if len(trimmed) < 2:
            continue
        for u in np.roots(trimmed):
            if not (-0.05 <= u.real <= 1.05):
                continue
            loc = taus[i] + u * dt
            proj = taus[i] + min(max(u.real, 0.0), 1.0) * dt
            if abs(loc - proj) >= config.pole_clearance:
                continue
            if abs(loc - end) <= 0.5 * config.pole_clearance:
                continue
            return report(loc)
    return None


def path_with_detour(path: ContinuationPath, pole: complex,
                     radius: float) -> ContinuationPath:
    """Reroute a path around a flagged pole with a semicircular arc.

    The arc sits on the side of the path opposite the pole estimate (either
    side yields the same continuation, matrix solutions being single-valued
    within the analyticity domain).
    """
    pole = complex(pole)
    best = None
    for i, (w0, w1) in enumerate(zip(path.waypoints, path.waypoints[1:])):
        seg_len = abs(w1 - w0)
        direction = (w1 - w0) / seg_len
        t = min(max(((pole - w0) / direction).real, 0.0), seg_len)
        dist = abs(pole - (w0 + t * direction))
        if best is None or dist < best[0]:
            best = (dist, i, t, direction, seg_len)
    _, i, t, direction, seg_len = best
    if t < radius or seg_len - t < radius:
        raise PoleOnPathError(
            "pole estimate too close to a path vertex to reroute around")
    w0 = path.waypoints[i]
    center = w0 + t * direction
    offset = (pole - center) / direction
    side = -1.0 if offset.imag > 0 else 1.0
    arc = [center + radius * direction * (-math.cos(th) + 1j * side * math.sin(th))
           for th in np.linspace(0.0, math.pi, 7)]
    new_wps = list(path.waypoints[:i + 1]) + arc + list(path.waypoints[i + 1:])
    cleaned = [new_wps[0]]
    for w in new_wps[1:]:
        if abs(w - cleaned[-1]) > 1e-12:
            cleaned.append(w)
    return ContinuationPath(tuple(cleaned))
