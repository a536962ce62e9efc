"""Polarization data at a geodesic.

Assembles, from the Jacobi engine and the model catalog:

* the right action of affine maps on geodesics and on tangent vectors,
* the symplectic (Wronskian) pairing of tangent vectors,
* the real symmetric matrix phi0(a) expressing vertical basis fields in
  terms of horizontal ones at constant geodesics, and its analytic
  continuation phi(s) to complex time, whose imaginary part is definite
  with the sign of Im s (Siegel condition),
* the real complex-structure tensor J of the polarization labelled by s,
  acting on Jacobi-data coordinates, with chart-basis conjugation,
* the Lagrangian frame of the real polarization for real s,
* the canonical-bundle metric normalized against the symplectic volume,
* a domain probe reporting whether the structure exists at (x, s).

Tangent vectors at a geodesic x are encoded by Jacobi data (value,
derivative at time 0) in the parallel orthonormal frame of the model; the
standard basis is horizontal xi_k = (e_k, 0), vertical eta_k = (0, e_k).
With phi = A + iB the complex structure is the block matrix

    J = [[-A B^-1, -A B^-1 A - B], [B^-1, B^-1 A]]

whose -i eigenspace is spanned by {eta_j - sum_k phi_jk xi_k}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import (AnalyticityDomainError, BasePointMismatchError,
                     DegeneratePolarizationError, IntegrationError,
                     OverflowGuardError, PoleOnPathError, SingularEndpointError)
from .jacobi import (ContinuationPath, JacobiState, continue_complex,
                     fundamental_state, path_with_detour, solve_real)
from .models import GeodesicPoint
from .semigroup import GroupElement, ParamLike, as_param

__all__ = [
    "TangentAtGeodesic", "PhiMatrix", "ComplexStructureTensor", "DomainReport",
    "standard_basis", "omega", "act", "act_tangent", "act_tangent_matrix",
    "phi_real", "phi_at", "complex_structure", "complex_structure_chart",
    "frame_chart_maps", "omega_chart", "dv_chart",
    "real_polarization", "canonical_metric", "domain_check",
]


@dataclass
class TangentAtGeodesic:
    """Tangent vector encoded as Jacobi data in the parallel frame."""

    Y0: np.ndarray
    Yp0: np.ndarray
    at: Optional[GeodesicPoint] = None

    def __post_init__(self):
        self.Y0 = np.atleast_1d(np.asarray(self.Y0, dtype=float))
        self.Yp0 = np.atleast_1d(np.asarray(self.Yp0, dtype=float))

    def stacked(self) -> np.ndarray:
        return np.concatenate([self.Y0, self.Yp0])


def standard_basis(m: int, x: GeodesicPoint | None = None):
    """The symplectic basis (xi_1..xi_m, eta_1..eta_m) of horizontal and
    vertical Jacobi data."""
    eye = np.eye(m)
    xis = [TangentAtGeodesic(eye[k], np.zeros(m), x) for k in range(m)]
    etas = [TangentAtGeodesic(np.zeros(m), eye[k], x) for k in range(m)]
    return xis, etas


def _same_point(a: GeodesicPoint, b: GeodesicPoint) -> bool:
    return (a.metric is b.metric and np.array_equal(a.q, b.q)
            and np.array_equal(a.p, b.p))


def omega(xi: TangentAtGeodesic, eta: TangentAtGeodesic) -> float:
    """Symplectic pairing <Y0_xi, Yp0_eta> - <Yp0_xi, Y0_eta>.

    The sign convention makes the flat-model pair (e, 0), (0, e) give +1,
    matching the coordinate form sum dq_i wedge dp_i.
    """
    if xi.at is not None and eta.at is not None and not _same_point(xi.at, eta.at):
        raise BasePointMismatchError("tangent vectors live at different geodesics")
    return float(xi.Y0 @ eta.Yp0 - xi.Yp0 @ eta.Y0)


# -- group action ------------------------------------------------------------

def act(g: GroupElement, x: GeodesicPoint,
        config: SolverConfig | None = None) -> GeodesicPoint:
    """Composition action: the geodesic t -> x(a + b t).

    Flows for time a, then scales the velocity by b.  For b = 0 the image is
    the constant geodesic at x(a).
    """
    x1 = x.metric.geodesic_flow(x, g.a, config=config) if g.a != 0.0 else x
    return GeodesicPoint(x1.q.copy(), g.b * x1.p, x.metric)


def act_tangent_matrix(g: GroupElement, x: GeodesicPoint,
                       config: SolverConfig | None = None):
    """Differential of the action of g at x, on Jacobi-data coordinates.

    Returns (T, xg): the 2m x 2m real matrix sending data at x (in the frame
    at x) to data at xg = act(g, x) (in the frame constructed there), and
    the image point.  A field Y along x maps to t -> Y(a + b t), with data
    (Y(a), b Y'(a)), rotated from the transported frame into the new one.
    """
    cfg = config or DEFAULT_CONFIG
    m = x.metric.m
    r_op = x.metric.curvature_along(x, config=cfg)
    fund = solve_real(r_op, fundamental_state(m), g.a, cfg)
    x_a, e_par = x.metric.flow_with_frame(x, g.a, config=cfg)
    xg = GeodesicPoint(x_a.q.copy(), g.b * x_a.p, x.metric)
    e_new = x.metric.frame_at(xg)
    rot = e_new.T @ x.metric.metric(x_a.q) @ e_par
    top = rot @ fund.Y.real
    bot = (g.b * rot) @ fund.Yp.real
    t_mat = np.block([[top[:, :m], top[:, m:]], [bot[:, :m], bot[:, m:]]])
    return t_mat, xg


def act_tangent(g: GroupElement, x: GeodesicPoint, xi: TangentAtGeodesic,
                config: SolverConfig | None = None) -> TangentAtGeodesic:
    """Push a tangent vector forward along the action of g."""
    t_mat, xg = act_tangent_matrix(g, x, config)
    out = t_mat @ xi.stacked()
    m = x.metric.m
    return TangentAtGeodesic(out[:m], out[m:], xg)


# -- phi ---------------------------------------------------------------------

@dataclass
class PhiMatrix:
    """phi evaluated at the identity for parameter s, in the standard basis.

    Symmetric up to solver error; Im part definite with the sign of Im s
    wherever the polarization exists.
    """

    value: np.ndarray
    s: complex
    x: Optional[GeodesicPoint] = None
    basis: str = "standard horizontal/vertical"

    @property
    def m(self) -> int:
        return self.value.shape[0]

    def sym_residual(self) -> float:
        return float(np.abs(self.value - self.value.T).max())

    def re_sym(self) -> np.ndarray:
        return (self.value.real + self.value.real.T) / 2.0

    def im_sym(self) -> np.ndarray:
        return (self.value.imag + self.value.imag.T) / 2.0

    def im_eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.im_sym())

    def siegel_margin(self) -> float:
        """Smallest eigenvalue of sign(Im s) * Im phi; positive inside."""
        sign = 1.0 if self.s.imag > 0 else -1.0
        return float(np.linalg.eigvalsh(sign * self.im_sym()).min())


def _endpoint_blocks(state: JacobiState, m: int, config: SolverConfig):
    y_val = state.Y[:, :m]
    z_val = state.Y[:, m:]
    svals = np.linalg.svd(y_val, compute_uv=False)
    if svals[-1] < config.endpoint_rcond * max(1.0, svals[0]):
        raise SingularEndpointError(
            "Jacobi value matrix is singular at the continuation endpoint "
            "(domain boundary)", condition=float(svals[-1] / max(svals[0], 1e-300)))
    return y_val, z_val


def phi_real(x: GeodesicPoint, a: float,
             config: SolverConfig | None = None) -> np.ndarray:
    """phi0(a): real symmetric matrix with phi0(a)^T = Y(a)^-1 Z(a).

    Y, Z are the matrix solutions with horizontal/vertical data; fails with
    a condition estimate when a sits at (or numerically near) a conjugate
    time, where Y(a) degenerates.
    """
    cfg = config or DEFAULT_CONFIG
    m = x.metric.m
    if a == 0.0:
        return np.zeros((m, m))
    r_op = x.metric.curvature_along(x, config=cfg)
    state = solve_real(r_op, fundamental_state(m), float(a), cfg)
    y_val, z_val = _endpoint_blocks(state, m, cfg)
    return np.linalg.solve(y_val, z_val).T.real


def phi_at(x: GeodesicPoint, s: ParamLike,
           config: SolverConfig | None = None,
           path: ContinuationPath | None = None) -> PhiMatrix:
    """Analytic continuation of phi0 to complex time s, evaluated at id.

    The default path is the straight segment 0 -> s.  An interior zero of
    det Y on the path raises PoleOnPathError (the point lies outside the
    domain of the polarization for this parameter) unless detours are
    enabled in the configuration, in which case the path is rerouted around
    the pole estimate up to max_detours times.  A singular endpoint always
    fails.
    """
    cfg = config or DEFAULT_CONFIG
    s = as_param(s)
    if s.is_infinity or s.value.imag == 0.0:
        raise ValueError("phi continuation needs a finite parameter with "
                         "Im s != 0; real parameters take the real-polarization route")
    sval = s.value
    m = x.metric.m
    r_op = x.metric.curvature_along(x, config=cfg)
    cur_path = path or ContinuationPath.straight(sval)
    state = None
    for _ in range(cfg.max_detours + 1):
        try:
            state = continue_complex(r_op, fundamental_state(m), cur_path,
                                     cfg, monitor_poles=True)
            break
        except PoleOnPathError as exc:
            if not cfg.detour_poles:
                raise
            cur_path = path_with_detour(cur_path, exc.report.location,
                                        cfg.detour_radius)
    else:
        raise PoleOnPathError("persistent poles after the detour budget")
    y_val, z_val = _endpoint_blocks(state, m, cfg)
    return PhiMatrix(np.linalg.solve(y_val, z_val).T, sval, x)


# -- complex structure -------------------------------------------------------

@dataclass
class ComplexStructureTensor:
    """Real 2m x 2m operator with J^2 = -I on Jacobi-data coordinates."""

    J: np.ndarray
    s: complex
    m: int

    def apply(self, xi: TangentAtGeodesic) -> TangentAtGeodesic:
        out = self.J @ xi.stacked()
        return TangentAtGeodesic(out[:self.m], out[self.m:], xi.at)


def complex_structure(x: GeodesicPoint, s: ParamLike,
                      config: SolverConfig | None = None,
                      phi: PhiMatrix | None = None) -> ComplexStructureTensor:
    """Complex-structure tensor of the polarization labelled by s at x.

    The (0,1)-eigenspace (eigenvalue -i) is spanned by the combinations
    eta_j - sum_k phi_jk xi_k of the standard basis.
    """
    cfg = config or DEFAULT_CONFIG
    if phi is None:
        phi = phi_at(x, s, cfg)
    a_mat = phi.re_sym()
    b_mat = phi.im_sym()
    eigs = np.abs(np.linalg.eigvalsh(b_mat))
    if eigs.min() == 0.0 or eigs.max() / eigs.min() > cfg.imphi_max_cond:
        raise DegeneratePolarizationError(
            "Im phi is numerically singular; the polarization degenerates")
    b_inv = np.linalg.inv(b_mat)
    ab = a_mat @ b_inv
    j_mat = np.block([[-ab, -ab @ a_mat - b_mat],
                      [b_inv, b_inv @ a_mat]])
    return ComplexStructureTensor(j_mat, phi.s, phi.m)


def frame_chart_maps(x: GeodesicPoint):
    """(D, D^-1): chart variations (dq, dp) <-> frame Jacobi data at x."""
    metric = x.metric
    m = metric.m
    g = metric.metric(x.q)
    e = metric.frame_at(x)
    f = e.T @ g
    gamma_p = np.einsum("lij,j->li", metric.christoffel(x.q), x.p)
    zero = np.zeros((m, m))
    d_mat = np.block([[f, zero], [f @ gamma_p, f]])
    d_inv = np.block([[e, zero], [-gamma_p @ e, e]])
    return d_mat, d_inv


def complex_structure_chart(x: GeodesicPoint, s: ParamLike,
                            config: SolverConfig | None = None,
                            phi: PhiMatrix | None = None) -> np.ndarray:
    """J as a matrix on chart tangents (dq, dp); basis-independent."""
    tensor = complex_structure(x, s, config, phi)
    d_mat, d_inv = frame_chart_maps(x)
    return d_inv @ tensor.J @ d_mat


def omega_chart(x: GeodesicPoint) -> np.ndarray:
    """Matrix of the symplectic form on the chart basis at x."""
    m = x.metric.m
    d_mat, _ = frame_chart_maps(x)
    sympl = np.block([[np.zeros((m, m)), np.eye(m)],
                      [-np.eye(m), np.zeros((m, m))]])
    return d_mat.T @ sympl @ d_mat


def dv_chart(x: GeodesicPoint) -> np.ndarray:
    """Chart gradient of the speed-squared function v(q, p) = p.g(q).p."""
    metric = x.metric
    dq = np.einsum("kij,i,j->k", metric.dmetric(x.q), x.p, x.p)
    dp = 2.0 * metric.metric(x.q) @ x.p
    return np.concatenate([dq, dp])


# -- real polarization, canonical metric, domain ------------------------------

def real_polarization(x: GeodesicPoint, s: float,
                      config: SolverConfig | None = None):
    """Basis of the tangent space to the fiber through x of the time-s
    evaluation map: Jacobi data of fields vanishing at time s.

    The frame is Lagrangian for the symplectic pairing; for s = 0 it is the
    exact vertical frame (0, e_k).
    """
    s = float(s)
    m = x.metric.m
    eye = np.eye(m)
    if s == 0.0:
        return [TangentAtGeodesic(np.zeros(m), eye[k], x) for k in range(m)]
    phi0 = phi_real(x, s, config)
    return [TangentAtGeodesic(-phi0.T @ eye[k], eye[k], x) for k in range(m)]


def canonical_metric(x: GeodesicPoint, s: ParamLike, theta_coeff: complex,
                     config: SolverConfig | None = None,
                     phi: PhiMatrix | None = None) -> float:
    """Squared norm of an m-form on the polarized tangent space:

        2^m |theta(xi_1, ..., xi_m)|^2 det Im phi,

    where theta_coeff is the evaluation of the form on the horizontal basis.
    Positive for Im s > 0; for Im s < 0 the value carries the sign of
    (Im s)^m, matching the orientation of the symplectic volume it is
    normalized against.
    """
    if phi is None:
        phi = phi_at(x, s, config)
    det_im = float(np.linalg.det(phi.im_sym()))
    return (2.0 ** phi.m) * abs(theta_coeff) ** 2 * det_im


@dataclass
class DomainReport:
    """Outcome of a domain probe at (x, s)."""

    inside: bool
    margin: float
    status: str


def domain_check(x: GeodesicPoint, s: ParamLike,
                 config: SolverConfig | None = None) -> DomainReport:
    """Whether the complex polarization labelled by s exists at x.

    inside is True iff the phi continuation succeeds and Im phi is definite
    with the sign of Im s; margin is the smallest eigenvalue of
    sign(Im s) * Im phi (negative when indefinite, NaN when the continuation
    failed).  Failures are encoded in status, never raised.
    """
    try:
        phi = phi_at(x, s, config)
    except PoleOnPathError:
        return DomainReport(False, math.nan, "pole-on-path")
    except SingularEndpointError:
        return DomainReport(False, math.nan, "singular-endpoint")
    except AnalyticityDomainError:
        return DomainReport(False, math.nan, "analyticity-domain")
    except (IntegrationError, OverflowGuardError):
        return DomainReport(False, math.nan, "integration-failure")
    margin = phi.siegel_margin()
    return DomainReport(margin > 0.0, margin, "ok" if margin > 0.0 else "indefinite")
