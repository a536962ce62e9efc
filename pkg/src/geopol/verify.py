"""Numerical verification battery.

Each check computes a residual for one structural identity of the
polarization family on a concrete sample and reports it against a
tolerance:

* pullbacks: the action scales the symplectic form by the character and the
  speed squared by its square.
* kahler: (Im s) * (1/2) d(dc v) recovers the symplectic form, where
  dc v = -dv o J is differenced on the chart (the sign of dc is calibrated
  once against the flat closed form).
* equivariance: the differential of the action conjugates the complex
  structure for parameter g.s into the one for s.
* canonical_metric: the determinant formula for the squared norm of an
  m-form agrees with direct evaluation against the symplectic volume.
* monge_ampere: the fiberwise degeneracy identity
  2 v (ddbar v)^m = m (ddbar v)^(m-1) ^ dbar v ^ dv.
* fibration: s -> x.g(s), with g(s) the transporter from i to s, satisfies
  the Cauchy-Riemann relation into the structure labelled by i.
* real_polarization: the time-s fiber frame is Lagrangian and vertical.
* siegel: symmetry, definiteness with the sign of Im s, and Schwarz
  reflection of the phi matrix.

Sampling is quasi-random (scrambled Halton), deterministic given a seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import permutations
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.stats import qmc

from . import adapted
from .adapted import (act, act_tangent_matrix, complex_structure,
                      complex_structure_chart, domain_check, dv_chart,
                      omega_chart, phi_at, real_polarization)
from .config import DEFAULT_CONFIG, SolverConfig
from .errors import GeopolError
from .jacobi import JacobiState, solve_real
from .models import (ConstantCurvature, Euclidean, GeodesicPoint, ModelMetric,
                     SurfaceOfRevolution, torus_profile)
from .semigroup import GroupElement, act_on_complex, character, solve_transporter

__all__ = [
    "CheckReport", "FibrationPoint", "CHECK_NAMES",
    "check_pullbacks", "check_kahler_identity", "check_equivariance",
    "check_canonical_metric", "check_monge_ampere_fiber",
    "check_fibration_holomorphy", "check_real_polarization", "check_siegel",
    "default_models", "run_suite", "sweep_domain",
]


@dataclass
class CheckReport:
    """Outcome of one identity check on one sample."""

    name: str
    residual: float
    tolerance: float
    passed: bool
    context: dict = field(default_factory=dict)

    @classmethod
    def make(cls, name, residual, tolerance, **context):
        residual = float(residual)
        return cls(name, residual, float(tolerance), residual <= tolerance, context)


@dataclass
class FibrationPoint:
    """A point (s, x) of the parametrized family; member of the total space
    when the polarization for s exists at x."""

    s: complex
    x: GeodesicPoint

    def member(self, config: SolverConfig | None = None) -> bool:
        return domain_check(self.x, self.s, config).inside


# -- small exterior-algebra helpers (chart basis, dimensions 2m <= 6) --------

def _pfaffian(w: np.ndarray) -> float:
    n = w.shape[0]
    if n == 0:
        return 1.0
    total = 0.0
    rest = list(range(1, n))
    for idx, j in enumerate(rest):
        keep = [i for i in range(n) if i not in (0, j)]
        minor = w[np.ix_(keep, keep)]
        total += (-1.0) ** idx * w[0, j] * _pfaffian(minor)
    return total


def _wedge22(a: np.ndarray, b: np.ndarray) -> complex:
    """(a ^ b)(e1, e2, e3, e4) for antisymmetric 4x4 form matrices."""
    total = 0.0
    for sigma in permutations(range(4)):
        sgn = _perm_sign(sigma)
        total += sgn * a[sigma[0], sigma[1]] * b[sigma[2], sigma[3]]
    return total / 4.0


def _wedge211(a: np.ndarray, c1: np.ndarray, c2: np.ndarray) -> complex:
    """(a ^ c1 ^ c2)(e1, e2, e3, e4) for a 2-form and two 1-forms."""
    total = 0.0
    for sigma in permutations(range(4)):
        sgn = _perm_sign(sigma)
        total += sgn * a[sigma[0], sigma[1]] * c1[sigma[2]] * c2[sigma[3]]
    return total / 2.0


def _perm_sign(sigma) -> int:
    sgn = 1
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            if sigma[i] > sigma[j]:
                sgn = -sgn
    return sgn


def _shift(x: GeodesicPoint, k: int, h: float) -> GeodesicPoint:
    m = x.metric.m
    q, p = x.q.copy(), x.p.copy()
    if k < m:
        q[k] += h
    else:
        p[k - m] += h
    return GeodesicPoint(q, p, x.metric)


def _d_oneform(x: GeodesicPoint, oneform: Callable[[GeodesicPoint], np.ndarray],
               h: float) -> np.ndarray:
    """Exterior derivative matrix M[k, l] = d_k alpha_l - d_l alpha_k by
    central differences on the chart."""
    n = 2 * x.metric.m
    grad = np.empty((n, n))
    for k in range(n):
        grad[k] = (oneform(_shift(x, k, h)) - oneform(_shift(x, k, -h))) / (2.0 * h)
    return grad - grad.T


def _dc_v(x: GeodesicPoint, s: complex, config: SolverConfig) -> np.ndarray:
    """The one-form dc v = -dv o J on the chart basis."""
    j_chart = complex_structure_chart(x, s, config)
    return -(j_chart.T @ dv_chart(x))


def _del_pair(x: GeodesicPoint, s: complex, config: SolverConfig):
    """(del v, dbar v) as complex chart covectors."""
    j_chart = complex_structure_chart(x, s, config)
    dv = dv_chart(x)
    dvj = j_chart.T @ dv
    return 0.5 * (dv - 1j * dvj), 0.5 * (dv + 1j * dvj)


# -- checks -------------------------------------------------------------------

def check_pullbacks(x: GeodesicPoint, g: GroupElement, n_pairs: int = 8,
                    rng: np.random.Generator | None = None,
                    tol: float = 1e-8,
                    config: SolverConfig | None = None) -> CheckReport:
    """Symplectic-form and speed-squared scaling under the action of g."""
    rng = rng or np.random.default_rng(0)
    m = x.metric.m
    chi = character(g)
    t_mat, xg = act_tangent_matrix(g, x, config)
    resid = 0.0
    for _ in range(n_pairs):
        a = rng.standard_normal(2 * m)
        b = rng.standard_normal(2 * m)
        w_before = _omega_arrays(a, b, m)
        ta, tb = t_mat @ a, t_mat @ b
        w_after = _omega_arrays(ta, tb, m)
        resid = max(resid, abs(w_after - chi * w_before))
    resid += abs(x.metric.speed_squared(xg) - chi * chi * x.metric.speed_squared(x))
    return CheckReport.make("pullbacks", resid, tol,
                            model=x.metric.name, g=(float(g.a), float(g.b)))


def _omega_arrays(a: np.ndarray, b: np.ndarray, m: int) -> float:
    return float(a[:m] @ b[m:] - a[m:] @ b[:m])


def check_kahler_identity(x: GeodesicPoint, s: complex, h: float = 1e-3,
                          tol: float = 1e-4,
                          config: SolverConfig | None = None) -> CheckReport:
    """Residual of (Im s) * (1/2) d(dc v) - omega on the chart basis."""
    cfg = config or DEFAULT_CONFIG
    s = complex(s)
    d_mat = _d_oneform(x, lambda pt: _dc_v(pt, s, cfg), h)
    resid = np.abs(s.imag * 0.5 * d_mat - omega_chart(x)).max()
    return CheckReport.make("kahler", resid, tol,
                            model=x.metric.name, s=s, h=h)


def check_equivariance(x: GeodesicPoint, s: complex, g: GroupElement,
                       tol: float = 1e-7,
                       config: SolverConfig | None = None) -> CheckReport:
    """Conjugation of complex structures by the differential of the action."""
    if character(g) == 0.0:
        raise ValueError("equivariance needs a nonzero character")
    gs = act_on_complex(g, s).value
    j_source = complex_structure(x, gs, config).J
    t_mat, xg = act_tangent_matrix(g, x, config)
    j_target = complex_structure(xg, s, config).J
    resid = np.abs(t_mat @ j_source - j_target @ t_mat).max()
    return CheckReport.make("equivariance", resid, tol,
                            model=x.metric.name, s=complex(s),
                            g=(float(g.a), float(g.b)))


def check_canonical_metric(x: GeodesicPoint, s: complex, tol: float = 1e-6,
                           config: SolverConfig | None = None) -> CheckReport:
    """Determinant formula vs direct evaluation of the m-form norm.

    Builds the (1,0) coframe alpha_j = (e_j, phi e_j), wedges it into theta
    with theta(xi) = 1, and compares i^(m^2) m! theta ^ conj(theta) against
    the canonical-metric value times the symplectic volume, both evaluated
    on the standard basis.  The residual is relative.
    """
    cfg = config or DEFAULT_CONFIG
    phi = phi_at(x, s, cfg)
    m = phi.m
    eye = np.eye(m)
    basis = [np.concatenate([eye[k], np.zeros(m)]) for k in range(m)]
    basis += [np.concatenate([np.zeros(m), eye[k]]) for k in range(m)]
    alphas = [np.concatenate([eye[j], phi.value[j, :]]) for j in range(m)]
    pair = np.empty((2 * m, 2 * m), dtype=complex)
    for j in range(m):
        for l in range(2 * m):
            pair[j, l] = alphas[j] @ basis[l]
            pair[m + j, l] = np.conj(alphas[j]) @ basis[l]
    lhs = (1j) ** (m * m) * math.factorial(m) * np.linalg.det(pair)

    w_mat = np.array([[_omega_arrays(u, w, m) for w in basis] for u in basis])
    vol = math.factorial(m) * _pfaffian(w_mat)
    hk = adapted.canonical_metric(x, s, 1.0, cfg, phi=phi)
    rhs = hk * vol
    resid = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return CheckReport.make("canonical_metric", resid, tol,
                            model=x.metric.name, s=s, h_k=hk)


def check_monge_ampere_fiber(x: GeodesicPoint, s: complex, h: float = 1e-2,
                             tol: float = 1e-3,
                             config: SolverConfig | None = None) -> CheckReport:
    """Fiberwise degeneracy of the speed-squared potential.

    Evaluates 2 v (ddbar v)^m and m (ddbar v)^(m-1) ^ dbar v ^ del v on the
    chart basis (m of the model must be 1 or 2) and returns their normalized
    difference.
    """
    cfg = config or DEFAULT_CONFIG
    s = complex(s)
    m = x.metric.m
    if m not in (1, 2):
        raise ValueError("the fiber identity check supports m in {1, 2}")
    v = x.metric.speed_squared(x)
    d_mat = _d_oneform(x, lambda pt: (complex_structure_chart(pt, s, cfg).T
                                      @ dv_chart(pt)), h)
    ddbar = -0.5j * d_mat
    del_v, dbar_v = _del_pair(x, s, cfg)
    if m == 1:
        t1 = 2.0 * v * ddbar[0, 1]
        t2 = dbar_v[0] * del_v[1] - dbar_v[1] * del_v[0]
    else:
        t1 = 2.0 * v * _wedge22(ddbar, ddbar)
        t2 = 2.0 * _wedge211(ddbar, dbar_v, del_v)
    resid = abs(t1 - t2) / max(1.0, abs(t1), abs(t2))
    return CheckReport.make("monge_ampere", resid, tol,
                            model=x.metric.name, s=s, h=h)


def check_fibration_holomorphy(x: GeodesicPoint, s0: complex, h: float = 1e-3,
                               tol: float = 1e-4,
                               config: SolverConfig | None = None) -> CheckReport:
    """Cauchy-Riemann relation of s -> x.g(s) into the structure at i.

    g(s) is the transporter with g(s).i = s; the trivialized family is
    holomorphic in s, so the central-difference derivative in Im s must
    match J applied to the derivative in Re s at the image point.
    """
    cfg = config or DEFAULT_CONFIG
    s0 = complex(s0)
    if s0.imag == 0.0:
        raise ValueError("the fibration trivialization needs Im s != 0")

    def psi(sv: complex) -> np.ndarray:
        xg = act(solve_transporter(1j, sv), x, cfg)
        return np.concatenate([xg.q, xg.p])

    d_re = (psi(s0 + h) - psi(s0 - h)) / (2.0 * h)
    d_im = (psi(s0 + 1j * h) - psi(s0 - 1j * h)) / (2.0 * h)
    x_c = act(solve_transporter(1j, s0), x, cfg)
    j_chart = complex_structure_chart(x_c, 1j, cfg)
    resid = np.abs(d_im - j_chart @ d_re).max()
    return CheckReport.make("fibration", resid, tol,
                            model=x.metric.name, s=s0, h=h)


def check_real_polarization(x: GeodesicPoint, s: float, tol: float = 1e-8,
                            config: SolverConfig | None = None) -> CheckReport:
    """Lagrangian and verticality residuals of the time-s fiber frame."""
    cfg = config or DEFAULT_CONFIG
    frame = real_polarization(x, s, cfg)
    lagr = max(abs(adapted.omega(a, b)) for a in frame for b in frame)
    m = x.metric.m
    init = JacobiState(np.column_stack([t.Y0 for t in frame]),
                       np.column_stack([t.Yp0 for t in frame]), 0.0)
    r_op = x.metric.curvature_along(x, config=cfg)
    pushed = solve_real(r_op, init, float(s), cfg)
    vert = float(np.abs(pushed.Y).max())
    return CheckReport.make("real_polarization", lagr + vert, tol,
                            model=x.metric.name, s=s)


def check_siegel(x: GeodesicPoint, s: complex, tol: float = 1e-8,
                 config: SolverConfig | None = None) -> CheckReport:
    """Symmetry, signed definiteness, and Schwarz reflection of phi."""
    cfg = config or DEFAULT_CONFIG
    s = complex(s)
    phi = phi_at(x, s, cfg)
    phi_conj = phi_at(x, np.conj(s), cfg)
    schwarz = float(np.abs(phi_conj.value - np.conj(phi.value)).max())
    margin = phi.siegel_margin()
    resid = max(phi.sym_residual(), schwarz, max(0.0, -margin))
    return CheckReport.make("siegel", resid, tol,
                            model=x.metric.name, s=s, margin=margin)


CHECK_NAMES = ("pullbacks", "kahler", "equivariance", "canonical_metric",
               "monge_ampere", "fibration", "real_polarization", "siegel")


# -- sampling and the suite runner -------------------------------------------

def default_models() -> list:
    return [
        Euclidean(1),
        Euclidean(2),
        ConstantCurvature(2, 1.0),
        ConstantCurvature(2, -1.0),
        SurfaceOfRevolution(torus_profile(3.0)),
    ]


class SampleStream:
    """Quasi-random samples of points, parameters and group elements.

    Scrambled Halton sequence, deterministic for a given seed.
    """

    def __init__(self, model: ModelMetric, seed: int = 0):
        self.model = model
        m = model.m
        self._qmc = qmc.Halton(d=2 * m + 5, scramble=True, seed=seed)
        self._rng = np.random.default_rng(seed + 977)

    def draw(self, v_range=(0.1, 1.0), s_im_range=(0.4, 1.2),
             chi_choices=None, signed_im: bool = True):
        """One sample: (x, s, g).  The speed squared lands in v_range."""
        m = self.model.m
        row = self._qmc.random(1)[0]
        lo, hi = self.model.sample_box()
        q = lo + row[:m] * (hi - lo)
        direction = 2.0 * row[m:2 * m] - 1.0
        if np.linalg.norm(direction) < 1e-3:
            direction = np.ones(m)
        v = v_range[0] + row[2 * m] * (v_range[1] - v_range[0])
        g_mat = self.model.metric(q)
        p = direction * math.sqrt(v / float(direction @ g_mat @ direction))
        x = GeodesicPoint(q, p, self.model)
        s_re = -0.8 + 1.6 * row[2 * m + 1]
        s_im = s_im_range[0] + row[2 * m + 2] * (s_im_range[1] - s_im_range[0])
        if signed_im and row[2 * m + 3] > 0.5:
            s_im = -s_im
        s = complex(s_re, s_im)
        if chi_choices is not None:
            b = chi_choices[int(self._rng.integers(len(chi_choices)))]
        else:
            b = 0.4 + 1.2 * row[2 * m + 4]
        a = -0.5 + row[2 * m + 3]
        g = GroupElement(float(a), float(b))
        return x, s, g

    def rng(self) -> np.random.Generator:
        return self._rng


def _is_flat(model: ModelMetric) -> bool:
    return isinstance(model, Euclidean)


def _strip_of(model: ModelMetric) -> float:
    """Half-width of the model's complex-time analyticity strip."""
    if isinstance(model, SurfaceOfRevolution):
        return model.profile.strip
    return math.inf


def _hyperbolic_safe(model, v, s_im) -> bool:
    """Conservative bound keeping (x, s) inside the polarized domain."""
    if isinstance(model, ConstantCurvature) and model.c < 0:
        return math.sqrt(abs(model.c) * v) * abs(s_im) < 0.88 * math.pi / 2
    return True


def run_suite(models: Iterable[ModelMetric] | None = None,
              checks: Iterable[str] | None = None,
              n_samples: int = 32, seed: int = 0,
              tol_scale: float = 1.0,
              tol_overrides: Optional[dict] = None,
              config: SolverConfig | None = None) -> list:
    """Run the selected checks over quasi-random samples of every model.

    Returns the list of CheckReports; a report with passed=False marks a
    violation at the scaled tolerance.  Unknown check names raise ValueError.
    """
    cfg = config or DEFAULT_CONFIG
    models = list(models) if models is not None else default_models()
    names = list(checks) if checks is not None else list(CHECK_NAMES)
    for name in names:
        if name not in CHECK_NAMES:
            raise ValueError(f"unknown check name: {name!r}")
    overrides = tol_overrides or {}

    def tol_for(name, flat_default, curved_default, flat):
        base = overrides.get(name, flat_default if flat else curved_default)
        return base * tol_scale

    reports = []
    for model in models:
        flat = _is_flat(model)
        stream = SampleStream(model, seed=seed)
        per_model = -(-n_samples // max(1, len(models)))  # ceil division
        for i in range(per_model):
            for name in names:
                try:
                    report = _run_one(name, model, stream, flat, tol_for, cfg)
                except GeopolError as exc:
                    report = CheckReport(name, math.inf,
                                         tol_for(name, 1e-8, 1e-8, flat),
                                         False,
                                         {"model": model.name,
                                          "error": f"{type(exc).__name__}: {exc}"})
                if report is not None:
                    reports.append(report)
    return reports


def _run_one(name, model, stream, flat, tol_for, cfg):
    m = model.m
    if name == "pullbacks":
        x, _, g = stream.draw()
        return check_pullbacks(x, g, rng=stream.rng(),
                               tol=tol_for(name, 1e-8, 1e-8, flat), config=cfg)
    if name == "kahler":
        if m != 2 and not flat:
            return None
        x, s, _ = stream.draw(v_range=(0.1, 0.8), s_im_range=(0.5, 1.0))
        if not _hyperbolic_safe(model, x.v, s.imag):
            s = complex(s.real, math.copysign(0.5, s.imag))
        return check_kahler_identity(x, s, h=1e-3,
                                     tol=tol_for(name, 1e-9, 1e-4, flat), config=cfg)
    if name == "equivariance":
        chis = tuple(b for b in (0.5, 1.0, 2.0, -1.0)
                     if abs(b) < 0.95 * _strip_of(model))
        x, _, g = stream.draw(v_range=(0.1, 0.4), chi_choices=chis)
        return check_equivariance(x, 1j, g,
                                  tol=tol_for(name, 1e-10, 1e-7, flat), config=cfg)
    if name == "canonical_metric":
        if m > 3:
            return None
        x, s, _ = stream.draw(v_range=(0.1, 0.6))
        if not _hyperbolic_safe(model, x.v, s.imag):
            s = complex(s.real, math.copysign(0.5, s.imag))
        return check_canonical_metric(x, s,
                                      tol=tol_for(name, 1e-10, 1e-6, flat), config=cfg)
    if name == "monge_ampere":
        if m not in (1, 2):
            return None
        x, s, _ = stream.draw(v_range=(0.2, 0.6), s_im_range=(0.6, 1.0))
        if not _hyperbolic_safe(model, x.v, s.imag):
            s = complex(s.real, math.copysign(0.6, s.imag))
        h = 1e-3 if flat else 1e-2
        return check_monge_ampere_fiber(x, s, h=h,
                                        tol=tol_for(name, 1e-9, 1e-3, flat), config=cfg)
    if name == "fibration":
        x, s, _ = stream.draw(v_range=(0.1, 0.6), s_im_range=(0.4, 1.0))
        return check_fibration_holomorphy(x, s, h=1e-3,
                                          tol=tol_for(name, 1e-9, 1e-4, flat), config=cfg)
    if name == "real_polarization":
        x, _, _ = stream.draw()
        s_real = float(np.round(abs(stream.rng().uniform(0.0, 1.0)), 2))
        return check_real_polarization(x, s_real,
                                       tol=tol_for(name, 1e-8, 1e-8, flat), config=cfg)
    if name == "siegel":
        x, s, _ = stream.draw(v_range=(0.1, 0.8))
        if not _hyperbolic_safe(model, x.v, s.imag):
            s = complex(s.real, math.copysign(0.5, s.imag))
        return check_siegel(x, s, tol=tol_for(name, 1e-8, 1e-8, flat), config=cfg)
    raise ValueError(name)


def sweep_domain(model: ModelMetric, points: Iterable[GeodesicPoint],
                 re_values: np.ndarray, im_values: np.ndarray,
                 config: SolverConfig | None = None):
    """Domain probe over an s-grid; yields one row per (point, s) cell.

    Rows are dicts with keys point_index, re_s, im_s, v, margin, inside,
    status; cells on the real axis are tagged 'real-polarization' and carry
    no margin.  Grid order (point, then Im s major, Re s minor) is
    deterministic.
    """
    cfg = config or DEFAULT_CONFIG
    for idx, x in enumerate(points):
        v = x.metric.speed_squared(x)
        for im in im_values:
            for re in re_values:
                if im == 0.0:
                    yield dict(point_index=idx, re_s=float(re), im_s=0.0, v=v,
                               margin=math.nan, inside=False,
                               status="real-polarization")
                    continue
                rep = domain_check(x, complex(re, im), cfg)
                yield dict(point_index=idx, re_s=float(re), im_s=float(im), v=v,
                           margin=rep.margin, inside=rep.inside, status=rep.status)
