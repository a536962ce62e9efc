"""Closed-form chart geometry for the model metrics.

Shared by the model catalog (pointwise metric/Christoffel/frame data) and by
the pure-python integration kernel (flow right-hand sides).  The compiled
kernel mirrors these formulas in C; cross-backend tests pin them together.

Constant-curvature space forms are charted in geodesic normal coordinates
around a base point.  All radial profiles are expressed through functions of
y = c * |q|^2 that are entire in y, so the same code path serves spheres
(c > 0), hyperbolic spaces (c < 0) and, in the limit, flat space (c = 0), for
real or complex arguments alike.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import ChartExitError

_SERIES_CUT = 1e-3


def _is_real(y) -> bool:
    return not isinstance(y, complex)


def sc_pair(y):
    """S(y) = sin(sqrt(y))/sqrt(y) and C(y) = cos(sqrt(y)), entire in y.

    For y < 0 these are sinh(sqrt(-y))/sqrt(-y) and cosh(sqrt(-y)); complex y
    is allowed.  Small arguments use series to avoid cancellation.
    """
    if abs(y) < _SERIES_CUT:
        s = 1.0 + y * (-1.0 / 6 + y * (1.0 / 120 + y * (-1.0 / 5040 + y / 362880)))
        c = 1.0 + y * (-0.5 + y * (1.0 / 24 + y * (-1.0 / 720 + y / 40320)))
        return s, c
    if _is_real(y):
        if y > 0:
            w = math.sqrt(y)
            return math.sin(w) / w, math.cos(w)
        w = math.sqrt(-y)
        return math.sinh(w) / w, math.cosh(w)
    w = cmath.sqrt(y)
    return cmath.sin(w) / w, cmath.cos(w)


def sc_ratios(y):
    """Smooth ratios used by the normal-coordinate metric.

    Returns (S, C, H, K, Kp) with H = (C - S)/y, K = (1 - S^2)/y and
    Kp = dK/dy; all five are entire in y.
    """
    s, c = sc_pair(y)
    if abs(y) < _SERIES_CUT:
        h = -1.0 / 3 + y * (1.0 / 30 + y * (-1.0 / 840 + y / 45360))
        k = 1.0 / 3 + y * (-2.0 / 45 + y * (1.0 / 315 - y * 2.0 / 14175))
        kp = -2.0 / 45 + y * (2.0 / 315 - y * 2.0 / 4725)
    else:
        h = (c - s) / y
        k = (1.0 - s * s) / y
        kp = -(1.0 + s * c - 2.0 * s * s) / (y * y)
    return s, c, h, k, kp


# ---------------------------------------------------------------------------
# constant curvature, geodesic normal coordinates
# ---------------------------------------------------------------------------

def cc_metric(q: np.ndarray, c: float) -> np.ndarray:
    """Metric tensor g_ij(q) of the curvature-c space form in normal coords."""
    q = np.asarray(q, dtype=float)
    y = c * float(q @ q)
    s, _ = sc_pair(y)
    _, _, _, k, _ = sc_ratios(y)
    b = s * s
    return b * np.eye(len(q)) + (c * k) * np.outer(q, q)


def cc_inv_metric(q: np.ndarray, c: float) -> np.ndarray:
    q = np.asarray(q, dtype=float)
    y = c * float(q @ q)
    s, _ = sc_pair(y)
    _, _, _, k, _ = sc_ratios(y)
    b = s * s
    return (1.0 / b) * np.eye(len(q)) - (c * k / b) * np.outer(q, q)


def cc_dmetric(q: np.ndarray, c: float) -> np.ndarray:
    """Partial derivatives dg[k, i, j] = d g_ij / d q_k."""
    q = np.asarray(q, dtype=float)
    m = len(q)
    y = c * float(q @ q)
    s, _, h, k, kp = sc_ratios(y)
    b1 = 2.0 * c * s * h          # (d/dr b) / r
    k1 = 2.0 * c * c * kp         # (d/dr k_r) / r  with  k_r = c*K(y)
    kr = c * k
    eye = np.eye(m)
    dg = (b1 * q)[:, None, None] * eye[None, :, :]
    dg += (k1 * q)[:, None, None] * np.outer(q, q)[None, :, :]
    dg += kr * (eye[:, :, None] * q[None, None, :] + eye[:, None, :] * q[None, :, None])
    return dg


def cc_christoffel(q: np.ndarray, c: float) -> np.ndarray:
    """Christoffel symbols gamma[l, i, j] of the normal-coordinate chart."""
    dg = cc_dmetric(q, c)
    ginv = cc_inv_metric(q, c)
    # gamma^l_ij = 1/2 g^{la} (dg[i,a,j] + dg[j,a,i] - dg[a,i,j])
    braces = dg.transpose(1, 0, 2) + dg.transpose(1, 2, 0) - dg
    return 0.5 * np.einsum("la,aij->lij", ginv, braces)


def _embed_signature(c: float) -> float:
    return 1.0 if c > 0 else -1.0


def _embed_inner(a: np.ndarray, b: np.ndarray, c: float) -> float:
    s0 = _embed_signature(c)
    return s0 * a[0] * b[0] + float(a[1:] @ b[1:])


def cc_flow_closed(q: np.ndarray, p: np.ndarray, c: float, t: float):
    """Closed-form geodesic flow of the space form, in normal coordinates.

    Round trip through the standard quadric embedding (sphere for c > 0,
    Minkowski hyperboloid for c < 0).  Purely radial data never leaves the
    radial line and is propagated directly, which also covers flows through
    the chart center and, for c > 0, to the cut locus.
    """
    q = np.asarray(q, dtype=float)
    p = np.asarray(p, dtype=float)
    v = speed_squared_cc(q, p, c)
    if v == 0.0 or t == 0.0:
        return q.copy(), p.copy()
    rq = math.sqrt(float(q @ q))
    # radial (or center-based) geodesics are straight lines in this chart
    if rq == 0.0 or np.linalg.norm(p - (p @ q / rq**2) * q) <= 1e-14 * np.linalg.norm(p):
        return q + t * p, p.copy()

    m = len(q)
    rho = 1.0 / math.sqrt(abs(c))
    y = c * rq * rq
    s, cy = sc_pair(y)
    sigma = float(q @ p)
    h = sc_ratios(y)[2]
    x0 = np.zeros(m + 1)
    x0[0] = rho * cy
    x0[1:] = s * q
    v0 = np.zeros(m + 1)
    v0[0] = -rho * c * sigma * s
    v0[1:] = (c * sigma * h) * q + s * p

    yt = c * v * t * t
    st, ct = sc_pair(yt)
    x1 = ct * x0 + (t * st) * v0
    v1 = (-c * v * t * st) * x0 + ct * v0

    # log map back to the chart
    x0c = x1[0] / rho
    if c > 0:
        x0c = min(1.0, max(-1.0, x0c))
        r1 = math.acos(x0c) / math.sqrt(c)
    else:
        x0c = max(1.0, x0c)
        r1 = math.acosh(x0c) / math.sqrt(-c)
    if r1 < 1e-14:
        # endpoint at the chart center, where the chart is metric-normal
        return np.zeros(m), v1[1:].copy()
    y1 = c * r1 * r1
    s1, c1 = sc_pair(y1)
    if abs(s1) < 1e-12:
        raise ChartExitError("flow reached the conjugate locus of the chart center")
    q1 = x1[1:] / s1
    # split the velocity into radial and transverse parts of the embedding
    u_r = np.zeros(m + 1)
    u_r[0] = -c * rho * r1 * s1
    u_r[1:] = (c1 / r1) * q1
    alpha = _embed_inner(v1, u_r, c)
    w_perp = v1 - alpha * u_r
    p1 = (alpha / r1) * q1 + w_perp[1:] / s1
    return q1, p1


def speed_squared_cc(q: np.ndarray, p: np.ndarray, c: float) -> float:
    g = cc_metric(q, c)
    return float(p @ g @ p)


# ---------------------------------------------------------------------------
# analytic profiles for surfaces of revolution,  metric du^2 + r(u)^2 dtheta^2
# ---------------------------------------------------------------------------

PROFILE_POLY = 0
PROFILE_COSH = 1
PROFILE_TORUS = 2


def profile_eval(kind: int, coefs, u):
    """(r, r', r'') of a catalogued profile at real or complex u."""
    if kind == PROFILE_POLY:
        r = 0.0
        d1 = 0.0
        d2 = 0.0
        for a in reversed(coefs):
            d2 = d2 * u + 2.0 * d1
            d1 = d1 * u + r
            r = r * u + a
        return r, d1, d2
    if kind == PROFILE_COSH:
        a = coefs[0]
        if _is_real(u):
            ch, sh = math.cosh(u / a), math.sinh(u / a)
        else:
            ch, sh = cmath.cosh(u / a), cmath.sinh(u / a)
        return a * ch, sh, ch / a
    if kind == PROFILE_TORUS:
        big_r = coefs[0]
        if _is_real(u):
            cu, su = math.cos(u), math.sin(u)
        else:
            cu, su = cmath.cos(u), cmath.sin(u)
        return big_r + cu, -su, -cu
    raise ValueError(f"unknown profile kind {kind}")


@dataclass(frozen=True)
class Profile:
    """Analytic radius function of a surface of revolution.

    ``kind``/``coefs`` feed the integration kernels; ``u_min``/``u_max``
    bound the real chart, and ``strip`` is the declared half-width of the
    complex-analyticity strip around the real u-axis.
    """

    kind: int
    coefs: tuple
    u_min: float
    u_max: float
    strip: float

    def value(self, u):
        return profile_eval(self.kind, self.coefs, u)[0]

    def d1(self, u):
        return profile_eval(self.kind, self.coefs, u)[1]

    def d2(self, u):
        return profile_eval(self.kind, self.coefs, u)[2]

    def gauss_curvature(self, u):
        r, _, d2 = profile_eval(self.kind, self.coefs, u)
        return -d2 / r

    def validate(self, samples: int = 201):
        us = np.linspace(self.u_min, self.u_max, samples)
        vals = [self.value(float(u)) for u in us]
        if min(vals) <= 0.0:
            raise ValueError("profile radius must stay positive on the chart")


def poly_profile(coefs, u_min=-1.0, u_max=1.0, strip=0.75) -> Profile:
    """Polynomial (truncated power series) profile r(u) = sum coefs[k] u^k."""
    prof = Profile(PROFILE_POLY, tuple(float(a) for a in coefs), u_min, u_max, strip)
    prof.validate()
    return prof


def cosh_profile(scale=1.0, u_min=-1.5, u_max=1.5, strip=1.0) -> Profile:
    """r(u) = scale * cosh(u / scale); constant Gauss curvature -1/scale^2."""
    return Profile(PROFILE_COSH, (float(scale),), u_min, u_max, strip)


def torus_profile(big_radius=3.0, u_min=-math.pi, u_max=math.pi, strip=1.25) -> Profile:
    """r(u) = big_radius + cos(u); sign-changing Gauss curvature."""
    if big_radius <= 1.0:
        raise ValueError("big_radius must exceed 1 so the radius stays positive")
    return Profile(PROFILE_TORUS, (float(big_radius),), u_min, u_max, strip)


def rev_christoffel(u: float, profile: Profile) -> np.ndarray:
    """Christoffel symbols gamma[l, i, j] of the (u, theta) chart."""
    r, d1, _ = profile_eval(profile.kind, profile.coefs, u)
    gamma = np.zeros((2, 2, 2))
    gamma[0, 1, 1] = -r * d1
    gamma[1, 0, 1] = gamma[1, 1, 0] = d1 / r
    return gamma


# ---------------------------------------------------------------------------
# frames
# ---------------------------------------------------------------------------

def gram_schmidt_frame(g: np.ndarray, first: np.ndarray | None = None) -> np.ndarray:
    """Orthonormal frame (columns) for the inner product g.

    When ``first`` is a nonzero vector the leading frame vector points along
    it; the rest completes the frame from the canonical basis, deterministic
    given the inputs.
    """
    m = g.shape[0]
    seeds = []
    if first is not None and np.linalg.norm(first) > 0.0:
        seeds.append(np.asarray(first, dtype=float))
    seeds.extend(np.eye(m))
    cols = []
    for w in seeds:
        w = w.astype(float).copy()
        for e in cols:
            w -= (e @ g @ w) * e
        nrm = w @ g @ w
        if nrm > 1e-20:
            cols.append(w / math.sqrt(nrm))
        if len(cols) == m:
            break
    if len(cols) < m:
        raise ValueError("could not complete an orthonormal frame")
    return np.column_stack(cols)


_ROT90 = np.array([[0.0, -1.0], [1.0, 0.0]])


def oriented_normal_2d(g: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Unit normal of the g-unit vector w, rotated +90 deg in chart orientation."""
    return (_ROT90 @ (g @ w)) / math.sqrt(np.linalg.det(g))
