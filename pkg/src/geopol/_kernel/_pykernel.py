"""Pure-python adaptive Runge-Kutta kernel.

Reference implementation of the integration core; the compiled Cython kernel
in ``_ckernel.pyx`` mirrors it bit-for-bit in structure.  The stepper is a
Dormand-Prince 5(4) pair with FSAL and a PI-free step controller, run over a
complex state vector along a polyline of complex "time" waypoints, each
segment parametrized by real arclength.

System ids and state layouts (all entries complex128):

* 0  JACOBI_CONST       iparams (m, k), fparams R row-major (m*m)
                        state [M (m x k), M' (m x k)],  M'' = -R M
* 1  JACOBI_REVOLUTION  iparams (profile_kind, ncoef, k), fparams [v, coefs]
                        state [u, th, u', th', M (2 x k), M' (2 x k)]
* 2  GEODESIC_CC        iparams (m,), fparams [c]
                        state [q (m), p (m), E (m x m)], real-time flows only
* 3  GEODESIC_REV       iparams (profile_kind, ncoef), fparams [coefs]
                        state [u, th, u', th', E (2 x 2)]
"""

from __future__ import annotations

import numpy as np

from .. import geometry

BACKEND = "python"

SYS_JACOBI_CONST = 0
SYS_JACOBI_REVOLUTION = 1
SYS_GEODESIC_CC = 2
SYS_GEODESIC_REVOLUTION = 3

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_OVERFLOW = 2

# Dormand-Prince 5(4) tableau
_C = (0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0)
_A = (
    (),
    (0.2,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0),
)
_B5 = _A[6] + (0.0,)
_E = (71.0 / 57600.0, 0.0, -71.0 / 16695.0, 71.0 / 1920.0,
      -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


def _make_rhs(system, iparams, fparams):
    if system == SYS_JACOBI_CONST:
        m, k = int(iparams[0]), int(iparams[1])
        rmat = np.asarray(fparams, dtype=float).reshape(m, m)
        mk = m * k

        def rhs(tau, y):
            out = np.empty_like(y)
            mat = y[:mk].reshape(m, k)
            out[:mk] = y[mk:]
            out[mk:] = (-rmat @ mat).ravel()
            return out

        return rhs

    if system == SYS_JACOBI_REVOLUTION:
        kind, ncoef, k = int(iparams[0]), int(iparams[1]), int(iparams[2])
        v = float(fparams[0])
        coefs = tuple(float(a) for a in fparams[1:1 + ncoef])
        two_k = 2 * k

        def rhs(tau, y):
            u, du, dth = complex(y[0]), complex(y[2]), complex(y[3])
            r, d1, d2 = geometry.profile_eval(kind, coefs, u)
            out = np.empty_like(y)
            out[0] = du
            out[1] = dth
            out[2] = r * d1 * dth * dth
            out[3] = -2.0 * (d1 / r) * du * dth
            out[4:4 + two_k] = y[4 + two_k:]
            mat = y[4:4 + two_k].reshape(2, k)
            kv = (-d2 / r) * v  # Jacobi operator entry K(u) * speed^2
            acc = np.zeros((2, k), dtype=complex)
            acc[1] = -kv * mat[1]
            out[4 + two_k:] = acc.ravel()
            return out

        return rhs

    if system == SYS_GEODESIC_CC:
        m = int(iparams[0])
        c = float(fparams[0])

        def rhs(tau, y):
            q = y[:m].real
            p = y[m:2 * m].real
            frame = y[2 * m:].real.reshape(m, m)
            gamma_p = np.einsum("lij,i->lj", geometry.cc_christoffel(q, c), p)
            out = np.empty_like(y)
            out[:m] = p
            out[m:2 * m] = -(gamma_p @ p)
            out[2 * m:] = -(gamma_p @ frame).ravel()
            return out

        return rhs

    if system == SYS_GEODESIC_REVOLUTION:
        kind, ncoef = int(iparams[0]), int(iparams[1])
        coefs = tuple(float(a) for a in fparams[:ncoef])

        def rhs(tau, y):
            u, du, dth = y[0].real, y[2].real, y[3].real
            r, d1, _ = geometry.profile_eval(kind, coefs, u)
            frame = y[4:].reshape(2, 2)
            out = np.empty_like(y)
            out[0] = du
            out[1] = dth
            out[2] = r * d1 * dth * dth
            out[3] = -2.0 * (d1 / r) * du * dth
            # parallel transport: E' = -gamma(p, E)
            ru = d1 / r
            out[4] = r * d1 * dth * frame[1, 0]
            out[5] = r * d1 * dth * frame[1, 1]
            out[6] = -ru * (du * frame[1, 0] + dth * frame[0, 0])
            out[7] = -ru * (du * frame[1, 1] + dth * frame[0, 1])
            return out

        return rhs

    raise ValueError(f"unknown system id {system}")


def _rms(x, sci):
    return float(np.sqrt(np.mean(np.abs(x / sci) ** 2)))


def _initial_step(fcn, y0, f0, rtol, atol, length, max_step):
    sci = atol + rtol * np.abs(y0)
    d0 = _rms(y0, sci)
    d1 = _rms(f0, sci)
    h0 = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-6
    h0 = min(h0, length, max_step)
    y1 = y0 + h0 * f0
    f1 = fcn(h0, y1)
    d2 = _rms(f1 - f0, sci) / h0
    dm = max(d1, d2)
    h1 = (0.01 / dm) ** 0.2 if dm > 1e-15 else max(1e-6, h0 * 1e-3)
    return min(100.0 * h0, h1, length, max_step)


def integrate_path(system, iparams, fparams, y0, waypoints,
                   rtol=1e-12, atol=1e-12, max_step=0.25, guard=1e12,
                   record=True):
    """Integrate a registered system along a polyline of complex waypoints.

    Returns ``(status, y_end, taus, ys, naccept, nreject)``; ``taus``/``ys``
    hold the accepted nodes (including the initial one) when ``record``.
    """
    rhs = _make_rhs(system, np.asarray(iparams, dtype=np.int64),
                    np.asarray(fparams, dtype=float))
    y = np.asarray(y0, dtype=complex).copy()
    waypoints = np.asarray(waypoints, dtype=complex)
    taus = [complex(waypoints[0])] if record else []
    ys = [y.copy()] if record else []
    naccept = nreject = 0
    status = STATUS_OK
    stages = [None] * 7

    for iseg in range(len(waypoints) - 1):
        w0, w1 = complex(waypoints[iseg]), complex(waypoints[iseg + 1])
        length = abs(w1 - w0)
        if length == 0.0:
            continue
        direction = (w1 - w0) / length

        def fcn(u, state, _w0=w0, _dir=direction):
            return _dir * rhs(_w0 + u * _dir, state)

        u = 0.0
        f0 = fcn(0.0, y)
        h = _initial_step(fcn, y, f0, rtol, atol, length, max_step)
        hmin = 1e-14 * max(length, 1.0)
        while u < length:
            h = min(h, length - u)
            stages[0] = f0
            for i in range(1, 7):
                yi = y.copy()
                for j, a in enumerate(_A[i]):
                    if a != 0.0:
                        yi += (h * a) * stages[j]
                stages[i] = fcn(u + _C[i] * h, yi)
            ynew = y.copy()
            for i, b in enumerate(_B5):
                if b != 0.0:
                    ynew += (h * b) * stages[i]
            errvec = np.zeros_like(y)
            for i, e in enumerate(_E):
                if e != 0.0:
                    errvec += (h * e) * stages[i]
            sci = atol + rtol * np.maximum(np.abs(y), np.abs(ynew))
            err = _rms(errvec, sci)
            if not np.isfinite(err):
                err = 10.0
            if err <= 1.0:
                u += h
                y = ynew
                f0 = stages[6]  # FSAL
                naccept += 1
                if record:
                    taus.append(w0 + u * direction)
                    ys.append(y.copy())
                if np.max(np.abs(y)) > guard:
                    status = STATUS_OVERFLOW
                    break
                factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                h = min(h * factor, max_step)
            else:
                nreject += 1
                h *= max(0.2, 0.9 * err ** -0.2)
            if h < hmin:
                status = STATUS_UNDERFLOW
                break
        if status != STATUS_OK:
            break

    taus_arr = np.asarray(taus, dtype=complex)
    ys_arr = (np.asarray(ys, dtype=complex) if record
              else np.empty((0, len(y)), dtype=complex))
    return status, y, taus_arr, ys_arr, naccept, nreject
