# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False, language_level=3
"""Compiled integration kernel.

Mirrors the pure-python reference in ``_pykernel.py``: same Dormand-Prince
5(4) pair, same step controller, same system ids and state layouts.  The
right-hand sides are expanded in C; metric scalar functions are the entire
functions of y = c * r^2 also used by the chart code.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport acos, acosh, cos, cosh, fabs, fmax, fmin, pow, sin, sinh, sqrt

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double complex csin(double complex)
    double complex ccos(double complex)
    double cabs(double complex)
    double creal(double complex)
    double cimag(double complex)

BACKEND = "c"

SYS_JACOBI_CONST = 0
SYS_JACOBI_REVOLUTION = 1
SYS_GEODESIC_CC = 2
SYS_GEODESIC_REVOLUTION = 3

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_OVERFLOW = 2

DEF NMAX = 80
DEF MMAX = 6

# Dormand-Prince 5(4); identical constants to the python backend
cdef double[7] C_NODES
C_NODES[0] = 0.0; C_NODES[1] = 0.2; C_NODES[2] = 0.3; C_NODES[3] = 0.8
C_NODES[4] = 8.0 / 9.0; C_NODES[5] = 1.0; C_NODES[6] = 1.0

cdef double[7][6] A_TAB
A_TAB[1][0] = 0.2
A_TAB[2][0] = 3.0 / 40.0;        A_TAB[2][1] = 9.0 / 40.0
A_TAB[3][0] = 44.0 / 45.0;       A_TAB[3][1] = -56.0 / 15.0
A_TAB[3][2] = 32.0 / 9.0
A_TAB[4][0] = 19372.0 / 6561.0;  A_TAB[4][1] = -25360.0 / 2187.0
A_TAB[4][2] = 64448.0 / 6561.0;  A_TAB[4][3] = -212.0 / 729.0
A_TAB[5][0] = 9017.0 / 3168.0;   A_TAB[5][1] = -355.0 / 33.0
A_TAB[5][2] = 46732.0 / 5247.0;  A_TAB[5][3] = 49.0 / 176.0
A_TAB[5][4] = -5103.0 / 18656.0
A_TAB[6][0] = 35.0 / 384.0;      A_TAB[6][1] = 0.0
A_TAB[6][2] = 500.0 / 1113.0;    A_TAB[6][3] = 125.0 / 192.0
A_TAB[6][4] = -2187.0 / 6784.0;  A_TAB[6][5] = 11.0 / 84.0

cdef double[7] B5
B5[0] = 35.0 / 384.0; B5[1] = 0.0; B5[2] = 500.0 / 1113.0
B5[3] = 125.0 / 192.0; B5[4] = -2187.0 / 6784.0; B5[5] = 11.0 / 84.0
B5[6] = 0.0

cdef double[7] E_TAB
E_TAB[0] = 71.0 / 57600.0; E_TAB[1] = 0.0; E_TAB[2] = -71.0 / 16695.0
E_TAB[3] = 71.0 / 1920.0; E_TAB[4] = -17253.0 / 339200.0
E_TAB[5] = 22.0 / 525.0; E_TAB[6] = -1.0 / 40.0


# -- scalar helpers ----------------------------------------------------------

cdef inline void sc_pair_c(double complex y, double complex* s_out,
                           double complex* c_out) nogil:
    cdef double complex w
    if cabs(y) < 1e-3:
        s_out[0] = 1.0 + y * (-1.0 / 6.0 + y * (1.0 / 120.0
                   + y * (-1.0 / 5040.0 + y / 362880.0)))
        c_out[0] = 1.0 + y * (-0.5 + y * (1.0 / 24.0
                   + y * (-1.0 / 720.0 + y / 40320.0)))
        return
    w = csqrt(y)
    s_out[0] = csin(w) / w
    c_out[0] = ccos(w)


cdef inline void sc_pair_d(double y, double* s_out, double* c_out) nogil:
    cdef double w
    if fabs(y) < 1e-3:
        s_out[0] = 1.0 + y * (-1.0 / 6.0 + y * (1.0 / 120.0
                   + y * (-1.0 / 5040.0 + y / 362880.0)))
        c_out[0] = 1.0 + y * (-0.5 + y * (1.0 / 24.0
                   + y * (-1.0 / 720.0 + y / 40320.0)))
    elif y > 0:
        w = sqrt(y)
        s_out[0] = sin(w) / w
        c_out[0] = cos(w)
    else:
        w = sqrt(-y)
        s_out[0] = sinh(w) / w
        c_out[0] = cosh(w)


cdef inline void sc_ratios_d(double y, double* s_out, double* c_out,
                             double* h_out, double* k_out, double* kp_out) nogil:
    sc_pair_d(y, s_out, c_out)
    cdef double s = s_out[0], c = c_out[0]
    if fabs(y) < 1e-3:
        h_out[0] = -1.0 / 3.0 + y * (1.0 / 30.0 + y * (-1.0 / 840.0 + y / 45360.0))
        k_out[0] = 1.0 / 3.0 + y * (-2.0 / 45.0 + y * (1.0 / 315.0 - y * 2.0 / 14175.0))
        kp_out[0] = -2.0 / 45.0 + y * (2.0 / 315.0 - y * 2.0 / 4725.0)
    else:
        h_out[0] = (c - s) / y
        k_out[0] = (1.0 - s * s) / y
        kp_out[0] = -(1.0 + s * c - 2.0 * s * s) / (y * y)


cdef inline void profile_eval_c(long kind, double* coefs, long ncoef,
                                double complex u, double complex* r,
                                double complex* d1, double complex* d2) nogil:
    cdef double complex rr = 0.0, dd1 = 0.0, dd2 = 0.0
    cdef double complex eu
    cdef long i
    if kind == 0:  # polynomial, Horner with derivative accumulation
        for i in range(ncoef - 1, -1, -1):
            dd2 = dd2 * u + 2.0 * dd1
            dd1 = dd1 * u + rr
            rr = rr * u + coefs[i]
        r[0] = rr; d1[0] = dd1; d2[0] = dd2
    elif kind == 1:  # a * cosh(u / a)
        eu = u / coefs[0]
        r[0] = coefs[0] * (ccos(1j * eu))              # cosh z = cos(iz)
        d1[0] = -1j * csin(1j * eu)                    # sinh z = -i sin(iz)
        d2[0] = ccos(1j * eu) / coefs[0]
    else:  # big_radius + cos(u)
        r[0] = coefs[0] + ccos(u)
        d1[0] = -csin(u)
        d2[0] = -ccos(u)


# -- right-hand sides ---------------------------------------------------------

cdef int eval_rhs(long system, long* ip, double* fp, long nf,
                  double complex tau, double complex* y,
                  double complex* out, long n) nogil:
    cdef long m, k, mk, i, j, a, l, kind, ncoef
    cdef double complex u, du, dth, r, d1, d2, kv, acc
    cdef double q[MMAX]
    cdef double p[MMAX]
    cdef double dg[MMAX][MMAX][MMAX]
    cdef double gamma_p[MMAX][MMAX]
    cdef double ginv_la, accd, s_
    cdef double r2, yq, s, c, h, kk, kp, b, kr, b1, k1, braces
    cdef double ur, dur, dthr, rr, dd1

    if system == 0:  # JACOBI_CONST
        m = ip[0]; k = ip[1]; mk = m * k
        for i in range(mk):
            out[i] = y[mk + i]
        for i in range(m):
            for j in range(k):
                acc = 0.0
                for a in range(m):
                    if fp[i * m + a] != 0.0:
                        acc = acc + fp[i * m + a] * y[a * k + j]
                out[mk + i * k + j] = -acc
        return 0

    if system == 1:  # JACOBI_REVOLUTION (complex joint system)
        kind = ip[0]; ncoef = ip[1]; k = ip[2]
        u = y[0]; du = y[2]; dth = y[3]
        profile_eval_c(kind, fp + 1, ncoef, u, &r, &d1, &d2)
        out[0] = du
        out[1] = dth
        out[2] = r * d1 * dth * dth
        out[3] = -2.0 * (d1 / r) * du * dth
        kv = (-d2 / r) * fp[0]
        for j in range(2 * k):
            out[4 + j] = y[4 + 2 * k + j]
        for j in range(k):
            out[4 + 2 * k + j] = 0.0
            out[4 + 2 * k + k + j] = -kv * y[4 + k + j]
        return 0

    if system == 2:  # GEODESIC_CC (real arithmetic on real-valued state)
        m = ip[0]
        r2 = 0.0
        for i in range(m):
            q[i] = creal(y[i])
            p[i] = creal(y[m + i])
            r2 += q[i] * q[i]
        yq = fp[0] * r2
        sc_ratios_d(yq, &s, &c, &h, &kk, &kp)
        b = s * s
        kr = fp[0] * kk
        b1 = 2.0 * fp[0] * s * h
        k1 = 2.0 * fp[0] * fp[0] * kp
        for a in range(m):
            for i in range(m):
                for j in range(m):
                    braces = k1 * q[a] * q[i] * q[j]
                    if i == j:
                        braces += b1 * q[a]
                    if a == i:
                        braces += kr * q[j]
                    if a == j:
                        braces += kr * q[i]
                    dg[a][i][j] = braces
        # gamma^l_ij contracted with p on the first slot
        for l in range(m):
            for j in range(m):
                accd = 0.0
                for a in range(m):
                    ginv_la = (1.0 / b if l == a else 0.0) - (kr / b) * q[l] * q[a]
                    if ginv_la != 0.0:
                        s_ = 0.0
                        for i in range(m):
                            s_ += (dg[i][a][j] + dg[j][a][i] - dg[a][i][j]) * p[i]
                        accd += ginv_la * s_
                gamma_p[l][j] = 0.5 * accd
        for i in range(m):
            out[i] = y[m + i]
        for l in range(m):
            s_ = 0.0
            for j in range(m):
                s_ += gamma_p[l][j] * p[j]
            out[m + l] = -s_
        for l in range(m):
            for a in range(m):
                s_ = 0.0
                for j in range(m):
                    s_ += gamma_p[l][j] * creal(y[2 * m + j * m + a])
                out[2 * m + l * m + a] = -s_
        return 0

    if system == 3:  # GEODESIC_REVOLUTION (real)
        kind = ip[0]; ncoef = ip[1]
        ur = creal(y[0]); dur = creal(y[2]); dthr = creal(y[3])
        profile_eval_c(kind, fp, ncoef, ur, &r, &d1, &d2)
        rr = creal(r); dd1 = creal(d1)
        out[0] = dur
        out[1] = dthr
        out[2] = rr * dd1 * dthr * dthr
        out[3] = -2.0 * (dd1 / rr) * dur * dthr
        out[4] = rr * dd1 * dthr * creal(y[6])
        out[5] = rr * dd1 * dthr * creal(y[7])
        out[6] = -(dd1 / rr) * (dur * creal(y[6]) + dthr * creal(y[4]))
        out[7] = -(dd1 / rr) * (dur * creal(y[7]) + dthr * creal(y[5]))
        return 0

    return -1


cdef double rms_scaled(double complex* e, double complex* y0,
                       double complex* y1, double rtol, double atol,
                       long n) nogil:
    cdef double total = 0.0, sci
    cdef long i
    for i in range(n):
        sci = atol + rtol * fmax(cabs(y0[i]), cabs(y1[i]))
        total += (cabs(e[i]) / sci) * (cabs(e[i]) / sci)
    return sqrt(total / n)


def integrate_path(system, iparams, fparams, y0, waypoints,
                   double rtol=1e-12, double atol=1e-12,
                   double max_step=0.25, double guard=1e12, record=True):
    """Same contract as the python backend's integrate_path."""
    cdef cnp.ndarray[cnp.int64_t, ndim=1] ip_arr = \
        np.ascontiguousarray(iparams, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] fp_arr = \
        np.ascontiguousarray(fparams, dtype=np.float64)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] y_arr = \
        np.array(y0, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] wp_arr = \
        np.ascontiguousarray(waypoints, dtype=np.complex128)
    cdef long n = y_arr.shape[0]
    cdef long sys_id = int(system)
    if n > NMAX:
        raise ValueError(f"state dimension {n} exceeds the compiled bound {NMAX}")

    cdef bint do_record = bool(record)
    cdef long cap = 1024 if do_record else 1
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] rec_tau = \
        np.empty(cap, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] rec_y = \
        np.empty((cap, n), dtype=np.complex128)
    cdef long nrec = 0

    cdef double complex y[NMAX]
    cdef double complex stages[7][NMAX]
    cdef double complex ytmp[NMAX]
    cdef double complex ynew[NMAX]
    cdef double complex errv[NMAX]
    cdef double complex f1tmp[NMAX]
    cdef long i, j, st
    for i in range(n):
        y[i] = y_arr[i]

    cdef long* ip = <long*> ip_arr.data
    cdef double* fp = <double*> fp_arr.data
    cdef long nf = fp_arr.shape[0]

    cdef long status = STATUS_OK
    cdef long naccept = 0, nreject = 0
    cdef long nseg = wp_arr.shape[0] - 1
    cdef long iseg
    cdef double complex w0, w1, direction
    cdef double length, u, hstep, hmin, err, factor, mag
    cdef double d0, d1n, d2n, h0, h1, dm, sci
    cdef bint bad

    if do_record:
        rec_tau[0] = wp_arr[0]
        for i in range(n):
            rec_y[0, i] = y[i]
        nrec = 1

    for iseg in range(nseg):
        w0 = wp_arr[iseg]; w1 = wp_arr[iseg + 1]
        length = cabs(w1 - w0)
        if length == 0.0:
            continue
        direction = (w1 - w0) / length

        # f0 = direction * rhs(w0, y)
        if eval_rhs(sys_id, ip, fp, nf, w0, y, stages[0], n) != 0:
            raise ValueError(f"unknown system id {system}")
        for i in range(n):
            stages[0][i] = direction * stages[0][i]

        # initial step: same two-probe estimate as the python backend
        d0 = 0.0; d1n = 0.0
        for i in range(n):
            sci = atol + rtol * cabs(y[i])
            d0 += (cabs(y[i]) / sci) ** 2
            d1n += (cabs(stages[0][i]) / sci) ** 2
        d0 = sqrt(d0 / n); d1n = sqrt(d1n / n)
        h0 = 0.01 * d0 / d1n if (d0 > 1e-5 and d1n > 1e-5) else 1e-6
        h0 = fmin(fmin(h0, length), max_step)
        for i in range(n):
            ytmp[i] = y[i] + h0 * stages[0][i]
        eval_rhs(sys_id, ip, fp, nf, w0 + h0 * direction, ytmp, f1tmp, n)
        d2n = 0.0
        for i in range(n):
            sci = atol + rtol * cabs(y[i])
            d2n += (cabs(direction * f1tmp[i] - stages[0][i]) / sci) ** 2
        d2n = sqrt(d2n / n) / h0
        dm = fmax(d1n, d2n)
        h1 = pow(0.01 / dm, 0.2) if dm > 1e-15 else fmax(1e-6, h0 * 1e-3)
        hstep = fmin(fmin(100.0 * h0, h1), fmin(length, max_step))

        u = 0.0
        hmin = 1e-14 * fmax(length, 1.0)
        while u < length:
            hstep = fmin(hstep, length - u)
            for st in range(1, 7):
                for i in range(n):
                    ytmp[i] = y[i]
                for j in range(st):
                    if A_TAB[st][j] != 0.0:
                        for i in range(n):
                            ytmp[i] = ytmp[i] + (hstep * A_TAB[st][j]) * stages[j][i]
                eval_rhs(sys_id, ip, fp, nf,
                         w0 + (u + C_NODES[st] * hstep) * direction, ytmp,
                         stages[st], n)
                for i in range(n):
                    stages[st][i] = direction * stages[st][i]
            for i in range(n):
                ynew[i] = y[i]
                errv[i] = 0.0
            for j in range(7):
                if B5[j] != 0.0:
                    for i in range(n):
                        ynew[i] = ynew[i] + (hstep * B5[j]) * stages[j][i]
                if E_TAB[j] != 0.0:
                    for i in range(n):
                        errv[i] = errv[i] + (hstep * E_TAB[j]) * stages[j][i]
            err = rms_scaled(errv, y, ynew, rtol, atol, n)
            bad = not (err == err) or err > 1e280  # NaN or absurd
            if bad:
                err = 10.0
            if err <= 1.0:
                u += hstep
                for i in range(n):
                    y[i] = ynew[i]
                    stages[0][i] = stages[6][i]  # FSAL
                naccept += 1
                if do_record:
                    if nrec == cap:
                        cap *= 2
                        rec_tau = np.resize(rec_tau, cap)
                        new_y = np.empty((cap, n), dtype=np.complex128)
                        new_y[:nrec] = rec_y[:nrec]
                        rec_y = new_y
                    rec_tau[nrec] = w0 + u * direction
                    for i in range(n):
                        rec_y[nrec, i] = y[i]
                    nrec += 1
                mag = 0.0
                for i in range(n):
                    mag = fmax(mag, cabs(y[i]))
                if mag > guard:
                    status = STATUS_OVERFLOW
                    break
                factor = 5.0 if err == 0.0 else fmin(5.0, fmax(0.2, 0.9 * pow(err, -0.2)))
                hstep = fmin(hstep * factor, max_step)
            else:
                nreject += 1
                hstep *= fmax(0.2, 0.9 * pow(err, -0.2))
            if hstep < hmin:
                status = STATUS_UNDERFLOW
                break
        if status != STATUS_OK:
            break

    out = np.empty(n, dtype=np.complex128)
    for i in range(n):
        out[i] = y[i]
    if do_record:
        return int(status), out, rec_tau[:nrec].copy(), rec_y[:nrec].copy(), \
            int(naccept), int(nreject)
    return int(status), out, np.empty(0, dtype=np.complex128), \
        np.empty((0, n), dtype=np.complex128), int(naccept), int(nreject)
