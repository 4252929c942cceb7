# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: Evans matrix assembly and the polar-frame integrator.

Line-for-line port of ``_kernels_py``; all work happens on small stack
buffers (system dimension at most 9).
"""

import numpy as np

from libc.math cimport sqrt, fabs, log, pow

cdef extern from "complex.h" nogil:
    double cabs(double complex)
    double complex conj(double complex)

BACKEND = "compiled"

cdef enum:
    MAXN = 9
    MAXS = 82   # MAXN * MAXN + 1

cdef int SHEAR2D = 0, SHEAR1D = 1, COMP3D = 2, COMP2D = 3, COMP1D = 4, TRANSVERSE = 5

cdef double DP_C[7]
cdef double DP_A[7][6]
cdef double DP_E[7]

DP_C[:] = [0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0]
DP_A[0][:] = [0, 0, 0, 0, 0, 0]
DP_A[1][:] = [1.0 / 5, 0, 0, 0, 0, 0]
DP_A[2][:] = [3.0 / 40, 9.0 / 40, 0, 0, 0, 0]
DP_A[3][:] = [44.0 / 45, -56.0 / 15, 32.0 / 9, 0, 0, 0]
DP_A[4][:] = [19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729, 0, 0]
DP_A[5][:] = [9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656, 0]
DP_A[6][:] = [35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84]
DP_E[:] = [71.0 / 57600, 0.0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200, 22.0 / 525, -1.0 / 40]


cdef int components(int code, int* comps) nogil:
    if code == SHEAR2D:
        comps[0] = 0; comps[1] = 1
        return 2
    if code == SHEAR1D or code == TRANSVERSE:
        comps[0] = 0
        return 1
    if code == COMP3D:
        comps[0] = 0; comps[1] = 1; comps[2] = 2
        return 3
    if code == COMP2D:
        comps[0] = 1; comps[1] = 2
        return 2
    comps[0] = 2
    return 1


cdef void c_assemble(int code, double mu1, double mu2, double mu3, double s,
                     double complex lam, double* a, double* ap, double complex* A) nogil:
    cdef int comps[3]
    cdef int n = components(code, comps)
    cdef int N = 3 * n
    cdef double M[3][3]
    cdef double rho = a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
    cdef int i, j, J, K, r, K3
    cdef double d, a3
    for i in range(3):
        for j in range(3):
            M[i][j] = 2.0 * mu1 * a[i] * a[j]
        M[i][i] += mu1 * rho + mu2
    M[2][2] += mu3 - 1.0
    for i in range(N * N):
        A[i] = 0.0
    if code == SHEAR2D or code == SHEAR1D:
        for J in range(n):
            r = 3 * J
            A[r * N + r] = lam / s
            A[r * N + r + 2] = -1.0 / s
            A[(r + 1) * N + r + 2] = 1.0
            for K in range(n):
                A[(r + 2) * N + 3 * K] = -lam * M[comps[J]][comps[K]] / s
                A[(r + 2) * N + 3 * K + 2] = M[comps[J]][comps[K]] / s
            A[(r + 2) * N + r + 1] = lam
            A[(r + 2) * N + r + 2] -= s
        return
    a3 = a[2]
    K3 = -1
    for K in range(n):
        if comps[K] == 2:
            K3 = K
    for J in range(n):
        r = 3 * J
        j = comps[J]
        d = 2.0 if j == 2 else 1.0
        A[r * N + r + 1] = lam
        A[r * N + r + 2] = -s
        A[(r + 1) * N + r + 2] = 1.0
        A[(r + 2) * N + r] = -lam * a3 / (s * d)
        A[(r + 2) * N + r + 1] = lam * a3 / d
        for K in range(n):
            A[(r + 2) * N + 3 * K + 2] = a3 * M[j][comps[K]] / (s * d)
        A[(r + 2) * N + r + 2] += lam / s - a3 * s / d
        if K3 >= 0:
            A[(r + 2) * N + 3 * K3 + 2] += ap[j] / a3


cdef void c_interp(double z, double[::1] zs, double[:, ::1] A3, double[:, ::1] Ap3,
                   double[:, ::1] App3, double[::1] aL, double[::1] aR,
                   double* a, double* ap) nogil:
    cdef Py_ssize_t n = zs.shape[0]
    cdef Py_ssize_t lo, hi, mid, i
    cdef int c
    cdef double h, t, t2, t3, h00, h10, h01, h11
    if z < zs[0]:
        for c in range(3):
            a[c] = aL[c]; ap[c] = 0.0
        return
    if z > zs[n - 1]:
        for c in range(3):
            a[c] = aR[c]; ap[c] = 0.0
        return
    lo = 0
    hi = n - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if zs[mid] <= z:
            lo = mid
        else:
            hi = mid
    i = lo
    h = zs[i + 1] - zs[i]
    t = (z - zs[i]) / h
    t2 = t * t
    t3 = t2 * t
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + t
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    for c in range(3):
        a[c] = h00 * A3[i, c] + h10 * h * Ap3[i, c] + h01 * A3[i + 1, c] + h11 * h * Ap3[i + 1, c]
        ap[c] = h00 * Ap3[i, c] + h10 * h * App3[i, c] + h01 * Ap3[i + 1, c] + h11 * h * App3[i + 1, c]


cdef struct Ctx:
    int code
    double mu1, mu2, mu3, s
    double complex lam
    int N, k


cdef void c_rhs(Ctx* ctx, double z, double[::1] zs, double[:, ::1] A3, double[:, ::1] Ap3,
                double[:, ::1] App3, double[::1] aL, double[::1] aR,
                double complex* y, double complex* out) nogil:
    # y holds omega (N x k, row-major) followed by log r
    cdef double a[3]
    cdef double ap[3]
    cdef double complex A[MAXN * MAXN]
    cdef double complex AO[MAXN * MAXN]
    cdef double complex T[MAXN * MAXN]
    cdef double complex acc
    cdef int N = ctx.N, k = ctx.k, i, j, m
    c_interp(z, zs, A3, Ap3, App3, aL, aR, a, ap)
    c_assemble(ctx.code, ctx.mu1, ctx.mu2, ctx.mu3, ctx.s, ctx.lam, a, ap, A)
    for i in range(N):
        for j in range(k):
            acc = 0.0
            for m in range(N):
                acc = acc + A[i * N + m] * y[m * k + j]
            AO[i * k + j] = acc
    for i in range(k):
        for j in range(k):
            acc = 0.0
            for m in range(N):
                acc = acc + conj(y[m * k + i]) * AO[m * k + j]
            T[i * k + j] = acc
    for i in range(N):
        for j in range(k):
            acc = AO[i * k + j]
            for m in range(k):
                acc = acc - y[i * k + m] * T[m * k + j]
            out[i * k + j] = acc
    acc = 0.0
    for i in range(k):
        acc = acc + T[i * k + i]
    out[N * k] = acc


cdef double c_drift(double complex* y, int N, int k) nogil:
    cdef int i, j, m
    cdef double complex g
    cdef double worst = 0.0, v
    for i in range(k):
        for j in range(k):
            g = 0.0
            for m in range(N):
                g = g + conj(y[m * k + i]) * y[m * k + j]
            if i == j:
                g = g - 1.0
            v = cabs(g)
            if v > worst:
                worst = v
    return worst


cdef double c_orthonormalize(double complex* y, int N, int k) nogil:
    # modified Gram-Schmidt; returns sum of log of the (positive) R diagonal
    cdef int i, j, m
    cdef double complex proj
    cdef double nrm, total = 0.0
    for j in range(k):
        for i in range(j):
            proj = 0.0
            for m in range(N):
                proj = proj + conj(y[m * k + i]) * y[m * k + j]
            for m in range(N):
                y[m * k + j] = y[m * k + j] - proj * y[m * k + i]
        nrm = 0.0
        for m in range(N):
            nrm += cabs(y[m * k + j]) ** 2
        nrm = sqrt(nrm)
        for m in range(N):
            y[m * k + j] = y[m * k + j] / nrm
        total += log(nrm)
    return total


def assemble(int code, mus, double s, double complex lam, a, ap):
    cdef int comps[3]
    cdef int N = 3 * components(code, comps)
    cdef double av[3]
    cdef double apv[3]
    cdef double complex buf[MAXN * MAXN]
    cdef int i
    for i in range(3):
        av[i] = a[i]
        apv[i] = ap[i]
    c_assemble(code, mus[0], mus[1], mus[2], s, lam, av, apv, buf)
    out = np.empty((N, N), dtype=complex)
    cdef double complex[:, ::1] ov = out
    for i in range(N * N):
        ov[i // N, i % N] = buf[i]
    return out


def interpolate(double z, double[::1] zs, double[:, ::1] A3, double[:, ::1] Ap3,
                double[:, ::1] App3, double[::1] aL, double[::1] aR):
    cdef double a[3]
    cdef double ap[3]
    c_interp(z, zs, A3, Ap3, App3, aL, aR, a, ap)
    return np.array([a[0], a[1], a[2]]), np.array([ap[0], ap[1], ap[2]])


def drury(int code, mus, double s, double complex lam, double[::1] zs, double[:, ::1] A3,
          double[:, ::1] Ap3, double[:, ::1] App3, double[::1] aL, double[::1] aR,
          omega, double complex logr, double z0, double z1,
          double atol=1e-8, double rtol=1e-6, double h0=0.05, double reorth_tol=1e-8,
          long max_steps=200000):
    """Compiled twin of ``_kernels_py.drury`` (same arguments and return value)."""
    cdef Ctx ctx
    cdef int comps[3]
    ctx.code = code
    ctx.mu1 = mus[0]; ctx.mu2 = mus[1]; ctx.mu3 = mus[2]
    ctx.s = s
    ctx.lam = lam
    ctx.N = 3 * components(code, comps)
    om = np.array(omega, dtype=complex, order="C", copy=True)
    ctx.k = om.shape[1]
    if om.shape[0] != ctx.N:
        raise ValueError("frame has the wrong number of rows")
    cdef int N = ctx.N, k = ctx.k
    cdef int S = N * k + 1
    cdef double complex y[MAXS]
    cdef double complex ynew[MAXS]
    cdef double complex ytmp[MAXS]
    cdef double complex K[7][MAXS]
    cdef double complex e
    cdef double complex[:, ::1] omv = om
    cdef int i, j, st
    cdef double z = z0, h, direction, err, tot, sc, fac, drift, max_drift = 0.0
    cdef long acc = 0, rej = 0, nre = 0
    cdef int status = 0
    for i in range(N):
        for j in range(k):
            y[i * k + j] = omv[i, j]
    y[N * k] = logr
    direction = 1.0 if z1 >= z0 else -1.0
    h = min(fabs(h0), fabs(z1 - z0)) * direction
    if z0 != z1:
        with nogil:
            c_rhs(&ctx, z, zs, A3, Ap3, App3, aL, aR, y, K[0])
            while (z1 - z) * direction > 0:
                if fabs(h) < 1e-12 * (1.0 + fabs(z)):
                    status = 1
                    break
                if (z + h - z1) * direction > 0:
                    h = z1 - z
                for st in range(1, 7):
                    for i in range(S):
                        e = y[i]
                        for j in range(st):
                            if DP_A[st][j] != 0.0:
                                e = e + (h * DP_A[st][j]) * K[j][i]
                        ytmp[i] = e
                    if st == 6:
                        for i in range(S):
                            ynew[i] = ytmp[i]
                    c_rhs(&ctx, z + DP_C[st] * h, zs, A3, Ap3, App3, aL, aR, ytmp, K[st])
                tot = 0.0
                for i in range(S):
                    e = 0.0
                    for j in range(7):
                        if DP_E[j] != 0.0:
                            e = e + (h * DP_E[j]) * K[j][i]
                    sc = atol + rtol * max(cabs(y[i]), cabs(ynew[i]))
                    tot += (cabs(e) / sc) ** 2
                err = sqrt(tot / S)
                if err <= 1.0:
                    z = z + h
                    for i in range(S):
                        y[i] = ynew[i]
                        K[0][i] = K[6][i]
                    acc += 1
                    drift = c_drift(y, N, k)
                    if drift > max_drift:
                        max_drift = drift
                    if drift > reorth_tol:
                        y[N * k] = y[N * k] + c_orthonormalize(y, N, k)
                        nre += 1
                        c_rhs(&ctx, z, zs, A3, Ap3, App3, aL, aR, y, K[0])
                    if err == 0.0:
                        fac = 5.0
                    else:
                        fac = min(5.0, max(0.2, 0.9 * pow(err, -0.2)))
                else:
                    rej += 1
                    fac = max(0.2, 0.9 * pow(err, -0.2))
                h *= fac
                if acc + rej > max_steps:
                    status = 1
                    break
    for i in range(N):
        for j in range(k):
            omv[i, j] = y[i * k + j]
    return om, complex(y[N * k]), (int(acc), int(rej), int(nre), max_drift, status, z)
