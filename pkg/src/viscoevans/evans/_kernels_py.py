"""Pure-Python kernels: Evans matrix assembly and the polar-frame integrator.

This module is the reference implementation; ``_kernels.pyx`` mirrors it
line by line for speed.  Both take the profile as full three-component
arrays so a single assembly routine serves every variant.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"

# variant codes shared with the compiled kernel
SHEAR2D, SHEAR1D, COMP3D, COMP2D, COMP1D, TRANSVERSE = range(6)
COMPONENTS = {
    SHEAR2D: (0, 1),
    SHEAR1D: (0,),
    COMP3D: (0, 1, 2),
    COMP2D: (1, 2),
    COMP1D: (2,),
    TRANSVERSE: (0,),
}

# Dormand-Prince 5(4) tableau
_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def hessian(mu1, mu2, mu3, a):
    rho = a[0] * a[0] + a[1] * a[1] + a[2] * a[2]
    M = (mu1 * rho + mu2) * np.eye(3) + 2.0 * mu1 * np.outer(a, a)
    M[2, 2] += mu3 - 1.0
    return M


def assemble(code, mus, s, lam, a, ap):
    """Integrated Evans matrix at one point.

    ``a`` and ``ap`` are the profile strain and its derivative as full
    three-vectors.  Shear blocks act on ``(a_j, b_j, b_j')``; compressible
    blocks on ``(b_j, a_j, a_j')``.
    """
    comps = COMPONENTS[code]
    n = len(comps)
    M = hessian(mus[0], mus[1], mus[2], a)
    A = np.zeros((3 * n, 3 * n), dtype=complex)
    if code in (SHEAR2D, SHEAR1D):
        for J, j in enumerate(comps):
            r = 3 * J
            A[r, r] = lam / s
            A[r, r + 2] = -1.0 / s
            A[r + 1, r + 2] = 1.0
            for K, k in enumerate(comps):
                c = 3 * K
                A[r + 2, c] = -lam * M[j, k] / s
                A[r + 2, c + 2] = M[j, k] / s
            A[r + 2, r + 1] = lam
            A[r + 2, r + 2] -= s
        return A
    a3 = a[2]
    K3 = comps.index(2) if 2 in comps else -1
    for J, j in enumerate(comps):
        r = 3 * J
        d = 2.0 if j == 2 else 1.0
        A[r, r + 1] = lam
        A[r, r + 2] = -s
        A[r + 1, r + 2] = 1.0
        A[r + 2, r] = -lam * a3 / (s * d)
        A[r + 2, r + 1] = lam * a3 / d
        for K, k in enumerate(comps):
            A[r + 2, 3 * K + 2] = a3 * M[j, k] / (s * d)
        A[r + 2, r + 2] += lam / s - a3 * s / d
        if K3 >= 0:
            # viscosity 1/a3 perturbed by a3': -b_j'/(s a3) with b' = -s a'
            A[r + 2, 3 * K3 + 2] += ap[j] / a3
    return A


def interpolate(z, zs, A3, Ap3, App3, aL, aR):
    """Cubic Hermite values of the profile and its derivative at ``z``."""
    n = zs.shape[0]
    if z < zs[0]:
        return aL, np.zeros(3)
    if z > zs[n - 1]:
        return aR, np.zeros(3)
    i = min(int(np.searchsorted(zs, z, side="right")) - 1, n - 2)
    h = zs[i + 1] - zs[i]
    t = (z - zs[i]) / h
    t2, t3 = t * t, t * t * t
    h00 = 2 * t3 - 3 * t2 + 1
    h10 = t3 - 2 * t2 + t
    h01 = -2 * t3 + 3 * t2
    h11 = t3 - t2
    a = h00 * A3[i] + h10 * h * Ap3[i] + h01 * A3[i + 1] + h11 * h * Ap3[i + 1]
    ap = h00 * Ap3[i] + h10 * h * App3[i] + h01 * Ap3[i + 1] + h11 * h * App3[i + 1]
    return a, ap


def _rhs(code, mus, s, lam, z, prof, omega):
    a, ap = interpolate(z, *prof)
    A = assemble(code, mus, s, lam, a, ap)
    AO = A @ omega
    T = omega.conj().T @ AO
    return AO - omega @ T, np.trace(T)


def _orthonormalize(omega):
    q, r = np.linalg.qr(omega)
    d = np.diag(r)
    ph = d / np.abs(d)
    q = q * ph[None, :]
    return q, complex(np.sum(np.log(np.abs(d))))


def drury(code, mus, s, lam, zs, A3, Ap3, App3, aL, aR, omega, logr, z0, z1,
          atol=1e-8, rtol=1e-6, h0=0.05, reorth_tol=1e-8, max_steps=200000):
    """Integrate ``W' = (I - W W*) A W`` and ``(log r)' = tr(W* A W)`` from ``z0`` to ``z1``.

    Returns ``(omega, logr, stats)`` with ``stats = (accepted, rejected,
    reorthonormalisations, max_drift, status, z_fail)``; ``status`` is 0 on
    success and 1 on step-size collapse.
    """
    prof = (zs, A3, Ap3, App3, aL, aR)
    omega = np.array(omega, dtype=complex)
    logr = complex(logr)
    lam = complex(lam)
    k = omega.shape[1]
    eye = np.eye(k)
    direction = 1.0 if z1 >= z0 else -1.0
    z = z0
    h = min(abs(h0), abs(z1 - z0)) * direction
    acc = rej = nre = 0
    max_drift = 0.0
    if z0 == z1:
        return omega, logr, (0, 0, 0, 0.0, 0, z)
    f_om, f_lr = _rhs(code, mus, s, lam, z, prof, omega)
    while (z1 - z) * direction > 0:
        if abs(h) < 1e-12 * (1.0 + abs(z)):
            return omega, logr, (acc, rej, nre, max_drift, 1, z)
        if (z + h - z1) * direction > 0:
            h = z1 - z
        ks_om = [f_om]
        ks_lr = [f_lr]
        for st in range(1, 7):
            y_om = omega.copy()
            y_lr = logr
            for j, aij in enumerate(_A[st]):
                if aij != 0.0:
                    y_om = y_om + (h * aij) * ks_om[j]
                    y_lr = y_lr + (h * aij) * ks_lr[j]
            if st == 6:
                new_om, new_lr = y_om, y_lr
            fo, fl = _rhs(code, mus, s, lam, z + _C[st] * h, prof, y_om)
            ks_om.append(fo)
            ks_lr.append(fl)
        err_om = sum((h * e) * kk for e, kk in zip(_E, ks_om) if e != 0.0)
        err_lr = sum((h * e) * kk for e, kk in zip(_E, ks_lr) if e != 0.0)
        sc_om = atol + rtol * np.maximum(np.abs(omega), np.abs(new_om))
        sc_lr = atol + rtol * max(abs(logr), abs(new_lr))
        tot = float(np.sum((np.abs(err_om) / sc_om) ** 2)) + (abs(err_lr) / sc_lr) ** 2
        err = math.sqrt(tot / (omega.size + 1))
        if err <= 1.0:
            z = z + h
            omega, logr = new_om, new_lr
            f_om, f_lr = ks_om[6], ks_lr[6]
            acc += 1
            G = omega.conj().T @ omega - eye
            drift = float(np.max(np.abs(G)))
            max_drift = max(max_drift, drift)
            if drift > reorth_tol:
                omega, dl = _orthonormalize(omega)
                logr += dl
                nre += 1
                f_om, f_lr = _rhs(code, mus, s, lam, z, prof, omega)
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            rej += 1
            fac = max(0.2, 0.9 * err ** -0.2)
        h *= fac
        if acc + rej > max_steps:
            return omega, logr, (acc, rej, nre, max_drift, 1, z)
    return omega, logr, (acc, rej, nre, max_drift, 0, z)
