"""Spectral splitting of the limit matrices and analytic basis transport in lambda."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from ..errors import ProjectorFailure, SplittingDegenerate

__all__ = [
    "Side",
    "spectral_split",
    "projector",
    "AnalyticBasisState",
    "kato_step",
    "kato_transport",
    "path_tol",
    "KatoContinuation",
]


class Side(enum.Enum):
    PLUS = "Plus"    # stable space of A_+
    MINUS = "Minus"  # unstable space of A_-

    @classmethod
    def coerce(cls, side) -> "Side":
        if isinstance(side, cls):
            return side
        key = str(side).strip().lower()
        if key in ("plus", "+"):
            return cls.PLUS
        if key in ("minus", "-"):
            return cls.MINUS
        raise ValueError(f"unknown side {side!r}")


def _cut(re: np.ndarray, side: Side, dim: int | None, tol: float) -> float:
    """Real-part threshold separating the wanted eigenvalues."""
    if dim is None:
        if np.any(np.abs(re) < tol):
            raise SplittingDegenerate(
                f"eigenvalue within {tol:g} of the imaginary axis (min |Re| = {np.min(np.abs(re)):.3g})")
        return 0.0
    n = re.size
    if not 0 <= dim <= n:
        raise ValueError("dimension out of range")
    if dim in (0, n):
        return math.inf if (dim == n) == (side is Side.PLUS) else -math.inf
    srt = np.sort(re) if side is Side.PLUS else np.sort(re)[::-1]
    inner, outer = srt[dim - 1], srt[dim]
    if abs(outer - inner) < tol:
        raise SplittingDegenerate(f"spectral gap {abs(outer - inner):.3g} below {tol:g}")
    # wanted eigenvalues must not sit clearly on the wrong side of the axis
    if (side is Side.PLUS and inner > tol) or (side is Side.MINUS and inner < -tol):
        raise SplittingDegenerate("splitting dimension changed along the path")
    return 0.5 * (inner + outer)


def spectral_split(A, side, dim: int | None = None, tol: float = 1e-8):
    """Orthonormal basis of the stable (plus) or unstable (minus) invariant subspace.

    With ``dim`` given, the ``dim`` eigenvalues furthest into the wanted
    half-plane are selected and only the gap at the cut is checked; this is
    how a fixed dimension is continued along a path that touches the
    imaginary axis near the origin.
    """
    side = Side.coerce(side)
    A = np.asarray(A)
    re = np.linalg.eigvals(A).real
    cut = _cut(re, side, dim, tol)
    want = int(np.sum(re < cut)) if side is Side.PLUS else int(np.sum(re > cut))
    if side is Side.PLUS:
        pick = lambda x: np.real(x) < cut  # noqa: E731
    else:
        pick = lambda x: np.real(x) > cut  # noqa: E731
    real_input = not np.iscomplexobj(A) or not np.any(A.imag)
    if real_input:
        _, Z, sdim = sla.schur(np.real(A), output="real", sort=pick)
    else:
        _, Z, sdim = sla.schur(A, output="complex", sort=pick)
    if sdim != want:
        raise SplittingDegenerate(f"Schur reordering kept {sdim} of {want} eigenvalues")
    return np.asarray(Z[:, :sdim], dtype=complex), sdim


def projector(A, side, dim: int | None = None, tol: float = 1e-8) -> np.ndarray:
    """Spectral projector ``R (L R)^{-1} L`` from orthonormal right and left bases."""
    side = Side.coerce(side)
    R, k = spectral_split(A, side, dim, tol)
    Lh, _ = spectral_split(np.conj(np.asarray(A)).T, side, k, tol)
    LR = Lh.conj().T @ R
    if k and np.linalg.cond(LR) > 1e12:
        raise ProjectorFailure("left and right invariant bases are nearly orthogonal")
    return R @ np.linalg.solve(LR, Lh.conj().T) if k else np.zeros(A.shape, dtype=complex)


@dataclass(frozen=True, eq=False)
class AnalyticBasisState:
    lam: complex
    basis_plus: np.ndarray
    basis_minus: np.ndarray
    projector_plus: np.ndarray
    projector_minus: np.ndarray

    @property
    def k_plus(self) -> int:
        return self.basis_plus.shape[1]

    @property
    def k_minus(self) -> int:
        return self.basis_minus.shape[1]

    def basis(self, side) -> np.ndarray:
        return self.basis_plus if Side.coerce(side) is Side.PLUS else self.basis_minus

    def conj(self) -> "AnalyticBasisState":
        return AnalyticBasisState(np.conj(self.lam), self.basis_plus.conj(), self.basis_minus.conj(),
                                  self.projector_plus.conj(), self.projector_minus.conj())


def kato_step(P0: np.ndarray, P1: np.ndarray, R0: np.ndarray) -> np.ndarray:
    """Second-order discrete transport ``R1 = P1 [I + P0 (I - P1) / 2] R0``.

    Matches the Taylor expansion of ``R' = P' R`` through ``h^2``; without
    the half the ``h^2`` term picks up an extra ``P'P'R/2`` and the scheme
    drops to first order.
    """
    return P1 @ (R0 + 0.5 * (P0 @ (R0 - P1 @ R0)))


def _state(lam, limits, dims, basis_plus, basis_minus, tol):
    Ap, Am = limits(lam)
    Pp = projector(Ap, Side.PLUS, dims[0], tol)
    Pm = projector(Am, Side.MINUS, dims[1], tol)
    return AnalyticBasisState(complex(lam), basis_plus, basis_minus, Pp, Pm)


def path_tol(tol: float, lam: complex) -> float:
    """Gap tolerance at ``lam``: slow eigenvalues have real parts ``O(|lam|^2)`` near 0."""
    return tol * min(1.0, abs(lam)) ** 2


def kato_transport(state: AnalyticBasisState, path, limits, tol: float = 1e-8) -> list[AnalyticBasisState]:
    """Carry the bases of ``state`` through the points of ``path``.

    ``limits(lam)`` returns ``(A_plus, A_minus)``.  One state is returned per
    path point; the dimensions are those of the starting state.
    """
    dims = (state.k_plus, state.k_minus)
    out = []
    cur = state
    for lam in path:
        Ap, Am = limits(lam)
        t = path_tol(tol, lam)
        Pp = projector(Ap, Side.PLUS, dims[0], t)
        Pm = projector(Am, Side.MINUS, dims[1], t)
        bp = kato_step(cur.projector_plus, Pp, cur.basis_plus)
        bm = kato_step(cur.projector_minus, Pm, cur.basis_minus)
        cur = AnalyticBasisState(complex(lam), bp, bm, Pp, Pm)
        out.append(cur)
    return out


class KatoContinuation:
    """Analytic bases anywhere in the closed right half-plane minus the origin.

    Bases start from a real Schur basis at the real anchor and reach
    ``lam = rho e^{i theta}`` along a fixed route: radially on the real axis
    to ``rho`` and then along the circle of radius ``rho``.  The route depends
    only on ``lam``, so values do not depend on evaluation order, and points
    in the lower half-plane use the conjugate of their mirror image.
    Radial waypoints are cached.
    """

    def __init__(self, limits, anchor: float = 1.0, rel_step: float = 0.05, tol: float = 1e-8):
        if anchor <= 0:
            raise ValueError("anchor must be a positive real number")
        self.limits = limits
        self.anchor = float(anchor)
        self.rel_step = float(rel_step)
        self.tol = float(tol)
        Ap, Am = limits(self.anchor)
        bp, kp = spectral_split(Ap, Side.PLUS, None, tol)
        bm, km = spectral_split(Am, Side.MINUS, None, tol)
        N = Ap.shape[0]
        if kp + km != N:
            raise SplittingDegenerate(f"inconsistent splitting at the anchor: {kp} + {km} != {N}")
        self.dims = (kp, km)
        self.N = N
        root = _state(self.anchor, limits, self.dims, bp.real.astype(complex), bm.real.astype(complex), tol)
        self._ratio = 1.0 + self.rel_step
        self._radial = {0: root}

    def _radial_state(self, j: int) -> AnalyticBasisState:
        if j in self._radial:
            return self._radial[j]
        step = 1 if j > 0 else -1
        i = j - step
        while i not in self._radial:
            i -= step
        cur = self._radial[i]
        while i != j:
            i += step
            cur = kato_transport(cur, [self.anchor * self._ratio ** i], self.limits, self.tol)[0]
            # real path keeps real bases; drop rounding drift in the imaginary part
            cur = AnalyticBasisState(cur.lam.real + 0j, cur.basis_plus.real.astype(complex),
                                     cur.basis_minus.real.astype(complex),
                                     cur.projector_plus.real.astype(complex),
                                     cur.projector_minus.real.astype(complex))
            self._radial[i] = cur
        return cur

    def state(self, lam: complex) -> AnalyticBasisState:
        lam = complex(lam)
        if lam.imag < 0:
            return self.state(lam.conjugate()).conj()
        rho = abs(lam)
        if rho == 0 or lam.real < -1e-14 * rho:
            raise SplittingDegenerate("bases are continued only in Re(lambda) >= 0 away from 0")
        j = int(math.floor(math.log(rho / self.anchor) / math.log(self._ratio)))
        cur = self._radial_state(j)
        if rho != cur.lam.real:
            cur = kato_transport(cur, [rho + 0j], self.limits, self.tol)[0]
            cur = AnalyticBasisState(rho + 0j, cur.basis_plus.real.astype(complex),
                                     cur.basis_minus.real.astype(complex),
                                     cur.projector_plus.real.astype(complex),
                                     cur.projector_minus.real.astype(complex))
        theta = math.atan2(lam.imag, lam.real)
        if theta == 0.0:
            return cur
        n = max(1, int(math.ceil(theta / self.rel_step)))
        path = [rho * complex(math.cos(theta * i / n), math.sin(theta * i / n)) for i in range(1, n)]
        path.append(lam)
        return kato_transport(cur, path, self.limits, self.tol)[-1]
