"""Rankine-Hugoniot endstates, equilibrium classification and shock type.

The profile flow is a scaled gradient flow of

    phi(a) = W(a) - sigma |a|^2 / 2 - (DW(alpha) - sigma alpha) . a,

so the RH set for a left state ``alpha`` and ``sigma = s^2`` is the critical
set of ``phi``.  The closed-form solvers below are specific to the
rest-state potential; :func:`rh_residual` works for any potential.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation
from .model import (
    ElasticPotential,
    ModelVariant,
    W0,
    a3_index,
    characteristics,
    grad_potential,
    hess_potential,
    profile_scaling,
)

__all__ = [
    "Morse",
    "ShockClass",
    "Ring",
    "RHSolution",
    "EquilibriumInfo",
    "ShockCandidate",
    "rh_residual",
    "rh_shear",
    "rh_compressible_1d",
    "rh_compressible_2d",
    "rh_compressible_3d",
    "rh_solve",
    "classify_equilibrium",
    "shock_type",
    "morse_index_sum",
]

DEDUP_TOL = 1e-7
POLE_TOL = 1e-8
NEAR_POLE = 1e-3
ZERO_EIG_TOL = 1e-8
CHAR_TOL = 1e-9


class Morse(enum.Enum):
    REPELLOR = "Repellor"
    ATTRACTOR = "Attractor"
    SADDLE = "Saddle"
    DEGENERATE = "Degenerate"


class ShockClass(enum.Enum):
    LAX = "Lax"
    OVERCOMPRESSIVE = "Overcompressive"
    UNDERCOMPRESSIVE = "Undercompressive"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class Ring:
    """Circle of equilibria ``{(r cos t, r sin t, axis_value)}`` (shear: ``axis_value`` unused)."""

    axis_value: float
    radius: float

    def sample(self, n: int) -> np.ndarray:
        t = 2 * np.pi * np.arange(n) / n
        return np.column_stack([self.radius * np.cos(t), self.radius * np.sin(t),
                                np.full(n, self.axis_value)])


@dataclass
class RHSolution:
    """Discrete RH roots (each with a feasibility flag) plus an optional continuum."""

    points: list[np.ndarray] = field(default_factory=list)
    feasible: list[bool] = field(default_factory=list)
    ring: Ring | None = None
    degenerate: bool = False

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def nontrivial(self, alpha, tol: float = 1e-6) -> list[np.ndarray]:
        alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
        return [p for p in self.points if np.linalg.norm(p - alpha) > tol]


def _phi_grad(a, alpha, sigma, pot, variant):
    return (grad_potential(a, pot, variant) - sigma * a
            - (grad_potential(alpha, pot, variant) - sigma * alpha))


def rh_residual(a_plus, alpha, sigma, pot: ElasticPotential = W0,
                variant: ModelVariant = ModelVariant.SHEAR2D) -> float:
    """Max-norm RH residual ``|DW(a+) - sigma a+ - DW(alpha) + sigma alpha|``."""
    a_plus = np.atleast_1d(np.asarray(a_plus, dtype=float))
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    return float(np.max(np.abs(_phi_grad(a_plus, alpha, sigma, pot, variant))))


def _polish(a, alpha, sigma, pot, variant, steps=4):
    a = np.array(a, dtype=float)
    for _ in range(steps):
        g = _phi_grad(a, alpha, sigma, pot, variant)
        if np.max(np.abs(g)) < 1e-15 * (1 + np.max(np.abs(a))) ** 3:
            break
        J = hess_potential(a, pot, variant) - sigma * np.eye(a.size)
        try:
            step = np.linalg.solve(J, g)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        a = a - step
    return a


def _dedup(points, tol=DEDUP_TOL):
    out: list[np.ndarray] = []
    for p in points:
        if all(np.max(np.abs(p - q)) > tol for q in out):
            out.append(p)
    return out


def _finalize(points, alpha, sigma, variant, pot=W0, a3=None):
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    cands = [alpha.copy()] + [_polish(p, alpha, sigma, pot, variant) for p in points]
    # candidates built near a pole of the closed form may not polish onto a root
    cands = [p for p in cands if np.all(np.isfinite(p))
             and rh_residual(p, alpha, sigma, pot, variant) <= 1e-9 * (1 + float(np.max(np.abs(p)))) ** 3]
    cands = _dedup([np.asarray(p, dtype=float) for p in cands])
    sol = RHSolution()
    for p in cands:
        sol.points.append(p)
        sol.feasible.append(True if a3 is None else bool(p[a3] > 0))
    return sol


def _real_roots(coeffs, polish=5, imag_tol=1e-8):
    """Real roots of a polynomial via companion eigenvalues plus Newton polishing."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if coeffs.size <= 1:
        return np.empty(0)
    roots = np.roots(coeffs)
    real = roots[np.abs(roots.imag) <= imag_tol * (1 + np.abs(roots))].real
    dp = np.polyder(coeffs)
    out = []
    for r in real:
        for _ in range(polish):
            d = np.polyval(dp, r)
            if d == 0:
                break
            nxt = r - np.polyval(coeffs, r) / d
            if abs(np.polyval(coeffs, nxt)) >= abs(np.polyval(coeffs, r)):
                break  # multiple roots: Newton only wanders
            r = nxt
        out.append(r)
    return np.array(sorted(out))


def rh_shear(alpha, sigma: float) -> RHSolution:
    """RH set for the planar shear model ``(|a|^2+1-sigma) a = (|alpha|^2+1-sigma) alpha``."""
    alpha = np.asarray(alpha, dtype=float).reshape(-1)
    if sigma <= 0:
        raise ContractViolation("sigma must be positive")
    variant = ModelVariant.SHEAR2D if alpha.size == 2 else ModelVariant.SHEAR1D
    nrm = float(np.linalg.norm(alpha))
    if nrm == 0.0:
        sol = _finalize([], alpha, sigma, variant)
        if sigma > 1:
            sol.ring = Ring(0.0, float(np.sqrt(sigma - 1.0)))
        return sol
    u = alpha / nrm
    # t u with t^3 + (1 - sigma) t - (|alpha|^2 + 1 - sigma)|alpha| = 0
    ts = _real_roots([1.0, 0.0, 1.0 - sigma, -(nrm * nrm + 1.0 - sigma) * nrm])
    sol = _finalize([t * u for t in ts], alpha, sigma, variant)
    if abs(nrm * nrm + 1.0 - sigma) < 1e-12 * (1 + sigma):
        # |alpha|^2 = sigma - 1: every point on that circle is an equilibrium
        sol.degenerate = True
        sol.ring = Ring(0.0, nrm)
    return sol


def rh_compressible_1d(alpha3: float, sigma: float) -> RHSolution:
    """Normal-strain RH roots: ``alpha3`` and ``-alpha3/2 +- sqrt(4(1+sigma) - 3 alpha3^2)/2``."""
    alpha3 = float(alpha3)
    pts = []
    disc = 4.0 * (1.0 + sigma) - 3.0 * alpha3 * alpha3
    if disc >= 0:
        h = 0.5 * np.sqrt(disc)
        pts = [np.array([-0.5 * alpha3 + h]), np.array([-0.5 * alpha3 - h])]
    return _finalize(pts, [alpha3], sigma, ModelVariant.COMPRESSIBLE1D, a3=0)


def _quintic(alpha, sigma):
    """Coefficients of the |a+|^2 equation for the in-plane compressible RH system."""
    a2, a3 = alpha
    n2 = a2 * a2 + a3 * a3
    P = np.poly1d
    y = P([1.0, 0.0])
    lhs = y * (y - sigma) ** 2 * (y - 1 - sigma) ** 2
    rhs = ((n2 - sigma) ** 2 * a2 * a2) * (y - 1 - sigma) ** 2 \
        + ((n2 - 1 - sigma) ** 2 * a3 * a3) * (y - sigma) ** 2
    return (lhs - rhs).coeffs


def rh_compressible_2d(alpha, sigma: float) -> RHSolution:
    """In-plane compressible RH set for ``alpha = (alpha2, alpha3)``."""
    alpha = np.asarray(alpha, dtype=float).reshape(2)
    a2, a3 = alpha
    variant = ModelVariant.COMPRESSIBLE2D
    n2 = float(alpha @ alpha)
    pts = []
    if a2 == 0.0:
        for p in rh_compressible_1d(a3, sigma).points:
            pts.append(np.array([0.0, p[0]]))
        # a2+ != 0 forces |a+|^2 = sigma and a3+ = (1 + sigma - alpha3^2) alpha3
        a3p = (1.0 + sigma - a3 * a3) * a3
        r2 = sigma - a3p * a3p
        if r2 > 0:
            r = np.sqrt(r2)
            pts += [np.array([r, a3p]), np.array([-r, a3p])]
        sol = _finalize(pts, alpha, sigma, variant, a3=1)
        return sol
    # Near alpha2 = 0 (or alpha3 = 0) the quintic has a nearly double root at a pole of
    # the back-substitution; such roots may come out slightly complex, so accept them
    # loosely and recover the missing component from |a+|^2 = y instead.
    for y in _real_roots(_quintic(alpha, sigma), imag_tol=1e-5):
        if y < -POLE_TOL:
            continue
        if abs(y - sigma) > POLE_TOL and abs(y - 1 - sigma) > POLE_TOL:
            pts.append(np.array([(n2 - sigma) * a2 / (y - sigma),
                                 (n2 - 1 - sigma) * a3 / (y - 1 - sigma)]))
        if abs(y - sigma) < NEAR_POLE and abs(y - 1 - sigma) > NEAR_POLE:
            a3p = (n2 - 1 - sigma) * a3 / (y - 1 - sigma)
            r = np.sqrt(max(y - a3p * a3p, 0.0))
            pts += [np.array([r, a3p]), np.array([-r, a3p])]
        if abs(y - 1 - sigma) < NEAR_POLE and abs(y - sigma) > NEAR_POLE:
            a2p = (n2 - sigma) * a2 / (y - sigma)
            r = np.sqrt(max(y - a2p * a2p, 0.0))
            pts += [np.array([a2p, r]), np.array([a2p, -r])]
    return _finalize(pts, alpha, sigma, variant, a3=1)


def rh_compressible_3d(alpha, sigma: float) -> RHSolution:
    """Full compressible RH set; the in-plane shear is rotated onto the second axis."""
    alpha = np.asarray(alpha, dtype=float).reshape(3)
    rho = float(np.hypot(alpha[0], alpha[1]))
    c, s_ = (alpha[1] / rho, alpha[0] / rho) if rho > 0 else (1.0, 0.0)

    def rotate_back(p2):  # (a2', a3) in the rotated frame -> full vector
        return np.array([s_ * p2[0], c * p2[0], p2[1]])

    if rho == 0.0:
        base = rh_compressible_1d(alpha[2], sigma)
        pts = [np.array([0.0, 0.0, p[0]]) for p in base.points]
        sol = _finalize(pts, alpha, sigma, ModelVariant.COMPRESSIBLE3D, a3=2)
        a3p = (1.0 + sigma - alpha[2] ** 2) * alpha[2]
        r2 = sigma - a3p * a3p
        if r2 > 0:
            sol.ring = Ring(float(a3p), float(np.sqrt(r2)))
        return sol
    planar = rh_compressible_2d([rho, alpha[2]], sigma)
    pts = [rotate_back(p) for p in planar.points]
    sol = _finalize(pts, alpha, sigma, ModelVariant.COMPRESSIBLE3D, a3=2)
    sol.degenerate = bool(abs(float(alpha @ alpha) - sigma) < 1e-12 * (1 + sigma))
    return sol


def rh_solve(alpha, sigma: float, variant: ModelVariant) -> RHSolution:
    """Dispatch to the variant's RH solver (rest-state potential)."""
    if variant in (ModelVariant.SHEAR2D, ModelVariant.SHEAR1D):
        return rh_shear(alpha, sigma)
    if variant is ModelVariant.COMPRESSIBLE1D:
        return rh_compressible_1d(np.atleast_1d(alpha)[0], sigma)
    if variant in (ModelVariant.COMPRESSIBLE2D, ModelVariant.TRANSVERSE):
        return rh_compressible_2d(alpha, sigma)
    return rh_compressible_3d(alpha, sigma)


@dataclass(frozen=True)
class EquilibriumInfo:
    a: np.ndarray
    jacobian_eigs: np.ndarray
    morse: Morse
    feasible: bool
    hyperbolic_endstate: bool

    @property
    def unstable_dim(self) -> int:
        return int(np.sum(self.jacobian_eigs.real > ZERO_EIG_TOL))

    @property
    def stable_dim(self) -> int:
        return int(np.sum(self.jacobian_eigs.real < -ZERO_EIG_TOL))


def _strain_variant(variant: ModelVariant) -> ModelVariant:
    return ModelVariant.COMPRESSIBLE2D if variant is ModelVariant.TRANSVERSE else variant


def endstate_hyperbolic(a, sigma, pot, variant) -> bool:
    ch = characteristics(a, pot, _strain_variant(variant))
    if not ch.strictly_hyperbolic:
        return False
    return bool(np.all(np.abs(ch.m - sigma) > CHAR_TOL * (1 + sigma)))


def classify_equilibrium(a, alpha, sigma: float, pot: ElasticPotential = W0,
                         variant: ModelVariant = ModelVariant.SHEAR2D) -> EquilibriumInfo:
    """Morse type of ``a`` for the scaled profile flow ``D^{-1} grad phi``."""
    variant = _strain_variant(variant)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    res = rh_residual(a, alpha, sigma, pot, variant)
    if res > 1e-6 * (1 + float(np.max(np.abs(a)))) ** 3:
        raise ContractViolation(f"{a} is not an equilibrium (residual {res:.3e})")
    J = (hess_potential(a, pot, variant) - sigma * np.eye(a.size)) / profile_scaling(variant)[:, None]
    eigs = np.linalg.eigvals(J)
    eigs = np.sort_complex(eigs)
    re = eigs.real
    if np.any(np.abs(re) <= ZERO_EIG_TOL):
        morse = Morse.DEGENERATE
    elif np.all(re > 0):
        morse = Morse.REPELLOR
    elif np.all(re < 0):
        morse = Morse.ATTRACTOR
    else:
        morse = Morse.SADDLE
    k = a3_index(variant)
    feasible = True if k is None else bool(a[k] > 0)
    return EquilibriumInfo(a, eigs, morse, feasible, endstate_hyperbolic(a, sigma, pot, variant))


@dataclass(frozen=True)
class ShockCandidate:
    alpha: np.ndarray
    a_plus: np.ndarray
    s: float
    sigma: float
    ell_tilde: int
    shock_class: ShockClass
    variant: ModelVariant = ModelVariant.SHEAR2D

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.atleast_1d(np.asarray(self.alpha, dtype=float)))
        object.__setattr__(self, "a_plus", np.atleast_1d(np.asarray(self.a_plus, dtype=float)))

    @property
    def amplitude(self) -> float:
        return float(np.linalg.norm(self.a_plus - self.alpha))


def _flux_speeds(a, pot, variant):
    m = characteristics(a, pot, variant).m.astype(complex)
    r = np.sqrt(m)
    return np.concatenate([-r, r])


def shock_type(alpha, a_plus, s: float, pot: ElasticPotential = W0,
               variant: ModelVariant = ModelVariant.SHEAR2D) -> ShockCandidate:
    """Hyperbolic index ``#{speeds(V-) > s} + #{speeds(V+) < s} - 2 d``."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    a_plus = np.atleast_1d(np.asarray(a_plus, dtype=float))
    strain = _strain_variant(variant)
    s = float(s)
    sigma = s * s
    lm = _flux_speeds(alpha, pot, strain)
    lp = _flux_speeds(a_plus, pot, strain)
    degenerate = any(abs(x.imag) < CHAR_TOL and abs(x.real - s) < CHAR_TOL * (1 + abs(s))
                     for x in np.concatenate([lm, lp]))
    ell = int(np.sum(lm.real > s) + np.sum(lp.real < s) - 2 * strain.strain_dim)
    if degenerate:
        cls = ShockClass.DEGENERATE
    elif ell == 1:
        cls = ShockClass.LAX
    elif ell > 1:
        cls = ShockClass.OVERCOMPRESSIVE
    else:
        cls = ShockClass.UNDERCOMPRESSIVE
    return ShockCandidate(alpha, a_plus, s, sigma, ell, cls, variant)


def morse_index_sum(alpha, sigma: float, pot: ElasticPotential = W0,
                    variant: ModelVariant = ModelVariant.SHEAR2D) -> int:
    """Sum of ``sign det`` of the flow Jacobian over all discrete equilibria."""
    total = 0
    for p in rh_solve(alpha, sigma, variant).points:
        info = classify_equilibrium(p, alpha, sigma, pot, variant)
        if info.morse is Morse.DEGENERATE:
            raise ContractViolation("degenerate equilibrium; index undefined")
        total += int(np.sign(np.prod(info.jacobian_eigs).real))
    return total
