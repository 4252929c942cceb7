"""Traveling-wave profiles and the diagnostics built on them.

Profiles solve, in the original traveling coordinate ``z``,

    a' = (a3 / s) D^{-1} grad phi(a)       (compressible, D = diag(1, 1, 2))
    a' = grad phi(a) / s                    (shear)

which follows from integrating the momentum equation once and inserting
``b = -s (a - alpha)``.  Connections are found by shooting along an
unstable (or, backwards, stable) eigendirection; overcompressive families
are seeded at interior points and integrated both ways.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .equilibria import (
    Morse,
    ShockCandidate,
    ShockClass,
    classify_equilibrium,
    rh_solve,
    shock_type,
)
from .errors import ConnectionNotFound, ConsistencyError, ContractViolation, DomainError
from .model import (
    ElasticPotential,
    ModelVariant,
    StateV,
    W0,
    a3_index,
    characteristics,
    entropy_pair,
    eval_potential,
    flux,
    grad_potential,
    hess_potential,
    profile_scaling,
)

log = logging.getLogger(__name__)

__all__ = [
    "PhiPotential",
    "ProfileOptions",
    "ProfileGrid",
    "phi",
    "profile_flow_rhs",
    "profile_flow_jacobian",
    "compute_profile",
    "overcompressive_family",
    "overcompressive_seeds",
    "explicit_shear_profile",
    "phi_monotonicity_report",
    "psi_jump",
    "h1_residual",
    "Portrait",
    "phase_portrait",
    "DispersionResult",
    "dispersion_relation",
    "hamiltonian_check",
    "UCReport",
    "undercompressive_search",
]


def _strain(variant: ModelVariant) -> ModelVariant:
    return ModelVariant.COMPRESSIBLE2D if variant is ModelVariant.TRANSVERSE else variant


@dataclass(frozen=True)
class PhiPotential:
    """``phi(a) = W(a) - sigma|a|^2/2 - (DW(alpha) - sigma alpha) . a``."""

    alpha: np.ndarray
    sigma: float
    pot: ElasticPotential = W0
    variant: ModelVariant = ModelVariant.SHEAR2D

    def __post_init__(self):
        object.__setattr__(self, "alpha", np.atleast_1d(np.asarray(self.alpha, dtype=float)))
        object.__setattr__(self, "variant", _strain(self.variant))
        object.__setattr__(self, "_shift",
                           grad_potential(self.alpha, self.pot, self.variant) - self.sigma * self.alpha)

    def value(self, a) -> float:
        a = np.atleast_1d(np.asarray(a, dtype=float))
        return (eval_potential(a, self.pot, self.variant) - 0.5 * self.sigma * float(a @ a)
                - float(self._shift @ a))

    def grad(self, a) -> np.ndarray:
        a = np.atleast_1d(np.asarray(a, dtype=float))
        return grad_potential(a, self.pot, self.variant) - self.sigma * a - self._shift

    def hess(self, a) -> np.ndarray:
        a = np.atleast_1d(np.asarray(a, dtype=float))
        return hess_potential(a, self.pot, self.variant) - self.sigma * np.eye(a.size)


def phi(a, P: PhiPotential) -> float:
    return P.value(a)


def profile_flow_rhs(a, P: PhiPotential, s: float) -> np.ndarray:
    """Right-hand side of the profile ODE in the unscaled coordinate."""
    if s == 0:
        raise DomainError("profiles require a nonzero speed")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    g = P.grad(a) / profile_scaling(P.variant)
    k = a3_index(P.variant)
    if k is None:
        return g / s
    if a[k] <= 0:
        raise DomainError("profile flow needs a3 > 0")
    return (a[k] / s) * g


def profile_flow_jacobian(a, P: PhiPotential, s: float) -> np.ndarray:
    a = np.atleast_1d(np.asarray(a, dtype=float))
    d = profile_scaling(P.variant)[:, None]
    H = P.hess(a) / d
    k = a3_index(P.variant)
    if k is None:
        return H / s
    J = a[k] * H
    J[:, k] += P.grad(a) / d[:, 0]
    return J / s


@dataclass(frozen=True)
class ProfileOptions:
    tol: float = 1e-3          # endpoint tolerance defining L
    rtol: float = 1e-10
    atol: float = 1e-12
    offset: float = 1e-6       # relative shooting offset
    capture: float = 1e-7      # stop integrating this close to an endstate
    z_max: float = 5000.0
    dz_max: float = 0.05       # max node spacing on the output grid
    L_step: float = 0.05
    L: float | None = None     # force a half-width (must still meet tol)
    seed: tuple | None = None  # interior point for overcompressive connections


@dataclass(frozen=True, eq=False)
class ProfileGrid:
    """Sampled connection ``a(z)`` on ``[-L, L]`` with exact node derivatives."""

    z: np.ndarray
    a_vals: np.ndarray
    a_prime: np.ndarray
    a_second: np.ndarray
    s: float
    L: float
    endpoint_err: float
    alpha: np.ndarray
    a_plus: np.ndarray
    variant: ModelVariant
    meta: dict = field(default_factory=dict)

    @property
    def b_vals(self) -> np.ndarray:
        return -self.s * (self.a_vals - self.alpha)

    @property
    def b_prime(self) -> np.ndarray:
        return -self.s * self.a_prime

    @property
    def strain_dim(self) -> int:
        return self.a_vals.shape[1]

    def to_csv(self, path) -> None:
        d = self.strain_dim
        cols = ([f"a{i + 1}" for i in range(d)] + [f"b{i + 1}" for i in range(d)]
                + [f"a{i + 1}p" for i in range(d)] + [f"b{i + 1}p" for i in range(d)])
        data = np.column_stack([self.z, self.a_vals, self.b_vals, self.a_prime, self.b_prime]) + 0.0  # no -0
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(",".join(["z"] + cols) + "\n")
            for row in data:
                fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


class _Trajectory:
    """A shot orbit with exponential tails glued on beyond the integrated range."""

    def __init__(self, sol, z0, z1, left_state, left_J, right_state, right_J, nodes=()):
        self.sol, self.z0, self.z1 = sol, z0, z1
        self.nodes = np.asarray(nodes, dtype=float)
        self.aL, self.JL = left_state, left_J
        self.aR, self.JR = right_state, right_J
        self.startL = sol(z0)
        self.startR = sol(z1)

    def __call__(self, z):
        z = float(z)
        if z < self.z0:
            return self.aL + expm(self.JL * (z - self.z0)) @ (self.startL - self.aL)
        if z > self.z1:
            return self.aR + expm(self.JR * (z - self.z1)) @ (self.startR - self.aR)
        return self.sol(z)


def _eig_dirs(J, sign):
    w, V = np.linalg.eig(J)
    keep = (w.real > 1e-10) if sign > 0 else (w.real < -1e-10)
    return w[keep].real, V[:, keep].real


def _integrate(P, s, a0, direction, target, avoid, opts):
    """Integrate from ``a0`` until within ``opts.capture`` of ``target``."""
    k = a3_index(P.variant)
    scale = 1.0 + np.linalg.norm(target)

    def f(z, a):
        if k is not None and a[k] <= 1e-6:
            return np.zeros_like(a)
        return profile_flow_rhs(a, P, s)

    def captured(z, a):
        return np.linalg.norm(a - target) - opts.capture * scale
    captured.terminal = True

    def escaped(z, a):
        return 1e3 * scale - np.linalg.norm(a)
    escaped.terminal = True

    def collapsed(z, a):
        return (a[k] - 1e-6) if k is not None else 1.0
    collapsed.terminal = True

    def stalled(z, a):  # fell into some other equilibrium
        return min(np.linalg.norm(a - p) for p in avoid) - opts.capture * scale if avoid else 1.0
    stalled.terminal = True

    span = (0.0, direction * opts.z_max)
    sol = solve_ivp(f, span, a0, method="RK45", rtol=opts.rtol, atol=opts.atol,
                    dense_output=True, events=[captured, escaped, collapsed, stalled])
    ok = sol.status == 1 and len(sol.t_events[0]) > 0
    miss = float(np.min(np.linalg.norm(sol.y.T - target, axis=1)))
    return sol, ok, miss


def _other_equilibria(P, alpha, a_plus):
    out = []
    for p in rh_solve(alpha, P.sigma, P.variant).points:
        if np.linalg.norm(p - alpha) > 1e-6 and np.linalg.norm(p - a_plus) > 1e-6:
            out.append(p)
    return out


def _shoot(cand: ShockCandidate, P: PhiPotential, opts: ProfileOptions):
    alpha, a_plus, s = cand.alpha, cand.a_plus, cand.s
    JL = profile_flow_jacobian(alpha, P, s)
    JR = profile_flow_jacobian(a_plus, P, s)
    others = _other_equilibria(P, alpha, a_plus)
    eps = opts.offset * np.linalg.norm(a_plus - alpha)
    wu, Vu = _eig_dirs(JL, +1)
    ws, Vs = _eig_dirs(JR, -1)
    best = np.inf

    if opts.seed is not None or (len(wu) > 1 and len(ws) > 1):
        seed = (np.asarray(opts.seed, dtype=float) if opts.seed is not None
                else 0.5 * (alpha + a_plus))
        fw, okf, mf = _integrate(P, s, seed, +1, a_plus, others, opts)
        bw, okb, mb = _integrate(P, s, seed, -1, alpha, others, opts)
        if not (okf and okb):
            raise ConnectionNotFound("interior seed does not connect the endstates",
                                     max(mf, mb), {"seed": seed.tolist()})

        def dense(z):
            return fw.sol(z) if z >= 0 else bw.sol(z)
        nodes = np.concatenate([bw.t, fw.t])
        return _Trajectory(dense, float(bw.t[-1]), float(fw.t[-1]), alpha, JL, a_plus, JR, nodes), \
            {"method": "interior_seed", "ell_estimate": len(wu)}

    if len(wu) == 1:
        v = Vu[:, 0]
        sgn = 1.0 if v @ (a_plus - alpha) >= 0 else -1.0
        for sign in (sgn, -sgn):
            sol, ok, miss = _integrate(P, s, alpha + sign * eps * v, +1, a_plus, others, opts)
            best = min(best, miss)
            if ok:
                return _Trajectory(sol.sol, 0.0, float(sol.t[-1]), alpha, JL, a_plus, JR, sol.t), \
                    {"method": "forward", "ell_estimate": 1}
    if len(ws) == 1:
        v = Vs[:, 0]
        sgn = 1.0 if v @ (alpha - a_plus) >= 0 else -1.0
        for sign in (sgn, -sgn):
            sol, ok, miss = _integrate(P, s, a_plus + sign * eps * v, -1, alpha, others, opts)
            best = min(best, miss)
            if ok:
                return _Trajectory(sol.sol, float(sol.t[-1]), 0.0, alpha, JL, a_plus, JR, sol.t), \
                    {"method": "backward", "ell_estimate": 1}
    raise ConnectionNotFound("no connecting orbit found", best,
                             {"unstable_at_alpha": len(wu), "stable_at_a_plus": len(ws)})


def _endpoint_err(traj, zc, L, alpha, a_plus):
    return max(np.linalg.norm(traj(zc - L) - alpha), np.linalg.norm(traj(zc + L) - a_plus))


def compute_profile(cand: ShockCandidate, pot: ElasticPotential = W0,
                    opts: ProfileOptions | None = None) -> ProfileGrid:
    """Connect ``cand.alpha`` to ``cand.a_plus`` and sample the orbit on ``[-L, L]``."""
    opts = opts or ProfileOptions()
    variant = _strain(cand.variant)
    if np.linalg.norm(cand.a_plus - cand.alpha) <= 1e-9:
        raise ContractViolation("endstates coincide")
    P = PhiPotential(cand.alpha, cand.sigma, pot, variant)
    traj, meta = _shoot(cand, P, opts)

    # centre at the steepest point, located on a fine scan of the integrated range
    zs = np.linspace(traj.z0, traj.z1, 4001)
    speed = [np.linalg.norm(profile_flow_rhs(traj(z), P, cand.s)) for z in zs]
    i = int(np.argmax(speed))
    lo, hi = zs[max(i - 1, 0)], zs[min(i + 1, zs.size - 1)]
    zz = np.linspace(lo, hi, 201)
    zc = float(zz[np.argmax([np.linalg.norm(profile_flow_rhs(traj(z), P, cand.s)) for z in zz])])

    L = opts.L_step
    while _endpoint_err(traj, zc, L, cand.alpha, cand.a_plus) > opts.tol:
        L += opts.L_step
        if L > opts.z_max:
            raise ConnectionNotFound("endpoint tolerance not reached", opts.tol)
    L = round(L, 10)
    if opts.L is not None:
        if opts.L >= L:
            L = float(opts.L)
        else:
            log.warning("requested L=%g misses the endpoint tolerance; using %g", opts.L, L)

    # nodes: uniform spacing refined by the integrator's own steps in the active region
    n = max(int(np.ceil(2 * L / opts.dz_max)), 8)
    nodes = np.linspace(-L, L, n + 1)
    extra = traj.nodes - zc
    nodes = np.unique(np.concatenate([nodes, extra[(extra > -L) & (extra < L)]]))
    a_vals = np.array([traj(zc + z) for z in nodes])
    a_prime = np.array([profile_flow_rhs(a, P, cand.s) for a in a_vals])
    a_second = np.array([profile_flow_jacobian(a, P, cand.s) @ ap for a, ap in zip(a_vals, a_prime)])
    err = max(np.linalg.norm(a_vals[0] - cand.alpha), np.linalg.norm(a_vals[-1] - cand.a_plus))

    k = a3_index(variant)
    if variant.is_compressible:
        elliptic = [characteristics(a, pot, variant).m.min() < 0 for a in a_vals[:: max(1, len(a_vals) // 200)]]
        meta["elliptic_crossing"] = bool(any(elliptic))
        if meta["elliptic_crossing"]:
            log.info("profile passes through the elliptic region")
        meta["min_a3"] = float(a_vals[:, k].min())
    meta["center_shift"] = zc
    if opts.seed is not None:
        meta["seed"] = [float(x) for x in opts.seed]
    return ProfileGrid(nodes, a_vals, a_prime, a_second, float(cand.s), float(L), float(err),
                       cand.alpha.copy(), cand.a_plus.copy(), cand.variant, meta)


def constant_grid(alpha, s: float, L: float, variant: ModelVariant, n: int = 41) -> ProfileGrid:
    """Trivial grid ``a == alpha``; its Evans function has no zeros for hyperbolic states."""
    alpha = np.atleast_1d(np.asarray(alpha, dtype=float))
    z = np.linspace(-L, L, n)
    vals = np.tile(alpha, (n, 1))
    zero = np.zeros_like(vals)
    return ProfileGrid(z, vals, zero, zero.copy(), float(s), float(L), 0.0, alpha.copy(),
                       alpha.copy(), variant, {"method": "constant"})


def overcompressive_seeds(cand: ShockCandidate, n_interior: int = 5, pot: ElasticPotential = W0):
    """Interior points through which the members of an overcompressive family are shot."""
    variant = _strain(cand.variant)
    sol = rh_solve(cand.alpha, cand.sigma, variant)
    saddles = [p for p in sol.points
               if classify_equilibrium(p, cand.alpha, cand.sigma, pot, variant).morse is Morse.SADDLE
               and (a3_index(variant) is None or p[a3_index(variant)] > 0)]
    t = np.arange(1, n_interior + 1) / (n_interior + 1)
    if len(saddles) >= 2:
        p, q = saddles[0], saddles[1]
        return [p + ti * (q - p) for ti in t]
    if variant is ModelVariant.SHEAR2D and len(saddles) == 1:
        # the saddle's stable arcs bound the family; sweep the circle through it
        r = float(np.linalg.norm(saddles[0]))
        base = np.arctan2(saddles[0][1], saddles[0][0])
        return [r * np.array([np.cos(base + np.pi * ti), np.sin(base + np.pi * ti)]) for ti in t]
    raise ConnectionNotFound("no saddle geometry to seed an overcompressive family")


def overcompressive_family(cand: ShockCandidate, pot: ElasticPotential = W0, n_interior: int = 5,
                           opts: ProfileOptions | None = None) -> list[ProfileGrid]:
    """Connections through evenly spaced interior seeds (one grid per seed)."""
    opts = opts or ProfileOptions()
    grids = []
    for seed in overcompressive_seeds(cand, n_interior, pot):
        o = ProfileOptions(**{**opts.__dict__, "seed": tuple(seed)})
        grids.append(compute_profile(cand, pot, o))
    return grids


def explicit_shear_profile(alpha1: float, k: float, z):
    """Closed-form shear connection from ``alpha1`` (z -> -inf) to 0 (z -> +inf).

    Written in the scaled coordinate where the flow reads ``a' = (a^2 - alpha1^2) a``.
    """
    if alpha1 == 0 or k <= 0:
        raise ContractViolation("need alpha1 != 0 and k > 0")
    with np.errstate(over="ignore"):
        return alpha1 / np.sqrt(k * np.exp(2.0 * alpha1 * alpha1 * np.asarray(z, dtype=float)) + 1.0)


def phi_monotonicity_report(grid: ProfileGrid, P: PhiPotential) -> tuple[float, bool]:
    vals = np.array([P.value(a) for a in grid.a_vals])
    if vals.size < 2:
        return 0.0, True
    m = float(np.min(np.diff(vals)))
    return m, m >= -1e-10


def _state(a, alpha, s):
    a = np.atleast_1d(np.asarray(a, dtype=float))
    return StateV(a, -s * (a - alpha))


def h1_residual(a, cand: ShockCandidate, pot: ElasticPotential = W0) -> float:
    """Residual of ``s phi(a) = s eta - q - zeta + grad eta . (G(V) - G(V-) - s(V - V-))``.

    Holds for every ``V = (a, -s(a - alpha))``; with ``grad q`` in place of
    ``grad eta`` it only holds where the bracket vanishes (the endstates).
    """
    variant = _strain(cand.variant)
    s, alpha = cand.s, cand.alpha
    P = PhiPotential(alpha, cand.sigma, pot, variant)
    V = _state(a, alpha, s)
    Vm = _state(alpha, alpha, s)
    eta, q = entropy_pair(V, pot, variant)
    zeta = s * float(grad_potential(alpha, pot, variant) @ alpha) - 0.5 * s ** 3 * float(alpha @ alpha)
    grad_eta = np.concatenate([grad_potential(V.a, pot, variant), V.b])
    bracket = flux(V, pot, variant) - flux(Vm, pot, variant) - s * (
        np.concatenate([V.a, V.b]) - np.concatenate([Vm.a, Vm.b]))
    rhs = s * eta - q - zeta + float(grad_eta @ bracket)
    return float(s * P.value(a) - rhs)


def psi_jump(cand: ShockCandidate, pot: ElasticPotential = W0, variant: ModelVariant | None = None) -> float:
    """``psi(V+) - psi(V-)`` with ``psi = -s eta + q``, cross-checked against ``phi``."""
    variant = _strain(variant or cand.variant)
    s = cand.s
    if s == 0:
        raise DomainError("psi jump needs s != 0")
    Vm, Vp = _state(cand.alpha, cand.alpha, s), _state(cand.a_plus, cand.alpha, s)
    em, qm = entropy_pair(Vm, pot, variant)
    ep, qp = entropy_pair(Vp, pot, variant)
    direct = (-s * ep + qp) - (-s * em + qm)
    P = PhiPotential(cand.alpha, cand.sigma, pot, variant)
    via_phi = -s * (P.value(cand.a_plus) - P.value(cand.alpha))
    scale = 1.0 + abs(direct) + abs(s) * (abs(P.value(cand.a_plus)) + abs(P.value(cand.alpha)))
    if abs(direct - via_phi) > 1e-9 * scale:
        raise ConsistencyError(f"psi jump routes disagree: {direct!r} vs {via_phi!r}")
    for a in (cand.alpha, cand.a_plus):
        if abs(h1_residual(a, cand, pot)) > 1e-9 * scale:
            raise ConsistencyError("entropy identity fails at an endstate")
    return float(direct)


# ------------------------------------------------------------------ portraits

@dataclass
class Portrait:
    window: tuple[float, float, float, float]
    trajectories: list[np.ndarray]
    equilibria: list
    feasibility_line: float | None
    elliptic_mask: tuple[np.ndarray, np.ndarray, np.ndarray] | None
    axis_labels: tuple[str, str]


def phase_portrait(P: PhiPotential, window=(-3.0, 3.0, -3.0, 3.0), seeds: int = 64,
                   span: float = 20.0) -> Portrait:
    """Sample orbits of the scaled profile flow inside ``window = (x0, x1, y0, y1)``."""
    variant = P.variant
    if variant not in (ModelVariant.SHEAR2D, ModelVariant.COMPRESSIBLE2D):
        raise ContractViolation("phase portraits need a two-component strain space")
    x0, x1, y0, y1 = map(float, window)
    eqs = [classify_equilibrium(p, P.alpha, P.sigma, P.pot, variant)
           for p in rh_solve(P.alpha, P.sigma, variant).points]
    k = a3_index(variant)
    scale = profile_scaling(variant)

    def f(t, a):  # scaled flow, shared orientation for any speed sign
        if k is not None and a[k] <= 1e-6:
            return np.zeros(2)
        g = P.grad(a) / scale
        return g * (a[k] if k is not None else 1.0) / (1.0 + np.linalg.norm(g))

    def leave(t, a):
        return min(a[0] - x0, x1 - a[0], a[1] - y0, y1 - a[1])
    leave.terminal = True

    trajs = []
    m = int(np.ceil(np.sqrt(seeds))) if seeds > 0 else 0
    xs = x0 + (np.arange(m) + 0.5) * (x1 - x0) / max(m, 1)
    ys = y0 + (np.arange(m) + 0.5) * (y1 - y0) / max(m, 1)
    pts = [np.array([x, y]) for y in ys for x in xs][:seeds]
    for p in pts:
        if k is not None and p[k] <= 0:
            continue
        parts = []
        for sgn in (-1.0, 1.0):
            sol = solve_ivp(f, (0.0, sgn * span), p, rtol=1e-6, atol=1e-9,
                            events=leave, max_step=0.1)
            parts.append(sol.y.T if sgn > 0 else sol.y.T[::-1])
        trajs.append(np.vstack([parts[0], parts[1][1:]]))

    mask = None
    if variant is ModelVariant.COMPRESSIBLE2D:
        gx = np.linspace(x0, x1, 81)
        gy = np.linspace(y0, y1, 81)
        X, Y = np.meshgrid(gx, gy)
        rho = X ** 2 + Y ** 2
        m2 = 0.5 * (4 * rho - 1 - np.sqrt((2 * rho - 1) ** 2 + 8 * X ** 2))
        mask = (gx, gy, m2 < 0)
    labels = ("a1", "a2") if variant is ModelVariant.SHEAR2D else ("a2", "a3")
    return Portrait((x0, x1, y0, y1), trajs, eqs, 0.0 if k is not None else None, mask, labels)


# ------------------------------------------------------------------ auxiliary harnesses

@dataclass
class DispersionResult:
    k: np.ndarray
    roots: np.ndarray            # shape (n, 2)
    growth_rate: float
    max_residual: float
    small_k_rate: float | None   # peak of the fitted small-k parabola
    predicted_rate: float

    def __iter__(self):
        return iter((self.k, self.roots, self.growth_rate))


def dispersion_relation(a3_plus: float, k_samples) -> DispersionResult:
    """Roots of ``lam^2 + k^2 lam + (3 a3^2 - 1) k^2 = 0`` for each ``k``."""
    k = np.atleast_1d(np.asarray(k_samples, dtype=float))
    if k.size == 0:
        raise ContractViolation("need at least one wavenumber")
    c = 3.0 * a3_plus * a3_plus - 1.0
    B = k * k
    C = c * k * k
    disc = np.sqrt((B * B - 4 * C).astype(complex))
    sgn = np.where(B >= 0, 1.0, -1.0)
    q = -0.5 * (B + sgn * disc)
    with np.errstate(divide="ignore", invalid="ignore"):
        r2 = np.where(q != 0, C / q, 0.0)
    roots = np.column_stack([q, r2])
    roots = np.take_along_axis(roots, np.argsort(-roots.real, axis=1), axis=1)
    res = np.abs(roots ** 2 + B[:, None] * roots + C[:, None])
    small = k[(k > 0) & (k <= 0.01)]
    rate = None
    if small.size >= 2 and c < 0:
        lam = roots[(k > 0) & (k <= 0.01), 0].real
        # fit lam + k^2/2 = beta k, whose parabola peaks at beta^2/2
        beta = float(np.sum(small * (lam + 0.5 * small ** 2)) / np.sum(small ** 2))
        rate = 0.5 * beta * beta
    return DispersionResult(k, roots, float(np.max(roots.real)), float(np.max(res)),
                            rate, 0.5 * (1.0 - 3.0 * a3_plus * a3_plus))


def hamiltonian_check(a_minus, a_plus, pot: ElasticPotential = W0, gamma: float = 1.0,
                      variant: ModelVariant | None = None) -> bool:
    """Necessary level condition ``W(a-) = W(a+)`` for a capillarity connection.

    Equality is necessary only; it does not imply that a connection exists.
    """
    a_minus = np.atleast_1d(np.asarray(a_minus, dtype=float))
    a_plus = np.atleast_1d(np.asarray(a_plus, dtype=float))
    if gamma == 0:
        raise ContractViolation("capillarity coefficient must be nonzero")
    if variant is None:
        variant = {1: ModelVariant.COMPRESSIBLE1D, 2: ModelVariant.COMPRESSIBLE2D,
                   3: ModelVariant.COMPRESSIBLE3D}[a_minus.size]
    for a in (a_minus, a_plus):
        if np.max(np.abs(grad_potential(a, pot, variant))) > 1e-9:
            raise ContractViolation(f"{a} is not a critical point of W")
    return bool(abs(eval_potential(a_minus, pot, variant) - eval_potential(a_plus, pot, variant)) <= 1e-9)


@dataclass
class UCCandidate:
    alpha: float
    s: float
    a_minus: np.ndarray
    a_plus: np.ndarray
    ell_tilde: int
    status: str          # "not_saddle_saddle" | "no_connection" | "connection"
    miss_distance: float = float("nan")


@dataclass
class UCReport:
    n_parameters: int = 0
    n_pairs: int = 0
    candidates: list[UCCandidate] = field(default_factory=list)

    @property
    def connections(self) -> list[UCCandidate]:
        return [c for c in self.candidates if c.status == "connection"]


def _uc_shoot(P, s, a_minus, a_plus, others, opts):
    J = profile_flow_jacobian(a_minus, P, s)
    w, V = _eig_dirs(J, +1)
    best = np.inf
    for j in range(V.shape[1]):
        for sign in (1.0, -1.0):
            a0 = a_minus + sign * 1e-6 * V[:, j]
            sol, ok, miss = _integrate(P, s, a0, +1, a_plus, others, opts)
            best = min(best, miss)
    return best


def undercompressive_search(grid, pot: ElasticPotential = W0, variant: ModelVariant = ModelVariant.SHEAR2D,
                            found_tol: float = 1e-4) -> UCReport:
    """Look for undercompressive shear connections over ``(alpha, s)`` pairs.

    Every ordered pair of distinct equilibria is typed; pairs with index < 1
    whose endstates are both saddles are shot at from the left saddle's
    unstable manifold and the closest approach to the right saddle recorded.
    """
    if variant is not ModelVariant.SHEAR2D:
        raise ContractViolation("the search is implemented for the planar shear model")
    report = UCReport()
    opts = ProfileOptions(rtol=1e-8, atol=1e-10, z_max=200.0)
    for alpha1, s in grid:
        report.n_parameters += 1
        sigma = s * s
        alpha = np.array([float(alpha1), 0.0])
        pts = rh_solve(alpha, sigma, variant).points
        info = {i: classify_equilibrium(p, alpha, sigma, pot, variant) for i, p in enumerate(pts)}
        for i, am in enumerate(pts):
            for j, ap in enumerate(pts):
                if i == j:
                    continue
                report.n_pairs += 1
                cand = shock_type(am, ap, s, pot, variant)
                if cand.shock_class is not ShockClass.UNDERCOMPRESSIVE:
                    continue
                if not (info[i].morse is Morse.SADDLE and info[j].morse is Morse.SADDLE):
                    report.candidates.append(UCCandidate(alpha1, s, am, ap, cand.ell_tilde,
                                                         "not_saddle_saddle"))
                    continue
                P = PhiPotential(am, sigma, pot, variant)
                others = [p for t, p in enumerate(pts) if t not in (i, j)]
                miss = _uc_shoot(P, s, am, ap, others, opts)
                status = "connection" if miss < found_tol else "no_connection"
                report.candidates.append(UCCandidate(alpha1, s, am, ap, cand.ell_tilde, status, miss))
    return report
