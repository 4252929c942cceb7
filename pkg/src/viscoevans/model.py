"""Elastic potentials, viscosity tensors, fluxes and characteristic data.

Every planar variant is realised as a restriction of one three-component
strain ``a = (a1, a2, a3)``: the variant picks which components are free and
pins the others (shear pins ``a3 = 1``; the lower-dimensional compressible
models pin the in-plane shears to zero).  Potentials, gradients and Hessians
are therefore computed once in three dimensions and then restricted.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ContractViolation, DomainError

__all__ = [
    "ModelVariant",
    "ViscosityKind",
    "ElasticPotential",
    "W0",
    "StateV",
    "CharacteristicData",
    "eval_potential",
    "grad_potential",
    "hess_potential",
    "characteristics",
    "entropy_pair",
    "flux",
    "flux_jacobian",
    "viscosity_matrix",
    "invariants",
    "cofactor",
    "general_W_derivative",
    "lame_constants",
    "dissipation_check",
    "embed",
    "profile_scaling",
    "a3_index",
]


class ModelVariant(enum.Enum):
    """Planar system selector: ``(tag, strain_dim, evans_dim)``."""

    COMPRESSIBLE3D = ("Compressible3D", 3, 9)
    COMPRESSIBLE2D = ("Compressible2D", 2, 6)
    SHEAR2D = ("Shear2D", 2, 6)
    SHEAR1D = ("Shear1D", 1, 3)
    COMPRESSIBLE1D = ("Compressible1D", 1, 3)
    TRANSVERSE = ("Transverse", 1, 3)

    @property
    def tag(self) -> str:
        return self.value[0]

    @property
    def strain_dim(self) -> int:
        return self.value[1]

    @property
    def evans_dim(self) -> int:
        return self.value[2]

    @property
    def is_shear(self) -> bool:
        return self in (ModelVariant.SHEAR2D, ModelVariant.SHEAR1D)

    @property
    def is_compressible(self) -> bool:
        return not self.is_shear

    @classmethod
    def from_name(cls, name: str) -> "ModelVariant":
        key = name.strip().lower().replace("_", "").replace("-", "")
        aliases = {
            "compressible3d": cls.COMPRESSIBLE3D, "comp3d": cls.COMPRESSIBLE3D,
            "compressible2d": cls.COMPRESSIBLE2D, "comp2d": cls.COMPRESSIBLE2D,
            "shear2d": cls.SHEAR2D, "shear": cls.SHEAR2D,
            "shear1d": cls.SHEAR1D,
            "compressible1d": cls.COMPRESSIBLE1D, "comp1d": cls.COMPRESSIBLE1D,
            "transverse": cls.TRANSVERSE,
        }
        try:
            return aliases[key]
        except KeyError:
            raise ContractViolation(f"unknown model variant {name!r}") from None


class ViscosityKind(enum.Enum):
    Z1 = "Z1"
    Z2 = "Z2"


# free 3D components per variant and the values pinned on the rest
_LAYOUT = {
    ModelVariant.COMPRESSIBLE3D: ((0, 1, 2), {}),
    ModelVariant.COMPRESSIBLE2D: ((1, 2), {0: 0.0}),
    ModelVariant.COMPRESSIBLE1D: ((2,), {0: 0.0, 1: 0.0}),
    ModelVariant.SHEAR2D: ((0, 1), {2: 1.0}),
    ModelVariant.SHEAR1D: ((0,), {1: 0.0, 2: 1.0}),
}


def _layout(variant: ModelVariant):
    try:
        return _LAYOUT[variant]
    except KeyError:
        raise ContractViolation(
            "the transverse system has no standalone strain space; "
            "use Compressible2D for its profile and endstates"
        ) from None


def _as_strain(a, variant: ModelVariant) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(a, dtype=float))
    idx, _ = _layout(variant)
    if arr.shape != (len(idx),):
        raise ContractViolation(
            f"{variant.tag} expects a strain vector of length {len(idx)}, got shape {arr.shape}"
        )
    return arr


def embed(a, variant: ModelVariant) -> np.ndarray:
    """Lift a variant strain vector to the full ``(a1, a2, a3)``."""
    arr = _as_strain(a, variant)
    idx, fixed = _layout(variant)
    full = np.empty(3)
    full[list(idx)] = arr
    for k, v in fixed.items():
        full[k] = v
    return full


def a3_index(variant: ModelVariant) -> int | None:
    """Position of the normal strain inside the variant's coordinates, if free."""
    idx, _ = _layout(variant)
    return idx.index(2) if 2 in idx else None


def profile_scaling(variant: ModelVariant) -> np.ndarray:
    """Diagonal of the viscosity scaling in the profile flow (1 for shears, 2 for a3)."""
    idx, _ = _layout(variant)
    if variant.is_shear:
        return np.ones(len(idx))
    return np.array([2.0 if i == 2 else 1.0 for i in idx])


@dataclass(frozen=True)
class ElasticPotential:
    """Planar potential ``W = mu1|a|^4/4 + mu2|a|^2/2 - a3^2/2 + mu3(a3-1)^2/2 + c_offset``.

    The rest-state potential ``W0(a) = (|a|^2-1)^2/4 + (a1^2+a2^2)/2`` is the
    member ``(1, 0, 0, 1/4)``; see :data:`W0`.
    """

    mu1: float = 1.0
    mu2: float = 0.0
    mu3: float = 0.0
    c_offset: float = 0.0

    @classmethod
    def from_genform(cls, c2: float, c3: float, c_offset: float = 0.25) -> "ElasticPotential":
        """Build from the quadratic/cubic invariant corrections ``(c2, c3)``."""
        return cls(1.0 + 4.0 * c2, -4.0 * c2, 2.0 * c3, c_offset)

    def to_genform(self) -> tuple[float, float]:
        """Inverse of :meth:`from_genform`; requires ``mu1 + mu2 == 1``."""
        if not np.isclose(self.mu1 + self.mu2, 1.0, rtol=0, atol=1e-12):
            raise ContractViolation("only potentials with mu1 + mu2 = 1 come from (c2, c3)")
        return (-self.mu2 / 4.0, self.mu3 / 2.0)

    @property
    def is_w0(self) -> bool:
        return self.mu1 == 1.0 and self.mu2 == 0.0 and self.mu3 == 0.0

    def convex_at_identity(self) -> bool:
        h = self.hessian3(np.array([0.0, 0.0, 1.0]))
        return bool(np.all(np.linalg.eigvalsh(h) > 0))

    # three-component kernels
    def energy3(self, a: np.ndarray) -> float:
        rho = float(a @ a)
        return (0.25 * self.mu1 * rho * rho + 0.5 * self.mu2 * rho
                - 0.5 * a[2] ** 2 + 0.5 * self.mu3 * (a[2] - 1.0) ** 2 + self.c_offset)

    def gradient3(self, a: np.ndarray) -> np.ndarray:
        rho = float(a @ a)
        g = (self.mu1 * rho + self.mu2) * a
        g[2] += self.mu3 * (a[2] - 1.0) - a[2]
        return g

    def hessian3(self, a: np.ndarray) -> np.ndarray:
        rho = float(a @ a)
        h = (self.mu1 * rho + self.mu2) * np.eye(3) + 2.0 * self.mu1 * np.outer(a, a)
        h[2, 2] += self.mu3 - 1.0
        return h


W0 = ElasticPotential(1.0, 0.0, 0.0, 0.25)
"""Rest-state potential; zero energy at the identity strain."""


@dataclass(frozen=True)
class StateV:
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", np.atleast_1d(np.asarray(self.a, dtype=float)))
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=float)))
        if self.a.shape != self.b.shape:
            raise ContractViolation("strain and velocity must have equal length")

    def feasible(self, variant: ModelVariant) -> bool:
        k = a3_index(variant)
        return True if k is None else bool(self.a[k] > 0)


@dataclass(frozen=True)
class CharacteristicData:
    m: np.ndarray
    r: np.ndarray  # columns are eigenvectors
    gn_flags: tuple[str, ...]

    @property
    def strictly_hyperbolic(self) -> bool:
        m = np.sort(self.m)
        if np.any(m <= 0):
            return False
        scale = 1.0 + np.max(np.abs(m))
        return bool(np.all(np.diff(m) > 1e-10 * scale))

    @property
    def speeds(self) -> np.ndarray:
        """Characteristic speeds of the first-order flux, ``-sqrt(m)`` then ``+sqrt(m)``."""
        root = np.sqrt(self.m.astype(complex))
        return np.concatenate([-root, root])


def eval_potential(a, pot: ElasticPotential, variant: ModelVariant) -> float:
    return pot.energy3(embed(a, variant))


def grad_potential(a, pot: ElasticPotential, variant: ModelVariant) -> np.ndarray:
    idx, _ = _layout(variant)
    return pot.gradient3(embed(a, variant))[list(idx)]


def hess_potential(a, pot: ElasticPotential, variant: ModelVariant) -> np.ndarray:
    idx, _ = _layout(variant)
    h = pot.hessian3(embed(a, variant))
    return h[np.ix_(idx, idx)]


def _normalize(v: np.ndarray) -> np.ndarray:
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 1e-14)
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def _closed_forms(full: np.ndarray, variant: ModelVariant):
    a1, a2, a3 = full
    rho = float(full @ full)
    if variant is ModelVariant.SHEAR2D:
        rho = a1 * a1 + a2 * a2  # in-plane; a3 is pinned
        m = [1.0 + rho, 1.0 + 3.0 * rho]
        r = [np.array([-a2, a1]), np.array([a1, a2])]
        flags = ("linearly_degenerate", "genuinely_nonlinear")
    elif variant is ModelVariant.SHEAR1D:
        m, r, flags = [1.0 + 3.0 * a1 * a1], [np.array([1.0])], ("unknown",)
    elif variant is ModelVariant.COMPRESSIBLE1D:
        m, r, flags = [3.0 * a3 * a3 - 1.0], [np.array([1.0])], ("unknown",)
    else:
        p = a1 * a1 + a2 * a2
        disc = np.sqrt((2.0 * rho - 1.0) ** 2 + 8.0 * p)
        m2 = 0.5 * (4.0 * rho - 1.0 - disc)
        m3 = 0.5 * (4.0 * rho - 1.0 + disc)
        tail = lambda mj: 3.0 * rho - 2.0 * a3 * a3 - mj  # noqa: E731
        if variant is ModelVariant.COMPRESSIBLE3D:
            m = [rho, m2, m3]
            r = [np.array([a2, -a1, 0.0]),
                 np.array([-2 * a1 * a3, -2 * a2 * a3, tail(m2)]),
                 np.array([-2 * a1 * a3, -2 * a2 * a3, tail(m3)])]
            flags = ("linearly_degenerate", "unknown", "genuinely_nonlinear_near_rest")
        else:
            m = [m2, m3]
            r = [np.array([-2 * a2 * a3, tail(m2)]), np.array([-2 * a2 * a3, tail(m3)])]
            flags = ("unknown", "genuinely_nonlinear_near_rest")
    return np.array(m, dtype=float), r, flags


def characteristics(a, pot: ElasticPotential, variant: ModelVariant) -> CharacteristicData:
    """Squared characteristic speeds and eigenvectors of the Hessian.

    Closed forms are used for the rest-state potential.  Whenever a closed-form
    eigenvector degenerates (repeated eigenvalues, axis points) the matching
    column of a numerical eigendecomposition is substituted.
    """
    M = hess_potential(a, pot, variant)
    w, V = np.linalg.eigh(M)
    n = M.shape[0]
    if not pot.is_w0:
        cols = [_normalize(V[:, j]) for j in range(n)]
        return CharacteristicData(w, np.column_stack(cols), ("unknown",) * n)

    m, r, flags = _closed_forms(embed(a, variant), variant)
    used: set[int] = set()
    cols = []
    for mj, rj in zip(m, r):
        scale = 1.0 + abs(mj)
        nrm = np.linalg.norm(rj)
        ok = nrm > 1e-8 * scale and np.linalg.norm(M @ rj - mj * rj) <= 1e-10 * scale * nrm
        if ok:
            v = _normalize(rj)
        else:
            order = np.argsort(np.abs(w - mj))
            j = next(k for k in order if k not in used)
            used.add(j)
            v = V[:, j].copy()
            for c in cols:  # keep the basis orthonormal inside clusters
                v -= (c @ v) * c
            v = _normalize(v)
        cols.append(v)
    return CharacteristicData(m, np.column_stack(cols), flags)


def entropy_pair(V: StateV, pot: ElasticPotential, variant: ModelVariant) -> tuple[float, float]:
    """Entropy ``|b|^2/2 + W(a)`` and its flux ``-b . DW(a)``."""
    eta = 0.5 * float(V.b @ V.b) + eval_potential(V.a, pot, variant)
    q = -float(V.b @ grad_potential(V.a, pot, variant))
    return eta, q


def flux(V: StateV, pot: ElasticPotential, variant: ModelVariant) -> np.ndarray:
    """First-order flux ``G(a, b) = (-b, -DW(a))``."""
    return np.concatenate([-V.b, -grad_potential(V.a, pot, variant)])


def flux_jacobian(a, pot: ElasticPotential, variant: ModelVariant) -> np.ndarray:
    M = hess_potential(a, pot, variant)
    n = M.shape[0]
    z = np.zeros((n, n))
    return np.block([[z, -np.eye(n)], [-M, z]])


def viscosity_matrix(a, kind: ViscosityKind, variant: ModelVariant) -> np.ndarray:
    """Viscosity tensor acting on ``b_z`` in the variant's coordinates."""
    full = embed(a, variant)
    idx, _ = _layout(variant)
    if kind is ViscosityKind.Z1:
        B = np.diag([1.0, 1.0, 0.0]) + 2.0 * np.outer(full, full)
    else:
        if variant.is_compressible and full[2] <= 0:
            raise DomainError("Z2 viscosity requires a3 > 0")
        B = np.diag([1.0, 1.0, 2.0]) / full[2]
    return B[np.ix_(idx, idx)]


# ---- frame-indifferent potentials of a full deformation gradient ----

def invariants(F) -> tuple[float, float, float]:
    """``(|F|^2, |F F^T|^2, det F)``."""
    F = np.asarray(F, dtype=float)
    C = F @ F.T
    return float(np.sum(F * F)), float(np.sum(C * C)), float(np.linalg.det(F))


def cofactor(F) -> np.ndarray:
    """Cofactor matrix, defined for singular ``F`` too."""
    F = np.asarray(F, dtype=float)
    return np.cross(F[[1, 2, 0]], F[[2, 0, 1]])


def general_W_derivative(F, sigma_grad) -> np.ndarray:
    """``DW(F)`` for ``W(F) = sigma(|F|^2, |F F^T|^2, det F)`` given ``grad sigma``."""
    F = np.asarray(F, dtype=float)
    g = np.asarray(sigma_grad, dtype=float)
    if F.shape != (3, 3) or g.shape != (3,):
        raise ContractViolation("expected a 3x3 matrix and a 3-vector")
    return g[0] * 2.0 * F + g[1] * 4.0 * F @ F.T @ F + g[2] * cofactor(F)


@dataclass(frozen=True)
class LameResult:
    lam: float
    mu: float
    mu_nonnegative: bool
    bulk_nonnegative: bool

    def __iter__(self):
        return iter((self.lam, self.mu))


def lame_constants(sigma_grad, sigma_hess) -> LameResult:
    """Lame constants of the linearisation at the identity.

    ``sigma_grad`` and ``sigma_hess`` are evaluated at the identity invariants
    ``(3, 3, 1)``.
    """
    g = np.asarray(sigma_grad, dtype=float)
    H = np.asarray(sigma_hess, dtype=float)
    v = np.array([2.0, 4.0, 1.0])
    lam = float(v @ H @ v)
    mu = float(g @ np.array([0.0, 8.0, -2.0]))
    return LameResult(lam, mu, mu >= 0, 3 * lam + mu >= 0)


def dissipation_check(C, D, kind: ViscosityKind) -> float:
    """Return ``S(C, D) : D`` for the viscous stress of the given kind."""
    C = np.asarray(C, dtype=float)
    D = np.asarray(D, dtype=float)
    if kind is ViscosityKind.Z1:
        S = 0.5 * D
    else:
        try:
            np.linalg.cholesky(C)
        except np.linalg.LinAlgError:
            raise DomainError("C must be positive definite for Z2") from None
        Ci = np.linalg.inv(C)
        S = 0.5 * np.sqrt(np.linalg.det(C)) * Ci @ D @ Ci
    return float(np.sum(S * D))
