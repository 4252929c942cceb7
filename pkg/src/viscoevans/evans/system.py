"""Integrated linearized systems ``Z' = A(z, lambda) Z`` about a profile."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractViolation
from ..model import ElasticPotential, ModelVariant, W0, embed
from ..profile import ProfileGrid
from . import _kernels_py as _codes
from ._backend import kernels

__all__ = ["EvansSystem", "assemble_evans", "variant_code"]

_CODES = {
    ModelVariant.SHEAR2D: _codes.SHEAR2D,
    ModelVariant.SHEAR1D: _codes.SHEAR1D,
    ModelVariant.COMPRESSIBLE3D: _codes.COMP3D,
    ModelVariant.COMPRESSIBLE2D: _codes.COMP2D,
    ModelVariant.COMPRESSIBLE1D: _codes.COMP1D,
    ModelVariant.TRANSVERSE: _codes.TRANSVERSE,
}


def variant_code(variant: ModelVariant) -> int:
    return _CODES[variant]


def _grid_strain(grid: ProfileGrid) -> ModelVariant:
    if grid.variant is ModelVariant.TRANSVERSE:
        return ModelVariant.COMPRESSIBLE2D
    return grid.variant


def _check_pairing(variant: ModelVariant, strain: ModelVariant) -> None:
    if variant.is_shear:
        ok = strain.is_shear and strain.strain_dim <= variant.strain_dim
    elif variant is ModelVariant.TRANSVERSE:
        ok = strain in (ModelVariant.COMPRESSIBLE2D, ModelVariant.COMPRESSIBLE1D)
    elif variant is ModelVariant.COMPRESSIBLE3D:
        ok = strain.is_compressible
    else:
        ok = strain.is_compressible and strain.strain_dim <= variant.strain_dim
    if not ok:
        raise ContractViolation(f"a {strain.tag} profile cannot drive the {variant.tag} system")


def _lift_values(rows, strain):
    return np.array([embed(r, strain) for r in np.atleast_2d(rows)])


def _lift_rates(rows, strain):
    base = embed(np.zeros(strain.strain_dim), strain)
    return np.array([embed(r, strain) - base for r in np.atleast_2d(rows)])


@dataclass(frozen=True, eq=False)
class EvansSystem:
    """Profile-coefficient matrix ``A(z, lambda)`` for one variant.

    The profile is stored as full three-component arrays; outside the grid
    the endstates take over, so ``A`` reduces to the limits ``A_-`` and
    ``A_+`` there.
    """

    variant: ModelVariant
    grid: ProfileGrid
    pot: ElasticPotential = W0
    zs: np.ndarray = field(init=False, repr=False)
    A3: np.ndarray = field(init=False, repr=False)
    Ap3: np.ndarray = field(init=False, repr=False)
    App3: np.ndarray = field(init=False, repr=False)
    a_minus: np.ndarray = field(init=False, repr=False)
    a_plus: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = self.grid
        if g.s == 0:
            raise ContractViolation("zero shock speed")
        strain = _grid_strain(g)
        _check_pairing(self.variant, strain)
        A3 = _lift_values(g.a_vals, strain)
        if self.variant.is_compressible and np.min(A3[:, 2]) <= 0:
            raise ContractViolation("compressible profile leaves a3 > 0")
        put = object.__setattr__
        put(self, "zs", np.ascontiguousarray(g.z, dtype=float))
        put(self, "A3", np.ascontiguousarray(A3))
        put(self, "Ap3", np.ascontiguousarray(_lift_rates(g.a_prime, strain)))
        put(self, "App3", np.ascontiguousarray(_lift_rates(g.a_second, strain)))
        put(self, "a_minus", embed(g.alpha, strain))
        put(self, "a_plus", embed(g.a_plus, strain))

    @property
    def s(self) -> float:
        return float(self.grid.s)

    @property
    def N(self) -> int:
        return self.variant.evans_dim

    @property
    def code(self) -> int:
        return _CODES[self.variant]

    @property
    def mus(self) -> tuple[float, float, float]:
        return (float(self.pot.mu1), float(self.pot.mu2), float(self.pot.mu3))

    @property
    def z_min(self) -> float:
        return float(self.zs[0])

    @property
    def z_max(self) -> float:
        return float(self.zs[-1])

    def profile_at(self, z: float):
        return kernels.interpolate(float(z), self.zs, self.A3, self.Ap3, self.App3,
                                   self.a_minus, self.a_plus)

    def matrix(self, z: float, lam: complex) -> np.ndarray:
        a, ap = self.profile_at(z)
        return kernels.assemble(self.code, self.mus, self.s, complex(lam), a, ap)

    def limit(self, lam: complex, side) -> np.ndarray:
        """Endstate matrix: ``A_+`` for the plus side, ``A_-`` otherwise."""
        a = self.a_plus if _is_plus(side) else self.a_minus
        return kernels.assemble(self.code, self.mus, self.s, complex(lam), a, np.zeros(3))

    def limits(self, lam: complex) -> tuple[np.ndarray, np.ndarray]:
        return self.limit(lam, "plus"), self.limit(lam, "minus")

    def evaluator(self, lam: complex):
        lam = complex(lam)
        return lambda z: self.matrix(z, lam)

    def kernel_args(self):
        return (self.zs, self.A3, self.Ap3, self.App3, self.a_minus, self.a_plus)


def _is_plus(side) -> bool:
    name = getattr(side, "value", side)
    return str(name).lower() in ("plus", "+")


def assemble_evans(variant: ModelVariant, grid: ProfileGrid, pot: ElasticPotential, lam: complex):
    """``z -> A(z, lam)`` for the integrated eigenvalue problem about ``grid``."""
    return EvansSystem(variant, grid, pot).evaluator(lam)
