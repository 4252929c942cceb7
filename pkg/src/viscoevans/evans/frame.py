"""Polar-coordinate frames and evaluation of the Evans function."""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field

import numpy as np

from ..errors import ContractViolation, StiffFailure
from ._backend import kernels
from .kato import AnalyticBasisState, KatoContinuation, Side
from .system import EvansSystem

__all__ = [
    "SubspaceFrame",
    "FrameStats",
    "initialize_at_infinity",
    "drury_integrate",
    "wedge",
    "evaluate_D",
    "EvansEvaluation",
    "EvansFunction",
]


@dataclass(frozen=True)
class FrameStats:
    accepted: int = 0
    rejected: int = 0
    reorthonormalizations: int = 0
    max_drift: float = 0.0

    def __add__(self, other: "FrameStats") -> "FrameStats":
        return FrameStats(self.accepted + other.accepted, self.rejected + other.rejected,
                          self.reorthonormalizations + other.reorthonormalizations,
                          max(self.max_drift, other.max_drift))


@dataclass(frozen=True, eq=False)
class SubspaceFrame:
    """Orthonormal ``omega`` times the scalar ``exp(log_r)``, located at ``z``."""

    omega: np.ndarray
    log_r: complex
    side: Side
    z: float
    lam: complex
    stats: FrameStats = field(default_factory=FrameStats)

    @property
    def k(self) -> int:
        return self.omega.shape[1]

    def drift(self) -> float:
        G = self.omega.conj().T @ self.omega - np.eye(self.k)
        return float(np.max(np.abs(G))) if self.k else 0.0


def _qr_logdet(basis: np.ndarray):
    q, r = np.linalg.qr(basis)
    d = np.diag(r)
    ph = d / np.abs(d)
    return q * ph[None, :], complex(np.sum(np.log(np.abs(d))))


def initialize_at_infinity(sys: EvansSystem, basis, side, L: float, lam: complex | None = None) -> SubspaceFrame:
    """Frame at ``z = +L`` (plus) or ``z = -L`` (minus) carrying the decay factor.

    ``basis`` is an :class:`AnalyticBasisState` or a bare ``N x k`` matrix
    (then ``lam`` is required).
    """
    side = Side.coerce(side)
    if isinstance(basis, AnalyticBasisState):
        lam = basis.lam
        basis = basis.basis(side)
    elif lam is None:
        raise ContractViolation("lambda is needed with a bare basis")
    lam = complex(lam)
    basis = np.asarray(basis, dtype=complex)
    A = sys.limit(lam, side)
    omega, logdet = _qr_logdet(basis)
    tr = complex(np.trace(omega.conj().T @ A @ omega))
    if side is Side.PLUS:
        return SubspaceFrame(omega, logdet + tr * L, side, float(L), lam)
    return SubspaceFrame(omega, logdet - tr * L, side, -float(L), lam)


def drury_integrate(sys: EvansSystem, frame: SubspaceFrame, to_z: float, from_z: float | None = None,
                    atol: float = 1e-8, rtol: float = 1e-6, reorth_tol: float = 1e-8,
                    h0: float = 0.05) -> SubspaceFrame:
    """Advance the frame with ``W' = (I - W W*) A W`` and ``(log r)' = tr(W* A W)``."""
    z0 = frame.z if from_z is None else float(from_z)
    omega, logr, st = kernels.drury(sys.code, sys.mus, sys.s, frame.lam, *sys.kernel_args(),
                                    frame.omega, frame.log_r, z0, float(to_z),
                                    atol, rtol, h0, reorth_tol)
    acc, rej, nre, drift, status, zfail = st
    if status:
        raise StiffFailure(f"step size collapsed at z = {zfail:.6g} (lambda = {frame.lam})", zfail)
    stats = frame.stats + FrameStats(int(acc), int(rej), int(nre), float(drift))
    return SubspaceFrame(np.asarray(omega), complex(logr), frame.side, float(to_z), frame.lam, stats)


def wedge(plus: SubspaceFrame, minus: SubspaceFrame) -> complex:
    """Log of ``r+ r- det[omega+ | omega-]`` for frames at the same point."""
    if plus.z != minus.z:
        raise ContractViolation("frames must sit at the same z")
    det = np.linalg.det(np.hstack([plus.omega, minus.omega]))
    if det == 0:
        return complex(-np.inf)
    return plus.log_r + minus.log_r + cmath.log(det)


@dataclass(frozen=True, eq=False)
class EvansEvaluation:
    lam: complex
    log_value: complex
    plus: SubspaceFrame
    minus: SubspaceFrame

    @property
    def value(self) -> complex:
        lv = self.log_value
        if lv.real == -np.inf:
            return 0j
        return cmath.exp(lv)

    @property
    def max_drift(self) -> float:
        return max(self.plus.stats.max_drift, self.minus.stats.max_drift)

    @property
    def stats(self) -> FrameStats:
        return self.plus.stats + self.minus.stats


class EvansFunction:
    """Callable ``lam -> D(lam)`` for one system.

    ``match_z`` is the interior point where the two frames meet.
    ``basis_scale`` multiplies the first plus-side basis vector before
    integration.
    """

    def __init__(self, sys: EvansSystem, continuation: KatoContinuation | None = None,
                 match_z: float = 0.0, atol: float = 1e-8, rtol: float = 1e-6,
                 reorth_tol: float = 1e-8, basis_scale: complex = 1.0, anchor: float = 1.0):
        self.sys = sys
        self.continuation = continuation or KatoContinuation(sys.limits, anchor=anchor)
        if sum(self.continuation.dims) != sys.N:
            raise ContractViolation("continuation does not match the system dimension")
        self.match_z = float(match_z)
        self.atol, self.rtol, self.reorth_tol = atol, rtol, reorth_tol
        self.basis_scale = complex(basis_scale)
        self.evaluations = 0

    @property
    def dims(self) -> tuple[int, int]:
        return self.continuation.dims

    def evaluate(self, lam: complex) -> EvansEvaluation:
        sys = self.sys
        state = self.continuation.state(lam)
        bp = state.basis_plus
        if self.basis_scale != 1 and bp.shape[1]:
            bp = bp.copy()
            bp[:, 0] *= self.basis_scale
        fp = initialize_at_infinity(sys, bp, Side.PLUS, sys.z_max, state.lam)
        fm = initialize_at_infinity(sys, state.basis_minus, Side.MINUS, -sys.z_min, state.lam)
        kw = dict(atol=self.atol, rtol=self.rtol, reorth_tol=self.reorth_tol)
        fp = drury_integrate(sys, fp, self.match_z, **kw)
        fm = drury_integrate(sys, fm, self.match_z, **kw)
        self.evaluations += 1
        return EvansEvaluation(state.lam, wedge(fp, fm), fp, fm)

    def log(self, lam: complex) -> complex:
        return self.evaluate(lam).log_value

    def __call__(self, lam: complex) -> complex:
        return self.evaluate(lam).value


def evaluate_D(sys: EvansSystem, lam: complex, **kwargs) -> complex:
    """One-off evaluation; build an :class:`EvansFunction` to reuse bases across calls."""
    return EvansFunction(sys, **kwargs)(lam)
