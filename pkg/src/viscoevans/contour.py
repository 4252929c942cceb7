"""Winding-number stability test on the right half-disk boundary.

The contour is the boundary of ``{|lambda| <= R, Re lambda >= 0}``, with the
origin cut out by a small right-half arc.  It is traversed counterclockwise
starting at ``lambda = R``.  An upper-half parameter ``t`` in ``[0, 1]``
covers the large arc, then the imaginary axis (quadratic in modulus), then
the small arc.  The lower half is the mirror image traversed backwards, so
the closed loop has parameter ``u`` in ``[0, 2]``.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .equilibria import ShockCandidate, ShockClass
from .errors import ContractViolation, FitFailure

__all__ = [
    "ContourSpec",
    "AsymptoticFit",
    "RadiusChoice",
    "ContourReport",
    "Verdict",
    "VerdictKind",
    "fit_asymptotics",
    "choose_radius",
    "mesh_contour",
    "contour_point",
    "winding_number",
    "verdict",
]

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ContourSpec:
    R: float = 2.0
    n_init: int = 20
    max_step_change: float = 0.2
    min_modulus: float = 1e-4
    quadratic_mesh: bool = True
    max_depth: int = 12

    def __post_init__(self):
        if not self.R > self.min_modulus > 0:
            raise ContractViolation("need R > min_modulus > 0")
        if self.n_init < 8:
            raise ContractViolation("n_init must be at least 8")

    @property
    def half_intervals(self) -> int:
        return (self.n_init + 1) // 2

    def breakdown(self) -> tuple[int, int, int]:
        """Intervals on the large arc, the axis and the small arc (upper half)."""
        m = self.half_intervals
        small = max(1, m // 10)
        arc = max(2, int(round(0.4 * m)))
        return arc, m - arc - small, small

    def breakpoints(self) -> tuple[float, float]:
        arc, axis, small = self.breakdown()
        m = arc + axis + small
        return arc / m, (arc + axis) / m


def contour_point(spec: ContourSpec, u: float) -> complex:
    """Point of the closed contour at parameter ``u`` in ``[0, 2]``."""
    if u > 1.0:
        return contour_point(spec, 2.0 - u).conjugate()
    ta, tb = spec.breakpoints()
    R, eps = spec.R, spec.min_modulus
    if u <= ta:
        th = 0.5 * math.pi * u / ta
        return complex(R * math.cos(th), R * math.sin(th)) if u < ta else complex(0.0, R)
    if u <= tb:
        w = (u - ta) / (tb - ta)
        frac = (1.0 - w) ** 2 if spec.quadratic_mesh else 1.0 - w
        return complex(0.0, eps + (R - eps) * frac)
    th = 0.5 * math.pi * (1.0 - u) / (1.0 - tb)
    if u >= 1.0:
        return complex(eps, 0.0)
    return complex(eps * math.cos(th), eps * math.sin(th))


def _initial_params(spec: ContourSpec) -> list[float]:
    m = spec.half_intervals
    upper = [i / m for i in range(m + 1)]
    return upper + [2.0 - t for t in reversed(upper[:-1])]


def mesh_contour(spec: ContourSpec) -> list[complex]:
    """Initial closed mesh; the first point is repeated at the end."""
    return [contour_point(spec, u) for u in _initial_params(spec)]


@dataclass(frozen=True)
class AsymptoticFit:
    """``log D ~ fit_log_c + fit_alpha sqrt(lambda)`` on large real ``lambda``."""

    fit_log_c: float
    fit_alpha: float
    max_rel_err_on_contour: float = float("nan")
    residual: float = 0.0
    phase: float = 0.0

    def log_model(self, lam: complex) -> complex:
        return self.fit_log_c + 1j * self.phase + self.fit_alpha * cmath.sqrt(lam)


def _logger(evaluator):
    lg = getattr(evaluator, "log", None)
    if lg is not None:
        return lg

    def log_of(lam):
        v = complex(evaluator(lam))
        return complex(-math.inf, 0.0) if v == 0 else cmath.log(v)
    return log_of


def _unwrap(phases):
    return np.unwrap(np.asarray(phases, dtype=float))


def fit_asymptotics(evaluator, lambda_list) -> AsymptoticFit:
    """Least-squares line of ``log D`` against ``sqrt(lambda)`` over real samples."""
    lams = np.asarray(lambda_list, dtype=float)
    if lams.size < 2 or np.any(lams <= 0) or np.any(np.diff(lams) <= 0):
        raise FitFailure("need at least two increasing positive real samples")
    logf = _logger(evaluator)
    logs = [complex(logf(lam)) for lam in lams]
    if any(not math.isfinite(v.real) for v in logs):
        raise FitFailure("D vanishes at a fit sample")
    x = np.sqrt(lams)
    y = np.array([v.real for v in logs])
    X = np.column_stack([np.ones_like(x), x])
    coef, *_ = np.linalg.lstsq(X, y, rcond=None)
    res = float(np.max(np.abs(X @ coef - y)))
    ph = _unwrap([v.imag for v in logs])
    return AsymptoticFit(float(coef[0]), float(coef[1]), float("nan"), res, float(np.mean(ph)))


def _probe_error(logf, fit: AsymptoticFit, R: float, probes: int) -> float:
    worst = 0.0
    for i in range(probes):
        th = -0.5 * math.pi + math.pi * i / (probes - 1)
        lam = R * cmath.exp(1j * th)
        lv = complex(logf(lam))
        if not math.isfinite(lv.real):
            return math.inf
        d = lv.real - fit.log_model(lam).real
        worst = max(worst, abs(math.expm1(d)))
    return worst


@dataclass(frozen=True)
class RadiusChoice:
    R: float | None
    fit: AsymptoticFit | None
    max_rel_err: float
    tried: tuple = ()

    @property
    def ok(self) -> bool:
        return self.R is not None


def choose_radius(evaluator, fit: AsymptoticFit | None = None, R_start: float = 2.0,
                  tol: float = 0.2, R_max: float = 1024.0, probes: int = 9,
                  fit_samples: int = 6) -> RadiusChoice:
    """Smallest doubling of ``R_start`` whose arc matches the asymptotic model.

    Without a fixed ``fit`` one is refitted for each radius on real samples
    spread geometrically over ``[R, 4R]``.
    """
    logf = _logger(evaluator)
    R = float(R_start)
    tried = []
    last = None
    while R <= R_max:
        f = fit
        if f is None:
            try:
                f = fit_asymptotics(evaluator, np.geomspace(R, 4 * R, fit_samples))
            except FitFailure:
                tried.append((R, math.inf))
                R *= 2.0
                continue
        err = _probe_error(logf, f, R, probes)
        tried.append((R, err))
        f = AsymptoticFit(f.fit_log_c, f.fit_alpha, err, f.residual, f.phase)
        last = f
        if err < tol:
            return RadiusChoice(R, f, err, tuple(tried))
        R *= 2.0
    return RadiusChoice(None, last, tried[-1][1] if tried else math.inf, tuple(tried))


class VerdictKind(enum.Enum):
    STABLE = "Stable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Verdict:
    kind: VerdictKind
    winding: int | None = None
    reason: str = ""

    def __str__(self) -> str:
        if self.kind is VerdictKind.UNSTABLE:
            return f"Unstable({self.winding})"
        if self.kind is VerdictKind.INCONCLUSIVE:
            return f"Inconclusive({self.reason})"
        return "Stable"

    @classmethod
    def parse(cls, text: str) -> "Verdict":
        text = text.strip()
        if text == "Stable":
            return cls(VerdictKind.STABLE)
        if text.startswith("Unstable(") and text.endswith(")"):
            return cls(VerdictKind.UNSTABLE, int(text[9:-1]))
        if text.startswith("Inconclusive(") and text.endswith(")"):
            return cls(VerdictKind.INCONCLUSIVE, None, text[13:-1])
        raise ValueError(f"not a verdict: {text!r}")


@dataclass
class ContourReport:
    spec: ContourSpec
    samples: list = field(default_factory=list)      # (u, lambda, log D) in traversal order
    refinements: int = 0
    winding: int | None = None
    verdict: Verdict | None = None
    max_rel_step: float = float("nan")
    mean_rel_step: float = float("nan")
    indent_phase: float = float("nan")
    upper_phase: float = float("nan")
    evaluations: int = 0
    reason: str = ""
    fit: AsymptoticFit | None = None

    @property
    def n_points(self) -> int:
        return max(len(self.samples) - 1, 0)

    @property
    def values(self) -> np.ndarray:
        return np.array([cmath.exp(lv) if math.isfinite(lv.real) else 0j for _, _, lv in self.samples])

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([lam for _, lam, _ in self.samples])

    @property
    def ok(self) -> bool:
        return self.winding is not None


def _rel_change(l0: complex, l1: complex) -> float:
    if not (math.isfinite(l0.real) and math.isfinite(l1.real)):
        return math.inf
    d = l1 - l0
    if d.real > 700:
        return math.inf
    return abs(cmath.exp(d) - 1.0)


def _dphase(l0: complex, l1: complex) -> float:
    return math.remainder(l1.imag - l0.imag, _TWO_PI)


def winding_number(evaluator, spec: ContourSpec = ContourSpec(), map_fn=map) -> ContourReport:
    """Count zeros of ``evaluator`` inside the contour by summing phase increments.

    Any step whose relative change exceeds ``spec.max_step_change`` is
    bisected in the contour parameter, up to ``spec.max_depth`` times.
    ``map_fn`` evaluates batches of ``lambda`` (a parallel map can be passed).
    """
    logf = _logger(evaluator)
    report = ContourReport(spec)

    def batch(us):
        lams = [contour_point(spec, u) for u in us]
        logs = list(map_fn(logf, lams))
        report.evaluations += len(lams)
        return [(u, lam, complex(lv)) for u, lam, lv in zip(us, lams, logs)]

    params = _initial_params(spec)
    pts = batch(params[:-1])
    pts.append((2.0, pts[0][1], pts[0][2]))
    depth = [0] * (len(pts) - 1)  # bisection depth of each interval
    while True:
        bad = [i for i in range(len(pts) - 1)
               if _rel_change(pts[i][2], pts[i + 1][2]) > spec.max_step_change]
        if not bad:
            break
        if any(depth[i] >= spec.max_depth for i in bad):
            report.samples = pts
            report.reason = "refinement depth exhausted"
            report.verdict = Verdict(VerdictKind.INCONCLUSIVE, None, report.reason)
            return report
        mids = batch([0.5 * (pts[i][0] + pts[i + 1][0]) for i in bad])
        report.refinements += len(bad)
        new_pts, new_depth = [], []
        j = 0
        for i in range(len(pts) - 1):
            new_pts.append(pts[i])
            if j < len(bad) and bad[j] == i:
                new_pts.append(mids[j])
                new_depth += [depth[i] + 1, depth[i] + 1]
                j += 1
            else:
                new_depth.append(depth[i])
        new_pts.append(pts[-1])
        pts, depth = new_pts, new_depth
    report.samples = pts
    logs = [lv for _, _, lv in pts]
    top = max(lv.real for lv in logs)
    if any(lv.real < top + math.log(1e-13) for lv in logs):
        report.reason = "D nearly vanishes on the contour"
        report.verdict = Verdict(VerdictKind.INCONCLUSIVE, None, report.reason)
        return report
    steps = [_rel_change(a, b) for a, b in zip(logs[:-1], logs[1:])]
    incs = [_dphase(a, b) for a, b in zip(logs[:-1], logs[1:])]
    total = sum(incs)
    report.winding = int(round(total / _TWO_PI))
    report.max_rel_step = float(max(steps))
    report.mean_rel_step = float(np.mean(steps))
    _, tb = spec.breakpoints()
    report.indent_phase = float(sum(d for (u0, _, _), (u1, _, _), d in zip(pts[:-1], pts[1:], incs)
                                    if tb <= u0 and u1 <= 2.0 - tb))
    report.upper_phase = float(sum(d for (u0, _, _), (u1, _, _), d in zip(pts[:-1], pts[1:], incs)
                                   if u1 <= 1.0))
    return report


def origin_multiplicity(report: ContourReport) -> int:
    """Zeros at the origin implied by the phase change along the small arc."""
    return int(round(-report.indent_phase / math.pi))


def verdict(report: ContourReport, cand: ShockCandidate,
            second: ContourReport | None = None) -> Verdict:
    """Stability call from a completed contour report.

    For undercompressive shocks, ``second`` is the report for a different
    indentation radius; the origin zero count must agree between the two.
    """
    if report.winding is None:
        return report.verdict or Verdict(VerdictKind.INCONCLUSIVE, None, report.reason or "no winding")
    cls = cand.shock_class
    if cls is ShockClass.DEGENERATE:
        return Verdict(VerdictKind.INCONCLUSIVE, report.winding, "degenerate shock")
    if cls in (ShockClass.LAX, ShockClass.OVERCOMPRESSIVE):
        if report.winding == 0:
            return Verdict(VerdictKind.STABLE, 0)
        return Verdict(VerdictKind.UNSTABLE, report.winding)
    want = 1 + abs(cand.ell_tilde)
    m = origin_multiplicity(report)
    if second is not None:
        if second.winding is None:
            return Verdict(VerdictKind.INCONCLUSIVE, report.winding, "second indentation failed")
        if origin_multiplicity(second) != m or second.winding != report.winding:
            return Verdict(VerdictKind.INCONCLUSIVE, report.winding, "indentation-dependent count")
    total = report.winding + m
    if report.winding == 0 and m == want:
        return Verdict(VerdictKind.STABLE, total)
    return Verdict(VerdictKind.UNSTABLE, total)
