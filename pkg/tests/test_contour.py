import cmath
import math
from concurrent.futures import ThreadPoolExecutor
from types import SimpleNamespace

import numpy as np
import pytest

from viscoevans.contour import (
    ContourSpec,
    Verdict,
    VerdictKind,
    choose_radius,
    contour_point,
    fit_asymptotics,
    mesh_contour,
    origin_multiplicity,
    verdict,
    winding_number,
)
from viscoevans.equilibria import ShockClass
from viscoevans.errors import ContractViolation, FitFailure

LAX = SimpleNamespace(shock_class=ShockClass.LAX, ell_tilde=0)


def argument_principle(f, df, spec, n=20000):
    """Reference zero count: contour integral of f'/f by the trapezoid rule on a dense mesh."""
    us = np.linspace(0.0, 2.0, n + 1)
    lams = np.array([contour_point(spec, u) for u in us])
    g = np.array([df(z) / f(z) for z in lams])
    return (np.sum(0.5 * (g[1:] + g[:-1]) * np.diff(lams)) / (2j * math.pi)).real


CASES = [
    (lambda z: z - 0.5, lambda z: 1.0),
    (lambda z: cmath.exp(z), lambda z: cmath.exp(z)),
    (lambda z: (z - 0.5) * (z - 1 + 0.5j), lambda z: 2 * z - 1.5 + 0.5j),
    (lambda z: (z - (1 + 1j)) * (z - (1 - 1j)) * cmath.exp(-z), None),
    (lambda z: z - 3.0, lambda z: 1.0),
    (lambda z: z + 0.5, lambda z: 1.0),
]


@pytest.mark.parametrize("k", range(len(CASES)))
def test_winding_matches_argument_principle(k):
    f, df = CASES[k]
    spec = ContourSpec(R=2.0)
    rep = winding_number(f, spec)
    if df is None:
        def df(z, h=1e-6):
            return (f(z + h) - f(z - h)) / (2 * h)
    assert rep.ok
    assert rep.winding == round(argument_principle(f, df, spec))
    assert rep.max_rel_step <= spec.max_step_change


def test_known_counts():
    spec = ContourSpec(R=2.0)
    assert winding_number(lambda z: z - 0.5, spec).winding == 1
    assert winding_number(cmath.exp, spec).winding == 0
    assert winding_number(lambda z: (z - 0.5) * (z - 1 + 0.5j) * (z - 1 - 0.5j), spec).winding == 3
    assert winding_number(lambda z: z - 3.0, spec).winding == 0


def test_refinement_is_adaptive():
    spec = ContourSpec(R=4.0)
    rep = winding_number(lambda z: cmath.exp(3 * z), spec)
    assert rep.refinements > 0 and rep.n_points > spec.n_init
    assert rep.max_rel_step <= 0.2 and rep.winding == 0


def test_zero_on_contour_is_inconclusive():
    spec = ContourSpec(R=2.0)
    z0 = mesh_contour(spec)[3]
    rep = winding_number(lambda z: z - z0, spec)
    assert rep.winding is None
    assert verdict(rep, LAX).kind is VerdictKind.INCONCLUSIVE


def test_near_vanishing_is_inconclusive():
    spec = ContourSpec(R=2.0)
    rep = winding_number(lambda z: 1e-20 if abs(z - 2.0) < 1e-12 else 1.0, spec)
    assert verdict(rep, LAX).kind is VerdictKind.INCONCLUSIVE


def test_parallel_map_gives_identical_report():
    f = CASES[2][0]
    a = winding_number(f, ContourSpec())
    with ThreadPoolExecutor(4) as ex:
        b = winding_number(f, ContourSpec(), map_fn=ex.map)
    assert a.samples == b.samples and a.winding == b.winding


def test_mesh_geometry_and_determinism():
    spec = ContourSpec(R=3.0, n_init=20)
    pts = mesh_contour(spec)
    assert pts == mesh_contour(spec)
    assert pts[0] == pts[-1] == 3.0
    assert sum(spec.breakdown()) == spec.half_intervals
    ta, tb = spec.breakpoints()
    for u in np.linspace(0, 1, 101):
        z = contour_point(spec, u)
        assert abs(contour_point(spec, 2 - u) - z.conjugate()) < 1e-14
        if u <= ta:
            assert abs(z) == pytest.approx(3.0)
        elif u <= tb:
            assert z.real == 0.0
        else:
            assert abs(z) == pytest.approx(spec.min_modulus) and z.real >= 0
    with pytest.raises(ContractViolation):
        ContourSpec(R=1e-5)
    with pytest.raises(ContractViolation):
        ContourSpec(n_init=4)


def test_fit_recovers_exponential_square_root():
    fit = fit_asymptotics(lambda z: 2 * cmath.exp(3 * cmath.sqrt(z)), np.geomspace(4, 64, 6))
    assert fit.fit_log_c == pytest.approx(math.log(2), abs=1e-10)
    assert fit.fit_alpha == pytest.approx(3.0, abs=1e-10)
    with pytest.raises(FitFailure):
        fit_asymptotics(lambda z: 1.0, [1.0])
    with pytest.raises(FitFailure):
        fit_asymptotics(lambda z: 0.0, [1.0, 2.0])


def test_choose_radius_doubles_until_fit_holds():
    def f(z):
        return cmath.exp(-1.5 * cmath.sqrt(z)) * (1 + 6 / z)
    rc = choose_radius(f)
    assert rc.ok and rc.max_rel_err < 0.2
    assert math.log2(rc.R) == int(math.log2(rc.R)) and rc.R > 2
    assert all(err >= 0.2 for _, err in rc.tried[:-1])
    # the same function never fits when the tolerance is unreachable
    assert not choose_radius(f, tol=1e-12, R_max=64).ok


def test_verdict_text_round_trip():
    for v in (Verdict(VerdictKind.STABLE), Verdict(VerdictKind.UNSTABLE, 2),
              Verdict(VerdictKind.INCONCLUSIVE, None, "refinement depth exhausted")):
        assert str(Verdict.parse(str(v))) == str(v)
    assert str(Verdict(VerdictKind.UNSTABLE, -1)) == "Unstable(-1)"
    with pytest.raises(ValueError):
        Verdict.parse("Maybe")


def test_lax_verdicts():
    spec = ContourSpec()
    assert str(verdict(winding_number(cmath.exp, spec), LAX)) == "Stable"
    assert str(verdict(winding_number(lambda z: z - 0.5, spec), LAX)) == "Unstable(1)"
    deg = SimpleNamespace(shock_class=ShockClass.DEGENERATE, ell_tilde=0)
    assert verdict(winding_number(cmath.exp, spec), deg).kind is VerdictKind.INCONCLUSIVE


def test_undercompressive_counts_origin_zeros():
    uc = SimpleNamespace(shock_class=ShockClass.UNDERCOMPRESSIVE, ell_tilde=1)
    spec = ContourSpec()
    double = winding_number(lambda z: z * z * cmath.exp(z), spec)
    assert origin_multiplicity(double) == 2 and double.winding == 0
    assert str(verdict(double, uc)) == "Stable"
    single = winding_number(lambda z: z * cmath.exp(z), spec)
    assert verdict(single, uc).kind is VerdictKind.UNSTABLE
    other = winding_number(lambda z: z * z * cmath.exp(z), ContourSpec(min_modulus=1e-3))
    assert str(verdict(double, uc, other)) == "Stable"
    assert verdict(double, uc, single).kind is VerdictKind.INCONCLUSIVE
