import itertools

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st
from scipy.optimize import root

from viscoevans.equilibria import (
    Morse,
    ShockClass,
    classify_equilibrium,
    morse_index_sum,
    rh_compressible_1d,
    rh_residual,
    rh_shear,
    rh_solve,
    shock_type,
)
from viscoevans.errors import ContractViolation
from viscoevans.model import ModelVariant, W0, grad_potential

SHEAR = ModelVariant.SHEAR2D
COMP2D = ModelVariant.COMPRESSIBLE2D
COMP1D = ModelVariant.COMPRESSIBLE1D
COMP3D = ModelVariant.COMPRESSIBLE3D


def multistart_oracle(alpha, sigma, variant, box=3.5, n=9):
    """Critical points of phi by Newton from a grid of starts (independent of the closed forms)."""
    alpha = np.asarray(alpha, dtype=float)
    shift = grad_potential(alpha, W0, variant) - sigma * alpha

    def F(a):
        return grad_potential(a, W0, variant) - sigma * a - shift
    found = []
    axes = [np.linspace(-box, box, n)] * alpha.size
    for start in itertools.product(*axes):
        sol = root(F, np.array(start), tol=1e-14)
        if sol.success and np.max(np.abs(F(sol.x))) < 1e-10:
            if not any(np.linalg.norm(sol.x - q) < 1e-6 for q in found):
                found.append(sol.x)
    return found


def same_sets(a, b, tol=1e-7):
    return len(a) == len(b) and all(min(np.linalg.norm(p - q) for q in b) < tol for p in a)


def test_shear_cubic_roots_at_sigma_3_44():
    pts = rh_shear(np.array([1.0, 0.0]), 3.44).points
    assert sorted(p[0] for p in pts) == pytest.approx([-1.8, 0.8, 1.0], abs=1e-9)
    assert all(abs(p[1]) < 1e-12 for p in pts)


def test_rounded_speed_shifts_middle_root():
    # s = 1.8547 squares to 3.44 only to four digits, so the middle root moves slightly
    pts = rh_solve(np.array([1.0, 0.0]), 1.8547 ** 2, SHEAR).points
    mid = sorted(p[0] for p in pts)[1]
    assert mid == pytest.approx(0.8, abs=1e-4)
    assert rh_residual([mid, 0.0], [1.0, 0.0], 1.8547 ** 2) < 1e-12


@pytest.mark.parametrize("alpha,sigma,variant", [
    ((1.0, 0.0), 2.75, SHEAR),
    ((0.7, -0.4), 4.0, SHEAR),
    ((0.0, 0.6), 0.64, COMP2D),
    ((0.2, 0.1), 4.0, COMP2D),
    ((0.08, 0.59), 0.5625, COMP2D),
    ((0.1, 0.8), 0.64, COMP2D),
    ((0.3, 0.2, 0.9), 1.2, COMP3D),
    ((0.9,), 1.5, COMP1D),
])
def test_rh_set_matches_multistart_oracle(alpha, sigma, variant):
    sol = rh_solve(np.array(alpha), sigma, variant)
    assert not sol.degenerate
    oracle = multistart_oracle(alpha, sigma, variant, n=9 if len(alpha) < 3 else 7)
    assert same_sets(list(sol.points), oracle)
    for p in sol.points:
        assert rh_residual(p, alpha, sigma, W0, variant) < 1e-10


def test_compressible_1d_roots_closed_form():
    a3, sigma = 0.9, 1.5
    pts = sorted(p[0] for p in rh_compressible_1d(a3, sigma).points)
    h = 0.5 * np.sqrt(4 * (1 + sigma) - 3 * a3 * a3)
    assert pts == pytest.approx(sorted([a3, -0.5 * a3 + h, -0.5 * a3 - h]))


def test_three_dimensional_ring_when_shear_speed_matches():
    # in 3D a purely compressive left state admits a circle of in-plane shear states
    a3, sigma = 0.6, 1.0
    sol = rh_solve(np.array([0.0, 0.0, a3]), sigma, COMP3D)
    a3p = (1 + sigma - a3 * a3) * a3
    assert sol.ring is not None
    assert sol.ring.axis_value == pytest.approx(a3p)
    assert sol.ring.radius == pytest.approx(np.sqrt(sigma - a3p * a3p))
    for p in sol.ring.sample(7):
        assert rh_residual(p, [0.0, 0.0, a3], sigma, W0, COMP3D) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(-2.0, 2.0), st.floats(0.05, 6.0))
def test_morse_index_sum_is_one_for_shear(a1, a2, sigma):
    alpha = np.array([a1, a2])
    try:
        total = morse_index_sum(alpha, sigma, W0, SHEAR)
    except ContractViolation:
        assume(False)
    assert total == 1


@settings(max_examples=40, deadline=None)
@given(st.floats(-1.0, 1.0), st.floats(0.2, 2.0), st.floats(0.05, 5.0))
def test_morse_index_sum_is_one_for_compressible(a2, a3, sigma):
    alpha = np.array([a2, a3])
    try:
        sol = rh_solve(alpha, sigma, COMP2D)
        assume(not sol.degenerate and sol.ring is None)
        total = morse_index_sum(alpha, sigma, W0, COMP2D)
    except ContractViolation:
        assume(False)
    assert total == 1


def test_classification_of_three_point_shear_portrait():
    alpha = np.array([1.0, 0.0])
    types = {round(p[0], 6): classify_equilibrium(p, alpha, 2.75, W0, SHEAR).morse
             for p in rh_solve(alpha, 2.75, SHEAR).points}
    assert types == {1.0: Morse.SADDLE, -1.5: Morse.REPELLOR, 0.5: Morse.ATTRACTOR}


def test_classify_rejects_non_equilibrium():
    with pytest.raises(ContractViolation):
        classify_equilibrium([0.3, 0.3], [1.0, 0.0], 2.75, W0, SHEAR)


def test_lax_and_overcompressive_shear_pairs():
    s = 1.8547
    pts = sorted(rh_solve(np.array([1.0, 0.0]), s * s, SHEAR).points, key=lambda p: p[0])
    lo, mid, hi = pts
    assert shock_type(hi, mid, s).shock_class is ShockClass.LAX
    oc = shock_type(lo, mid, s)
    assert oc.shock_class is ShockClass.OVERCOMPRESSIVE and oc.ell_tilde == 2


def test_index_counts_characteristics():
    s = 1.8547
    alpha = np.array([1.0, 0.0])
    c = shock_type(alpha, np.array([0.79996619, 0.0]), s)
    # speeds at alpha: +-sqrt(2), +-2; at a+: +-sqrt(1.64), +-sqrt(2.92)
    assert c.ell_tilde == 1 + 0  # one incoming from the left, all four on the right minus 2d
    assert c.sigma == pytest.approx(s * s)


def test_degenerate_speed_is_flagged():
    # s equal to a characteristic speed at alpha
    alpha = np.array([1.0, 0.0])
    s = np.sqrt(2.0)
    pts = rh_solve(alpha, 2.0, SHEAR).points
    other = [p for p in pts if np.linalg.norm(p - alpha) > 1e-6][0]
    assert shock_type(alpha, other, s).shock_class is ShockClass.DEGENERATE
