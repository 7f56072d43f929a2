"""Worked examples with hand-computed or independent oracles."""

import math
from dataclasses import replace

import numpy as np
import pytest
from scipy.optimize import brentq

from nlsdual.errors import NotDegenerate
from nlsdual.families import (
    Family,
    construct_solution,
    degenerate_limits,
    evaluate_base,
    evaluate_field,
    evaluate_profile,
)
from nlsdual.figures import figure_field
from nlsdual.params import ProblemParams, derive_coefficients
from nlsdual.quartic import Pattern, QuarticPoly, RootClassification, build_quartic, classify_roots, find_roots
from nlsdual.special import carlson_rf, ellip_f, jacobi_sn
from nlsdual.verify import Grid, ode_identity_residual, ode_shoot_compare, pde_residual

from conftest import GOLDEN
from test_families import pipeline, synthetic
from test_special import f_quad, rf_quad

SAMPLES = [-1.0, -0.5, 0.0, 0.3, 1.0, 2.0]
SMALL = Grid(-2.0, 2.0, 9, -2.0, 2.0, 9, 0.0, 1.0, 3)


def golden_soliton():
    p, d, cls = pipeline()
    return construct_solution(cls, p, d)


# --- coefficients ------------------------------------------------------------

def test_linear_coefficient_moves_only_its_dependents():
    base = derive_coefficients(ProblemParams(**GOLDEN))
    p = ProblemParams(**dict(GOLDEN, xi1=0.1))
    d = derive_coefficients(p)
    for name in ("xi0", "xi2", "chi3"):
        assert getattr(d, name) != getattr(base, name)
    # tau1, zeta0 and omega3 do not involve xi1 at all
    for name in ("tau1", "zeta0", "omega3"):
        assert getattr(d, name) == getattr(base, name)
    assert ode_identity_residual(p, d, SAMPLES) < 1e-9


def test_zero_frequencies_give_zero_velocity():
    d = derive_coefficients(ProblemParams(**dict(GOLDEN, chi1=0.0, chi2=0.0)))
    assert d.omega3 == 0.0


def test_quartic_with_forced_zero_coefficients():
    p = ProblemParams(**GOLDEN)
    d = replace(derive_coefficients(p), xi0=0.0, xi2=0.0)
    q = build_quartic(p, d)
    assert q.coeffs == (1.0, 1.0, 0.0, 0.0, 0.0)


def test_quartic_scales_with_leading_coefficient():
    p1 = ProblemParams(**GOLDEN)
    p2 = ProblemParams(**dict(GOLDEN, xi4=2.0))
    d = derive_coefficients(p1)
    q1, q2 = build_quartic(p1, d), build_quartic(p2, d)
    np.testing.assert_allclose(q2.coeffs[1:], np.array(q1.coeffs[1:]) / 2, rtol=1e-15)


# --- roots -------------------------------------------------------------------

def test_roots_of_fourth_power():
    q = QuarticPoly.from_roots([2, 2, 2, 2])
    roots = find_roots(q)
    # a quadruple root is only determined to about eps**(1/4)
    assert max(abs(r - 2) for r in roots) < 1e-3
    cls = classify_roots(roots, poly=q)
    assert cls.pattern is Pattern.QUADRUPLE and cls.roots[0] == pytest.approx(2, abs=1e-12)


def test_roots_of_distinct_product():
    roots = find_roots(QuarticPoly.from_roots([4, 3, 2, 1]))
    np.testing.assert_allclose(sorted(r.real for r in roots), [1, 2, 3, 4], atol=1e-12)
    assert max(abs(r.imag) for r in roots) < 1e-12


@pytest.mark.parametrize("roots,pattern,expect", [
    ([2, 2, 2, 2], Pattern.QUADRUPLE, (2.0,)),
    ([2, 2, 2, 1], Pattern.TRIPLE_SIMPLE, (2.0, 1.0)),
    ([4, 3, 2, 1], Pattern.FOUR_DISTINCT, (4.0, 3.0, 2.0, 1.0)),
])
def test_classification_of_exact_multisets(roots, pattern, expect):
    cls = classify_roots([complex(r) for r in roots], tol=1e-8)
    assert cls.pattern is pattern
    assert cls.roots == pytest.approx(expect, abs=1e-12)


# --- special functions -------------------------------------------------------

def test_rf_examples():
    assert carlson_rf(1, 1, 1) == pytest.approx(1.0, rel=1e-15)
    assert carlson_rf(4, 4, 4) == pytest.approx(0.5, rel=1e-15)
    assert carlson_rf(0, 1, 2) == pytest.approx(rf_quad(0, 1, 2), abs=1e-12)


def test_incomplete_integral_examples():
    assert ellip_f(0.7, 0.0) == pytest.approx(0.7, rel=1e-15)
    assert ellip_f(0.0, 0.9) == 0.0
    assert ellip_f(math.pi / 3, 0.8) == pytest.approx(f_quad(math.pi / 3, 0.8), abs=1e-12)


def _sn_by_inversion(u, l):
    """sin(phi) with F(phi, l) = u: bracketing by bisection, then Newton polish."""
    phi = brentq(lambda p: f_quad(p, l) - u, 0.0, math.pi / 2, xtol=1e-6)
    for _ in range(5):
        phi -= (f_quad(phi, l) - u) * math.sqrt(1 - (l * math.sin(phi)) ** 2)
    return math.sin(phi)


def test_sn_examples():
    assert jacobi_sn(1.0, 0.0) == pytest.approx(math.sin(1.0), abs=1e-15)
    assert jacobi_sn(1.0, 1.0) == pytest.approx(math.tanh(1.0), abs=1e-15)
    assert jacobi_sn(0.6, 0.8) == pytest.approx(_sn_by_inversion(0.6, 0.8), abs=1e-12)


# --- families ----------------------------------------------------------------

def test_soliton_constants_from_given_roots():
    p = ProblemParams(**GOLDEN)
    d = derive_coefficients(p)
    cls = RootClassification(Pattern.DOUBLE_TWO_SIMPLE, (3.0, 2.0, 1.0), (), 1e-6)
    desc = construct_solution(cls, p, d, orbit="descending")
    c = desc.constants
    assert desc.family is Family.Q4
    assert c["B"] ** 2 == pytest.approx((3 - 2) * (3 - 1) / d.a_squared, rel=1e-14)
    assert c["D"] == pytest.approx((2 * 3 - 2 - 1) / (1 - 2), rel=1e-15)


def test_reduced_rational_family():
    p = ProblemParams(**GOLDEN)
    d = derive_coefficients(p)
    cls = RootClassification(Pattern.QUADRUPLE, (2.0,), (), 1e-6)
    for sign in (1, -1):
        desc = construct_solution(cls, p, d, reduced=True, branch_sign=sign)
        assert desc.family is Family.Q1
        a1 = desc.constants["A1"]
        assert a1 == pytest.approx(d.tau1 * d.a_const, rel=1e-15)
        eta = np.array([-1.5, 0.4, 2.0])
        want = np.power((sign * a1 / eta).astype(complex), 1 / (2 * p.m))
        np.testing.assert_allclose(evaluate_profile(desc, eta), want, rtol=1e-13)


def test_elliptic_constants_from_given_roots():
    p = ProblemParams(**GOLDEN)
    d = derive_coefficients(p)
    cls = RootClassification(Pattern.FOUR_DISTINCT, (4.0, 3.0, 2.0, 1.0), (), 1e-6)
    desc = construct_solution(cls, p, d, orbit="descending")
    assert desc.family is Family.Q5
    # M = alpha4 - alpha2 = 1 - 3
    assert desc.constants["M"] == -2.0 and desc.constants["N"] == 3.0
    assert desc.modulus ** 2 == pytest.approx(0.75, rel=1e-15)


def test_flat_envelope_without_trial_function():
    desc = replace(golden_soliton(), tau1=0.0)
    u = evaluate_profile(desc, np.linspace(-3, 3, 7))
    np.testing.assert_allclose(u, desc.tau0 ** (1 / (2 * desc.m)), rtol=1e-15)


def test_reduced_soliton_peak():
    p, d, cls = pipeline()
    desc = construct_solution(cls, p, d, reduced=True)
    c = desc.constants
    u0 = complex(evaluate_profile(desc, 0.0))
    # compare 2m-th powers so the branch of the root does not matter
    want = c["A2"] ** (2 * p.m) / (c["D"] + 1)
    assert u0 ** (2 * p.m) == pytest.approx(want, rel=1e-13)


def test_unit_phase_field_equals_envelope():
    desc = replace(golden_soliton(), phase=(0.0, 0.0, 0.0))
    x, y, t = np.meshgrid([-1.0, 0.5], [0.0, 2.0], [0.0, 1.0], indexing="ij")
    np.testing.assert_array_equal(evaluate_field(desc, x, y, t), evaluate_profile(desc, desc.eta(x, y, t)))


def test_first_figure_point():
    q = complex(figure_field(1, 0.0, 1.0, 1.0))
    assert math.isfinite(q.real) and math.isfinite(q.imag)
    assert abs(q.imag) > 1e-3


def test_exact_coincidences_select_limits():
    def five(roots):
        return synthetic(Pattern.FOUR_DISTINCT, roots, -0.3)

    eta = np.linspace(-2, 2, 41)
    tanh_lim = degenerate_limits(five((4.0, 3.0, 2.0, 2.0)))
    assert tanh_lim.family is Family.Q6
    near = replace(five((4.0, 3.0, 2.0, 2.0)), modulus=1 - 1e-10)
    np.testing.assert_allclose(evaluate_base(tanh_lim, eta), evaluate_base(near, eta), atol=1e-6)

    sin_lim = degenerate_limits(five((4.0, 3.0, 3.0, 1.0)))
    assert sin_lim.family is Family.Q7
    near = replace(five((4.0, 3.0, 3.0, 1.0)), modulus=1e-10)
    np.testing.assert_allclose(evaluate_base(sin_lim, eta), evaluate_base(near, eta), atol=1e-6)

    with pytest.raises(NotDegenerate):
        degenerate_limits(five((4.0, 3.0, 2.0, 1.0)))


# --- verification ------------------------------------------------------------

def test_identity_examples():
    p = ProblemParams(**GOLDEN)
    d = derive_coefficients(p)
    assert ode_identity_residual(p, d, SAMPLES) < 1e-9
    assert ode_identity_residual(p, replace(d, xi2=d.xi2 + 1e-3), SAMPLES) > 1e-4
    trivial = ProblemParams(**dict(GOLDEN, tau0=0.0))
    assert ode_identity_residual(trivial, replace(d, tau1=0.0), SAMPLES) == 0.0


def test_fine_step_convergence_in_extended_precision():
    desc = golden_soliton()
    rep = pde_residual(desc, SMALL, 1e-3, dps=30)
    assert rep.sup_norm < 1e-7
    assert rep.converged_order == pytest.approx(4, abs=0.5)
    # double precision meets the bound but not the order at this step
    assert pde_residual(desc, SMALL, 1e-3).sup_norm < 1e-7


def test_second_order_ratio():
    desc = golden_soliton()
    h = 0.02
    r1 = pde_residual(desc, SMALL, h, stencil_order=2).sup_norm
    r2 = pde_residual(desc, SMALL, h / 2, stencil_order=2).sup_norm
    assert r1 / r2 == pytest.approx(4, rel=0.2)


def test_zero_field_is_exact():
    desc = replace(golden_soliton(), tau0=0.0, tau1=0.0)
    for dps in (None, 30):
        assert pde_residual(desc, SMALL, 0.01, dps=dps).sup_norm == 0.0


def test_shooting_examples():
    desc = golden_soliton()
    assert ode_shoot_compare(desc, (0.0, 2.0), 10_000) < 1e-6
    # constant state: the reduced ODE with v' = v'' = 0 leaves
    # 8k v^2 + 8 v + 4(-2 chi3 - chi1^2 - chi2^2) = 0 for m = 1
    lin = -2 * desc.phase[2] - (GOLDEN["chi1"] ** 2 + GOLDEN["chi2"] ** 2)
    v_star = max(np.roots([8 * desc.k, 8, 4 * lin]).real)
    flat = replace(desc, tau0=float(v_star), tau1=0.0)
    assert ode_shoot_compare(flat, (0.0, 2.0), 1000) < 1e-10


# --- properties --------------------------------------------------------------

def test_modulus_ignores_phase_constants():
    rng = np.random.default_rng(7)
    desc = golden_soliton()
    x, y, t = rng.uniform(-2, 2, (3, 100))
    ref = np.abs(evaluate_field(desc, x, y, t))
    shifted = replace(desc, phase=tuple(rng.uniform(-3, 3, 3)))
    np.testing.assert_allclose(np.abs(evaluate_field(shifted, x, y, t)), ref, rtol=1e-14)


def test_traveling_wave_dependence():
    desc = golden_soliton()
    w1, w2, w3 = desc.wave
    x, y, t = 0.7, -0.2, 0.4
    # move along a direction with zero eta increment
    dx, dy, dt = 0.3, 0.0, -0.3 * w1 / w3
    a = evaluate_field(desc, x, y, t)
    b = evaluate_field(desc, x + dx, y + dy, t + dt)
    assert desc.eta(x, y, t) == pytest.approx(desc.eta(x + dx, y + dy, t + dt), abs=1e-15)
    assert abs(a) == pytest.approx(abs(b), rel=1e-14)


def test_shooting_tracks_integrator_tolerance():
    desc = golden_soliton()
    # eta = 0 is a turning point of the soliton orbit
    devs = [ode_shoot_compare(desc, (0.0, 2.0), 1000, rtol=r, atol=r * 1e-2) for r in (1e-7, 1e-8, 1e-9)]
    assert devs[0] >= 5 * devs[1] and devs[1] >= 5 * devs[2]


@pytest.mark.parametrize("chi1,chi2", [(0.0, 0.0), (3.0, -1.0), (-2.0, 2.5)])
def test_velocity_constraint_keeps_convergence(chi1, chi2):
    p, d, cls = pipeline(chi1=chi1, chi2=chi2)
    desc = construct_solution(cls, p, d)
    rep = pde_residual(desc, SMALL, 0.01)
    assert rep.converged_order == pytest.approx(4, abs=0.5)


def test_negative_slope_soliton_is_real_and_bounded():
    p, d, cls = pipeline(xi3=-1.0)
    assert d.tau1 < 0
    desc = construct_solution(cls, p, d, reduced=True)
    assert desc.family is Family.Q4
    u = evaluate_profile(desc, np.linspace(-30, 30, 601))
    assert np.all(u.imag == 0) and np.all(np.isfinite(u))
    assert np.abs(u).max() < 2
    tail = np.abs(evaluate_profile(desc, np.array([-40.0, -30.0, 30.0, 40.0])))
    assert np.ptp(tail) < 1e-10
