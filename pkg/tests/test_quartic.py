import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment
from hypothesis import given, settings, strategies as st

from nlsdual.errors import AmbiguousClustering
from nlsdual.params import derive_coefficients
from nlsdual.quartic import (
    Pattern,
    QuarticPoly,
    build_quartic,
    classify_roots,
    find_roots,
    modulus_squared,
)


def companion_roots(q: QuarticPoly):
    """Independent oracle: eigenvalues of the Frobenius companion matrix."""
    c = np.array(q.coeffs[1:])
    mat = np.zeros((4, 4))
    mat[0, :] = -c
    mat[1:, :-1] = np.eye(3)
    return np.linalg.eigvals(mat)


def match(a, b):
    """Largest distance under the best one-to-one pairing of two root lists."""
    cost = np.abs(np.subtract.outer(np.asarray(a), np.asarray(b)))
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def test_golden_quartic(golden):
    q = build_quartic(golden, derive_coefficients(golden))
    assert q.coeffs == pytest.approx((1, 1, 25 / 121, 0, -28 / 14641), rel=1e-14, abs=1e-18)
    cls = classify_roots(find_roots(q), poly=q)
    assert cls.pattern is Pattern.DOUBLE_TWO_SIMPLE
    assert cls.roots[0] == pytest.approx(-2 / 11, abs=1e-12)
    assert cls.roots[1] == pytest.approx(0.0806802, abs=1e-7)
    assert cls.roots[2] == pytest.approx(-0.7170438, abs=1e-7)
    assert match(find_roots(q), companion_roots(q)) < 1e-7  # double root: ~sqrt(eps) spread


def test_poly_eval_and_derivative():
    q = QuarticPoly.from_roots([1, 2, 3, 4])
    assert q.coeffs == (1.0, -10.0, 35.0, -50.0, 24.0)
    assert q(2.5) == pytest.approx(0.5625)
    assert q.derivative(0) == -50
    assert q.derivative(0, 2) == 70
    assert q.derivative(0, 4) == 24


@settings(max_examples=300, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=4, max_size=4))
def test_simple_roots_match_oracle(rs):
    if min(abs(a - b) for i, a in enumerate(rs) for b in rs[i + 1:]) < 0.05:
        return
    q = QuarticPoly.from_roots(rs)
    assert match(find_roots(q), companion_roots(q)) < 1e-9


@settings(max_examples=200, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 3), st.floats(-3, 3), st.floats(0.1, 3))
def test_complex_pairs_match_oracle(a, b, c, d):
    q = QuarticPoly(*np.poly([a + 1j * b, a - 1j * b, c + 1j * d, c - 1j * d]).real[1:])
    if abs(a - c) < 0.05 and abs(b - d) < 0.05:
        return
    assert match(find_roots(q), companion_roots(q)) < 1e-9


@pytest.mark.parametrize("roots,pattern,expect", [
    ([1.5] * 4, Pattern.QUADRUPLE, (1.5,)),
    ([-1, -1, -1, 2], Pattern.TRIPLE_SIMPLE, (-1, 2)),
    ([0.5, 0.5, -2, -2], Pattern.DOUBLE_DOUBLE, (0.5, -2)),
    ([3, 1, 1, -1], Pattern.DOUBLE_TWO_SIMPLE, (1, 3, -1)),
    ([4, 3, 2, 1], Pattern.FOUR_DISTINCT, (4, 3, 2, 1)),
])
def test_patterns(roots, pattern, expect):
    q = QuarticPoly.from_roots(roots)
    cls = classify_roots(find_roots(q), poly=q)
    assert cls.pattern is pattern
    assert cls.roots == pytest.approx(expect, abs=1e-9)
    assert cls.reconstruct().coeffs == pytest.approx(q.coeffs, abs=1e-12)


def test_complex_pair_unsupported():
    q = QuarticPoly.from_roots([1, 2, 0.5 + 1j, 0.5 - 1j])
    cls = classify_roots(find_roots(q), poly=q)
    assert cls.pattern is Pattern.UNSUPPORTED
    assert "complex" in cls.description


def test_near_double_within_tol():
    # merging roots 1e-5 apart moves the coefficients by ~1e-10
    q = QuarticPoly.from_roots([1, 1 + 1e-5, 3, -2])
    assert classify_roots(find_roots(q), tol=1e-6, poly=q).pattern is Pattern.DOUBLE_TWO_SIMPLE
    assert classify_roots(find_roots(q), tol=1e-12, poly=q).pattern is Pattern.FOUR_DISTINCT


def test_ambiguous():
    # two different pairings into two clusters both fit at this loose tol
    q = QuarticPoly.from_roots([-0.084, -0.018, 0.083, 0.016])
    with pytest.raises(AmbiguousClustering):
        classify_roots(find_roots(q), tol=1e-3, poly=q)


def test_bad_tol():
    with pytest.raises(ValueError):
        classify_roots([1, 2, 3, 4], tol=0)


def test_modulus_squared():
    assert modulus_squared(4, 3, 2, 1) == pytest.approx(0.75)
    assert modulus_squared(4, 3, 1, 1) == pytest.approx(1.0)
    assert modulus_squared(4, 2, 2, 1) == pytest.approx(0.0)
