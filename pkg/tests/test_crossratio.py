import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from circle_isometries.circle import Rotation, SineShear, conj, deriv, power
from circle_isometries.crossratio import (
    Quadruple,
    blowup_scan,
    crossratio,
    crossratio_integral,
    cyclically_ordered,
    dist,
    implied_chi_lower_bound,
    incompatibility_bounds,
    normalize_d,
    rational_blowup_example,
)

separated = st.lists(st.floats(0, 1, exclude_max=True), min_size=4, max_size=4).map(sorted).filter(
    lambda p: min(np.diff(p + [p[0] + 1])) > 0.05
)


def test_dist_values():
    assert dist(0, 0.5) == pytest.approx(1 / math.pi)
    assert dist(0.3, 0.3) == 0
    assert dist(0, 0.25) == pytest.approx(math.sqrt(2) / (2 * math.pi))
    assert dist(0.1, 0.9) == pytest.approx(dist(0.9, 0.1))


def test_small_arc_limit():
    q = Quadruple(0.0, 0.001, 0.002, 0.003)
    assert crossratio(q) == pytest.approx(4 / 3, rel=1e-5)


def test_limits_at_the_ends():
    a, b, c = 0.0, 0.25, 0.5
    assert crossratio(Quadruple(a, b, c, 1 - 1e-9)) > 1e6
    assert crossratio(Quadruple(a, b, c, 0.5 + 1e-9)) == pytest.approx(1.0, abs=1e-7)


def test_quadruple_validation():
    with pytest.raises(ValueError):
        Quadruple(0.0, 0.5, 0.25, 0.75)
    assert cyclically_ordered(0.9, 0.1, 0.3, 0.5)


@settings(max_examples=100, deadline=None)
@given(separated, st.floats(0, 1))
def test_crossratio_exceeds_one_and_is_rotation_invariant(pts, t):
    q = Quadruple(*pts)
    assert crossratio(q) > 1
    assert crossratio(q.rotated(t)) == pytest.approx(crossratio(q), rel=1e-10)


def test_normalize_symmetric_triple():
    d = normalize_d(0.0, 0.25, 0.5)
    assert 0.5 < d < 1
    assert crossratio(Quadruple(0.0, 0.25, 0.5, d)) == pytest.approx(2.0, abs=1e-12)


def test_normalize_random_triples():
    rng = np.random.default_rng(0)
    for _ in range(100):
        a, b, c = np.sort(rng.random(3))
        d = normalize_d(a, b, c)
        assert abs(crossratio(Quadruple(a, b, c, d)) - 2) <= 1e-10


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 0.3), st.floats(0.01, 0.3), st.floats(0, 1))
def test_normalize_is_rotation_equivariant(g1, g2, t):
    a, b, c = 0.1, 0.1 + g1, 0.1 + g1 + g2
    d = normalize_d(a, b, c)
    d_rot = normalize_d((a + t) % 1, (b + t) % 1, (c + t) % 1)
    gap = (d_rot - (d + t)) % 1.0
    assert min(gap, 1 - gap) < 1e-10


def test_normalize_rejects_degenerate_triple():
    with pytest.raises(ValueError):
        normalize_d(0.2, 0.2, 0.5)


@settings(max_examples=100, deadline=None)
@given(separated)
def test_integral_identity(pts):
    q = Quadruple(*pts)
    assert abs(crossratio_integral(q, 64) - math.log(crossratio(q))) <= 1e-6


def test_integral_vanishes_on_empty_arc_and_rotates():
    q = Quadruple(0.1, 0.1 + 1e-9, 0.5, 0.7)
    assert abs(crossratio_integral(q)) < 1e-7
    q2 = Quadruple(0.1, 0.3, 0.5, 0.8)
    assert crossratio_integral(q2.rotated(0.37)) == pytest.approx(crossratio_integral(q2), abs=1e-8)


def test_rotation_scan_is_constant():
    q = Quadruple(0.0, 0.25, 0.5, normalize_d(0.0, 0.25, 0.5))
    scan = blowup_scan(Rotation(math.sqrt(2) - 1), q, range(1, 200))
    assert np.max(np.abs(scan.values - 2)) < 1e-10


def test_smooth_conjugate_scan_stays_bounded():
    f = conj(SineShear(0.5, 1), Rotation((math.sqrt(5) - 1) / 2))
    q = Quadruple(0.0, 0.25, 0.5, normalize_d(0.0, 0.25, 0.5))
    scan = blowup_scan(f, q, range(1, 1001))
    assert 1.2 < scan.values.min() and scan.values.max() < 5


def test_blowup_example_fixed_points():
    f, q = rational_blowup_example(1, 3, 0.1)
    g = power(f, 3)
    k = np.arange(6)
    pts = k / 6
    assert np.allclose(g(pts), pts + 1, atol=1e-12)
    assert np.allclose(deriv(g, pts), np.where(k % 2 == 0, 1.1**3, 0.9**3))
    assert crossratio(q) == pytest.approx(2.0, abs=1e-10)
    assert q.a == pytest.approx(1 / 6)


def test_blowup_scan_diverges():
    f, q = rational_blowup_example(1, 3, 0.1)
    scan = blowup_scan(f, q, range(3, 301, 3))
    assert scan.first_exceeding(1e3) is not None
    vals = scan.values[scan.resolved]
    assert np.all(np.diff(vals[-10:]) > 0)


def test_blowup_example_degenerates_to_rotation():
    f, q = rational_blowup_example(1, 3, 0.0)
    scan = blowup_scan(f, q, range(3, 301, 3))
    assert np.max(np.abs(scan.values - 2)) < 1e-10


@pytest.mark.parametrize("p,q,eps", [(1, 2, 0.1), (2, 4, 0.1), (1, 3, 1.0)])
def test_blowup_example_validation(p, q, eps):
    with pytest.raises(ValueError):
        rational_blowup_example(p, q, eps)


def test_incompatibility_bounds():
    assert incompatibility_bounds(0) == pytest.approx((2.0, 2.0))
    lo, hi = incompatibility_bounds(1.0)
    assert math.log(hi) == pytest.approx((math.sqrt(math.log(2)) + 2) ** 2)
    assert math.log(hi) == pytest.approx(8.0234, abs=1e-4)
    assert lo == 1.0  # sqrt(log 2) - 2 < 0 is clamped
    with pytest.raises(ValueError):
        incompatibility_bounds(-1)


def test_implied_norm_bound():
    assert implied_chi_lower_bound(1e3) == pytest.approx(0.8979, abs=1e-4)
    assert implied_chi_lower_bound(2.0) == 0.0
    assert implied_chi_lower_bound(0.5) == 0.0
    # inverse of the upper bound
    assert incompatibility_bounds(implied_chi_lower_bound(1e5))[1] == pytest.approx(1e5)
