import numpy as np
import pytest

from circle_isometries.circle import Rotation, SineShear, compose, conj, inverse, power
from circle_isometries.cocycle import cocycle
from circle_isometries.funcspace import (
    C0,
    L1,
    L2PAIR,
    GridFunction1,
    lp_pair,
    named_vector,
    nodes1,
    norm,
    represent,
)
from circle_isometries.isometry import (
    AffineIsometry,
    SampledLift,
    apply_power,
    commuting_family,
    conjugacy_from_fixed_point,
    conjugation_derivative,
    drift_estimate,
    fixed_point_from_conjugacy,
    kind_for,
    powers_on_grid,
    recurrence_scan,
)

from conftest import GOLDEN

SPACES = [C0, L1, L2PAIR, lp_pair(3.0)]
H = SineShear(0.5, 1)


def small(tag):
    return 512 if tag.arity == 1 else 32


@pytest.mark.parametrize("tag", SPACES, ids=str)
def test_single_step_is_representation_plus_cocycle(tag):
    f = compose(Rotation(0.2), SineShear(0.3, 1))
    v = named_vector(tag, "cos", small(tag))
    got = AffineIsometry(tag, f)(v).samples
    theta = represent(tag, f, v).samples
    if tag.arity == 1:
        c = cocycle(kind_for(tag), f)(nodes1(v.n))
    else:
        xs, ys = v.nodes
        c = cocycle(kind_for(tag), f)(xs[:, None], ys[None, :])
    assert np.allclose(got, theta + c, atol=1e-10)


@pytest.mark.parametrize("tag", SPACES, ids=str)
def test_closed_form_power_equals_repeated_application(tag):
    f = compose(Rotation(0.31), SineShear(0.4, 1))
    I = AffineIsometry(tag, f)
    v = named_vector(tag, "sin", small(tag))
    step = v
    for _ in range(3):
        step = I(step)
    assert norm(tag, apply_power(I, 3, v) - step) < 1e-9


@pytest.mark.parametrize("tag", SPACES, ids=str)
def test_group_law_and_negative_powers(tag):
    f = compose(Rotation(0.31), SineShear(0.4, 1))
    I = AffineIsometry(tag, f)
    v = named_vector(tag, "cos", small(tag))
    assert norm(tag, apply_power(I, -4, apply_power(I, 4, v)) - v) < 1e-8
    assert norm(tag, apply_power(I, 2, apply_power(I, 5, v)) - apply_power(I, 7, v)) < 1e-9
    assert apply_power(I, 0, v) is v


@pytest.mark.parametrize("tag", SPACES, ids=str)
def test_right_action_order(tag):
    f, g = SineShear(0.3, 1), compose(Rotation(0.2), SineShear(0.2, 2))
    v = named_vector(tag, "cos", small(tag))
    If, Ig, Ifg = (AffineIsometry(tag, m) for m in (f, g, compose(f, g)))
    assert norm(tag, Ig(If(v)) - Ifg(v)) < 1e-9
    # the other order differs for these non-commuting maps
    assert norm(tag, If(Ig(v)) - Ifg(v)) > 1e-2


def test_arity_mismatch():
    with pytest.raises(ValueError):
        apply_power(AffineIsometry(L2PAIR, H), 1, named_vector(C0, "sin", 16))


def test_sample_only_vectors_use_interpolation():
    f = compose(Rotation(0.2), SineShear(0.3, 1))
    I = AffineIsometry(C0, f)
    exact = named_vector(C0, "sin", 2048)
    sampled = GridFunction1(2048, samples=exact.samples)
    assert norm(C0, I(sampled) - I(exact)) < 1e-5


def test_powers_on_grid_matches_apply_power():
    tag = L1
    I = AffineIsometry(tag, conj(H, Rotation(GOLDEN)))
    v = named_vector(tag, "cos", 256)
    grid = powers_on_grid(I, v, [0, 3, -2])
    assert np.array_equal(grid[0], v.samples)
    for t in (3, -2):
        assert np.allclose(grid[t], apply_power(I, t, v).samples, atol=1e-12)


def test_recurrence_report_serialises():
    I = AffineIsometry(C0, conj(H, Rotation(GOLDEN)))
    rep = recurrence_scan(I, named_vector(C0, "sin", 256), [1, 2, 3])
    lines = rep.to_csv().splitlines()
    assert lines[0] == "time,residual" and len(lines) == 4
    assert rep.summary()["min_residual"] == min(rep.residuals)
    with pytest.raises(ValueError):
        recurrence_scan(I, named_vector(C0, "sin", 256), [])


def test_rotation_isometry_is_linear_and_recurs_exactly():
    I = AffineIsometry(C0, Rotation(0.25))
    v = named_vector(C0, "sin", 256)
    rep = recurrence_scan(I, v, [4, 8])
    assert max(rep.residuals) < 1e-13


def test_drift_of_translation_like_orbit_is_bounded():
    I = AffineIsometry(C0, conj(H, Rotation(GOLDEN)))
    rows = drift_estimate(I, named_vector(C0, "zero", 256), 50)
    assert len(rows) == 50
    assert rows[-1][1] < rows[0][1] / 10
    with pytest.raises(ValueError):
        drift_estimate(I, named_vector(C0, "zero", 256), 0)


def test_c0_fixed_point_closed_form():
    """phi = -log Dh o h^-1, checked against an independent evaluation."""
    fp = fixed_point_from_conjugacy(C0, H, 256)
    x = nodes1(256)
    hinv = inverse(H)(x)
    expect = -np.log(1 + 0.5 * np.cos(2 * np.pi * hinv))
    assert np.allclose(fp.samples, expect, atol=1e-12)


@pytest.mark.parametrize("tag", [C0, L1, L2PAIR], ids=str)
@pytest.mark.parametrize("rho", [GOLDEN, 0.3])
def test_fixed_point_is_fixed(tag, rho):
    f = conj(H, Rotation(rho))
    fp = fixed_point_from_conjugacy(tag, H, small(tag) * 2)
    I = AffineIsometry(tag, f)
    assert norm(tag, I(fp) - fp) < 1e-7


@pytest.mark.parametrize("tag", [C0, L1], ids=str)
def test_conjugacy_recovers_inverse_of_h_up_to_rotation(tag):
    fp = fixed_point_from_conjugacy(tag, H, 2048)
    sampled = GridFunction1(2048, samples=fp.samples)
    Hrec = conjugacy_from_fixed_point(tag, sampled)
    x = np.linspace(0, 1, 401)
    offset = Hrec(x) - inverse(H)(x)
    assert np.ptp(offset) < 1e-6
    assert np.allclose(Hrec.inverse(Hrec(x)), x, atol=1e-9)
    f = conj(H, Rotation(GOLDEN))
    d = conjugation_derivative(Hrec, f, x)
    assert np.max(np.abs(d - 1)) < 1e-5


def test_conjugacy_rejects_pair_space():
    with pytest.raises(ValueError):
        conjugacy_from_fixed_point(L2PAIR, GridFunction1(8, samples=np.zeros(8)))


def test_sampled_lift_validation_and_derivative():
    with pytest.raises(ValueError):
        SampledLift([0.0, 0.6, 0.5, 1.0])
    lift = SampledLift(np.linspace(0, 1, 9))
    x = np.linspace(0, 3, 7)
    assert np.allclose(lift(x), x)
    assert np.allclose(lift.derivative(x), 1.0)


@pytest.mark.parametrize("tag", [C0, L1, L2PAIR], ids=str)
def test_commuting_family(tag):
    I1, I2 = commuting_family(H, [GOLDEN, np.sqrt(2) - 1], tag)
    v = named_vector(tag, "cos", small(tag))
    assert norm(tag, I1(I2(v)) - I2(I1(v))) < 1e-7
    with pytest.raises(ValueError):
        commuting_family(H, [0.1, 0.1], tag)


def test_power_tree_matches_iterated_isometry():
    f = compose(Rotation(0.1), SineShear(0.2, 1))
    v = named_vector(L1, "sin", 512)
    a = apply_power(AffineIsometry(L1, power(f, 3)), 2, v)
    b = apply_power(AffineIsometry(L1, f), 6, v)
    assert norm(L1, a - b) < 1e-9
