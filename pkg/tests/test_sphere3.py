import math

import numpy as np
import pytest
from scipy import stats

from euler_kinematics import (BallCF, GeodesicBall, SO4Element, UnitQuaternion, act,
                              convolve_balls, crofton_valuation, euler_integral_on_subsphere,
                              f_closed, mc_kinematic_s3, recover_d, sample_so4, sample_subsphere,
                              verify_m_table)
from euler_kinematics.errors import (DegenerateTangency, OutOfRange, RadiusSumExceedsRegime,
                                     RankDeficientSystem, ValidationError)
from euler_kinematics.rng import stream
from euler_kinematics.sphere3 import (GreatSphere, KINEMATIC_TABLE, default_grid, nu_exact, qconj,
                                      qmul, table_tensor)

from oracles import ball_product_excess

ONE = UnitQuaternion.identity()


def unit(v):
    v = np.asarray(v, float)
    return v / np.linalg.norm(v)


def random_points(rng, n):
    return np.array([unit(v) for v in rng.standard_normal((n, 4))])


def points_near(rng, center, max_dist, n):
    """Points at geodesic distance uniform in [0, max_dist] from center."""
    Z = rng.standard_normal((n, 4))
    Z -= np.outer(Z @ center, center)
    Z /= np.linalg.norm(Z, axis=1, keepdims=True)
    a = max_dist * rng.random(n)
    return np.cos(a)[:, None] * center + np.sin(a)[:, None] * Z


def mixed_pair():
    phi = BallCF.ball([1, 0, 0, 0], 0.3) + BallCF.ball(unit([1, 2, 0, -1]), 0.2, 2)
    psi = BallCF.ball(unit([0, 1, 1, 0]), 0.4) + BallCF.ball([0.6, 0, 0.8, 0], 0.25, -1)
    return phi, psi


# -- quaternions and the SO(4) action -----------------------------------------------------

def test_quaternion_normalised_and_checked():
    q = UnitQuaternion(0.6, 0.8, 0.0, 1e-9)
    assert abs(np.linalg.norm(q.array()) - 1) < 1e-12
    with pytest.raises(ValidationError):
        UnitQuaternion(1.0, 1.0, 0.0, 0.0)


def test_product_stays_unit():
    rng = np.random.default_rng(1)
    q = ONE
    for v in rng.standard_normal((1000, 4)):
        q = q * UnitQuaternion.from_array(v)
    assert abs(np.linalg.norm(q.array()) - 1) < 1e-12


def test_so4_sign_quotient():
    rng = stream(3, "test")
    g = sample_so4(rng)
    h = SO4Element(UnitQuaternion.from_array(-g.left.array()),
                   UnitQuaternion.from_array(-g.right.array()))
    assert g == h and g.left.w >= 0
    x = random_points(np.random.default_rng(0), 5)
    assert np.allclose(g.apply(x), h.apply(x))


def test_so4_matrix_is_rotation():
    g = sample_so4(stream(8, "test"))
    M = g.matrix()
    assert np.allclose(M.T @ M, np.eye(4), atol=1e-12)
    assert np.linalg.det(M) == pytest.approx(1.0)


def test_identity_action():
    phi, _ = mixed_pair()
    assert act(SO4Element.identity(), phi) == phi


def test_action_is_isometry():
    phi, psi = mixed_pair()
    both = phi + psi
    g = sample_so4(stream(5, "test"))
    moved = act(g, both)
    C0 = np.array([b.center.array() for _, b in both.terms])
    C1 = np.array([b.center.array() for _, b in moved.terms])
    assert np.abs(C0 @ C0.T - C1 @ C1.T).max() < 1e-12


def test_action_on_identity_ball_matches_membership():
    rng = np.random.default_rng(2)
    g = sample_so4(stream(6, "test"))
    moved = act(g, BallCF.ball([1, 0, 0, 0], 0.6))
    (_, ball), = moved.terms
    e, f = g.left.array(), g.right.array()
    assert np.allclose(ball.center.array(), qmul(e, qconj(f)))
    P = random_points(rng, 20000)
    pulled_back = qmul(qmul(qconj(e), P), f)          # g^-1 p
    inside_direct = np.arccos(np.clip(pulled_back[:, 0], -1, 1)) <= 0.6
    d = np.arccos(np.clip(P @ ball.center.array(), -1, 1))
    away = np.abs(d - 0.6) > 1e-9
    assert np.array_equal(inside_direct[away], (d <= 0.6)[away])


# -- closed forms -----------------------------------------------------------------------

def test_closed_form_values():
    assert f_closed(2, math.pi / 4) == pytest.approx(0.5, abs=1e-15)
    assert f_closed(1, math.pi / 2) == pytest.approx(1.0, abs=1e-15)
    assert f_closed(0, 0.3) == 1.0
    # (pi/6 - cos(pi/6) sin(pi/6)) / pi
    assert f_closed(3, math.pi / 6) == pytest.approx((math.pi / 6 - math.sqrt(3) / 4) / math.pi)
    assert f_closed(3, math.pi / 6) == pytest.approx(0.0288344, abs=1e-7)


def test_closed_form_range():
    with pytest.raises(OutOfRange):
        f_closed(1, 2.0)
    with pytest.raises(OutOfRange):
        f_closed(1, -0.1)
    with pytest.raises(OutOfRange):
        f_closed(4, 0.1)


# -- convolution ---------------------------------------------------------------------

def test_concentric_convolution():
    out = convolve_balls(BallCF.ball(ONE, 0.3), BallCF.ball(ONE, 0.4))
    (w, b), = out.terms
    assert w == 1 and b.center == ONE and b.radius == pytest.approx(0.7)


def test_convolution_with_zero():
    assert convolve_balls(BallCF.ball(ONE, 0.3), BallCF()).is_zero()


def test_convolution_regime():
    with pytest.raises(RadiusSumExceedsRegime):
        convolve_balls(BallCF.ball(ONE, 0.9), BallCF.ball(ONE, 0.7))


def test_convolution_center_by_set_product_sampling():
    rng = np.random.default_rng(7)
    c1, c2 = unit([1, 2, -1, 0.5]), unit([-0.3, 0.2, 1, 1])
    r1, r2 = 0.35, 0.25
    out = convolve_balls(BallCF.ball(c1, r1), BallCF.ball(c2, r2))
    (_, ball), = out.terms
    c = ball.center.array()
    assert np.allclose(c, qmul(c1, c2))
    P = np.vstack([points_near(rng, c, 2 * ball.radius, 80_000), random_points(rng, 20_000)])
    d = np.arccos(np.clip(P @ c, -1, 1))
    excess = ball_product_excess(P, c1, r1, c2, r2, rng)
    inside, outside = d <= ball.radius - 1e-6, d >= ball.radius + 1e-6
    assert np.all(excess[inside] <= 1e-12)      # certified factorisation found
    assert np.all(excess[outside] > 0)          # no factorisation found


def test_convolution_associative_and_equivariant():
    rng = np.random.default_rng(4)
    a, b, c = (BallCF.ball(unit(v), 0.15) for v in rng.standard_normal((3, 4)))
    left = convolve_balls(convolve_balls(a, b), c)
    right = convolve_balls(a, convolve_balls(b, c))
    (_, x), (_, y) = left.terms[0], right.terms[0]
    assert np.abs(x.center.array() - y.center.array()).max() < 1e-12
    # left translation: (e . a) * b has center e (a b)
    e = UnitQuaternion.from_array(rng.standard_normal(4))
    g = SO4Element(e, ONE)
    (_, z), = convolve_balls(act(g, a), b).terms
    (_, ab), = convolve_balls(a, b).terms
    assert np.abs(z.center.array() - qmul(e.array(), ab.center.array())).max() < 1e-12


# -- sampling -------------------------------------------------------------------------

def test_subsphere_frames_orthonormal():
    for d in (1, 2):
        E = sample_subsphere(d, stream(1, "test", d))
        assert np.abs(E.frame.T @ E.frame - np.eye(d + 1)).max() < 1e-12


def test_uniform_points_centered():
    rng = stream(2, "test")
    X = np.array([sample_subsphere(0, rng).frame[:, 0] for _ in range(20_000)])
    # each coordinate has variance 1/4
    assert np.all(np.abs(X.mean(axis=0)) <= 3 * 0.5 / math.sqrt(len(X)))


def test_uniform_points_centered_large():
    from euler_kinematics.sphere3 import _frames
    X = _frames(stream(3, "test"), 0, 100_000)[:, :, 0]
    assert np.all(np.abs(X.mean(axis=0)) <= 3 * 0.5 / math.sqrt(len(X)))


def test_great_circle_distance_distribution():
    # for a fixed point q, cos^2 of its distance to a uniform great circle is uniform on [0, 1]
    from euler_kinematics.sphere3 import _frames
    F = _frames(stream(4, "test"), 1, 20_000)
    q = unit([0.3, -1, 0.2, 0.5])
    rho2 = np.sum(np.einsum("mkj,k->mj", F, q) ** 2, axis=1)
    assert stats.kstest(rho2, "uniform").pvalue > 0.01


# -- chi on subspheres ---------------------------------------------------------------------

def test_cap_through_center():
    frame = np.eye(4)[:, :3]                      # great 2-sphere through (1,0,0,0)
    assert euler_integral_on_subsphere(BallCF.ball(ONE, 0.5), GreatSphere(frame)) == 1


def test_two_disjoint_balls_on_a_circle():
    frame = np.eye(4)[:, :2]
    phi = BallCF.ball([1, 0, 0, 0], 0.3) + BallCF.ball([-1, 0, 0, 0], 0.3)
    assert euler_integral_on_subsphere(phi, GreatSphere(frame)) == 2
    assert euler_integral_on_subsphere(phi, GreatSphere(np.eye(4)[:, 2:])) == 0


def test_point_evaluation():
    phi = BallCF.ball([1, 0, 0, 0], 0.3, 3) + BallCF.ball(unit([1, 0.1, 0, 0]), 0.3, -1)
    E = GreatSphere(np.array([[1.0], [0], [0], [0]]))
    assert euler_integral_on_subsphere(phi, E) == 2


def test_tangent_subsphere_detected():
    s = math.sqrt(0.5)
    frame = np.array([[s, 0], [s, 0], [0, 1], [0, 0]])
    with pytest.raises(DegenerateTangency):
        euler_integral_on_subsphere(BallCF.ball(ONE, math.pi / 4), GreatSphere(frame))


def test_circle_mean_chi_is_f2():
    from euler_kinematics.sphere3 import _chi_batch, _frames
    phi = BallCF.ball(unit([1, 1, 0, 0]), 0.6)
    C, R, W = phi.arrays()
    chi, _ = _chi_batch(C, R, W, _frames(stream(12, "test"), 1, 100_000), 1)
    se = chi.std(ddof=1) / math.sqrt(len(chi))
    assert abs(chi.mean() - f_closed(2, 0.6)) <= 3 * se


# -- Crofton valuations -------------------------------------------------------------------

def test_nu0_exact():
    phi, _ = mixed_pair()
    assert crofton_valuation(0, phi, 10, seed=0) == (3.0, 0.0)


@pytest.mark.parametrize("i", [1, 2, 3])
@pytest.mark.parametrize("r", [0.2, 0.5, 0.7, 1.0])
def test_crofton_matches_closed_form(i, r):
    est, se = crofton_valuation(i, BallCF.ball(unit([1, -1, 2, 0]), r), 40_000, seed=100 + i)
    assert abs(est - f_closed(i, r)) <= 3 * se


def test_crofton_error_shrinks_like_root_n():
    phi = BallCF.ball(ONE, 0.5)
    _, se1 = crofton_valuation(2, phi, 50_000, seed=1)
    _, se2 = crofton_valuation(2, phi, 100_000, seed=1)
    assert se1 / se2 == pytest.approx(math.sqrt(2), rel=0.1)


def test_crofton_linear_in_balls():
    phi, _ = mixed_pair()
    for i in (1, 2, 3):
        est, se = crofton_valuation(i, phi, 40_000, seed=20 + i)
        assert abs(est - nu_exact(i, phi)) <= 3 * se


def test_crofton_invariant_under_so4():
    phi, _ = mixed_pair()
    moved = act(sample_so4(stream(9, "test")), phi)
    for i in (1, 2, 3):
        a, sa = crofton_valuation(i, phi, 40_000, seed=1, tag="a")
        b, sb = crofton_valuation(i, moved, 40_000, seed=2, tag="b")
        assert abs(a - b) <= 3 * math.hypot(sa, sb)


def test_crofton_ignores_worker_count():
    phi, _ = mixed_pair()
    assert (crofton_valuation(1, phi, 9000, seed=5, workers=1)
            == crofton_valuation(1, phi, 9000, seed=5, workers=3))


# -- coefficient tables --------------------------------------------------------------------

def test_table_rows_hold():
    res = verify_m_table(default_grid(20, 20))
    assert res[0] == 0.0
    assert np.all(res <= 1e-10)


def test_table_row3_at_pi_over_6():
    r = s = math.pi / 6
    lhs = f_closed(3, r + s)
    rhs = sum(c * f_closed(k, r) * f_closed(l, s) for (k, l), c in KINEMATIC_TABLE[3].items())
    assert lhs == pytest.approx(0.195501, abs=1e-6)
    assert abs(lhs - rhs) <= 1e-10


def test_recovered_coefficients():
    T = recover_d(default_grid(15, 15))
    assert T[2, 1, 1] == pytest.approx(math.pi ** 2 / 8, abs=1e-6)
    assert T[1, 2, 3] == pytest.approx(2.0, abs=1e-6)
    assert T[3, 1, 2] == pytest.approx(0.5, abs=1e-6)
    assert np.abs(T.entries - table_tensor()).max() < 1e-6


def test_recovery_needs_enough_points():
    with pytest.raises(RankDeficientSystem):
        recover_d(default_grid(2, 2))


# -- kinematic formula -------------------------------------------------------------------

def test_single_ball_kinematic_is_deterministic():
    phi1, phi2 = BallCF.ball(unit([1, 2, 3, 4]), 0.4), BallCF.ball(unit([0, 1, 0, 1]), 0.3)
    for j in range(5):
        conv = convolve_balls(phi1, act(sample_so4(stream(0, "g", j)), phi2))
        assert nu_exact(2, conv) == pytest.approx(f_closed(2, 0.7), abs=1e-15)
    rhs = sum(c * f_closed(k, 0.4) * f_closed(l, 0.3) for (k, l), c in KINEMATIC_TABLE[2].items())
    assert abs(rhs - f_closed(2, 0.7)) <= 1e-10
    assert f_closed(2, 0.7) == pytest.approx(0.415016, abs=1e-6)


def test_kinematic_row0_exact():
    phi, _ = mixed_pair()                     # weights 1 and 2
    out = mc_kinematic_s3(phi, phi, 0, 20, 100, seed=1)
    assert out["lhs"] == out["rhs"] == 9.0 and out["se"] == 0.0


def test_kinematic_row1_small_run():
    phi1, phi2 = mixed_pair()
    out = mc_kinematic_s3(phi1, phi2, 1, 60, 2000, seed=3)
    assert out["z"] <= 3


def test_kinematic_regime_checked():
    with pytest.raises(RadiusSumExceedsRegime):
        mc_kinematic_s3(BallCF.ball(ONE, 1.0), BallCF.ball(ONE, 0.6), 1, 2, 2, seed=0)


def test_ball_radius_validated():
    with pytest.raises(ValidationError):
        GeodesicBall(ONE, 0.0)
