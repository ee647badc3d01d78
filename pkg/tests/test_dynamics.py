import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import central_diff, rel_err, split_partial_errors, structured_test_model
from stlfunnel.controllers import augmented_robustness
from stlfunnel.dynamics import (
    NoiseSpec,
    SystemModel,
    coupling_coeffs,
    single_integrator,
    unicycle_flow,
    unicycle_model,
    v_term,
    wrap_angle,
)
from stlfunnel.stl import And, Atom, Not, Predicate, SingularityError

GOAL = Predicate.circle_inside("goal", (1.0, 3.5), 0.2)
OBS = Predicate.circle_outside("obs", (2.5, 2.0), 1.2)
UNI = unicycle_model()


def test_unicycle_examples():
    assert np.allclose(UNI.xdot(np.array([0.0, 0.0, 0.0]), np.array([1.0, 0.0])), [1, 0, 0])
    assert np.allclose(UNI.xdot(np.array([0.0, 0.0, math.pi / 2]), np.array([1.0, 2.0])), [0, 1, 2])
    s = UNI.structure
    assert (s.n1, s.n2, s.m1, s.m2) == (2, 1, 1, 1)
    assert np.array_equal(s.g21(np.zeros(3)), np.zeros((1, 1)))
    assert np.array_equal(s.g22(np.zeros(3)), np.ones((1, 1)))


@settings(max_examples=100, deadline=None)
@given(st.floats(-10, 10), st.floats(-3, 3), st.floats(-5, 5))
def test_speed_invariance(theta, v, omega):
    dx = UNI.xdot(np.array([0.3, -0.2, theta]), np.array([v, omega]))
    assert math.hypot(dx[0], dx[1]) == pytest.approx(abs(v), abs=1e-12)


def test_rhs_matches_derivative_of_closed_form_flow():
    rng = np.random.default_rng(3)
    for _ in range(50):
        x = np.append(rng.uniform(-3, 3, 2), rng.uniform(-math.pi, math.pi))
        u = rng.uniform(-2, 2, 2)
        fd = (unicycle_flow(x, u, 1e-6) - unicycle_flow(x, u, -1e-6)) / 2e-6
        assert rel_err(fd, UNI.xdot(x, u)) < 1e-8


def test_single_integrator_is_unstructured_identity():
    m = single_integrator(2)
    assert m.structure is None
    assert np.array_equal(m.xdot(np.ones(2), np.array([0.5, -1.0])), [0.5, -1.0])


def test_structured_block_sizes_checked():
    s = UNI.structure
    with pytest.raises(ValueError):
        SystemModel(4, 2, UNI.drift, UNI.input_map, NoiseSpec.none(4), s)


@pytest.mark.parametrize("model", [UNI, structured_test_model()], ids=["unicycle", "structured"])
def test_split_partials_match_finite_differences(model):
    rng = np.random.default_rng(11)
    for _ in range(100):
        x = rng.uniform(-2, 2, model.n)
        errs = split_partial_errors(model.structure, x)
        assert max(errs.values()) <= 1e-6, errs


def test_structured_test_model_blocks_assemble():
    model = structured_test_model()
    s = model.structure
    x = np.array([0.4, -0.7, 1.1])
    u = np.array([0.8, -0.3])
    top = s.f1(x[:2]) + s.g11(x[2:]) @ u[:1]
    bottom = s.f2(x) + s.g21(x) @ u[:1] + s.g22(x) @ u[1:]
    assert np.allclose(model.xdot(x, u), np.concatenate([top, bottom]))


def test_wrap_angle():
    assert wrap_angle(math.pi) == math.pi
    assert wrap_angle(-math.pi) == math.pi
    assert wrap_angle(3 * math.pi / 2) == pytest.approx(-math.pi / 2)
    assert wrap_angle(0.3) == 0.3
    assert UNI.wrap(np.array([1.0, 2.0, 7.0]))[2] == pytest.approx(7.0 - 2 * math.pi)


# -- coupling terms


def _heading_toward(p, target):
    return math.atan2(target[1] - p[1], target[0] - p[0])


def test_v_term_examples():
    p = (3.0, 0.5)
    th = _heading_toward(p, GOAL.center)
    assert v_term(UNI, Atom(GOAL), [*p, th]) == pytest.approx([1.0])
    assert v_term(UNI, Atom(GOAL), [*p, th + math.pi / 2]) == pytest.approx([0.0], abs=1e-12)
    assert v_term(UNI, Atom(GOAL), [*p, th + math.pi]) == pytest.approx([-1.0])


def test_v_term_unstructured_is_full_gradient_map():
    m = single_integrator(2)
    v = v_term(m, Atom(GOAL), [2.0, 3.5])
    assert np.allclose(v, [-1.0, 0.0])


def _rho_dot(psi, x, u, tau=1e-5):
    from stlfunnel.stl import static_robustness

    r = lambda y: static_robustness(psi, y, 0)[0]
    return (r(unicycle_flow(x, u, tau)) - r(unicycle_flow(x, u, -tau))) / (2 * tau)


def _random_state(rng):
    while True:
        x = np.append(rng.uniform(-0.5, 4.5, 2), rng.uniform(-math.pi, math.pi))
        e = x[:2] - np.array(GOAL.center)
        if np.linalg.norm(e) >= 0.05:
            return x


def test_v_term_matches_flow_finite_differences():
    rng = np.random.default_rng(5)
    psi = Atom(GOAL)
    for _ in range(30):
        x = _random_state(rng)
        om = rng.uniform(-2, 2)
        d = 1e-3
        fd = (_rho_dot(psi, x, [1 + d, om]) - _rho_dot(psi, x, [1 - d, om])) / (2 * d)
        assert fd == pytest.approx(v_term(UNI, psi, x)[0], rel=1e-6, abs=1e-7)


def test_G_closed_form_for_unicycle_goal():
    rng = np.random.default_rng(8)
    psi = Atom(GOAL)
    for _ in range(50):
        x = _random_state(rng)
        c = coupling_coeffs(UNI, psi, x)
        if c.v_norm < 0.05:
            continue
        e = np.linalg.norm(x[:2] - np.array(GOAL.center))
        v = c.v[0]
        expected = -(1 / e) * (1 / abs(v)) * v * (1 - v * v)
        assert c.G[0] == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_G_vanishes_heading_toward_goal_and_v_aug_when_parallel():
    p = (3.0, 0.5)
    th = _heading_toward(p, GOAL.center)
    c = coupling_coeffs(UNI, Atom(GOAL), [*p, th])
    assert c.G[0] == pytest.approx(0.0, abs=1e-12)
    assert c.v_aug[0] == pytest.approx(0.0, abs=1e-12)
    c = coupling_coeffs(UNI, Atom(GOAL), [*p, th + math.pi])
    assert c.v_aug[0] == pytest.approx(0.0, abs=1e-12)


def test_coefficients_signal_singular_v():
    p = (3.0, 0.5)
    th = _heading_toward(p, GOAL.center) + math.pi / 2
    c = coupling_coeffs(UNI, Atom(GOAL), [*p, th])
    assert c.v_singular and c.G is None and c.v_aug is None
    # v2 does not divide by |v| and stays available: 2 u1 dv/dtheta here
    assert c.v2_for([1.0], 0.5)[0] == pytest.approx(2.0 * c.dv_dx2[0, 0])
    assert c.dv_dx2[0, 0] != 0.0
    with pytest.raises(SingularityError):
        c.F()
    with pytest.raises(SingularityError):
        v_term(UNI, Atom(GOAL), [1.0, 3.5, 0.0])


def test_v_aug_and_G_match_flow_finite_differences():
    rng = np.random.default_rng(21)
    psi = Atom(GOAL)
    aug = lambda y: augmented_robustness(UNI, psi, y, 0.0)
    checked = 0
    while checked < 30:
        x = _random_state(rng)
        c = coupling_coeffs(UNI, psi, x)
        if c.v_norm < 0.05:
            continue
        tau = 1e-5

        def aug_dot(u):
            return (aug(unicycle_flow(x, u, tau)) - aug(unicycle_flow(x, u, -tau))) / (2 * tau)

        # d|v|/dt = G u1 + v_aug u2 for the drift-free unicycle
        assert aug_dot([0.0, 1.0]) == pytest.approx(c.v_aug[0], rel=1e-6, abs=1e-6)
        assert aug_dot([1.0, 0.0]) == pytest.approx(c.G[0], rel=1e-5, abs=1e-6)
        checked += 1


def test_F_matches_noise_driven_derivative():
    model = structured_test_model()
    psi = And(Atom(GOAL), Not(Atom(Predicate.circle_inside("far", (9.0, 9.0), 0.5))))
    rng = np.random.default_rng(4)
    for _ in range(20):
        x = np.array([rng.uniform(-1, 3), rng.uniform(0, 3), rng.uniform(-1, 1)])
        c = coupling_coeffs(model, psi, x)
        if c.v_norm < 0.05:
            continue
        w = rng.normal(size=3)
        drift = lambda y: model.drift(y) + w
        vn = lambda y: float(np.linalg.norm(v_term(model, psi, y)))
        fd = (vn(x + 1e-6 * drift(x)) - vn(x - 1e-6 * drift(x))) / 2e-6
        assert c.F(w) == pytest.approx(fd, rel=1e-5, abs=1e-6)


def test_v2_is_zero_without_regularisation():
    rng = np.random.default_rng(1)
    for model in (UNI, structured_test_model()):
        for _ in range(200):
            x = rng.uniform(-2, 4, 3)
            c = coupling_coeffs(model, Atom(OBS), x, u1=rng.normal(size=1), delta=0.0)
            assert np.array_equal(c.v2, np.zeros(1))


def test_v2_formula():
    x = np.array([3.0, 0.5, 2.0])
    c = coupling_coeffs(UNI, Atom(GOAL), x, u1=[0.7], delta=0.5)
    expected = 2 * 0.5 / (c.v_norm ** 2 + 0.5) * 0.7 * c.dv_dx2[0, 0]
    assert c.v2[0] == pytest.approx(expected)
    # dv/dtheta by finite differences
    fd = central_diff(lambda th: v_term(UNI, Atom(GOAL), [3.0, 0.5, th[0]]), np.array([2.0]))
    assert c.dv_dx2[0, 0] == pytest.approx(fd[0, 0], rel=1e-7)


# -- noise


def test_noise_scaling_and_clipping():
    spec = NoiseSpec((0.5, 0.5, 5.0), clip_sigmas=4.0)
    rng = np.random.default_rng(0)
    dt = 0.005
    w = np.array([spec.sample(rng, dt) for _ in range(40000)])
    std = np.sqrt(np.array([0.5, 0.5, 5.0]) / dt)
    assert np.allclose(w.std(axis=0) / std, 1.0, atol=0.02)
    assert np.all(np.abs(w) <= 4.0 * std + 1e-12)
    raw = NoiseSpec((0.5, 0.5, 5.0), scaling="sample")
    w = np.array([raw.sample(rng, dt) for _ in range(40000)])
    assert np.allclose(w.std(axis=0) / np.sqrt([0.5, 0.5, 5.0]), 1.0, atol=0.02)


def test_noise_bound_and_determinism():
    spec = NoiseSpec((1.0, 1.0, 1.0), clip_sigmas=None, bound=(0.1, 0.2, 0.3))
    w = np.array([spec.sample(np.random.default_rng(s), 0.01) for s in range(200)])
    assert np.all(np.abs(w) <= [0.1, 0.2, 0.3])
    a = spec.sample(np.random.default_rng(9), 0.01)
    b = spec.sample(np.random.default_rng(9), 0.01)
    assert np.array_equal(a, b)


def test_noise_validation():
    with pytest.raises(ValueError):
        NoiseSpec((-1.0, 0.0, 0.0))
    with pytest.raises(ValueError):
        NoiseSpec((1.0,), scaling="white")
    assert not NoiseSpec.none(3).active
    with pytest.raises(ValueError):
        unicycle_model(NoiseSpec((1.0, 1.0)))
