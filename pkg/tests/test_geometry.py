import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sharpconv.config import NumericConfig
from sharpconv.errors import DomainError, EvaluationError
from sharpconv.geometry import (
    SurfaceSpec,
    check_surface,
    det_T_prime,
    g_function,
    lambda_batch,
    solve_lambda,
    surface_eval,
    transform_T,
)
from sharpconv.surfaces import REGISTERED, get_surface

Q = get_surface("quartic-mixed")
P = get_surface("paraboloid")
E = get_surface("exp")

coord = st.floats(-2, 2, allow_nan=False)
point = st.tuples(coord, coord).map(np.array)
nonzero = point.filter(lambda y: np.linalg.norm(y) > 1e-3)


def fd_jacobian_det(s, xi, y, h=1e-6):
    J = np.empty((2, 2))
    for k in range(2):
        e = np.eye(2)[k] * h
        J[:, k] = (transform_T(s, xi, y + e) - transform_T(s, xi, y - e)) / (2 * h)
    return np.linalg.det(J)


def test_surface_eval_quartic():
    ev = surface_eval(Q, [1.0, 0.0])
    assert ev.psi == pytest.approx(2.0)
    np.testing.assert_allclose(ev.grad, [6.0, 0.0])
    np.testing.assert_allclose(ev.hess, np.diag([14.0, 6.0]))
    assert not ev.degenerate


def test_surface_eval_exp_origin():
    ev = surface_eval(E, [0.0, 0.0])
    assert ev.psi == pytest.approx(2.0)
    np.testing.assert_allclose(ev.grad, [1.0, 1.0])
    np.testing.assert_allclose(ev.hess, 3 * np.eye(2))


def test_purepower_degenerate_at_origin():
    assert surface_eval(get_surface("purepower:p=4"), [0.0, 0.0]).degenerate


def test_surface_eval_rejects_bad_points():
    with pytest.raises(DomainError):
        surface_eval(Q, [np.nan, 0.0])
    with pytest.raises(DomainError):
        surface_eval(Q, [1.0, 2.0, 3.0])


def test_nonfinite_evaluator_raises():
    bad = SurfaceSpec("bad", phi=lambda y: np.full(np.shape(y)[:-1], np.inf), grad_phi=lambda y: y, hess_phi=lambda y: y)
    with pytest.raises(EvaluationError):
        bad.psi(np.zeros(2))


def test_lambda_quartic_axis():
    # 2 lam^4 + 2 lam^2 = 2 -> lam^2 = (sqrt(5) - 1) / 2
    assert solve_lambda(Q, [0, 0], [1, 0]) == pytest.approx(math.sqrt((math.sqrt(5) - 1) / 2), abs=1e-13)


def test_lambda_paraboloid_is_one():
    assert solve_lambda(P, [0.7, -1.2], [0.3, 2.0]) == pytest.approx(1.0, abs=1e-14)


def test_lambda_tiny_w_uses_hessian_limit():
    xi = np.array([2.0, 0.0])
    lam = float(lambda_batch(Q, xi, np.array([1e-9, 0.0])))
    # H(psi)(1, 0) = diag(14, 6): lam -> sqrt(2 / 14)
    assert lam == pytest.approx(math.sqrt(2 / 14), rel=1e-12)
    assert float(lambda_batch(Q, xi, np.array([1e-4, 0.0]))) == pytest.approx(lam, rel=1e-6)


def test_lambda_undefined_at_zero():
    with pytest.raises(DomainError):
        solve_lambda(Q, [0, 0], [0, 0])


def test_det_T_prime_quartic_origin():
    lam = math.sqrt((math.sqrt(5) - 1) / 2)
    val = det_T_prime(Q, [0, 0], [1, 0])
    assert val == pytest.approx(1 / (1 + 2 * lam**2), abs=1e-12)
    assert val == pytest.approx(0.4472136, abs=1e-7)


@pytest.mark.parametrize("name", ["quartic-mixed", "exp", "powerpert:a=1,p=3"])
def test_det_T_prime_matches_finite_differences(name):
    s = get_surface(name)
    xi, y = np.array([0.4, -0.7]), np.array([0.9, 0.35])
    assert det_T_prime(s, xi, y) == pytest.approx(fd_jacobian_det(s, xi, y), rel=1e-6)


def test_g_function_matches_plain_difference():
    xi, y = np.array([1.0, 0.5]), np.array([0.3, -0.2])
    t = np.array([0.0, 0.5, 2.0])
    c = xi / 2
    plain = E.psi(c - t[:, None] * y) + E.psi(c + t[:, None] * y) - 2 * E.psi(c)
    np.testing.assert_allclose(g_function(E, xi, y, t), plain, rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("name", REGISTERED + ("poly:c2=1,c3=0.5",))
def test_registered_surfaces_are_valid(name):
    rng = np.random.default_rng(3)
    pts = rng.uniform(-2, 2, (40, 2))
    assert check_surface(get_surface(name), pts) == []


def test_check_surface_flags_wrong_gradient():
    s = SurfaceSpec("wrong", phi=lambda y: np.sum(y**4, -1), grad_phi=lambda y: 3 * y**3, hess_phi=lambda y: 12 * y[..., :, None] ** 2 * np.eye(2))
    assert any("grad_phi" in v for v in check_surface(s, np.array([[0.5, 0.7]])))


def test_small_v_sym_diff_has_no_cancellation():
    s = get_surface("powerpert:a=1,p=3")
    c = np.array([3.0, 0.0])
    v = np.array([1e-7, 0.0])
    # second difference of |y|^3 along the axis: 6 |c| |v|^2
    assert float(s.psi_sym_diff(c, v)) == pytest.approx(2e-14 + 6 * 3 * 1e-14, rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(xi=point, w=nonzero, name=st.sampled_from(["quartic-mixed", "exp", "powerpert:a=1,p=3"]))
def test_lambda_properties(xi, w, name):
    s = get_surface(name)
    lam = solve_lambda(s, xi, w)
    assert 0 < lam <= 1
    assert solve_lambda(s, xi, -w) == pytest.approx(lam, rel=1e-12)
    resid = float(g_function(s, xi, w, lam)) - 2 * w @ w
    assert abs(resid) <= 1e-10 * (w @ w)


@settings(max_examples=60, deadline=None)
@given(xi=point, y=nonzero, name=st.sampled_from(["quartic-mixed", "exp", "poly:c2=1,c3=0.5"]))
def test_contraction_property(xi, y, name):
    assert 0 < det_T_prime(get_surface(name), xi, y) < 1


def test_solver_respects_config():
    cfg = NumericConfig(root_tol=1e-6)
    a = solve_lambda(Q, [0, 0], [1, 0], cfg)
    assert a == pytest.approx(solve_lambda(Q, [0, 0], [1, 0]), abs=1e-6)
