import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cayleynet.linalg import LinalgError, haar_unitary
from cayleynet.model import euclid_gradient, mse_loss
from cayleynet.quantum import unitary_error
from cayleynet.stiefel import (
    MAX_HALVINGS,
    BacktrackingError,
    TangentVector,
    backtracking_step,
    canonical_inner,
    cayley_step,
    descent_derivative,
    riemannian_grad,
    skew_from_gradient,
    tangent_residual,
)

from .helpers import crandn, haar_dataset, random_skew


def quad_loss(u):
    def f(w):
        d = w - u
        return float(np.sum(np.abs(d) ** 2))

    def grad(w):
        return 2 * (w - u)

    return f, grad


# -- skew_from_gradient ------------------------------------------------------

def test_skew_examples(rng):
    w = haar_unitary(4, 0)
    np.testing.assert_allclose(skew_from_gradient(w, w), np.zeros((4, 4)), atol=1e-15)
    np.testing.assert_array_equal(skew_from_gradient([[1j]], [[1]]), [[2j]])


@settings(max_examples=50)
@given(st.integers(1, 16), st.integers(0, 2 ** 32 - 1))
def test_skew_closure(n, seed):
    rng = np.random.default_rng(seed)
    g, w = crandn(rng, n, n), crandn(rng, n, n)
    a = skew_from_gradient(g, w)
    assert np.linalg.norm(a + a.conj().T) <= 1e-14 * max(np.linalg.norm(a), 1.0)
    raw = g @ w.conj().T - w @ g.conj().T
    np.testing.assert_allclose(a, raw, atol=1e-12 * np.linalg.norm(raw))


def test_skew_dimension_mismatch():
    with pytest.raises(LinalgError):
        skew_from_gradient(np.eye(2), np.eye(3))


# -- cayley_step -------------------------------------------------------------

def test_cayley_identity_cases(rng):
    w = haar_unitary(4, 1)
    a = random_skew(rng, 4)
    np.testing.assert_array_equal(cayley_step(w, np.zeros((4, 4)), 0.3), w)
    np.testing.assert_array_equal(cayley_step(w, a, 0.0), w)


def test_cayley_scalar_oracle():
    # (1 - i) / (1 + i) = -i
    np.testing.assert_allclose(cayley_step([[1]], [[2j]], 1.0), [[-1j]], atol=1e-15)


def test_cayley_matches_explicit_inverse(rng):
    w = haar_unitary(6, 3)
    a = random_skew(rng, 6)
    lam = 0.7
    eye = np.eye(6)
    expected = np.linalg.inv(eye + lam / 2 * a) @ (eye - lam / 2 * a) @ w
    np.testing.assert_allclose(cayley_step(w, a, lam), expected, atol=1e-12)


def test_cayley_curve_tangent_at_zero(rng):
    # Y'(0) = -A W
    w = haar_unitary(4, 5)
    a = random_skew(rng, 4)
    h = 1e-6
    slope = (cayley_step(w, a, h) - cayley_step(w, a, -h)) / (2 * h)
    np.testing.assert_allclose(slope, -a @ w, atol=1e-8)


@pytest.mark.parametrize("n", [2, 4, 8, 32])
def test_cayley_unitarity_large_lambda(n, backend, rng):
    for trial in range(10):
        w = haar_unitary(n, trial)
        a = random_skew(rng, n, scale=rng.uniform(0.1, 10))
        lam = 10 ** rng.uniform(-4, 1)
        y = cayley_step(w, a, lam)
        assert unitary_error(y) <= 1e-12 + 10 * unitary_error(w)


# -- canonical inner product -------------------------------------------------

def test_canonical_inner_examples(rng):
    w = haar_unitary(5, 2)
    zero = np.zeros((5, 5))
    assert canonical_inner(zero, zero, w) == 0
    a = random_skew(rng, 5)
    z = a @ w
    direct = np.trace(z.conj().T @ (np.eye(5) - 0.5 * w @ w.conj().T) @ z)
    val = canonical_inner(z, z, w)
    assert abs(val - direct) <= 1e-12 * abs(direct)
    assert abs(val.real - 0.5 * np.linalg.norm(a) ** 2) <= 1e-12 * abs(val)
    assert abs(val.imag) <= 1e-10


def test_canonical_inner_hermitian_symmetry(rng):
    for _ in range(20):
        w = crandn(rng, 4, 4)
        z1, z2 = crandn(rng, 4, 4), crandn(rng, 4, 4)
        assert abs(canonical_inner(z1, z2, w) - np.conj(canonical_inner(z2, z1, w))) <= 1e-10


def test_canonical_inner_shape_check():
    with pytest.raises(LinalgError):
        canonical_inner(np.eye(2), np.eye(2), np.eye(3))


# -- riemannian gradient and tangent space -----------------------------------

def test_riemannian_grad_examples(rng):
    w = haar_unitary(4, 4)
    np.testing.assert_array_equal(riemannian_grad(np.zeros((4, 4)), w), np.zeros((4, 4)))
    np.testing.assert_array_equal(riemannian_grad([[1j]], [[1]]), [[2j]])
    for _ in range(20):
        z = riemannian_grad(crandn(rng, 4, 4), w)
        assert tangent_residual(z, w) <= 1e-8
        TangentVector(z, w)


def test_tangent_vector_rejects_non_tangent():
    with pytest.raises(ValueError):
        TangentVector(np.eye(2), np.eye(2))


def test_riemannian_grad_represents_differential(rng):
    # Df(W)[Z] = Re tr(G^dagger Z) = Re <AW, Z>_c for tangent Z
    u = haar_unitary(4, 9)
    f, grad = quad_loss(u)
    w = haar_unitary(4, 10)
    g = grad(w)
    for _ in range(10):
        z = random_skew(rng, 4) @ w
        lhs = np.real(np.vdot(g, z))
        rhs = canonical_inner(riemannian_grad(g, w), z, w).real
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1)


def test_first_order_unitarity_slope(rng):
    w = haar_unitary(4, 6)
    z = random_skew(rng, 4) @ w
    eps = np.array([1e-2, 1e-3, 1e-4])
    err = [np.linalg.norm((w + e * z) @ (w + e * z).conj().T - np.eye(4)) for e in eps]
    slope = np.polyfit(np.log10(eps), np.log10(err), 1)[0]
    assert 1.9 <= slope <= 2.1


# -- descent derivative ------------------------------------------------------

def test_descent_derivative_examples():
    w = haar_unitary(3, 1)
    assert descent_derivative(np.zeros((3, 3)), w) == 0
    assert descent_derivative(crandn(np.random.default_rng(0), 3, 3), w) < 0


def test_descent_derivative_forward_difference():
    u, w = haar_unitary(4, 20), haar_unitary(4, 21)
    f, grad = quad_loss(u)
    g = grad(w)
    a = skew_from_gradient(g, w)
    h = 1e-6
    fd = (f(cayley_step(w, a, h)) - f(w)) / h
    d = descent_derivative(g, w)
    assert abs(fd - d) <= 100 * h * max(1.0, abs(d))


def test_descent_derivative_central_difference_model_loss():
    data = haar_dataset(2, 8, target_seed=7)
    for seed in range(100, 120):
        w = haar_unitary(4, seed)
        g = euclid_gradient(w, data)
        a = skew_from_gradient(g, w)
        h = 1e-5
        fd = (mse_loss(cayley_step(w, a, h), data) - mse_loss(cayley_step(w, a, -h), data)) / (2 * h)
        d = descent_derivative(g, w)
        assert d <= 0
        assert abs(fd - d) <= 1e-4 * abs(d)


# -- backtracking ------------------------------------------------------------

def test_backtracking_stationary_point():
    w = haar_unitary(4, 1)
    f, _ = quad_loss(w)
    step = backtracking_step(w, np.zeros((4, 4)), f, 0.1)
    np.testing.assert_array_equal(step.w_next, w)
    assert step.loss_after == step.loss_before
    assert step.n_backtracks == 0 and step.stationary


def test_backtracking_quadratic_many_trials():
    for seed in range(100):
        u, w = haar_unitary(4, 1000 + seed), haar_unitary(4, seed)
        f, grad = quad_loss(u)
        g = grad(w)
        step = backtracking_step(w, g, f, 10.0)
        assert step.n_backtracks <= MAX_HALVINGS
        assert step.loss_after < step.loss_before
        gsq = -descent_derivative(g, w)
        assert step.loss_after <= step.loss_before - 0.25 * step.lambda_used * gsq
        assert unitary_error(step.w_next) <= 1e-10


def test_backtracking_halves_from_lambda0():
    u, w = haar_unitary(4, 50), haar_unitary(4, 51)
    f, grad = quad_loss(u)
    step = backtracking_step(w, grad(w), f, 1e3)
    assert step.n_backtracks > 0
    assert step.lambda_used == 1e3 / 2 ** step.n_backtracks


def test_backtracking_inconsistent_gradient_raises():
    u, w = haar_unitary(4, 60), haar_unitary(4, 61)
    f, grad = quad_loss(u)
    with pytest.raises(BacktrackingError):
        backtracking_step(w, -grad(w), f, 0.1)


def test_backtracking_rejects_bad_lambda():
    with pytest.raises(ValueError):
        backtracking_step(np.eye(2), np.eye(2), lambda w: 0.0, 0.0)
