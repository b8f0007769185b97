import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from carnot_hardy import jets
from carnot_hardy.jets import Taylor2


def _expr(x):
    a, b, c = x
    return jets.exp(a * b * (-0.3)) * jets.sqrt(c * c + 1.0) + jets.log(a * a + 2.0) / (b * b + 1.5) \
        + jets.power(a * a + b * b + 0.5, -0.75)


def _fd(f, x, h=1e-5):
    d = len(x)
    grad = np.zeros(d)
    hess = np.zeros((d, d))
    for i in range(d):
        e = np.zeros(d)
        e[i] = h
        grad[i] = (f(x + e) - f(x - e)) / (2 * h)
        for j in range(d):
            e2 = np.zeros(d)
            e2[j] = h
            hess[i, j] = (f(x + e + e2) - f(x + e - e2) - f(x - e + e2) + f(x - e - e2)) / (4 * h * h)
    return grad, hess


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-2, 2), min_size=3, max_size=3))
def test_taylor2_matches_finite_differences(p):
    x = np.array(p)
    t = _expr(Taylor2.variables(x[None]))
    scalar = lambda y: float(_expr([np.array([v]) for v in y])[0])  # noqa: E731
    g, h = _fd(scalar, x)
    assert abs(t.val[0] - scalar(x)) <= 1e-14 * (1 + abs(t.val[0]))
    np.testing.assert_allclose(t.grad[0], g, rtol=1e-7, atol=1e-7)
    np.testing.assert_allclose(t.hess[0], h, rtol=1e-4, atol=1e-4)


def test_value_mode_matches_jet_mode():
    X = np.random.default_rng(0).uniform(-1, 1, (20, 3))
    vals = _expr([X[:, i] for i in range(3)])
    np.testing.assert_allclose(_expr(Taylor2.variables(X)).val, vals, rtol=1e-15)


def test_quadratic_and_constants():
    X = np.random.default_rng(1).normal(size=(5, 4))
    q = Taylor2.quadratic(X, [0, 2])
    np.testing.assert_allclose(q.val, X[:, 0] ** 2 + X[:, 2] ** 2)
    assert np.all(q.hess[:, 1, 1] == 0) and np.all(q.hess[:, 2, 2] == 2)
    c = Taylor2.constant(3.0, 5, 4)
    assert np.all(c.grad == 0) and np.all(c.hess == 0)


def test_hessian_symmetry():
    X = np.random.default_rng(2).uniform(-1, 1, (10, 3))
    t = _expr(Taylor2.variables(X))
    np.testing.assert_allclose(t.hess, t.hess.transpose(0, 2, 1), rtol=1e-14, atol=1e-14)
