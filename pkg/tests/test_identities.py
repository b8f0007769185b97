import numpy as np
import pytest

from carnot_hardy.fields import norm_power
from carnot_hardy.groups import heisenberg, random_points
from carnot_hardy.identities import (IdentityResult, identity_suite, p_harmonicity,
                                     power_laplacian_identity)


def test_suite_passes_on_every_group(group):
    results = identity_suite(group, seed=5, count=200)
    failed = [(r.name, r.params, r.max_error) for r in results if not r.passed]
    assert not failed


def test_suite_skips_p_equal_to_Q():
    g = heisenberg(1)  # Q = 4
    ps = [r.params["p"] for r in identity_suite(g, count=50) if r.name == "p-harmonicity"]
    assert ps == [1.5, 3.0]


def test_results_are_deterministic_in_seed():
    g = heisenberg(2)
    a = power_laplacian_identity(g, 0.5, count=100, seed=3)
    b = power_laplacian_identity(g, 0.5, count=100, seed=3)
    assert a.max_error == b.max_error


def test_wrong_exponent_is_not_p_harmonic():
    g, p = heisenberg(1), 3.0
    assert p_harmonicity(g, p, count=100).passed
    X = random_points(g, 100, np.random.default_rng(0))
    J = norm_power(g, (p - g.Q) / (p - 1) + 0.1).jet(X)
    quad = np.einsum("ni,nij,nj->n", J.hgrad, J.hhess, J.hgrad)
    t1 = J.grad_sq ** ((p - 2) / 2) * J.hlap
    t2 = (p - 2) * J.grad_sq ** ((p - 4) / 2) * quad
    assert np.max(np.abs(t1 + t2) / (np.abs(t1) + np.abs(t2))) > 1e-2
    res = IdentityResult("x", g.label, {}, 0.2, 1e-6, 1)
    assert not res.passed and res.to_dict()["passed"] is False


@pytest.mark.parametrize("tol", [0.0])
def test_zero_tolerance_fails_on_roundoff(tol):
    g = heisenberg(1)
    res = power_laplacian_identity(g, 3.0, count=200, tol=tol)
    assert res.max_error > 0 and not res.passed
    assert np.isfinite(res.max_error)
