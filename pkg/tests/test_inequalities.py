import math

import numpy as np
import pytest

from carnot_hardy.fields import (make_annular_bump, make_gaussian_in_norm, random_bump_specs,
                                 sweep_schedule)
from carnot_hardy.groups import abelian, heisenberg, htype, quaternionic_triple
from carnot_hardy.inequalities import (HOLDS, INCONCLUSIVE, VIOLATED, HypothesisError, SweepError,
                                       ckn_report, elementary_inequality_constant, extrapolate,
                                       gradient_remainder_report, hardy_constant, hardy_report,
                                       improved_hardy_report, interpolation_report,
                                       rellich_constant, rellich_derivation_check, rellich_report,
                                       rellich_sobolev_report, run_battery, sharpness_sweep,
                                       uncertainty_report, verdict)
from carnot_hardy.quadrature import IntegrationConfig
from oracles import radial_quotient

CFG = IntegrationConfig(samples=20000, shells=16)
H1, H2 = heisenberg(1), heisenberg(2)


def bump(g, r0=0.2, R=1.0, c=0.1):
    return make_annular_bump(g, r0, R, np.full(g.m, c / g.m), np.full(g.k, -c / max(g.k, 1)))


def test_sharp_constants():
    assert hardy_constant(4, 0) == 1.0
    assert hardy_constant(3, 0) == 0.25
    assert hardy_constant(4, 1) == 2.25
    assert rellich_constant(6, 0) == 9.0
    assert rellich_constant(6, 0) == 6**2 * 2**2 / 16


def test_report_constants_and_gamma_independence():
    assert hardy_report(H1, 0, 0, bump(H1), CFG).sharp_constant == 1.0
    assert hardy_report(abelian(3), 0, 0, bump(abelian(3)), CFG).sharp_constant == 0.25
    assert hardy_report(H1, 1, 2, bump(H1), CFG).sharp_constant == 2.25
    assert rellich_report(H2, 0, bump(H2), CFG).sharp_constant == 9.0
    assert rellich_report(abelian(6), 0, bump(abelian(6)), CFG).sharp_constant == 9.0


def test_verdict_policy():
    assert verdict(1.0, 0.1, 1.0) == HOLDS
    assert verdict(0.71, 0.1, 1.0) == HOLDS
    assert verdict(0.6, 0.1, 1.0) == INCONCLUSIVE
    assert verdict(0.49, 0.1, 1.0) == VIOLATED
    assert verdict(0.99, 0.0, 1.0) == VIOLATED


def test_report_fields_and_serialisation():
    rep = hardy_report(H1, 0.0, 0.0, bump(H1), CFG)
    assert rep.quotient == pytest.approx(rep.lhs.value / rep.rhs.value, rel=1e-12)
    assert rep.sigma > 0 and rep.verdict == HOLDS
    d = rep.to_dict()
    assert d["params"] == {"alpha": 0.0, "gamma": 0.0}
    assert d["field"]["kind"] == "annular-bump" and d["config"]["samples"] == 20000
    row = rep.csv_row()
    assert row[:5] == ["H1", "hardy", "0", "gamma", "0"]


def test_hypothesis_errors():
    with pytest.raises(HypothesisError):
        hardy_report(H1, -2.0, 0.0, bump(H1), CFG)
    with pytest.raises(HypothesisError):
        hardy_report(H1, 0.0, -1.5, bump(H1), CFG)
    with pytest.raises(HypothesisError):
        rellich_report(H1, 0.0, bump(H1), CFG)
    with pytest.raises(HypothesisError):
        hardy_report(H1, 0.0, 0.0, make_gaussian_in_norm(H1, 1.0), CFG)
    with pytest.raises(HypothesisError):
        ckn_report(H1, 2.5, 0.0, bump(H1), CFG)
    with pytest.raises(HypothesisError):
        ckn_report(H1, 1.0, 4.5, bump(H1), CFG, ball_radius=1.0)
    with pytest.raises(HypothesisError):
        rellich_sobolev_report(H1, 1.0, bump(H1), CFG)
    with pytest.raises(HypothesisError):
        improved_hardy_report(H1, 2.0, 1.0, bump(H1), CFG)
    with pytest.raises(HypothesisError):
        improved_hardy_report(H1, 0.0, 0.5, bump(H1), CFG)
    with pytest.raises(HypothesisError):
        gradient_remainder_report(H1, 2.0, 1.0, bump(H1), CFG)
    with pytest.raises(HypothesisError):
        interpolation_report(H1, 1.0, 1.0, bump(H1), CFG)
    with pytest.raises(ValueError):
        uncertainty_report(H1, "other", 0.0, bump(H1), CFG)


@pytest.mark.parametrize("name", ["H1", "Htype"])
def test_dilation_invariance(name):
    g = H1 if name == "H1" else htype(quaternionic_triple())
    phi = bump(g, 0.3, 1.5)
    a = hardy_report(g, 0.5, 0.0, phi, CFG, stream=1)
    b = hardy_report(g, 0.5, 0.0, phi.dilated(3.0), CFG, stream=2)
    assert abs(a.quotient - b.quotient) <= 3 * math.hypot(a.sigma, b.sigma)
    a = rellich_report(g, 1.0, phi, CFG, stream=3)
    b = rellich_report(g, 1.0, phi.dilated(0.4), CFG, stream=4)
    assert abs(a.quotient - b.quotient) <= 3 * math.hypot(a.sigma, b.sigma)


def test_uncertainty_follows_from_hardy_on_shared_samples():
    # Cauchy-Schwarz holds exactly for the positive-weight empirical measure
    rng = np.random.default_rng(0)
    for spec in random_bump_specs(H2, 5, rng):
        phi = spec.build(H2)
        u = uncertainty_report(H2, "grad-weighted", 0.0, phi, CFG, stream=7)
        h = hardy_report(H2, 0.0, 0.0, phi, CFG, stream=7)
        assert u.quotient >= h.quotient * (1 - 1e-12)


def test_gaussian_equality_case():
    for beta in (0.5, 2.0):
        rep = uncertainty_report(H1, "norm-weighted", 0.0, make_gaussian_in_norm(H1, beta), CFG,
                                 constant=4.0)
        assert abs(rep.quotient / 4.0 - 1) <= 3 * rep.sigma / 4.0


@pytest.mark.parametrize("name", ["H2", "Htype"])
def test_rellich_derivation_identity_and_chain(name):
    g = H2 if name == "H2" else htype(quaternionic_triple())
    for alpha, phi in ((0.0, bump(g)), (1.5, bump(g, 0.1, 2.0, 0.2))):
        identity, chain = rellich_derivation_check(g, alpha, phi, CFG)
        assert identity.passed, identity
        assert chain.holds_as_inequality, chain


def test_ckn_endpoints():
    phi = bump(H1)
    s2 = ckn_report(H1, 2.0, 0.0, phi, CFG, stream=5)
    h = hardy_report(H1, 0.0, 0.0, phi, CFG, stream=5)
    assert s2.quotient == pytest.approx(h.quotient, rel=1e-12)
    assert s2.sharp_constant == 1.0 and s2.verdict == HOLDS
    s0 = ckn_report(H1, 0.0, 0.0, phi, CFG)
    assert s0.sharp_constant is None and s0.positive
    # s = 0 exponent is the Sobolev exponent 2Q/(Q - 2)
    assert 2 * (H1.Q - 0) / (H1.Q - 2) == 2 * H1.Q / (H1.Q - 2)


def test_rellich_sobolev_endpoint():
    phi = bump(H2)
    rs = rellich_sobolev_report(H2, 2.0, phi, CFG, stream=6)
    r = rellich_report(H2, 0.0, phi, CFG, stream=6)
    assert rs.quotient == pytest.approx(r.quotient, rel=1e-12)
    assert rellich_sobolev_report(H2, 0.0, phi, CFG).positive


def test_improved_hardy_gap_scaling():
    phi = bump(H1, 0.2, 0.9, 0.15)
    lam = 2.0
    for alpha in (0.0, 1.0, -1.0):
        a = improved_hardy_report(H1, alpha, 1.0, phi, CFG, stream=1)
        b = improved_hardy_report(H1, alpha, 1.0, phi.dilated(lam), CFG, stream=2)
        k = lam ** (2 - alpha)
        assert a.positive
        assert abs(b.quotient - k * a.quotient) <= 3 * math.hypot(b.sigma, k * a.sigma)
        assert a.params["gap_r2"] == a.quotient


def test_improved_hardy_battery_min_is_stable():
    fields = [s.build(H1) for s in random_bump_specs(H1, 5, np.random.default_rng(1), outer=1.0)]
    mins = []
    for n in (10000, 20000):
        cfg = IntegrationConfig(samples=n, shells=16)
        res = run_battery(lambda phi: improved_hardy_report(H1, 0.0, 1.0, phi, cfg), fields)
        assert res.passed and res.min_positive
        mins.append(res.minimum.quotient)
    assert abs(mins[1] - mins[0]) <= 0.2 * mins[0]


def test_gradient_remainder_and_interpolation_share_gap():
    phi = bump(H1, 0.2, 0.9, 0.1)
    gr = gradient_remainder_report(H1, 1.5, 1.0, phi, CFG, stream=3)
    it = interpolation_report(H1, 1.5, 1.0, phi, CFG, stream=3)
    assert gr.positive and it.positive
    assert gr.lhs.value == pytest.approx(it.params["gap"], rel=1e-12)
    assert gr.params["holder_slack"] >= -3 * gr.params["holder_sigma"]
    scaled = interpolation_report(H1, 1.5, 1.0, phi.scaled(3.7), CFG, stream=3)
    assert scaled.quotient == pytest.approx(it.quotient, rel=1e-9)


def test_elementary_inequality_constant():
    c = elementary_inequality_constant(1.5)
    assert math.isfinite(c) and c > 0
    assert elementary_inequality_constant(1.5, samples=400_000, seed=1) <= 1.5 * c
    with pytest.raises(ValueError):
        elementary_inequality_constant(2.0)


def test_extrapolate_exact_line():
    c0, s, c1, res = extrapolate([0.5, 0.2, 0.1], [1.5, 1.2, 1.1], [0.0, 0.0, 0.0])
    assert c0 == pytest.approx(1.0) and c1 == pytest.approx(1.0) and res < 1e-12 and s == 0


def test_sweep_matches_radial_oracle():
    eps = [0.5, 0.2, 0.1, 0.05]
    sw = sharpness_sweep(H1, "hardy", eps, CFG)
    for e, q, s in zip(eps, sw.quotients, sw.sigmas):
        sched = sweep_schedule(e)
        ref = radial_quotient("hardy", H1.Q, 0.0, e, sched["delta"], sched["R"])
        assert abs(q - ref) <= 4 * s, (e, q, ref, s)
    assert sw.relative_error <= 0.05
    assert all(a > b for a, b in zip(sw.quotients, sw.quotients[1:]))


def test_gamma_independence_of_sweep_limit():
    limits = [sharpness_sweep(H1, "hardy", [0.5, 0.2, 0.1, 0.05], CFG, gamma=gm).limit
              for gm in (0.0, 1.0, 2.0)]
    assert max(limits) - min(limits) <= 0.05 * min(limits)
    assert all(abs(c - 1.0) <= 0.05 for c in limits)


def test_sweep_errors():
    with pytest.raises(ValueError):
        sharpness_sweep(H1, "hardy", [0.1, 0.2], CFG)
    with pytest.raises(ValueError):
        sharpness_sweep(H1, "hardy", [], CFG)
    with pytest.raises(ValueError):
        sharpness_sweep(H1, "other", [0.2, 0.1], CFG)
    # the kinked ramp makes the quotient grow as eps shrinks
    with pytest.raises(SweepError):
        sharpness_sweep(H2, "rellich", [0.5, 0.2], CFG, ramp="literal")
