"""Pointwise identity checks for the horizontal calculus.

Each check evaluates an operator through exact jets at random points with
0.1 <= N <= 10 and compares it with a closed form.  Errors are measured
relative to a natural homogeneous scale of the expression, so the tolerance
means the same thing at every radius.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np

from . import jets
from .calculus import radial_laplacian
from .fields import (BumpProfile, FieldContext, GaussianProfile, PolynomialProfile, PowerProfile,
                     ScalarField, make_annular_bump, norm_power, radial_field)
from .groups import GroupSpec, homogeneous_norm, norm_gradient_closed, random_points


@dataclass
class IdentityResult:
    name: str
    group: str
    params: dict = field(default_factory=dict)
    max_error: float = 0.0
    tolerance: float = 0.0
    points: int = 0

    @property
    def passed(self) -> bool:
        return bool(self.max_error <= self.tolerance)

    def to_dict(self) -> dict:
        return {**asdict(self), "passed": self.passed}


def _points(g: GroupSpec, count: int, seed: int, tag: int) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, tag])))
    return random_points(g, count, rng, 0.1, 10.0)


def _max_rel(diff, scale) -> float:
    return float(np.max(np.abs(diff) / scale))


def norm_gradient_identity(g, count=1000, seed=0, tol=1e-10) -> IdentityResult:
    """|grad N|^2 from jets against |v|^2/N^2."""
    X = _points(g, count, seed, 1)
    J = norm_power(g, 1.0).jet(X)
    closed = norm_gradient_closed(g, X)
    return IdentityResult("norm-gradient", g.label, {}, _max_rel(J.grad_sq - closed, 1.0), tol, count)


def power_laplacian_identity(g, exponent, count=1000, seed=0, tol=1e-8) -> IdentityResult:
    """lap N^e = e (e + Q - 2) |v|^2 N^(e-4)."""
    X = _points(g, count, seed, 2)
    N = homogeneous_norm(g, X)
    lap = norm_power(g, exponent).jet(X).hlap
    v2 = np.sum(X[:, : g.m] ** 2, axis=1)
    closed = exponent * (exponent + g.Q - 2) * v2 * N ** (exponent - 4)
    scale = np.maximum(abs(exponent * (exponent + g.Q - 2)), 1.0) * N ** (exponent - 2)
    return IdentityResult("power-laplacian", g.label, {"exponent": exponent},
                          _max_rel(lap - closed, scale), tol, count)


def weighted_laplacian_identity(g, alpha, count=1000, seed=0, tol=1e-8) -> IdentityResult:
    """lap N^(a-2) = (Q + a - 4)(a - 2) N^(a-4) |grad N|^2 away from the origin."""
    X = _points(g, count, seed, 3)
    N = homogeneous_norm(g, X)
    lap = norm_power(g, alpha - 2).jet(X).hlap
    c = (g.Q + alpha - 4) * (alpha - 2)
    closed = c * N ** (alpha - 4) * norm_gradient_closed(g, X)
    scale = max(abs(c), 1.0) * N ** (alpha - 4)
    return IdentityResult("weighted-laplacian", g.label, {"alpha": alpha},
                          _max_rel(lap - closed, scale), tol, count)


def harmonicity(g, count=1000, seed=0, tol=1e-6) -> IdentityResult:
    """|lap N^(2-Q)| relative to N^(-Q) |grad N|^2."""
    X = _points(g, count, seed, 4)
    N = homogeneous_norm(g, X)
    lap = norm_power(g, 2.0 - g.Q).jet(X).hlap
    scale = N ** (-g.Q) * norm_gradient_closed(g, X)
    return IdentityResult("harmonicity", g.label, {}, _max_rel(lap, scale), tol, count)


def p_harmonicity(g, p, count=500, seed=0, tol=1e-6) -> IdentityResult:
    """p-sub-Laplacian of N^((p-Q)/(p-1)), relative to the size of its two terms."""
    X = _points(g, count, seed, 5)
    J = norm_power(g, (p - g.Q) / (p - 1)).jet(X)
    gsq = J.grad_sq
    quad = np.einsum("ni,nij,nj->n", J.hgrad, J.hhess, J.hgrad)
    t1 = gsq ** ((p - 2) / 2) * J.hlap
    t2 = (p - 2) * gsq ** ((p - 4) / 2) * quad
    scale = np.abs(t1) + np.abs(t2)
    return IdentityResult("p-harmonicity", g.label, {"p": p}, _max_rel(t1 + t2, scale), tol, count)


def infinity_harmonicity(g, count=1000, seed=0, tol=1e-8) -> IdentityResult:
    """sum_ij X_iN X_jN X_iX_jN = 0; the natural scale of each term is 1/N."""
    X = _points(g, count, seed, 6)
    J = norm_power(g, 1.0).jet(X)
    val = np.einsum("ni,nij,nj->n", J.hgrad, J.hhess, J.hgrad)
    scale = 1.0 / homogeneous_norm(g, X)
    return IdentityResult("infinity-harmonicity", g.label, {}, _max_rel(val, scale), tol, count)


def _grad_norm_power(g, gamma) -> ScalarField:
    """|grad N|^gamma = (|v|^2/N^2)^(gamma/2)."""

    def expr(ctx: FieldContext):
        c = ctx.coords
        v2 = c[0] * c[0]
        for i in range(1, g.m):
            v2 = v2 + c[i] * c[i]
        N = ctx.N
        return jets.power(v2 / (N * N), gamma / 2)

    return ScalarField(g, expr, (1e-12, np.inf), {"kind": "grad-norm-power", "gamma": gamma})


def orthogonality(g, gamma, count=1000, seed=0, tol=1e-8) -> IdentityResult:
    """grad N . grad(|grad N|^gamma) = 0 (both factors scale like N^0 and N^-1)."""
    X = _points(g, count, seed, 7)
    gN = norm_power(g, 1.0).jet(X).hgrad
    gW = _grad_norm_power(g, gamma).jet(X).hgrad
    val = np.einsum("ni,ni->n", gN, gW)
    scale = np.maximum(1.0, abs(gamma)) / homogeneous_norm(g, X)
    return IdentityResult("orthogonality", g.label, {"gamma": gamma}, _max_rel(val, scale), tol, count)


def radial_form(g, count=1000, seed=0, tol=1e-8) -> IdentityResult:
    """Radial formula |grad N|^2 (f'' + (Q-1) f'/N) against the jet sub-Laplacian."""
    X = _points(g, count, seed, 8)
    N = homogeneous_norm(g, X)
    worst = 0.0
    profiles = [PowerProfile(2.0), PowerProfile(2.0 - g.Q), PolynomialProfile((1.0, -0.5, 0.3, 0.1)),
                GaussianProfile(0.3), BumpProfile(0.1, 10.0)]
    for prof in profiles:
        direct = radial_field(g, prof, (1e-12, np.inf)).jet(X).hlap
        formula = radial_laplacian(g, prof, X)
        _, f1, f2 = prof(N)
        scale = np.maximum(np.abs(f2) + (g.Q - 1) * np.abs(f1) / N, 1e-300)
        worst = max(worst, _max_rel(direct - formula, scale))
    return IdentityResult("radial-form", g.label, {"profiles": len(profiles)}, worst, tol, count)


def leibniz_expansion(g, beta=-0.7, count=1000, seed=0, tol=1e-10) -> IdentityResult:
    """|grad(N^b psi)|^2 = b^2 N^(2b-2)|grad N|^2 psi^2 + 2b N^(2b-1) psi grad N.grad psi + N^(2b)|grad psi|^2."""
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 9])))
    X = random_points(g, count, rng, 0.2, 5.0)
    coeffs = rng.uniform(-0.1, 0.1, g.m + g.k)
    psi = make_annular_bump(g, 0.1, 10.0, coeffs[: g.m], coeffs[g.m:])
    prod = ScalarField(g, lambda ctx: jets.power(ctx.N, beta) * psi.expr(ctx), psi.support)
    direct = prod.jet(X).grad_sq
    Jp = psi.jet(X)
    JN = norm_power(g, 1.0).jet(X)
    N = homogeneous_norm(g, X)
    expansion = (beta**2 * N ** (2 * beta - 2) * JN.grad_sq * Jp.value**2
                 + 2 * beta * N ** (2 * beta - 1) * Jp.value * np.einsum("ni,ni->n", JN.hgrad, Jp.hgrad)
                 + N ** (2 * beta) * Jp.grad_sq)
    scale = (beta**2 * N ** (2 * beta - 2) * JN.grad_sq * Jp.value**2 + N ** (2 * beta) * Jp.grad_sq
             + 1e-300)
    return IdentityResult("leibniz-expansion", g.label, {"beta": beta},
                          _max_rel(direct - expansion, scale), tol, count)


def identity_suite(g: GroupSpec, seed: int = 0, count: int = 1000) -> list[IdentityResult]:
    """The standard battery of pointwise checks on one group."""
    out = [norm_gradient_identity(g, count, seed), harmonicity(g, count, seed)]
    out += [power_laplacian_identity(g, e, count, seed) for e in (-1.0, 0.5, 3.0)]
    out += [weighted_laplacian_identity(g, a, count, seed) for a in (0.0, 1.0, 3.0)]
    out.append(infinity_harmonicity(g, count, seed))
    out += [orthogonality(g, gam, count, seed) for gam in (1.0, 2.0)]
    if g.kind in ("heisenberg", "htype", "abelian"):
        out.append(radial_form(g, count, seed))
    out.append(leibniz_expansion(g, count=count, seed=seed))
    for p in (1.5, 3.0):
        if p != g.Q:
            out.append(p_harmonicity(g, p, min(count, 500), seed))
    return out
