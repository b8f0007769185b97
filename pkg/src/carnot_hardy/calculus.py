"""Horizontal differential operators evaluated from exact 2-jets."""

from __future__ import annotations

import math

import numpy as np

from .fields import PowerProfile, Profile, ScalarField, norm_power
from .groups import GroupSpec, Point, homogeneous_norm, norm_gradient_closed
from .jets import Jet2


class DegenerateGradient(ValueError):
    """|grad_G phi| vanished where the operator needs a negative power of it."""


def _batch(g: GroupSpec, x):
    if isinstance(x, Point):
        return g.check(x.as_array()[None]), True
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return g.check(x[None]), True
    return g.check(x), False


def _out(a, single):
    return a[0] if single else a


def jet(g: GroupSpec, phi: ScalarField, x) -> Jet2:
    X, _ = _batch(g, x)
    return phi.jet(X)


def horizontal_gradient(g: GroupSpec, phi: ScalarField, x):
    """(X_1 phi, ..., X_m phi) at one point or a batch of points."""
    X, single = _batch(g, x)
    return _out(phi.jet(X).hgrad, single)


def sub_laplacian(g: GroupSpec, phi: ScalarField, x):
    X, single = _batch(g, x)
    return _out(phi.jet(X).hlap, single)


def p_sub_laplacian(g: GroupSpec, phi: ScalarField, x, p: float):
    """sum_i X_i(|grad phi|^(p-2) X_i phi), expanded as

    |g|^(p-2) lap phi + (p-2) |g|^(p-4) sum_ij g_i g_j X_i X_j phi.
    """
    if not 1 < p < math.inf:
        raise ValueError(f"p must lie in (1, inf), got {p}")
    X, single = _batch(g, x)
    J = phi.jet(X)
    gsq = J.grad_sq
    if p < 2 and np.any(gsq == 0):
        raise DegenerateGradient("horizontal gradient vanishes with p < 2")
    quad = np.einsum("ni,nij,nj->n", J.hgrad, J.hhess, J.hgrad)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = gsq ** ((p - 2) / 2) * J.hlap
        if p != 2:
            out = out + (p - 2) * gsq ** ((p - 4) / 2) * quad
    return _out(out, single)


def infinity_sub_laplacian(g: GroupSpec, phi: ScalarField, x):
    """1/2 <grad_G |grad_G phi|^2, grad_G phi> = sum_ij g_i g_j X_i X_j phi."""
    X, single = _batch(g, x)
    J = phi.jet(X)
    return _out(np.einsum("ni,nij,nj->n", J.hgrad, J.hhess, J.hgrad), single)


def norm_gradient_sq(g: GroupSpec, x):
    """Closed form |grad_G N|^2 = |v|^2/N^2."""
    X, single = _batch(g, x)
    if np.any(homogeneous_norm(g, X) == 0):
        raise ValueError("|grad N| is undefined at the origin")
    return _out(norm_gradient_closed(g, X), single)


def radial_laplacian(g: GroupSpec, profile: Profile, x):
    """|grad N|^2 (f''(N) + (Q-1) f'(N)/N) for phi = f(N) on H-type or abelian groups."""
    X, single = _batch(g, x)
    N = homogeneous_norm(g, X)
    if np.any(N == 0):
        raise ValueError("radial formula needs N(x) > 0")
    _, f1, f2 = profile(N)
    return _out(norm_gradient_closed(g, X) * (f2 + (g.Q - 1) * f1 / N), single)


def fundamental_solution(g: GroupSpec) -> ScalarField:
    """u = N^(2-Q), without Folland's normalising constant."""
    return norm_power(g, 2.0 - g.Q)


def p_fundamental_solution(g: GroupSpec, p: float) -> ScalarField:
    """u_p = N^((p-Q)/(p-1)) for p != Q."""
    if p == g.Q:
        raise ValueError("the p = Q fundamental solution is logarithmic and not provided")
    return norm_power(g, (p - g.Q) / (p - 1.0))


def folland_constant(Q: int) -> float:
    """c_Q with Psi = c_Q rho^(2-Q) the fundamental solution of -Delta on H^n (metadata only)."""
    return 2 ** ((Q - 2) / 2) * math.gamma((Q - 2) / 4) ** 2 / math.pi ** (Q / 2)


__all__ = [
    "DegenerateGradient",
    "PowerProfile",
    "folland_constant",
    "fundamental_solution",
    "horizontal_gradient",
    "infinity_sub_laplacian",
    "jet",
    "norm_gradient_sq",
    "p_fundamental_solution",
    "p_sub_laplacian",
    "radial_laplacian",
    "sub_laplacian",
]
