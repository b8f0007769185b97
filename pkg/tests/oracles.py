"""Independent reference computations used by the test-suite.

Nothing here imports the package's field or jet code: derivatives are taken
by finite differences through the group law, and radial quotients are
reduced to one-dimensional integrals evaluated with adaptive quadrature.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import quad


# ---------------------------------------------------------------------------
# finite differences through the group law


def _right_translate(mu, J, m, x, i, s):
    """x . (s e_i) for a horizontal unit vector e_i (exponential coordinates)."""
    y = np.array(x, dtype=float, copy=True)
    y[i] += s
    if J is not None and len(J):
        v = x[:m]
        e = np.zeros(m)
        e[i] = s
        y[m:] += mu * np.einsum("aij,j,i->a", J, v, e)
    return y


def _richardson(f, h):
    d1 = (f(h) - f(-h)) / (2 * h)
    d2 = (f(h / 2) - f(-h / 2)) / h
    return (4 * d2 - d1) / 3


def fd_gradient(func, mu, J, m, x, h=1e-4):
    """X_j f(x) = d/ds f(x . s e_j) at s = 0."""
    return np.array([
        _richardson(lambda s: func(_right_translate(mu, J, m, x, j, s)), h) for j in range(m)
    ])


def fd_hessian(func, mu, J, m, x, h=1e-4):
    """X_i X_j f(x) = d/dt d/ds f(x . t e_i . s e_j)."""
    out = np.zeros((m, m))
    for i in range(m):
        for j in range(m):
            def inner(t):
                y = _right_translate(mu, J, m, x, i, t)
                return _richardson(lambda s: func(_right_translate(mu, J, m, y, j, s)), h)
            out[i, j] = _richardson(inner, h)
    return out


# ---------------------------------------------------------------------------
# one-dimensional radial reduction


def _s(u):
    u = min(max(u, 0.0), 1.0)
    return u**3 * (10 - 15 * u + 6 * u * u)


def _s1(u):
    return 0.0 if u <= 0 or u >= 1 else 30 * u * u * (1 - u) ** 2


def _s2(u):
    return 0.0 if u <= 0 or u >= 1 else 60 * u - 180 * u * u + 120 * u**3


def _blend(r, lo, w, A, B):
    u = (r - lo) / w
    S, S1, S2 = _s(u), _s1(u) / w, _s2(u) / (w * w)
    a, b = A(r), B(r)
    return ((1 - S) * a[0] + S * b[0],
            (1 - S) * a[1] + S * b[1] + S1 * (b[0] - a[0]),
            (1 - S) * a[2] + S * b[2] + 2 * S1 * (b[1] - a[1]) + S2 * (b[0] - a[0]))


def _cut(r, lo, w, rising):
    u = (r - lo) / w
    s, s1, s2 = _s(u), _s1(u) / w, _s2(u) / (w * w)
    return (s, s1, s2) if rising else (1 - s, -s1, -s2)


def _mul(a, b):
    return a[0] * b[0], a[1] * b[0] + a[0] * b[1], a[2] * b[0] + 2 * a[1] * b[1] + a[0] * b[2]


def extremizer_profile(kind, Q, alpha, eps, delta, R, r0=1e-3, slope_sign=-1):
    """(f, f', f'') of the mollified extremizer at a scalar radius."""
    if kind == "hardy":
        c = (Q + alpha - 2) / 2 + eps
        A = lambda r: (1.0, 0.0, 0.0)  # noqa: E731
    else:
        c = (Q + alpha - 4) / 2 + eps
        A = lambda r: (slope_sign * c * (r - 1) + 1, slope_sign * c, 0.0)  # noqa: E731
    P = lambda r: (r**-c, -c * r ** (-c - 1), c * (c + 1) * r ** (-c - 2))  # noqa: E731

    def f(r):
        if r < 1:
            core = A(r)
        elif r < 1 + delta:
            core = _blend(r, 1, delta, A, P)
        else:
            core = P(r)
        v = _mul(core, _cut(r, r0 / 2, r0 / 2, True))
        return _mul(v, _cut(r, R, R, False))

    return f


def radial_quotient(kind, Q, alpha, eps, delta, R, r0=1e-3, slope_sign=-1):
    """Hardy or Rellich quotient of a radial extremizer on an H-type or abelian group.

    For phi = f(N) both sides carry the same angular factor, so
    hardy   = int r^(a+Q-1) f'^2 / int r^(a+Q-3) f^2
    rellich = int r^(a+Q-1) (f'' + (Q-1) f'/r)^2 / int r^(a+Q-5) f^2.
    """
    f = extremizer_profile(kind, Q, alpha, eps, delta, R, r0, slope_sign)
    knots = [math.log(x) for x in (r0 / 2, r0, 1.0, 1.0 + delta, R, 2 * R)]

    def integral(h):
        total = 0.0
        for a, b in zip(knots[:-1], knots[1:]):
            total += quad(lambda t: h(math.exp(t)) * math.exp(t), a, b,
                          limit=400, epsabs=0, epsrel=1e-11)[0]
        return total

    if kind == "hardy":
        lhs = integral(lambda r: r ** (alpha + Q - 1) * f(r)[1] ** 2)
        rhs = integral(lambda r: r ** (alpha + Q - 3) * f(r)[0] ** 2)
    else:
        def lap(r):
            v = f(r)
            return v[2] + (Q - 1) * v[1] / r
        lhs = integral(lambda r: r ** (alpha + Q - 1) * lap(r) ** 2)
        rhs = integral(lambda r: r ** (alpha + Q - 5) * f(r)[0] ** 2)
    return lhs / rhs


def bump_profile(r0, R):
    """(4u(1-u))^3 on [r0, R] with its first two derivatives."""
    w = R - r0

    def f(r):
        if r <= r0 or r >= R:
            return 0.0, 0.0, 0.0
        u = (r - r0) / w
        b = 4 * u * (1 - u)
        b1 = 4 * (1 - 2 * u) / w
        b2 = -8 / (w * w)
        return b**3, 3 * b * b * b1, 6 * b * b1 * b1 + 3 * b * b * b2

    return f


def radial_integral(h, lo, hi):
    """int_lo^hi h(r) dr in log variables."""
    return quad(lambda t: h(math.exp(t)) * math.exp(t), math.log(lo), math.log(hi),
                limit=400, epsabs=0, epsrel=1e-11)[0]
