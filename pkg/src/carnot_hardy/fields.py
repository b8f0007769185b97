"""Admissible test fields: annular bumps, mollified extremizers, Gaussians.

A field is an expression in the coordinates and the homogeneous norm that is
evaluated either on plain arrays (values) or on :class:`~.jets.Taylor2`
variables (exact 2-jets).  Radial parts are 1-D profiles returning
``(f, f', f'')``; every seam is a quintic blend, so all fields are C^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import jets
from .groups import GroupSpec, Point, homogeneous_norm
from .jets import Jet2, Taylor2

GAUSSIAN_FLOOR = 1e-16


class FieldError(ValueError):
    pass


# ---------------------------------------------------------------------------
# 1-D profiles


def smoothstep(u):
    """Quintic 0 -> 1 on [0, 1] with vanishing first and second derivatives at both ends."""
    u = np.clip(u, 0.0, 1.0)
    s = u**3 * (10.0 - 15.0 * u + 6.0 * u * u)
    s1 = 30.0 * u * u * (1.0 - u) ** 2
    s2 = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u)
    return s, s1, s2


def _mul(a, b):
    return (
        a[0] * b[0],
        a[1] * b[0] + a[0] * b[1],
        a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2],
    )


def _blend(a, b, S):
    # convex form: with s = 1 the result is b exactly, even where b << a
    s, s1, s2 = S
    t = 1.0 - s
    d0, d1 = b[0] - a[0], b[1] - a[1]
    return (
        t * a[0] + s * b[0],
        t * a[1] + s * b[1] + s1 * d0,
        t * a[2] + s * b[2] + 2.0 * s1 * d1 + s2 * d0,
    )


def rising_cut(r, lo, hi):
    """0 below ``lo``, 1 above ``hi``."""
    w = hi - lo
    s, s1, s2 = smoothstep((r - lo) / w)
    return s, s1 / w, s2 / (w * w)


def falling_cut(r, lo, hi):
    s, s1, s2 = rising_cut(r, lo, hi)
    return 1.0 - s, -s1, -s2


def power_profile(r, c):
    """r^(-c) and its first two derivatives."""
    p = r ** (-c)
    return p, -c * p / r, c * (c + 1.0) * p / (r * r)


class Profile:
    """Radial profile f with analytic f' and f''."""

    def __call__(self, r) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        raise NotImplementedError


@dataclass
class PowerProfile(Profile):
    """f(r) = r^exponent."""

    exponent: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        e = self.exponent
        f = r**e
        return f, e * f / r, e * (e - 1.0) * f / (r * r)


@dataclass
class PolynomialProfile(Profile):
    """f(r) = sum_k coef[k] r^k."""

    coef: tuple[float, ...]

    def __call__(self, r):
        p = np.polynomial.Polynomial(self.coef)
        return p(r), p.deriv(1)(r), p.deriv(2)(r)


@dataclass
class BumpProfile(Profile):
    """(4u(1-u))^3 with u = (r - r0)/(R - r0): peak 1 at the midpoint, C^2 at both ends."""

    r0: float
    R: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        w = self.R - self.r0
        u = np.clip((r - self.r0) / w, 0.0, 1.0)
        q = 4.0 * u * (1.0 - u)
        q1 = 4.0 * (1.0 - 2.0 * u) / w
        q2 = -8.0 / (w * w)
        inside = (u > 0.0) & (u < 1.0)
        f = q**3
        f1 = np.where(inside, 3.0 * q * q * q1, 0.0)
        f2 = np.where(inside, 6.0 * q * q1 * q1 + 3.0 * q * q * q2, 0.0)
        return f, f1, f2


@dataclass
class GaussianProfile(Profile):
    beta: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        e = np.exp(-self.beta * r * r)
        b = self.beta
        return e, -2.0 * b * r * e, (4.0 * b * b * r * r - 2.0 * b) * e


@dataclass
class ExtremizerProfile(Profile):
    """core(r) on [0, 1], quintic seam over [1, 1 + delta] to r^(-decay).

    The product with an inner cut (0 at r_in/2, 1 at r_in) and an outer cut
    (1 at R, 0 at 2R) makes the profile compactly supported in (0, inf).
    ``core`` is the affine function ``c0 + c1 (r - 1)``.
    """

    decay: float
    delta: float
    r_in: float
    R: float
    c0: float = 1.0
    c1: float = 0.0

    def core(self, r):
        return self.c0 + self.c1 * (r - 1.0), np.full_like(r, self.c1), np.zeros_like(r)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        a = self.core(r)
        rp = np.maximum(r, 1.0)
        b = power_profile(rp, self.decay)
        S = smoothstep((r - 1.0) / self.delta)
        S = (S[0], S[1] / self.delta, S[2] / self.delta**2)
        f = _blend(a, b, S)
        f = _mul(f, rising_cut(r, 0.5 * self.r_in, self.r_in))
        f = _mul(f, falling_cut(r, self.R, 2.0 * self.R))
        return tuple(np.where(r > 2.0 * self.R, 0.0, t) for t in f)


# ---------------------------------------------------------------------------
# fields


class FieldContext:
    """Coordinates and norm in either value mode or exact-jet mode."""

    def __init__(self, g: GroupSpec, X: np.ndarray, exact: bool):
        self.g = g
        self.X = X
        self.exact = exact
        self._N = None
        self._coords = None

    @property
    def N(self):
        if self._N is None:
            self._N = jets.norm_taylor(self.g, self.X) if self.exact else homogeneous_norm(self.g, self.X)
        return self._N

    @property
    def coords(self):
        if self._coords is None:
            if self.exact:
                self._coords = Taylor2.variables(self.X)
            else:
                self._coords = [self.X[:, i] for i in range(self.X.shape[1])]
        return self._coords

    def radial(self, profile: Profile):
        r = jets.value(self.N)
        f0, f1, f2 = profile(r)
        return jets.compose(self.N, f0, f1, f2)


Expression = Callable[[FieldContext], Any]


class ScalarField:
    """Evaluable test function with a reported norm-annulus support.

    ``support = (r_in, r_out)``; the field is identically zero for N < r_in or
    N > r_out, and evaluation there returns exact zeros.
    """

    def __init__(self, g: GroupSpec, expr: Expression, support, spec: dict | None = None,
                 name: str = "field", breaks=()):
        r_in, r_out = support
        if r_in < 0 or not r_out > r_in:
            raise FieldError(f"bad support annulus {support}")
        self.group = g
        self.expr = expr
        self.support = (float(r_in), float(r_out))
        self.spec = spec or {"kind": name}
        self.name = name
        # radii of profile seams; quadrature uses them as extra shell edges
        self.breaks = tuple(float(b) for b in breaks if r_in < b < r_out)

    def _points(self, X) -> np.ndarray:
        if isinstance(X, Point):
            X = X.as_array()[None]
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[None]
        return self.group.check(X)

    def _inside(self, X):
        N = homogeneous_norm(self.group, X)
        r_in, r_out = self.support
        return (N >= r_in) & (N <= r_out)

    def values(self, X) -> np.ndarray:
        X = self._points(X)
        out = np.zeros(X.shape[0])
        mask = self._inside(X)
        if mask.any():
            out[mask] = self.expr(FieldContext(self.group, X[mask], exact=False))
        return out

    def taylor(self, X) -> Taylor2:
        X = self._points(X)
        n, d = X.shape
        out = Taylor2.constant(0.0, n, d)
        mask = self._inside(X)
        if mask.any():
            t = self.expr(FieldContext(self.group, X[mask], exact=True))
            if not isinstance(t, Taylor2):
                t = Taylor2.constant(0.0, int(mask.sum()), d) + t
            out.val[mask] = t.val
            out.grad[mask] = t.grad
            out.hess[mask] = t.hess
        return out

    def jet(self, X) -> Jet2:
        X = self._points(X)
        return jets.horizontal(self.group, X, self.taylor(X))

    def dilated(self, lam: float) -> "ScalarField":
        """phi o delta_lam, supported in the annulus scaled by 1/lam."""
        g, base = self.group, self.expr
        w = lam ** g.weights

        def expr(ctx: FieldContext):
            inner = FieldContext(g, ctx.X * w, ctx.exact)
            t = base(inner)
            if not ctx.exact:
                return t
            return Taylor2(t.val, t.grad * w, t.hess * w[:, None] * w[None, :])

        r_in, r_out = self.support
        spec = {"kind": "dilated", "lambda": lam, "base": self.spec}
        return ScalarField(g, expr, (r_in / lam, r_out / lam), spec, self.name + "_dilated",
                           tuple(b / lam for b in self.breaks))

    def scaled(self, c: float) -> "ScalarField":
        base = self.expr
        spec = {"kind": "scaled", "factor": c, "base": self.spec}
        return ScalarField(self.group, lambda ctx: base(ctx) * c, self.support, spec, self.name,
                           self.breaks)


def radial_field(g: GroupSpec, profile: Profile, support, spec=None, name="radial",
                 breaks=()) -> ScalarField:
    return ScalarField(g, lambda ctx: ctx.radial(profile), support, spec, name, breaks)


# ---------------------------------------------------------------------------
# builders


def make_annular_bump(g: GroupSpec, r0: float, R: float, cv=None, cz=None,
                      product: bool = False) -> ScalarField:
    """B(N) (1 + sum cv_i v_i/N + sum cz_a z_a/N^2), B a C^2 polynomial bump on [r0, R].

    The angular factor stays in [1 - s, 1 + s] with s = |cv|_1 + |cz|_1 since
    |v_i| <= N and |z_a| <= N^2.  ``product=True`` multiplies the factors
    (1 + cv_i v_i/N) instead of summing them.
    """
    if not 0 < r0 < R:
        raise FieldError(f"annular bump needs 0 < r0 < R, got r0={r0}, R={R}")
    cv = np.zeros(g.m) if cv is None else np.asarray(cv, dtype=float)
    cz = np.zeros(g.k) if cz is None else np.asarray(cz, dtype=float)
    if cv.shape != (g.m,) or cz.shape != (g.k,):
        raise FieldError("angular coefficients do not match the group dimensions")
    profile = BumpProfile(r0, R)
    active_v = [i for i in range(g.m) if cv[i] != 0.0]
    active_z = [a for a in range(g.k) if cz[a] != 0.0]

    def expr(ctx: FieldContext):
        B = ctx.radial(profile)
        if not (active_v or active_z):
            return B
        N = ctx.N
        N2 = N * N
        terms = [ctx.coords[i] * cv[i] / N for i in active_v]
        terms += [ctx.coords[g.m + a] * cz[a] / N2 for a in active_z]
        if product:
            out = B
            for t in terms:
                out = out * (t + 1.0)
            return out
        return B * (sum(terms[1:], terms[0]) + 1.0)

    kind = "product-modulated" if product else "annular-bump"
    spec = {"kind": kind, "r0": r0, "R": R, "cv": cv.tolist(), "cz": cz.tolist()}
    return ScalarField(g, expr, (r0, R), spec, kind)


def _check_extremizer(eps, delta, R):
    if not eps > 0:
        raise FieldError("extremizer needs eps > 0")
    if not 0 < delta < 0.5:
        raise FieldError("mollification width delta must lie in (0, 1/2)")
    if not R > 2:
        raise FieldError("outer radius R must exceed 2")


def make_hardy_extremizer(g: GroupSpec, alpha: float, eps: float, delta: float, R: float,
                          r0: float = 1e-3) -> ScalarField:
    """1 on [r0, 1], N^-((Q+alpha-2)/2 + eps) past 1 + delta, cut off over [R, 2R]."""
    if not g.Q + alpha - 2 > 0:
        raise FieldError("Hardy extremizer needs Q + alpha - 2 > 0")
    _check_extremizer(eps, delta, R)
    decay = (g.Q + alpha - 2) / 2 + eps
    profile = ExtremizerProfile(decay, delta, r0, R)
    spec = {"kind": "hardy-extremizer", "alpha": alpha, "eps": eps, "delta": delta, "R": R, "r0": r0}
    return radial_field(g, profile, (0.5 * r0, 2.0 * R), spec, "hardy-extremizer",
                        (r0, 1.0, 1.0 + delta, R))


def make_rellich_extremizer(g: GroupSpec, alpha: float, eps: float, delta: float, R: float,
                            r0: float = 1e-3, ramp: str = "c1") -> ScalarField:
    """Affine ramp on [0, 1], N^-b past 1 + delta with b = (Q+alpha-4)/2 + eps.

    ``ramp="literal"`` uses the slope +b below N = 1, which meets the tail with
    a corner (the seam then carries a large second derivative).
    ``ramp="c1"`` uses slope -b, so the two pieces already agree to first
    order and the quotient converges as eps -> 0.
    """
    if not g.Q + alpha - 4 > 0:
        raise FieldError("Rellich extremizer needs Q + alpha - 4 > 0")
    _check_extremizer(eps, delta, R)
    if ramp not in ("c1", "literal"):
        raise FieldError(f"unknown ramp {ramp!r}")
    b = (g.Q + alpha - 4) / 2 + eps
    slope = b if ramp == "literal" else -b
    profile = ExtremizerProfile(b, delta, r0, R, c0=1.0, c1=slope)
    spec = {"kind": "rellich-extremizer", "alpha": alpha, "eps": eps, "delta": delta, "R": R,
            "r0": r0, "ramp": ramp}
    return radial_field(g, profile, (0.5 * r0, 2.0 * R), spec, "rellich-extremizer",
                        (r0, 1.0, 1.0 + delta, R))


def gaussian_radius(beta: float) -> float:
    """Radius past which exp(-beta N^2) < 1e-16."""
    return math.sqrt(-math.log(GAUSSIAN_FLOOR) / beta)


def make_gaussian_in_norm(g: GroupSpec, beta: float) -> ScalarField:
    if not beta > 0:
        raise FieldError("Gaussian rate beta must be positive")
    R = gaussian_radius(beta)
    spec = {"kind": "gaussian-in-norm", "beta": beta, "truncation": R}
    return radial_field(g, GaussianProfile(beta), (0.0, R), spec, "gaussian-in-norm")


def norm_power(g: GroupSpec, exponent: float, support=(1e-12, np.inf)) -> ScalarField:
    """N^exponent (fundamental solutions and identity checks)."""
    spec = {"kind": "norm-power", "exponent": exponent}
    return radial_field(g, PowerProfile(exponent), support, spec, "norm-power")


# ---------------------------------------------------------------------------
# specs and batteries


@dataclass
class TestFunctionSpec:
    """JSON-serialisable description of a test field."""

    __test__ = False  # not a pytest class

    kind: str
    params: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "TestFunctionSpec":
        d = dict(d)
        kind = d.pop("kind")
        return cls(kind, d)

    def build(self, g: GroupSpec) -> ScalarField:
        p = self.params
        if self.kind == "annular-bump":
            return make_annular_bump(g, p["r0"], p["R"], p.get("cv"), p.get("cz"))
        if self.kind == "hardy-extremizer":
            return make_hardy_extremizer(g, p["alpha"], p["eps"], p["delta"], p["R"],
                                         p.get("r0", 1e-3))
        if self.kind == "rellich-extremizer":
            return make_rellich_extremizer(g, p["alpha"], p["eps"], p["delta"], p["R"],
                                           p.get("r0", 1e-3), p.get("ramp", "c1"))
        if self.kind == "gaussian-in-norm":
            return make_gaussian_in_norm(g, p["beta"])
        if self.kind == "product-modulated":
            return make_annular_bump(g, p["r0"], p["R"], p.get("cv"), p.get("cz"), product=True)
        raise FieldError(f"unknown test function kind {self.kind!r}")


def random_bump_specs(g: GroupSpec, count: int, rng: np.random.Generator,
                      r_range=(0.05, 1.0), max_ratio=20.0, angular=0.4,
                      outer: float | None = None) -> list[TestFunctionSpec]:
    """Random annular bumps with modulation of total size <= ``angular``.

    With ``outer`` set every bump lies inside {N < outer}.
    """
    specs = []
    for _ in range(count):
        r0 = float(np.exp(rng.uniform(*np.log(r_range))))
        R = r0 * float(np.exp(rng.uniform(np.log(1.5), np.log(max_ratio))))
        if outer is not None and R > outer:
            scale = outer / R * 0.999
            r0, R = r0 * scale, R * scale
        coeffs = rng.standard_normal(g.m + g.k)
        coeffs *= rng.uniform(0.0, angular) / max(np.abs(coeffs).sum(), 1e-300)
        specs.append(TestFunctionSpec("annular-bump", {
            "r0": r0, "R": R,
            "cv": coeffs[: g.m].tolist(), "cz": coeffs[g.m:].tolist(),
        }))
    return specs


def sweep_schedule(eps: float, kappa: float = 3.0, r_max: float = 1e24) -> dict[str, float]:
    """Mollification width, outer radius and inner radius for a sharpness sweep.

    The outer cut contributes O(R^(-2 eps)) to the quotient excess, so R has
    to grow like exp(kappa/eps); the seam width delta = eps^2/4 keeps the
    seam's contribution at O(eps^3).
    """
    return {"delta": min(eps * eps / 4.0, 0.49), "R": float(min(math.exp(kappa / eps), r_max)),
            "r0": 1e-3}
