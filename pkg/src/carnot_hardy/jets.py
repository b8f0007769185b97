"""Second-order forward-mode jets, vectorised over batches of points.

``Taylor2`` carries value, Euclidean gradient and Euclidean Hessian of a
scalar expression at ``n`` points in R^d.  Field expressions are written once
against the small function set in this module (``sqrt``, ``power``,
``compose``...) and evaluate either on plain arrays (values only) or on
``Taylor2`` objects (exact first and second derivatives).

``Jet2`` is the horizontal counterpart: X_i phi and X_i X_j phi obtained by
pushing a ``Taylor2`` through the left-invariant frame of a group.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .groups import GroupSpec


class Taylor2:
    __slots__ = ("val", "grad", "hess")
    __array_priority__ = 100

    def __init__(self, val, grad, hess):
        self.val = val
        self.grad = grad
        self.hess = hess

    @classmethod
    def variables(cls, X: np.ndarray) -> list["Taylor2"]:
        n, d = X.shape
        eye = np.eye(d)
        zh = np.zeros((n, d, d))
        return [cls(X[:, i].copy(), np.broadcast_to(eye[i], (n, d)), zh) for i in range(d)]

    @classmethod
    def constant(cls, c, n: int, d: int) -> "Taylor2":
        return cls(np.full(n, c, dtype=float), np.zeros((n, d)), np.zeros((n, d, d)))

    @classmethod
    def quadratic(cls, X: np.ndarray, idx) -> "Taylor2":
        """sum_{i in idx} x_i^2 with exact derivatives."""
        n, d = X.shape
        idx = np.asarray(idx, dtype=int)
        val = np.sum(X[:, idx] ** 2, axis=1)
        grad = np.zeros((n, d))
        grad[:, idx] = 2.0 * X[:, idx]
        hess = np.zeros((n, d, d))
        hess[:, idx, idx] = 2.0
        return cls(val, grad, hess)

    @property
    def n(self) -> int:
        return self.val.shape[0]

    @property
    def d(self) -> int:
        return self.grad.shape[1]

    def take(self, mask) -> "Taylor2":
        return Taylor2(self.val[mask], self.grad[mask], self.hess[mask])

    def __neg__(self):
        return Taylor2(-self.val, -self.grad, -self.hess)

    def __add__(self, other):
        if isinstance(other, Taylor2):
            return Taylor2(self.val + other.val, self.grad + other.grad, self.hess + other.hess)
        return Taylor2(self.val + other, self.grad, self.hess)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Taylor2):
            a, b = self, other
            cross = np.einsum("ni,nj->nij", a.grad, b.grad)
            return Taylor2(
                a.val * b.val,
                a.val[:, None] * b.grad + b.val[:, None] * a.grad,
                a.val[:, None, None] * b.hess
                + b.val[:, None, None] * a.hess
                + cross
                + cross.transpose(0, 2, 1),
            )
        c = np.asarray(other, dtype=float)
        if c.ndim == 0:
            return Taylor2(self.val * c, self.grad * c, self.hess * c)
        return Taylor2(self.val * c, self.grad * c[:, None], self.hess * c[:, None, None])

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Taylor2):
            return self * reciprocal(other)
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        return power(self, p)


def compose(x, f0, f1=None, f2=None):
    """Chain rule for a scalar function with supplied derivative arrays.

    ``f0, f1, f2`` are f, f' and f'' already evaluated at the value of ``x``.
    On plain arrays only ``f0`` is used.
    """
    if not isinstance(x, Taylor2):
        return f0
    g = x.grad
    return Taylor2(
        f0,
        f1[:, None] * g,
        f1[:, None, None] * x.hess + f2[:, None, None] * np.einsum("ni,nj->nij", g, g),
    )


def value(x):
    return x.val if isinstance(x, Taylor2) else np.asarray(x, dtype=float)


def power(x, p: float):
    u = value(x)
    if p == 2:
        return x * x
    f0 = u**p
    if not isinstance(x, Taylor2):
        return f0
    return compose(x, f0, p * u ** (p - 1), p * (p - 1) * u ** (p - 2))


def sqrt(x):
    return power(x, 0.5)


def reciprocal(x):
    u = value(x)
    if not isinstance(x, Taylor2):
        return 1.0 / u
    inv = 1.0 / u
    return compose(x, inv, -inv * inv, 2.0 * inv**3)


def exp(x):
    e = np.exp(value(x))
    return compose(x, e, e, e) if isinstance(x, Taylor2) else e


def log(x):
    u = value(x)
    if not isinstance(x, Taylor2):
        return np.log(u)
    return compose(x, np.log(u), 1.0 / u, -1.0 / (u * u))


@dataclass
class Jet2:
    """Horizontal 2-jet at a batch of points.

    ``hhess[:, i, j]`` is X_i X_j phi (not symmetric on non-abelian groups).
    """

    value: np.ndarray
    hgrad: np.ndarray
    hhess: np.ndarray

    @property
    def hlap(self) -> np.ndarray:
        return np.trace(self.hhess, axis1=1, axis2=2)

    @property
    def grad_sq(self) -> np.ndarray:
        return np.sum(self.hgrad**2, axis=1)

    @classmethod
    def zeros(cls, n: int, m: int) -> "Jet2":
        return cls(np.zeros(n), np.zeros((n, m)), np.zeros((n, m, m)))


def frame_matrix(g: GroupSpec, X: np.ndarray) -> np.ndarray:
    """Coefficients A[n, a, i] of X_i along d/dx_a at each point."""
    n = X.shape[0]
    A = np.zeros((n, g.dim, g.m))
    A[:, np.arange(g.m), np.arange(g.m)] = 1.0
    if g.k:
        v = X[:, : g.m]
        A[:, g.m :, :] = g.mu * np.einsum("aij,nj->nai", g.J, v)
    return A


def horizontal(g: GroupSpec, X: np.ndarray, t: Taylor2) -> Jet2:
    """Push a Euclidean 2-jet through the frame.

    X_i X_j phi = A_ai A_bj d_ab phi + mu sum_c J_c[j, i] d_{z_c} phi; the
    second term comes from X_i acting on the coefficients of X_j.
    """
    if not g.k:
        return Jet2(t.val, np.array(t.grad), t.hess)
    A = frame_matrix(g, X)
    hgrad = np.einsum("na,nai->ni", t.grad, A)
    hhess = np.einsum("nai,nab,nbj->nij", A, t.hess, A)
    dz = t.grad[:, g.m :]
    hhess += g.mu * np.einsum("cji,nc->nij", g.J, dz)
    return Jet2(t.val, hgrad, hhess)


def norm_taylor(g: GroupSpec, X: np.ndarray) -> Taylor2:
    """Exact 2-jet of the homogeneous norm (points must avoid the origin)."""
    v2 = Taylor2.quadratic(X, range(g.m))
    if not g.k:
        return sqrt(v2)
    z2 = Taylor2.quadratic(X, range(g.m, g.dim))
    return power(v2 * v2 + z2 * g.kappa, 0.25)
