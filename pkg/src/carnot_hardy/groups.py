"""Step-two Carnot groups with closed-form group law and homogeneous norm.

Every group is stored in exponential coordinates ``x = (v, z)`` with ``v`` in
R^m (first layer) and ``z`` in R^k (second layer).  The three supported
families share one parametrisation::

    x . y = (v + v', z_a + z'_a + mu <J_a v, v'>)
    X_i   = d/dv_i + mu * sum_a (J_a v)_i d/dz_a
    N(x)  = (|v|^4 + kappa |z|^2)^(1/4)

* abelian R^n: k = 0 and N is the Euclidean norm,
* Heisenberg H^n: v = (x_1..x_n, y_1..y_n), z = t, J v = (y, -x),
  mu = 2, kappa = 1,
* H-type: Clifford family J_1..J_k, mu = 1/2, kappa = 16 (Kaplan norm).

H^n is the H-type group with J = [[0, I], [-I, 0]] after the change of
variable t = 4 z.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

import numpy as np


class GroupError(ValueError):
    """Raised for malformed group specifications or incompatible points."""


@dataclass(frozen=True)
class HTypeValidation:
    passed: bool
    max_violation: float
    skew_violation: float
    square_violation: float
    anticommutation_violation: float


def validate_htype(J, tol: float = 1e-12) -> HTypeValidation:
    """Check that ``J`` is a Clifford family: skew, J_a^2 = -I, J_aJ_b = -J_bJ_a."""
    J = np.asarray(J, dtype=float)
    if J.ndim == 2:
        J = J[None]
    if J.ndim != 3 or J.shape[1] != J.shape[2]:
        raise GroupError(f"J-maps must be a list of square matrices, got shape {J.shape}")
    k, m, _ = J.shape
    eye = np.eye(m)
    skew = max(float(np.abs(Ja + Ja.T).max()) for Ja in J)
    square = max(float(np.abs(Ja @ Ja + eye).max()) for Ja in J)
    anti = 0.0
    for a in range(k):
        for b in range(a + 1, k):
            anti = max(anti, float(np.abs(J[a] @ J[b] + J[b] @ J[a]).max()))
    worst = max(skew, square, anti)
    return HTypeValidation(worst <= tol, worst, skew, square, anti)


def symplectic_J(n: int) -> np.ndarray:
    """Standard complex structure on R^{2n}: (x, y) -> (y, -x)."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def quaternionic_triple() -> np.ndarray:
    """Left multiplication by i, j, k on the quaternions H = R^4."""
    # basis order (1, i, j, k); column c is the image of basis element c
    Li = np.array([[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]], float)
    Lj = np.array([[0, 0, -1, 0], [0, 0, 0, 1], [1, 0, 0, 0], [0, -1, 0, 0]], float)
    Lk = np.array([[0, 0, 0, -1], [0, 0, -1, 0], [0, 1, 0, 0], [1, 0, 0, 0]], float)
    return np.stack([Li, Lj, Lk])


@dataclass(frozen=True, eq=False)
class GroupSpec:
    """A concrete Carnot group of step at most two.

    Use the constructors :func:`abelian`, :func:`heisenberg` and :func:`htype`
    rather than building instances by hand.
    """

    kind: str
    m: int
    k: int
    J: np.ndarray = field(repr=False)
    mu: float
    kappa: float
    n: int | None = None

    @property
    def dim(self) -> int:
        return self.m + self.k

    @property
    def Q(self) -> int:
        return self.m + 2 * self.k

    @property
    def weights(self) -> np.ndarray:
        """Dilation weights: 1 on horizontal coordinates, 2 on vertical ones."""
        return np.concatenate([np.ones(self.m), 2.0 * np.ones(self.k)])

    @property
    def vertical_extent(self) -> float:
        """Largest |z_a| on the unit norm sphere: kappa |z|^2 <= 1."""
        return 1.0 / np.sqrt(self.kappa) if self.k else 0.0

    @property
    def label(self) -> str:
        if self.kind == "abelian":
            return f"R{self.m}"
        if self.kind == "heisenberg":
            return f"H{self.n}"
        return f"Htype({self.m},{self.k})"

    def __eq__(self, other):
        if not isinstance(other, GroupSpec):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(json.dumps(self.to_dict(), sort_keys=True))

    def split(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        x = self.check(x)
        return x[..., : self.m], x[..., self.m :]

    def check(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            raise GroupError(
                f"{self.label} points have {self.dim} coordinates, got shape {x.shape}"
            )
        return x

    def to_dict(self) -> dict[str, Any]:
        if self.kind == "abelian":
            return {"kind": "abelian", "n": self.m}
        if self.kind == "heisenberg":
            return {"kind": "heisenberg", "n": self.n}
        return {"kind": "htype", "m": self.m, "k": self.k, "J": self.J.tolist()}

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "GroupSpec":
        kind = str(d.get("kind", "")).lower()
        try:
            if kind == "abelian":
                return abelian(int(d["n"]))
            if kind == "heisenberg":
                return heisenberg(int(d["n"]))
            if kind == "htype":
                g = htype(d["J"])
                if ("m" in d and int(d["m"]) != g.m) or ("k" in d and int(d["k"]) != g.k):
                    raise GroupError("declared m/k do not match the J-maps")
                return g
        except KeyError as exc:
            raise GroupError(f"group spec missing field {exc}") from None
        raise GroupError(f"unknown group kind {d.get('kind')!r}")

    @classmethod
    def from_json(cls, text: str) -> "GroupSpec":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def abelian(n: int) -> GroupSpec:
    if n < 1:
        raise GroupError("abelian dimension must be positive")
    return GroupSpec("abelian", n, 0, np.zeros((0, n, n)), 0.0, 0.0, n=n)


def heisenberg(n: int) -> GroupSpec:
    if n < 1:
        raise GroupError("Heisenberg index must be positive")
    return GroupSpec("heisenberg", 2 * n, 1, symplectic_J(n)[None], 2.0, 1.0, n=n)


def htype(J, tol: float = 1e-10) -> GroupSpec:
    J = np.array(J, dtype=float)
    if J.ndim == 2:
        J = J[None]
    report = validate_htype(J, tol)
    if not report.passed:
        raise GroupError(f"J-maps violate the Clifford relations (max {report.max_violation:.3g})")
    J.setflags(write=False)
    return GroupSpec("htype", J.shape[1], J.shape[0], J, 0.5, 16.0)


@dataclass(frozen=True)
class Point:
    """A single group element in graded coordinates."""

    v: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "v", np.atleast_1d(np.asarray(self.v, dtype=float)))
        object.__setattr__(self, "z", np.atleast_1d(np.asarray(self.z, dtype=float)).reshape(-1))
        if not (np.all(np.isfinite(self.v)) and np.all(np.isfinite(self.z))):
            raise GroupError("point coordinates must be finite")

    @classmethod
    def from_array(cls, g: GroupSpec, x) -> "Point":
        v, z = g.split(x)
        return cls(v, z)

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.v, self.z])


def identity(g: GroupSpec) -> Point:
    return Point(np.zeros(g.m), np.zeros(g.k))


def _as_array(g, x):
    if isinstance(x, Point):
        return g.check(x.as_array()), True
    return g.check(x), False


def multiply(g: GroupSpec, x, y):
    """Group product.  Accepts :class:`Point` or arrays of shape (..., dim)."""
    xa, is_point = _as_array(g, x)
    ya, _ = _as_array(g, y)
    out = xa + ya
    if g.k:
        v, vp = xa[..., : g.m], ya[..., : g.m]
        Jv = np.einsum("aij,...j->...ai", g.J, v)
        out[..., g.m :] += g.mu * np.einsum("...ai,...i->...a", Jv, vp)
    return Point.from_array(g, out) if is_point else out


def inverse(g: GroupSpec, x):
    xa, is_point = _as_array(g, x)
    return Point.from_array(g, -xa) if is_point else -xa


def dilate(g: GroupSpec, lam: float, x):
    lam_arr = np.asarray(lam, dtype=float)
    if not np.all(lam_arr > 0):
        raise GroupError(f"dilation factor must be positive, got {lam}")
    xa, is_point = _as_array(g, x)
    if lam_arr.ndim:
        lam_arr = lam_arr[..., None]
    out = xa * lam_arr ** g.weights
    return Point.from_array(g, out) if is_point else out


def homogeneous_norm(g: GroupSpec, x):
    """Fundamental-solution norm: Euclidean, Koranyi rho, or Kaplan K."""
    xa, is_point = _as_array(g, x)
    v, z = xa[..., : g.m], xa[..., g.m :]
    # rescale by a homogeneous size so that squaring neither underflows nor overflows
    s = np.max(np.abs(v), axis=-1)
    if g.k:
        s = np.maximum(s, np.sqrt(np.max(np.abs(z), axis=-1)))
    safe = np.where(s > 0, s, 1.0)[..., None]
    vs, zs = v / safe, z / safe / safe
    v2 = np.sum(vs * vs, axis=-1)
    if not g.k:
        out = s * np.sqrt(v2)
    else:
        out = s * (v2 * v2 + g.kappa * np.sum(zs * zs, axis=-1)) ** 0.25
    return float(out) if is_point else out


def norm_gradient_closed(g: GroupSpec, x) -> np.ndarray:
    """|grad_G N|^2 = |v|^2 / N^2 (identically 1 on abelian groups)."""
    xa, _ = _as_array(g, x)
    if not g.k:
        return np.ones(xa.shape[:-1])
    N = homogeneous_norm(g, xa)
    return np.sum(xa[..., : g.m] ** 2, axis=-1) / N**2


def random_points(g: GroupSpec, count: int, rng: np.random.Generator, rmin=0.1, rmax=10.0):
    """Points with log-uniform norm in [rmin, rmax] along random Gaussian directions."""
    x = rng.standard_normal((count, g.dim))
    N = homogeneous_norm(g, x)
    target = np.exp(rng.uniform(np.log(rmin), np.log(rmax), count))
    return x * (target / N)[:, None] ** g.weights
