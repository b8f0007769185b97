"""Integration over Haar (= Lebesgue) measure in exponential coordinates.

The stratified estimator splits a norm annulus into log-spaced shells.  Each
shell is sampled uniformly in its enclosing coordinate box
``{|v|_inf <= s, |z|_inf <= c s^2}`` and points outside the shell are
rejected; the shell integral is ``box volume * mean(f * 1_shell)``.  Random
streams are keyed on ``(seed, stream, shell index)``, so results do not
depend on evaluation order or on how many worker threads are used.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy.special import beta as beta_fn
from scipy.special import gamma as gamma_fn

from .groups import GroupSpec, dilate, homogeneous_norm, multiply

CHUNK = 32768
Integrand = Callable[[np.ndarray], np.ndarray]


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class IntegrationConfig:
    method: str = "stratified-mc"
    samples: int = 200_000
    shells: int = 32
    seed: int = 0
    max_shell_ratio: float | None = None
    target_rel_error: float | None = None
    max_refinements: int = 3
    inner_fraction: float = 1e-3
    grid_resolution: int = 400
    workers: int = 1

    def __post_init__(self):
        if self.method not in ("stratified-mc", "tensor-grid"):
            raise ValueError(f"unknown integration method {self.method!r}")
        if self.samples < 100:
            raise ValueError("at least 100 samples per shell are required")
        if self.shells < 1:
            raise ValueError("need at least one shell")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")

    def with_(self, **changes) -> "IntegrationConfig":
        return IntegrationConfig(**{**asdict(self), **changes})

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "IntegrationConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown integration config fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> "IntegrationConfig":
        return cls.from_dict(json.loads(text))


def default_samples(g: GroupSpec) -> int:
    return 1_000_000 if g.dim >= 7 else 200_000


@dataclass
class ShellRecord:
    lo: float
    hi: float
    attempts: int
    accepted: int
    value: float
    std_error: float


@dataclass
class IntegralEstimate:
    value: float
    std_error: float
    samples: int
    shells: list[ShellRecord] = field(default_factory=list, repr=False)

    @property
    def rel_error(self) -> float:
        return self.std_error / abs(self.value) if self.value else math.inf

    def csv_row(self) -> str:
        return f"{self.value:.17g},{self.std_error:.17g},{self.samples}"

    def to_dict(self, shells: bool = False) -> dict:
        d = {"value": self.value, "std_error": self.std_error, "samples": self.samples}
        if shells:
            d["shells"] = [asdict(s) for s in self.shells]
        return d


@dataclass
class MultiEstimate:
    """Several integrals estimated on the same sample points.

    ``cov`` is the covariance of the estimates, needed when they are combined
    into ratios.
    """

    values: np.ndarray
    cov: np.ndarray
    samples: int
    shell_values: np.ndarray
    shell_errors: np.ndarray
    shell_edges: np.ndarray
    attempts: np.ndarray
    accepted: np.ndarray

    def __len__(self):
        return len(self.values)

    def estimate(self, i: int) -> IntegralEstimate:
        shells = [
            ShellRecord(float(self.shell_edges[l]), float(self.shell_edges[l + 1]),
                        int(self.attempts[l]), int(self.accepted[l]),
                        float(self.shell_values[l, i]), float(self.shell_errors[l, i]))
            for l in range(len(self.attempts))
        ]
        return IntegralEstimate(float(self.values[i]), float(math.sqrt(max(self.cov[i, i], 0.0))),
                                self.samples, shells)

    def combine(self, fn: Callable[[np.ndarray], float]) -> tuple[float, float]:
        """Value and delta-method standard error of ``fn(values)``."""
        return propagate(fn, self.values, self.cov)


def propagate(fn, values, cov) -> tuple[float, float]:
    values = np.asarray(values, dtype=float)
    val = float(fn(values))
    grad = np.zeros_like(values)
    for i, x in enumerate(values):
        h = 1e-6 * max(abs(x), 1e-300)
        up, dn = values.copy(), values.copy()
        up[i] += h
        dn[i] -= h
        grad[i] = (fn(up) - fn(dn)) / (2 * h)
    var = float(grad @ cov @ grad)
    return val, math.sqrt(max(var, 0.0))


def shell_edges(r_in: float, r_out: float, cfg: IntegrationConfig, breaks=()) -> np.ndarray:
    """Log-spaced shell radii; when r_in = 0 the first stratum is a full ball.

    ``breaks`` are extra radii (seams of the integrand) inserted as edges.
    """
    if not r_out > r_in >= 0 or not math.isfinite(r_out):
        raise QuadratureError(f"integration annulus [{r_in}, {r_out}] must be bounded and non-empty")
    lo = r_in if r_in > 0 else r_out * cfg.inner_fraction
    count = cfg.shells
    if cfg.max_shell_ratio is not None:
        count = max(count, math.ceil(math.log(r_out / lo) / math.log(cfg.max_shell_ratio)))
    edges = np.exp(np.linspace(math.log(lo), math.log(r_out), count + 1))
    edges[0], edges[-1] = lo, r_out
    extra = [b for b in breaks if lo < b < r_out]
    if extra:
        edges = np.unique(np.concatenate([edges, extra]))
        # drop slivers created next to an inserted edge
        keep = np.concatenate([[True], np.diff(np.log(edges)) > 1e-9])
        edges = edges[keep]
        edges[-1] = r_out
    if r_in == 0:
        edges = np.concatenate([[0.0], edges])
    return edges


def box_half_widths(g: GroupSpec, s: float) -> np.ndarray:
    return np.concatenate([np.full(g.m, s), np.full(g.k, g.vertical_extent * s * s)])


def _shell_rng(cfg: IntegrationConfig, stream: int, shell: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([cfg.seed, stream, shell])))


def _mc_shell(g, f, lo, hi, n, rng):
    half = box_half_widths(g, hi)
    vol = float(np.prod(2.0 * half))
    X = rng.uniform(-1.0, 1.0, size=(n, g.dim)) * half
    N = homogeneous_norm(g, X)
    keep = np.flatnonzero((N >= lo) & (N < hi))
    vals = None
    for start in range(0, len(keep), CHUNK):
        idx = keep[start:start + CHUNK]
        out = np.asarray(f(X[idx]), dtype=float)
        if out.ndim == 1:
            out = out[:, None]
        if not np.all(np.isfinite(out)):
            raise QuadratureError(f"non-finite integrand value in shell [{lo:.3g}, {hi:.3g})")
        if vals is None:
            vals = np.zeros((n, out.shape[1]))
        vals[idx] = out
    return vol, keep.size, vals


def integrate_many(g: GroupSpec, f: Integrand, support, cfg: IntegrationConfig,
                   stream: int = 0, breaks=()) -> MultiEstimate:
    """Estimate several integrals of ``f`` (returning shape (n, K)) over an annulus."""
    if cfg.method == "tensor-grid":
        return tensor_grid(g, f, support, cfg)
    n = cfg.samples
    for _ in range(cfg.max_refinements + 1):
        est = _stratified(g, f, support, cfg.with_(samples=n), stream, breaks)
        if cfg.target_rel_error is None:
            return est
        rel = np.sqrt(np.diag(est.cov)) / np.maximum(np.abs(est.values), 1e-300)
        if np.all(rel <= cfg.target_rel_error):
            return est
        n *= 4
    return est


def _stratified(g, f, support, cfg, stream, breaks=()) -> MultiEstimate:
    edges = shell_edges(*support, cfg, breaks)
    L = len(edges) - 1

    def job(l):
        rng = _shell_rng(cfg, stream, l)
        lo = edges[l] if l > 0 or edges[0] > 0 else -1.0
        return _mc_shell(g, f, lo, edges[l + 1], cfg.samples, rng)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = list(pool.map(job, range(L)))
    else:
        results = [job(l) for l in range(L)]

    K = next((r[2].shape[1] for r in results if r[2] is not None), None)
    if K is None:
        K = np.asarray(f(np.zeros((1, g.dim)) + edges[-1])).reshape(1, -1).shape[1]
    shell_vals = np.zeros((L, K))
    shell_cov = np.zeros((L, K, K))
    accepted = np.zeros(L, dtype=int)
    for l, (vol, acc, vals) in enumerate(results):
        if acc == 0:
            raise QuadratureError(f"no accepted samples in shell {l} [{edges[l]:.3g}, {edges[l + 1]:.3g})")
        accepted[l] = acc
        if vals is None:
            continue
        n = vals.shape[0]
        shell_vals[l] = vol * vals.mean(axis=0)
        c = np.atleast_2d(np.cov(vals, rowvar=False, ddof=1)) if n > 1 else np.zeros((K, K))
        shell_cov[l] = vol * vol * c / n
    return MultiEstimate(
        values=shell_vals.sum(axis=0),
        cov=shell_cov.sum(axis=0),
        samples=cfg.samples * L,
        shell_values=shell_vals,
        shell_errors=np.sqrt(np.maximum(np.diagonal(shell_cov, axis1=1, axis2=2), 0.0)),
        shell_edges=edges,
        attempts=np.full(L, cfg.samples),
        accepted=accepted,
    )


def integrate(g: GroupSpec, f: Integrand, support, cfg: IntegrationConfig,
              stream: int = 0, breaks=()) -> IntegralEstimate:
    """Integral of a scalar integrand over ``{support[0] <= N <= support[1]}``."""
    return integrate_many(g, f, support, cfg, stream, breaks).estimate(0)


def tensor_grid(g: GroupSpec, f: Integrand, support, cfg: IntegrationConfig) -> MultiEstimate:
    """Midpoint rule on the box enclosing {N <= R}; dimension <= 3.

    The reported error is the difference from the same rule at half the
    resolution.
    """
    if g.dim > 3:
        raise QuadratureError("tensor-grid quadrature is limited to dimension <= 3")
    r_in, r_out = support
    res = cfg.grid_resolution
    fine = _grid_sum(g, f, r_in, r_out, res)
    coarse = _grid_sum(g, f, r_in, r_out, max(res // 2, 2))
    err = np.abs(fine - coarse)
    return MultiEstimate(fine, np.diag(err**2), res**g.dim, fine[None], err[None],
                         np.array([r_in, r_out]), np.array([res**g.dim]), np.array([res**g.dim]))


def _grid_sum(g, f, r_in, r_out, res):
    half = box_half_widths(g, r_out)
    axes = [(-h + (np.arange(res) + 0.5) * (2 * h / res)) for h in half]
    cell = float(np.prod(2 * half / res))
    # iterate over the first axis to bound memory
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1).reshape(-1, g.dim - 1) \
        if g.dim > 1 else np.zeros((1, 0))
    total = None
    for a in axes[0]:
        X = np.concatenate([np.full((rest.shape[0], 1), a), rest], axis=1)
        N = homogeneous_norm(g, X)
        keep = (N >= r_in) & (N <= r_out)
        if not keep.any():
            continue
        out = np.asarray(f(X[keep]), dtype=float)
        out = out[:, None] if out.ndim == 1 else out
        s = out.sum(axis=0)
        total = s if total is None else total + s
    if total is None:
        raise QuadratureError("tensor grid found no points in the annulus")
    return total * cell


def unit_ball_volume(g: GroupSpec) -> float:
    """Closed-form Lebesgue volume of {N < 1}.

    |{N<1}| = omega_k c^k * m omega_m * B(m/4, k/2 + 1)/4 with c the vertical
    extent; omega_j is the volume of the Euclidean unit j-ball.
    """
    def omega(j):
        return math.pi ** (j / 2) / gamma_fn(j / 2 + 1)

    if not g.k:
        return float(omega(g.m))
    c = g.vertical_extent
    return float(omega(g.k) * c**g.k * g.m * omega(g.m) * beta_fn(g.m / 4, g.k / 2 + 1) / 4)


def muckenhoupt_a2_estimate(g: GroupSpec, alpha: float, radii=None, balls: int = 64,
                            samples: int = 20000, seed: int = 0, strict: bool = True) -> float:
    """Largest sampled (avg_B N^alpha)(avg_B N^-alpha) over left-translated norm balls.

    Each ball B(x0, r) = x0 . delta_r(B(0, 1)) is sampled through the same
    uniform points of the unit ball.  Centres include the origin and points
    with N(x0)/r log-uniform in [1e-2, 1e2].
    """
    if strict and not 2 - g.Q < alpha < g.Q:
        raise ValueError(f"alpha={alpha} outside (2 - Q, Q): N^alpha is not an admissible A2 weight")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 0xA2])))
    radii = np.ones(balls) if radii is None else np.asarray(radii, dtype=float)
    unit = _unit_ball_points(g, samples, rng)
    worst = 0.0
    for i, r in enumerate(radii):
        if i == 0:
            centre = np.zeros(g.dim)
        else:
            d = rng.standard_normal(g.dim)
            target = r * math.exp(rng.uniform(math.log(1e-2), math.log(1e2)))
            centre = dilate(g, target / homogeneous_norm(g, d), d)
        Y = multiply(g, np.broadcast_to(centre, unit.shape), dilate(g, r, unit))
        N = homogeneous_norm(g, Y)
        with np.errstate(divide="ignore", over="ignore"):
            val = float(np.mean(N**alpha) * np.mean(N ** (-alpha)))
        worst = max(worst, val)
    return worst


def _unit_ball_points(g, count, rng):
    """Points of {N < 1} with radially stratified norms.

    Directions come from rejection sampling followed by projection onto
    {N = 1}; the norms are the midpoint quantiles ((i + 1/2)/count)^(1/Q) of
    the radial law, which makes ball averages of N^(-alpha) deterministic in
    the radial variable and exposes the logarithmic growth at alpha = Q.
    """
    half = box_half_widths(g, 1.0)
    out = []
    have = 0
    while have < count:
        X = rng.uniform(-1.0, 1.0, size=(2 * count, g.dim)) * half
        N = homogeneous_norm(g, X)
        X = X[(N < 1.0) & (N > 0.0)]
        out.append(X)
        have += len(X)
    X = np.concatenate(out)[:count]
    sphere = dilate(g, 1.0 / homogeneous_norm(g, X), X)
    radii = ((np.arange(count) + 0.5) / count) ** (1.0 / g.Q)
    return dilate(g, radii, sphere)
