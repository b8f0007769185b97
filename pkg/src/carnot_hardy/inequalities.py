"""Rayleigh-quotient reports for the Hardy-type family of inequalities.

Every report integrates all of its ingredients on one shared set of sample
points, so ratios are computed from correlated estimates and their standard
error follows from the delta method with the full covariance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .fields import (ScalarField, make_hardy_extremizer, make_rellich_extremizer,
                     sweep_schedule)
from .groups import GroupSpec, homogeneous_norm, norm_gradient_closed
from .quadrature import (IntegralEstimate, IntegrationConfig, MultiEstimate, QuadratureError,
                         integrate_many, propagate, unit_ball_volume)

HOLDS, VIOLATED, INCONCLUSIVE = "holds", "violated", "inconclusive"
CSV_COLUMNS = ("group", "inequality", "alpha", "param_name", "param",
               "quotient", "sigma", "sharp_constant", "verdict")


class HypothesisError(ValueError):
    """Parameters outside the range where the inequality is asserted."""


class SweepError(RuntimeError):
    pass


def verdict(quotient: float, sigma: float, bound: float) -> str:
    gap = bound - quotient
    if gap <= 3.0 * sigma:
        return HOLDS
    if gap > 5.0 * sigma:
        return VIOLATED
    return INCONCLUSIVE


def hardy_constant(Q: float, alpha: float) -> float:
    return ((Q + alpha - 2) / 2) ** 2


def rellich_constant(Q: float, alpha: float) -> float:
    return (Q + alpha - 4) ** 2 * (Q - alpha) ** 2 / 16


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


@dataclass
class QuotientReport:
    group: str
    inequality: str
    params: dict
    lhs: IntegralEstimate
    rhs: IntegralEstimate
    quotient: float
    sigma: float
    sharp_constant: float | None
    verdict: str
    components: dict[str, IntegralEstimate] = field(default_factory=dict)
    field_spec: dict = field(default_factory=dict)
    config: dict = field(default_factory=dict)

    @property
    def bound(self) -> float:
        return 0.0 if self.sharp_constant is None else self.sharp_constant

    @property
    def positive(self) -> bool:
        """Quotient more than three standard errors above zero."""
        return self.quotient > 3.0 * self.sigma

    def param(self) -> tuple[str, float | None]:
        for name in ("gamma", "s", "q", "variant", "eps"):
            if name in self.params:
                return name, self.params[name]
        return "", None

    def csv_row(self) -> list[str]:
        pname, pval = self.param()
        return [self.group, self.inequality, _fmt(float(self.params.get("alpha", 0.0))), pname,
                _fmt(pval), _fmt(self.quotient), _fmt(self.sigma), _fmt(self.sharp_constant),
                self.verdict]

    def to_dict(self) -> dict:
        return {
            "group": self.group,
            "inequality": self.inequality,
            "params": self.params,
            "lhs": self.lhs.to_dict(),
            "rhs": self.rhs.to_dict(),
            "components": {k: v.to_dict() for k, v in self.components.items()},
            "quotient": self.quotient,
            "sigma": self.sigma,
            "sharp_constant": self.sharp_constant,
            "verdict": self.verdict,
            "field": self.field_spec,
            "config": self.config,
        }


# ---------------------------------------------------------------------------
# shared machinery


class _Sample:
    """Quantities at a batch of sample points, computed on demand."""

    def __init__(self, g: GroupSpec, phi: ScalarField, X: np.ndarray):
        self.g = g
        self.X = X
        self.N = homogeneous_norm(g, X)
        self.gn2 = norm_gradient_closed(g, X)
        J = phi.jet(X)
        self.phi = J.value
        self.grad2 = J.grad_sq
        self.lap = J.hlap


def _estimate(g, phi, columns: Callable[[_Sample], list], cfg: IntegrationConfig,
              stream: int = 0, retries: int = 3) -> MultiEstimate:
    def f(X):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.stack(columns(_Sample(g, phi, X)), axis=1)

    for attempt in range(retries):
        try:
            return integrate_many(g, f, phi.support, cfg, stream=stream + 1000 * attempt,
                                  breaks=phi.breaks)
        except QuadratureError as exc:
            # a draw on the measure-zero set {grad N = 0} with a singular weight
            if "non-finite" not in str(exc) or attempt == retries - 1:
                raise
    raise AssertionError("unreachable")


def _report(g, name, params, est: MultiEstimate, fn, lhs_est, rhs_est, sharp, phi, cfg,
            names: Sequence[str]) -> QuotientReport:
    q, s = est.combine(fn)
    return QuotientReport(
        group=g.label, inequality=name, params=params, lhs=lhs_est, rhs=rhs_est,
        quotient=q, sigma=s, sharp_constant=sharp,
        verdict=verdict(q, s, 0.0 if sharp is None else sharp),
        components={n: est.estimate(i) for i, n in enumerate(names)},
        field_spec=phi.spec, config=cfg.to_dict(),
    )


def _product_estimate(values, cov, fn) -> IntegralEstimate:
    v, s = propagate(fn, values, cov)
    return IntegralEstimate(v, s, 0)


def _check_phi(phi: ScalarField):
    if phi.support[0] <= 0:
        raise HypothesisError("test function must vanish near the origin")


# ---------------------------------------------------------------------------
# sharp inequalities


def hardy_report(g: GroupSpec, alpha: float, gamma: float, phi: ScalarField,
                 cfg: IntegrationConfig, stream: int = 0) -> QuotientReport:
    """int N^a |grad N|^g |grad phi|^2  vs  ((Q+a-2)/2)^2 int N^(a-2) |grad N|^(g+2) phi^2."""
    if not g.Q + alpha - 2 > 0:
        raise HypothesisError("Hardy inequality needs Q + alpha - 2 > 0")
    if gamma != 0 and not gamma > -1:
        raise HypothesisError("weight exponent gamma must exceed -1")
    _check_phi(phi)

    def cols(s: _Sample):
        w = s.N**alpha * s.gn2 ** (gamma / 2) if gamma else s.N**alpha
        return [w * s.grad2, w * s.gn2 / s.N**2 * s.phi**2]

    est = _estimate(g, phi, cols, cfg, stream)
    return _report(g, "hardy", {"alpha": alpha, "gamma": gamma}, est, lambda v: v[0] / v[1],
                   est.estimate(0), est.estimate(1), hardy_constant(g.Q, alpha), phi, cfg,
                   ("lhs", "rhs"))


def rellich_report(g: GroupSpec, alpha: float, phi: ScalarField, cfg: IntegrationConfig,
                   stream: int = 0) -> QuotientReport:
    """int N^a |lap phi|^2/|grad N|^2  vs  C int N^(a-4) |grad N|^2 phi^2."""
    if not g.Q + alpha - 4 > 0:
        raise HypothesisError("Rellich inequality needs Q + alpha - 4 > 0")
    _check_phi(phi)

    def cols(s: _Sample):
        lhs = np.where(s.lap == 0, 0.0, s.N**alpha * s.lap**2 / s.gn2)
        return [lhs, s.N ** (alpha - 4) * s.gn2 * s.phi**2]

    est = _estimate(g, phi, cols, cfg, stream)
    return _report(g, "rellich", {"alpha": alpha}, est, lambda v: v[0] / v[1],
                   est.estimate(0), est.estimate(1), rellich_constant(g.Q, alpha), phi, cfg,
                   ("lhs", "rhs"))


UNCERTAINTY_VARIANTS = ("grad-weighted", "norm-weighted", "rellich-4-minus-alpha", "rellich-norm")


def uncertainty_report(g: GroupSpec, variant: str, alpha: float, phi: ScalarField,
                       cfg: IntegrationConfig, constant: float | None = None,
                       stream: int = 0) -> QuotientReport:
    """Product form (int A)(int B) / (int C)^2.

    grad-weighted:          A = N^2/|grad N|^2 phi^2,        B = |grad phi|^2,   C = phi^2
    norm-weighted:          A = N^2 |grad N|^2 phi^2,        B = |grad phi|^2,   C = |grad N|^2 phi^2
    rellich-4-minus-alpha:  A = N^(4-a)/|grad N|^2 phi^2,    B = N^a |lap phi|^2/|grad N|^2, C = phi^2
    rellich-norm:           A = N^(4-a) |grad N|^2 phi^2,    B as above,         C = |grad N|^2 phi^2

    ``constant`` overrides the reference constant (e.g. (Q/2)^2 for Gaussians).
    """
    if variant not in UNCERTAINTY_VARIANTS:
        raise ValueError(f"unknown uncertainty variant {variant!r}")
    if g.Q < 3:
        raise HypothesisError("uncertainty inequalities need Q >= 3")
    rellich = variant.startswith("rellich")
    if rellich and not g.Q + alpha - 4 > 0:
        raise HypothesisError("Rellich-type uncertainty needs Q + alpha - 4 > 0")
    if phi.support[0] <= 0 and phi.spec.get("kind") != "gaussian-in-norm":
        raise HypothesisError("test function must vanish near the origin")

    def cols(s: _Sample):
        p2 = s.phi**2
        if variant == "grad-weighted":
            A, B, C = s.N**2 / s.gn2 * p2, s.grad2, p2
        elif variant == "norm-weighted":
            A, B, C = s.N**2 * s.gn2 * p2, s.grad2, s.gn2 * p2
        else:
            wA = 1.0 / s.gn2 if variant == "rellich-4-minus-alpha" else s.gn2
            A = np.where(p2 == 0, 0.0, s.N ** (4 - alpha) * wA * p2)
            B = np.where(s.lap == 0, 0.0, s.N**alpha * s.lap**2 / s.gn2)
            C = p2 if variant == "rellich-4-minus-alpha" else s.gn2 * p2
        if variant == "grad-weighted":
            A = np.where(p2 == 0, 0.0, A)
        return [A, B, C]

    est = _estimate(g, phi, cols, cfg, stream)
    if constant is None:
        constant = rellich_constant(g.Q, alpha) if rellich else ((g.Q - 2) / 2) ** 2
    lhs = _product_estimate(est.values, est.cov, lambda v: v[0] * v[1])
    rhs = _product_estimate(est.values, est.cov, lambda v: v[2] ** 2)
    params = {"alpha": alpha if rellich else 0.0, "variant": variant}
    return _report(g, "uncertainty", params, est, lambda v: v[0] * v[1] / v[2] ** 2, lhs, rhs,
                   constant, phi, cfg, ("A", "B", "C"))


# ---------------------------------------------------------------------------
# existential-constant inequalities


def ckn_report(g: GroupSpec, s: float, alpha: float, phi: ScalarField, cfg: IntegrationConfig,
               ball_radius: float | None = None, stream: int = 0) -> QuotientReport:
    """int N^a |grad phi|^2 / (int N^a (|grad N|/N)^s |phi|^(2(Q-s)/(Q-2)))^((Q-2)/(Q-s)).

    With ``ball_radius`` set this is the metric-ball version, which requires
    2 - Q < alpha < Q and phi supported in the ball.  At s = 2 the Hardy
    constant is reported as the known lower bound.
    """
    if not 0 <= s <= 2:
        raise HypothesisError("CKN exponent s must lie in [0, 2]")
    if g.Q < 3:
        raise HypothesisError("CKN inequality needs Q >= 3")
    if ball_radius is not None:
        if not 2 - g.Q < alpha < g.Q:
            raise HypothesisError("weighted CKN on balls needs 2 - Q < alpha < Q")
        if phi.support[1] > ball_radius:
            raise HypothesisError("test function is not supported in the ball")
    elif alpha != 0:
        raise HypothesisError("the whole-group CKN inequality is unweighted (alpha = 0)")
    _check_phi(phi)
    Q = g.Q
    power = 2 * (Q - s) / (Q - 2)
    outer = (Q - 2) / (Q - s)

    def cols(smp: _Sample):
        w = smp.N**alpha
        return [w * smp.grad2, w * (smp.gn2 / smp.N**2) ** (s / 2) * np.abs(smp.phi) ** power]

    est = _estimate(g, phi, cols, cfg, stream)
    rhs = _product_estimate(est.values, est.cov, lambda v: v[1] ** outer)
    sharp = hardy_constant(Q, alpha) if s == 2 else None
    params = {"alpha": alpha, "s": s}
    if ball_radius is not None:
        params["ball_radius"] = ball_radius
    return _report(g, "ckn", params, est, lambda v: v[0] / v[1] ** outer, est.estimate(0), rhs,
                   sharp, phi, cfg, ("lhs", "rhs_base"))


def rellich_sobolev_report(g: GroupSpec, s: float, phi: ScalarField, cfg: IntegrationConfig,
                           stream: int = 0) -> QuotientReport:
    """int |lap phi|^2/|grad N|^2 over (int |grad N|^(2s-2)/N^(2s) |phi|^(2(Q-2s)/(Q-4)))^((Q-4)/(Q-2s))."""
    if g.Q <= 4:
        raise HypothesisError("Rellich-Sobolev inequality needs Q > 4")
    if not 0 <= s <= 2:
        raise HypothesisError("exponent s must lie in [0, 2]")
    _check_phi(phi)
    Q = g.Q
    power = 2 * (Q - 2 * s) / (Q - 4)
    outer = (Q - 4) / (Q - 2 * s)

    def cols(smp: _Sample):
        lhs = np.where(smp.lap == 0, 0.0, smp.lap**2 / smp.gn2)
        ap = np.abs(smp.phi) ** power
        rhs = np.where(ap == 0, 0.0, smp.gn2 ** (s - 1) / smp.N ** (2 * s) * ap)
        return [lhs, rhs]

    est = _estimate(g, phi, cols, cfg, stream)
    rhs = _product_estimate(est.values, est.cov, lambda v: v[1] ** outer)
    sharp = rellich_constant(Q, 0.0) if s == 2 else None
    return _report(g, "rellich-sobolev", {"alpha": 0.0, "s": s}, est,
                   lambda v: v[0] / v[1] ** outer, est.estimate(0), rhs, sharp, phi, cfg,
                   ("lhs", "rhs_base"))


def improved_hardy_report(g: GroupSpec, alpha: float, radius: float, phi: ScalarField,
                          cfg: IntegrationConfig, stream: int = 0) -> QuotientReport:
    """Remainder ratio [int N^a|grad phi|^2 - C_H int N^(a-2)|grad N|^2 phi^2] / int_B phi^2.

    ``params["gap_r2"]`` holds the dimensionless lambda * r^2 = 1/C^2.
    """
    if not 2 - g.Q < alpha < 2:
        raise HypothesisError("improved Hardy inequality needs 2 - Q < alpha < 2")
    _check_phi(phi)
    if phi.support[1] > radius:
        raise HypothesisError("test function is not supported in the ball")
    C = hardy_constant(g.Q, alpha)

    def cols(s: _Sample):
        w = s.N**alpha
        return [w * s.grad2, w * s.gn2 / s.N**2 * s.phi**2, s.phi**2]

    est = _estimate(g, phi, cols, cfg, stream)
    fn = lambda v: (v[0] - C * v[1]) / v[2]  # noqa: E731
    num = _product_estimate(est.values, est.cov, lambda v: v[0] - C * v[1])
    rep = _report(g, "improved-hardy", {"alpha": alpha, "radius": radius}, est, fn, num,
                  est.estimate(2), None, phi, cfg, ("lhs", "hardy_rhs", "ball_mass"))
    rep.params["gap_r2"] = rep.quotient * radius**2
    return rep


def gradient_remainder_report(g: GroupSpec, q: float, radius: float, phi: ScalarField,
                              cfg: IntegrationConfig, stream: int = 0) -> QuotientReport:
    """[int |grad phi|^2 - ((Q-2)/2)^2 int |grad N|^2/N^2 phi^2] / (int |grad phi|^q)^(2/q)."""
    if not 1 < q < 2:
        raise HypothesisError("gradient remainder exponent q must lie in (1, 2)")
    if g.Q < 3:
        raise HypothesisError("needs Q >= 3")
    _check_phi(phi)
    if phi.support[1] > radius:
        raise HypothesisError("test function is not supported in the domain")
    C = hardy_constant(g.Q, 0.0)

    def cols(s: _Sample):
        return [s.grad2, s.gn2 / s.N**2 * s.phi**2, s.grad2 ** (q / 2)]

    est = _estimate(g, phi, cols, cfg, stream)
    num = _product_estimate(est.values, est.cov, lambda v: v[0] - C * v[1])
    rhs = _product_estimate(est.values, est.cov, lambda v: v[2] ** (2 / q))
    rep = _report(g, "gradient-remainder", {"alpha": 0.0, "q": q, "radius": radius}, est,
                  lambda v: (v[0] - C * v[1]) / v[2] ** (2 / q), num, rhs, None, phi, cfg,
                  ("dirichlet", "hardy_rhs", "grad_q"))
    # Hoelder on the domain: (int |grad phi|^q)^(2/q) <= |Omega|^((2-q)/q) int |grad phi|^2
    vol = unit_ball_volume(g) * radius**g.Q
    slack, slack_sigma = est.combine(lambda v: vol ** ((2 - q) / q) * v[0] - v[2] ** (2 / q))
    rep.params["holder_slack"] = slack
    rep.params["holder_sigma"] = slack_sigma
    return rep


def _signed_sqrt(x):
    return math.copysign(math.sqrt(abs(x)), x)


def interpolation_report(g: GroupSpec, q: float, radius: float, phi: ScalarField,
                         cfg: IntegrationConfig, stream: int = 0) -> QuotientReport:
    """gap^(1/2) (int N^p |grad N|^p |phi|^p)^(1/p) / int |grad N|^2 phi^2 with 1/p + 1/q = 1.

    ``gap`` is the same Hardy gap as in :func:`gradient_remainder_report`.
    """
    if not 1 < q < 2:
        raise HypothesisError("interpolation exponent q must lie in (1, 2)")
    if g.Q < 3:
        raise HypothesisError("needs Q >= 3")
    if g.kind not in ("heisenberg", "htype", "abelian"):
        raise HypothesisError("interpolation inequality is stated for polarizable groups")
    _check_phi(phi)
    if phi.support[1] > radius:
        raise HypothesisError("test function is not supported in the domain")
    p = q / (q - 1)
    C = hardy_constant(g.Q, 0.0)

    def cols(s: _Sample):
        return [s.grad2, s.gn2 / s.N**2 * s.phi**2,
                (s.N * np.sqrt(s.gn2) * np.abs(s.phi)) ** p, s.gn2 * s.phi**2]

    est = _estimate(g, phi, cols, cfg, stream)
    fn = lambda v: _signed_sqrt(v[0] - C * v[1]) * v[2] ** (1 / p) / v[3]  # noqa: E731
    lhs = _product_estimate(est.values, est.cov,
                            lambda v: _signed_sqrt(v[0] - C * v[1]) * v[2] ** (1 / p))
    rep = _report(g, "interpolation", {"alpha": 0.0, "q": q, "radius": radius}, est, fn, lhs,
                  est.estimate(3), None, phi, cfg, ("dirichlet", "hardy_rhs", "moment_p", "weighted_mass"))
    gap, gap_sigma = est.combine(lambda v: v[0] - C * v[1])
    rep.params["gap"] = gap
    rep.params["gap_sigma"] = gap_sigma
    return rep


# ---------------------------------------------------------------------------
# derivation checks


@dataclass
class IdentityCheck:
    name: str
    lhs: float
    rhs: float
    sigma: float

    @property
    def passed(self) -> bool:
        return abs(self.lhs - self.rhs) <= 3.0 * self.sigma

    @property
    def holds_as_inequality(self) -> bool:
        """lhs <= rhs within 3 sigma."""
        return self.lhs <= self.rhs + 3.0 * self.sigma


def rellich_derivation_check(g: GroupSpec, alpha: float, phi: ScalarField,
                             cfg: IntegrationConfig, stream: int = 0) -> tuple[IdentityCheck, IdentityCheck]:
    """Integration-by-parts identity and Cauchy-Schwarz step behind the Rellich bound.

    identity: (Q+a-4)(a-2) int N^(a-4)|grad N|^2 phi^2 - 2 int N^(a-2) phi lap phi
              = 2 int N^(a-2) |grad phi|^2
    chain:    (-int N^(a-2) phi lap phi)^2
              <= (int N^(a-4)|grad N|^2 phi^2)(int N^a |lap phi|^2/|grad N|^2)
    """
    _check_phi(phi)
    Q = g.Q

    def cols(s: _Sample):
        return [s.N ** (alpha - 4) * s.gn2 * s.phi**2,
                s.N ** (alpha - 2) * s.phi * s.lap,
                s.N ** (alpha - 2) * s.grad2,
                np.where(s.lap == 0, 0.0, s.N**alpha * s.lap**2 / s.gn2)]

    est = _estimate(g, phi, cols, cfg, stream)
    c = (Q + alpha - 4) * (alpha - 2)
    diff, dsig = est.combine(lambda v: c * v[0] - 2 * v[1] - 2 * v[2])
    rhs_val = 2 * est.values[2]
    identity = IdentityCheck("rellich-ibp", diff + rhs_val, rhs_val, dsig)
    cs_gap, cs_sig = est.combine(lambda v: v[1] ** 2 - v[0] * v[3])
    chain = IdentityCheck("cauchy-schwarz", est.values[1] ** 2, est.values[1] ** 2 - cs_gap, cs_sig)
    return identity, chain


# ---------------------------------------------------------------------------
# batteries and sweeps


@dataclass
class BatteryResult:
    reports: list[QuotientReport]

    @property
    def counts(self) -> dict[str, int]:
        out = {HOLDS: 0, VIOLATED: 0, INCONCLUSIVE: 0}
        for r in self.reports:
            out[r.verdict] += 1
        return out

    @property
    def minimum(self) -> QuotientReport:
        return min(self.reports, key=lambda r: r.quotient)

    @property
    def min_positive(self) -> bool:
        return self.minimum.positive

    @property
    def passed(self) -> bool:
        if self.counts[VIOLATED]:
            return False
        if self.reports[0].sharp_constant is None:
            return all(r.positive for r in self.reports)
        return True


def run_battery(report_fn: Callable[[ScalarField], QuotientReport],
                fields: Sequence[ScalarField]) -> BatteryResult:
    return BatteryResult([report_fn(phi) for phi in fields])


@dataclass
class SweepResult:
    inequality: str
    group: str
    params: dict
    eps: list[float]
    quotients: list[float]
    sigmas: list[float]
    limit: float
    limit_sigma: float
    slope: float
    residual: float
    sharp_constant: float
    reports: list[QuotientReport] = field(default_factory=list, repr=False)

    @property
    def relative_error(self) -> float:
        return abs(self.limit - self.sharp_constant) / self.sharp_constant

    def to_dict(self) -> dict:
        return {
            "inequality": self.inequality, "group": self.group, "params": self.params,
            "eps": self.eps, "quotients": self.quotients, "sigmas": self.sigmas,
            "limit": self.limit, "limit_sigma": self.limit_sigma, "slope": self.slope,
            "residual": self.residual, "sharp_constant": self.sharp_constant,
        }


def extrapolate(eps, quotients, sigmas) -> tuple[float, float, float, float]:
    """Least-squares line q = c0 + c1 eps; returns (c0, sigma_c0, c1, rms residual)."""
    eps = np.asarray(eps, dtype=float)
    q = np.asarray(quotients, dtype=float)
    A = np.stack([np.ones_like(eps), eps], axis=1)
    pinv = np.linalg.pinv(A)
    c0, c1 = pinv @ q
    c0_sigma = float(np.sqrt(np.sum((pinv[0] * np.asarray(sigmas)) ** 2)))
    resid = float(np.sqrt(np.mean((A @ np.array([c0, c1]) - q) ** 2)))
    return float(c0), c0_sigma, float(c1), resid


def sharpness_sweep(g: GroupSpec, inequality: str, eps_list: Sequence[float],
                    cfg: IntegrationConfig, alpha: float = 0.0, gamma: float = 0.0,
                    kappa: float = 3.0, ramp: str = "c1") -> SweepResult:
    """Quotients of the mollified extremizer family along decreasing eps, extrapolated to 0."""
    eps_list = [float(e) for e in eps_list]
    if not eps_list or any(e <= 0 for e in eps_list):
        raise ValueError("eps list must be non-empty and positive")
    if any(b >= a for a, b in zip(eps_list, eps_list[1:])):
        raise ValueError("eps list must be strictly decreasing")
    if cfg.max_shell_ratio is None:
        cfg = cfg.with_(max_shell_ratio=2.0)
    reports = []
    for i, eps in enumerate(eps_list):
        sched = sweep_schedule(eps, kappa)
        if inequality == "hardy":
            phi = make_hardy_extremizer(g, alpha, eps, sched["delta"], sched["R"], sched["r0"])
            rep = hardy_report(g, alpha, gamma, phi, cfg, stream=i)
        elif inequality == "rellich":
            phi = make_rellich_extremizer(g, alpha, eps, sched["delta"], sched["R"], sched["r0"],
                                          ramp=ramp)
            rep = rellich_report(g, alpha, phi, cfg, stream=i)
        else:
            raise ValueError(f"unknown sweep inequality {inequality!r}")
        rep.params["eps"] = eps
        reports.append(rep)
    q = [r.quotient for r in reports]
    s = [r.sigma for r in reports]
    for i in range(len(q) - 1):
        if q[i + 1] > q[i] + 3.0 * math.hypot(s[i], s[i + 1]):
            raise SweepError(
                f"quotient rose from {q[i]:.6g} to {q[i + 1]:.6g} as eps decreased to {eps_list[i + 1]}"
            )
    c0, c0s, c1, resid = extrapolate(eps_list, q, s)
    sharp = hardy_constant(g.Q, alpha) if inequality == "hardy" else rellich_constant(g.Q, alpha)
    params = {"alpha": alpha, "kappa": kappa}
    if inequality == "hardy":
        params["gamma"] = gamma
    else:
        params["ramp"] = ramp
    return SweepResult(inequality, g.label, params, eps_list, q, s, c0, c0s, c1, resid, sharp, reports)


def elementary_inequality_constant(q: float, dim: int = 3, samples: int = 200_000,
                                   seed: int = 0) -> float:
    """Largest sampled [|w1+w2|^q - |w1|^q - q|w1|^(q-2)<w1,w2>] / |w2|^q.

    By homogeneity |w2| = 1 and |w1| is drawn log-uniformly over many decades.
    """
    if not 1 < q < 2:
        raise ValueError("q must lie in (1, 2)")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, 65])))
    w2 = rng.standard_normal((samples, dim))
    w2 /= np.linalg.norm(w2, axis=1, keepdims=True)
    w1 = rng.standard_normal((samples, dim))
    w1 *= (10 ** rng.uniform(-4, 4, samples) / np.linalg.norm(w1, axis=1))[:, None]
    n1 = np.linalg.norm(w1, axis=1)
    rhs = (np.linalg.norm(w1 + w2, axis=1) ** q - n1**q
           - q * n1 ** (q - 2) * np.einsum("ij,ij->i", w1, w2))
    return float(rhs.max())
