"""Batch driver: run verification suites from a JSON manifest or flags.

Outputs (in ``--out``): ``report.csv`` with one row per check, ``report.json``
with full provenance, and ``summary.json`` with verdict counts.  Files are
written to temporaries first and renamed into place only once every suite has
finished.

Exit status: 0 when no check is violated, 1 otherwise, 2 for an invalid
manifest.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
import tempfile
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np

from .fields import make_annular_bump, make_gaussian_in_norm, random_bump_specs
from .groups import GroupError, GroupSpec
from .identities import IdentityResult, identity_suite
from .inequalities import (HOLDS, INCONCLUSIVE, UNCERTAINTY_VARIANTS, VIOLATED, HypothesisError,
                           QuotientReport, SweepError, ckn_report, gradient_remainder_report,
                           hardy_report, improved_hardy_report, interpolation_report,
                           rellich_report, rellich_sobolev_report, sharpness_sweep,
                           uncertainty_report, verdict)
from .quadrature import IntegrationConfig

log = logging.getLogger("carnot_hardy")

SUITES = ("identities", "hardy", "rellich", "uncertainty", "ckn", "remainder", "sharpness", "all")
CSV_HEADER = ("group", "check", "alpha", "param_name", "param", "value", "sigma", "reference",
              "verdict")
GRID_NAMES = ("alpha", "gamma", "s", "q", "eps")
DEFAULT_GRIDS = {
    "alpha": [0.0],
    "gamma": [0.0],
    "s": [0.0, 1.0, 2.0],
    "q": [1.5],
    "eps": [0.5, 0.2, 0.1, 0.05],
}
SWEEP_TOLERANCE = 0.1


class ManifestError(ValueError):
    pass


@dataclass
class RunManifest:
    group: GroupSpec
    group_source: Any
    suite: str
    grids: dict[str, list[float]]
    integration: IntegrationConfig
    seed: int
    out: Path
    battery: int = 20
    ball_radius: float = 1.0

    def to_dict(self) -> dict:
        return {
            "group": self.group.to_dict(),
            "suite": self.suite,
            "grids": self.grids,
            "integration": self.integration.to_dict(),
            "seed": self.seed,
            "battery": self.battery,
            "ball_radius": self.ball_radius,
        }


@dataclass
class Row:
    group: str
    check: str
    alpha: float | None
    param_name: str
    param: Any
    value: float
    sigma: float
    reference: float | None
    verdict: str
    detail: dict = field(default_factory=dict)

    def csv(self) -> list[str]:
        return [self.group, self.check, _fmt(self.alpha), self.param_name, _fmt(self.param),
                _fmt(self.value), _fmt(self.sigma), _fmt(self.reference), self.verdict]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


# ---------------------------------------------------------------------------
# manifest handling


def _parse_list(text: str) -> list[float]:
    if text.strip() == "":
        return []
    try:
        return [float(t) for t in text.split(",")]
    except ValueError as exc:
        raise ManifestError(f"cannot parse number list {text!r}") from exc


def _load_group(source, base: Path) -> GroupSpec:
    try:
        if isinstance(source, dict):
            return GroupSpec.from_dict(source)
        path = Path(source)
        if not path.is_absolute():
            path = base / path
        if not path.is_file():
            raise ManifestError(f"group spec file {path} does not exist")
        return GroupSpec.from_json(path.read_text())
    except (GroupError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ManifestError):
            raise
        raise ManifestError(f"invalid group spec: {exc}") from exc


def build_manifest(args: argparse.Namespace) -> RunManifest:
    data: dict[str, Any] = {}
    base = Path.cwd()
    if args.manifest:
        mpath = Path(args.manifest)
        if not mpath.is_file():
            raise ManifestError(f"manifest {mpath} does not exist")
        try:
            data = json.loads(mpath.read_text())
        except json.JSONDecodeError as exc:
            raise ManifestError(f"manifest is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ManifestError("manifest must be a JSON object")
        base = mpath.parent
    known = {"group", "suite", "seed", "samples", "out", "grids", "integration", "battery",
             "ball_radius"}
    unknown = set(data) - known
    if unknown:
        raise ManifestError(f"unknown manifest fields: {sorted(unknown)}")

    group_src = args.group if args.group is not None else data.get("group")
    if group_src is None:
        raise ManifestError("no group given (use --group or the manifest 'group' field)")
    group = _load_group(group_src, Path.cwd() if args.group is not None else base)

    suite = args.suite or data.get("suite", "all")
    if suite not in SUITES:
        raise ManifestError(f"unknown suite {suite!r}; choose from {', '.join(SUITES)}")

    seed = args.seed if args.seed is not None else data.get("seed", 0)
    if not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ManifestError("seed must be an unsigned 64-bit integer")

    grids = {k: list(v) for k, v in DEFAULT_GRIDS.items()}
    mgrids = data.get("grids", {})
    if not isinstance(mgrids, dict) or set(mgrids) - set(GRID_NAMES):
        raise ManifestError(f"grids must be an object with keys among {GRID_NAMES}")
    for k, v in mgrids.items():
        if not isinstance(v, list) or not all(isinstance(t, (int, float)) for t in v):
            raise ManifestError(f"grid {k!r} must be a list of numbers")
        grids[k] = [float(t) for t in v]
    for k in GRID_NAMES:
        flag = getattr(args, k)
        if flag is not None:
            grids[k] = _parse_list(flag)
    for k, v in grids.items():
        if not v:
            raise ManifestError(f"parameter grid {k!r} is empty")
        if not all(math.isfinite(t) for t in v):
            raise ManifestError(f"parameter grid {k!r} has non-finite entries")
    eps = grids["eps"]
    if any(e <= 0 for e in eps) or any(b >= a for a, b in zip(eps, eps[1:])):
        raise ManifestError("eps grid must be positive and strictly decreasing")

    icfg = dict(data.get("integration", {}))
    samples = args.samples if args.samples is not None else data.get("samples")
    if samples is not None:
        icfg["samples"] = samples
    icfg["seed"] = seed
    try:
        integration = IntegrationConfig.from_dict(icfg)
    except (TypeError, ValueError) as exc:
        raise ManifestError(f"invalid integration config: {exc}") from exc

    battery = data.get("battery", 20)
    if args.battery is not None:
        battery = args.battery
    if not isinstance(battery, int) or battery < 1:
        raise ManifestError("battery size must be a positive integer")
    ball_radius = float(data.get("ball_radius", 1.0))
    if not ball_radius > 0:
        raise ManifestError("ball_radius must be positive")

    out = args.out or data.get("out")
    if out is None:
        raise ManifestError("no output directory given (use --out)")
    out = Path(out)
    if not out.is_absolute() and args.out is None:
        out = base / out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ManifestError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise ManifestError(f"output directory {out} is not writable")

    return RunManifest(group, group_src, suite, grids, integration, seed, out, battery, ball_radius)


# ---------------------------------------------------------------------------
# rows


def identity_row(r: IdentityResult) -> Row:
    pname, pval = next(iter(r.params.items()), ("", None))
    alpha = r.params.get("alpha")
    if pname == "alpha":
        pname, pval = "", None
    return Row(r.group, r.name, alpha, pname, pval, r.max_error, 0.0, r.tolerance,
               HOLDS if r.passed else VIOLATED, r.to_dict())


def report_row(rep: QuotientReport, check: str | None = None) -> Row:
    pname, pval = rep.param()
    return Row(rep.group, check or rep.inequality, float(rep.params.get("alpha", 0.0)), pname, pval,
               rep.quotient, rep.sigma, rep.sharp_constant, rep.verdict, rep.to_dict())


def _skip(skipped: list, suite: str, reason: str, **params):
    skipped.append({"suite": suite, "reason": reason, "params": params})


# ---------------------------------------------------------------------------
# suites


class Runner:
    def __init__(self, m: RunManifest):
        self.m = m
        self.g = m.group
        self.cfg = m.integration
        self.stream = 0
        self.skipped: list[dict] = []

    def next_stream(self) -> int:
        self.stream += 1
        return self.stream

    def battery(self, tag: int, outer: float | None = None):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([self.m.seed, tag])))
        return [s.build(self.g) for s in random_bump_specs(self.g, self.m.battery, rng, outer=outer)]

    def identities(self) -> list[Row]:
        return [identity_row(r) for r in identity_suite(self.g, seed=self.m.seed)]

    def hardy(self) -> list[Row]:
        rows = []
        fields = self.battery(1)
        for alpha in self.m.grids["alpha"]:
            for gamma in self.m.grids["gamma"]:
                try:
                    for phi in fields:
                        rows.append(report_row(hardy_report(self.g, alpha, gamma, phi, self.cfg,
                                                            self.next_stream())))
                except HypothesisError as exc:
                    _skip(self.skipped, "hardy", str(exc), alpha=alpha, gamma=gamma)
        return rows

    def rellich(self) -> list[Row]:
        rows = []
        fields = self.battery(2)
        for alpha in self.m.grids["alpha"]:
            try:
                for phi in fields:
                    rows.append(report_row(rellich_report(self.g, alpha, phi, self.cfg,
                                                          self.next_stream())))
            except HypothesisError as exc:
                _skip(self.skipped, "rellich", str(exc), alpha=alpha)
        return rows

    def uncertainty(self) -> list[Row]:
        rows = []
        fields = self.battery(3)
        for variant in UNCERTAINTY_VARIANTS:
            alphas = self.m.grids["alpha"] if variant.startswith("rellich") else [0.0]
            for alpha in alphas:
                try:
                    for phi in fields:
                        rows.append(report_row(uncertainty_report(
                            self.g, variant, alpha, phi, self.cfg, stream=self.next_stream())))
                except HypothesisError as exc:
                    _skip(self.skipped, "uncertainty", str(exc), variant=variant, alpha=alpha)
        if self.g.Q >= 3:
            Q = self.g.Q
            for beta in (0.5, 1.0, 2.0):
                rep = uncertainty_report(self.g, "norm-weighted", 0.0, make_gaussian_in_norm(self.g, beta),
                                         self.cfg, constant=(Q / 2) ** 2, stream=self.next_stream())
                row = report_row(rep, "gaussian-equality")
                row.param_name, row.param = "beta", beta
                # equality case: two-sided test
                dev = abs(rep.quotient - rep.sharp_constant)
                row.verdict = verdict(-dev, rep.sigma, 0.0)
                rows.append(row)
        return rows

    def ckn(self) -> list[Row]:
        rows = []
        whole = self.battery(4)
        ball = self.battery(5, outer=self.m.ball_radius)
        for s in self.m.grids["s"]:
            for alpha in self.m.grids["alpha"]:
                radius = None if alpha == 0 else self.m.ball_radius
                fields = whole if radius is None else ball
                try:
                    for phi in fields:
                        rows.append(report_row(ckn_report(self.g, s, alpha, phi, self.cfg, radius,
                                                          self.next_stream())))
                except HypothesisError as exc:
                    _skip(self.skipped, "ckn", str(exc), s=s, alpha=alpha)
            try:
                for phi in whole:
                    rows.append(report_row(rellich_sobolev_report(self.g, s, phi, self.cfg,
                                                                  self.next_stream())))
            except HypothesisError as exc:
                _skip(self.skipped, "rellich-sobolev", str(exc), s=s)
        return rows

    def remainder(self) -> list[Row]:
        rows = []
        r = self.m.ball_radius
        fields = self.battery(6, outer=r)
        for alpha in self.m.grids["alpha"]:
            try:
                for phi in fields:
                    rows.append(report_row(improved_hardy_report(self.g, alpha, r, phi, self.cfg,
                                                                 self.next_stream())))
            except HypothesisError as exc:
                _skip(self.skipped, "improved-hardy", str(exc), alpha=alpha)
        for q in self.m.grids["q"]:
            for fn in (gradient_remainder_report, interpolation_report):
                try:
                    for phi in fields:
                        rows.append(report_row(fn(self.g, q, r, phi, self.cfg, self.next_stream())))
                except HypothesisError as exc:
                    _skip(self.skipped, fn.__name__.replace("_report", ""), str(exc), q=q)
        return rows

    def sharpness(self) -> list[Row]:
        rows = []
        eps = self.m.grids["eps"]
        jobs = [("hardy", a, gm) for a in self.m.grids["alpha"] for gm in self.m.grids["gamma"]]
        jobs += [("rellich", a, 0.0) for a in self.m.grids["alpha"]]
        for kind, alpha, gamma in jobs:
            need = 2 if kind == "hardy" else 4
            if not self.g.Q + alpha - need > 0:
                _skip(self.skipped, f"sharpness-{kind}", f"Q + alpha - {need} must be positive",
                      alpha=alpha)
                continue
            try:
                sw = sharpness_sweep(self.g, kind, eps, self.cfg, alpha=alpha, gamma=gamma)
            except SweepError as exc:
                rows.append(Row(self.g.label, f"sweep-{kind}", alpha, "gamma", gamma, math.nan,
                                math.nan, None, INCONCLUSIVE, {"error": str(exc)}))
                continue
            for rep in sw.reports:
                rows.append(report_row(rep, f"sweep-{kind}-member"))
            ok = sw.relative_error <= SWEEP_TOLERANCE
            pname, pval = ("gamma", gamma) if kind == "hardy" else ("", None)
            rows.append(Row(self.g.label, f"sweep-{kind}-limit", alpha, pname, pval, sw.limit,
                            sw.limit_sigma, sw.sharp_constant, HOLDS if ok else INCONCLUSIVE,
                            sw.to_dict()))
        return rows

    def run(self) -> list[Row]:
        order = SUITES[:-1] if self.m.suite == "all" else (self.m.suite,)
        rows: list[Row] = []
        for name in order:
            log.info("running suite %s on %s", name, self.g.label)
            rows += getattr(self, name)()
        return rows


# ---------------------------------------------------------------------------
# output


def render_csv(rows: Iterable[Row]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in rows:
        w.writerow(r.csv())
    return buf.getvalue()


def _json_safe(obj):
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else repr(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _json_safe(obj.tolist())
    return obj


def summarize(rows: list[Row], skipped: list[dict]) -> dict:
    counts = {HOLDS: 0, VIOLATED: 0, INCONCLUSIVE: 0}
    for r in rows:
        counts[r.verdict] += 1
    return {"checks": len(rows), "counts": counts, "skipped": skipped,
            "exit_status": 1 if counts[VIOLATED] else 0}


def write_outputs(out: Path, files: dict[str, str]) -> None:
    """Write every file to a temporary first, then rename all into place."""
    temps = {}
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(prefix=f".{name}.", dir=out)
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            temps[name] = tmp
    except BaseException:
        for tmp in temps.values():
            os.unlink(tmp)
        raise
    for name, tmp in temps.items():
        os.replace(tmp, out / name)


def run_suite(m: RunManifest) -> int:
    runner = Runner(m)
    rows = runner.run()
    summary = summarize(rows, runner.skipped)
    report = {"manifest": m.to_dict(), "rows": [
        {"csv": dict(zip(CSV_HEADER, r.csv())), "detail": r.detail} for r in rows
    ]}
    dump = lambda o: json.dumps(_json_safe(o), indent=2, sort_keys=True) + "\n"  # noqa: E731
    write_outputs(m.out, {
        "report.csv": render_csv(rows),
        "report.json": dump(report),
        "summary.json": dump(summary),
    })
    return summary["exit_status"]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="carnot-hardy", description=__doc__.splitlines()[0])
    p.add_argument("--manifest", help="JSON run manifest")
    p.add_argument("--group", help="path to a JSON group spec")
    p.add_argument("--suite", help=f"one of {', '.join(SUITES)}")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, help="Monte Carlo samples per shell")
    p.add_argument("--battery", type=int, help="random test functions per battery")
    p.add_argument("--out", help="output directory")
    for name in GRID_NAMES:
        p.add_argument(f"--{name}", help=f"comma-separated {name} grid")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        manifest = build_manifest(args)
    except ManifestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    status = run_suite(manifest)
    print(f"wrote {manifest.out / 'report.csv'} (exit status {status})")
    return status


if __name__ == "__main__":
    sys.exit(main())
