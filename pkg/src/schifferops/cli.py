"""Batch verification harness.

Builds models from a JSON experiment config, runs the selected
verification suites, and writes machine-readable reports:

  report.json   deterministic record of every check (sorted keys)
  summary.csv   one line per check
  run_meta.json environment metadata and timings (volatile)
  sweep tables  per-parameter CSV tables for sweep runs

Exit codes: 0 all checks pass, 1 suite failure, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import platform
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import ConfigInvalid, SchifferOpsError
from .forms import HarmonicFun, check_W1
from .geometry import CurveSpec, build_model, welding
from .kernels import K_comp, K_R, calibrate, lam_reg_base
from .quadrature import disk_rule, torus_cycles, torus_full_rule
from .report import CheckRecord, IDENTITY_LABELS, Report
from .schiffer import (
    assemble_S,
    assemble_T,
    grunsky_norm,
    t12_column_evaluator,
    verify_adjoint_identity,
    verify_complete_identity,
)
from .jump import (
    jump,
    left_inverse_residual,
    plemelj_solve,
    transmission_dirichlet_norm,
    verify_jump_derivatives,
    verify_reflection,
    verify_side_independence,
)
from .forms import periods_of_callable

SUITE_NAMES = ("kernels", "schiffer", "jump")
SWEEP_PARAMS = ("c", "N", "rho", "tau_im", "eps-set")


@dataclass
class ExperimentConfig:
    """Validated batch-run configuration."""

    spec: CurveSpec
    truncation: int = 32
    suites: tuple = SUITE_NAMES
    seed: int = 0
    threads: int = 1
    out_dir: Path = Path("out")
    tolerance_scale: float = 1.0
    quadrature: dict = field(default_factory=dict)

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigInvalid(f"config is not valid JSON: {exc}") from None
        if "model" not in raw:
            raise ConfigInvalid("config needs a 'model' curve entry")
        spec = CurveSpec.from_json(json.dumps(raw["model"]))
        n = int(raw.get("truncation", 32))
        if n < 8:
            raise ConfigInvalid("truncation must be at least 8")
        suites = tuple(raw.get("suites", SUITE_NAMES))
        for s in suites:
            if s not in SUITE_NAMES:
                raise ConfigInvalid(f"unknown suite {s!r} (known: {SUITE_NAMES})")
        return ExperimentConfig(
            spec=spec,
            truncation=n,
            suites=suites,
            seed=int(raw.get("seed", 0)),
            threads=int(raw.get("threads", 1)),
            out_dir=Path(raw.get("out", "out")),
            tolerance_scale=float(raw.get("tolerance_scale", 1.0)),
            quadrature=dict(raw.get("quadrature", {})),
        )


# ---------------------------------------------------------------------------
# suites
# ---------------------------------------------------------------------------

def _random_h(model, rng, n_modes: int = 8) -> HarmonicFun:
    a = np.zeros(n_modes + 1, dtype=complex)
    b = np.zeros(n_modes + 1, dtype=complex)
    decay = np.arange(1, n_modes + 1) ** 1.5
    a[1:] = (rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)) / decay
    b[1:] = (rng.standard_normal(n_modes) + 1j * rng.standard_normal(n_modes)) / decay
    if model.genus == 1:
        b[1] = 0.0
    return HarmonicFun(1, rng.standard_normal() + 1j * rng.standard_normal(), a, b)


def suite_kernels(model, n, rng) -> Report:
    """Reproducing property, vanishing identity, kernel symmetries."""
    from .kernels import kap_comp, lam_R

    records = []
    F = model.chart(1)
    rule = disk_rule(64, 192)
    xi0 = 0.31 - 0.17j
    z0 = complex(F(np.array(xi0)))
    dF0 = complex(F.deriv(np.array(xi0)))
    wnodes = F(rule.nodes)
    dFn = F.deriv(rule.nodes)

    # component Bergman kernel reproduces low basis forms (pulled-back check)
    kap = kap_comp(model, 1, np.full(rule.size, z0), wnodes)
    for deg in (0, 1, 2):
        e_deg = np.sqrt((deg + 1) / np.pi) * rule.nodes ** deg
        val = 2j * np.sum(kap * e_deg * np.conj(dFn) * rule.weights) * dF0
        target = np.sqrt((deg + 1) / np.pi) * xi0 ** deg
        records.append(
            CheckRecord(f"component_reproducing_deg{deg}", "bergman-reproducing",
                        float(abs(val - target)), 1e-8)
        )
    if model.genus == 1:
        tau = model.spec.tau
        nodes, w = torus_full_rule(tau, 128)
        kap_t = calibrate(model).compact_k
        val = kap_t * 2j * w * len(nodes)
        records.append(
            CheckRecord("torus_reproducing", "bergman-reproducing",
                        float(abs(val - 1.0)), 1e-8)
        )

    # vanishing identity: the base-chart regularized pairing must agree with
    # the spectral self-block (all component-kernel terms integrate to zero)
    sub = disk_rule(48, 128)
    wsub = F(sub.nodes)
    dFs = F.deriv(sub.nodes)
    lam_vals = lam_reg_base(model, 1, np.full(sub.size, z0), wsub)
    t11 = assemble_T(model, 1, 1, max(8, n // 2))
    ks = np.arange(t11.entries.shape[0])
    basis_at = np.sqrt((ks + 1) / np.pi) * xi0 ** ks
    for deg in (0, 1):
        e_deg = np.sqrt((deg + 1) / np.pi) * np.conj(sub.nodes) ** deg
        quad = -2j * np.sum(lam_vals * dFs * e_deg * sub.weights) * dF0
        spectral = np.sum(t11.entries[:, deg] * basis_at)
        records.append(
            CheckRecord(f"vanishing_identity_deg{deg}", "schiffer-vanishing",
                        float(abs(quad - spectral)), 1e-6)
        )

    # symmetry of the full kernel under slot exchange
    pts = (0.1 + 0.2j, 0.7 + 0.4j) if model.genus == 0 else (0.1 + 0.2j, 0.8 + 0.7j)
    s1 = complex(lam_R(model, pts[0], pts[1]))
    s2 = complex(lam_R(model, pts[1], pts[0]))
    records.append(CheckRecord("kernel_symmetry", "kernel-symmetry",
                               float(abs(s1 - s2)), 1e-10))
    return Report.from_records("kernels", records)


def suite_schiffer(model, n, rng) -> Report:
    report = verify_adjoint_identity(model, n, seed=int(rng.integers(1 << 31)))
    report.extend(verify_complete_identity(model, n))
    nu, sv_self, sv_cross = grunsky_norm(model, n)
    records = [
        CheckRecord("grunsky_norm_below_one", "grunsky-bound",
                    float(max(nu - 1.0 + 1e-12, 0.0)), 1e-12),
        CheckRecord("cross_block_injectivity", "cross-block-singular-values",
                    float(max(np.sqrt(max(1 - nu ** 2, 0.0)) - 1e-4 - sv_cross.min(), 0.0)),
                    1e-12),
    ]
    if model.genus == 1:
        evalv = t12_column_evaluator(model, n)
        a_cyc, b_cyc = torus_cycles(model.spec.tau, model.spec.center, model.spec.rho)
        worst = 0.0
        for col in range(1, n):  # columns in V1 (the global direction excluded)
            pers = periods_of_callable(lambda z, c=col: evalv(z)[:, c], [a_cyc, b_cyc])
            worst = max(worst, float(np.max(np.abs(pers))))
        records.append(CheckRecord("cross_block_exactness", "cross-block-exactness",
                                   worst, 1e-7))
    rep2 = Report.from_records("schiffer", records)
    report.extend(rep2)
    report.title = "schiffer"
    return report


def suite_jump(model, n, rng) -> Report:
    records = []
    h = _random_h(model, rng)
    rep = verify_jump_derivatives(model, h, n=n)
    records.extend(rep.records)
    res, bres = plemelj_solve(model, h, n=n)
    tol = 1e-6 if model.genus == 0 else 1e-4
    records.append(CheckRecord("plemelj_boundary", "plemelj-decomposition", bres, tol))
    holo = HarmonicFun(1, 0.2, h.a, np.zeros(1))
    rh = jump(model, holo, n_out=n, want_diagnostics=False)
    gap = (rh.h1 - holo)
    dev = np.sqrt(gap.dirichlet_norm2()) + abs(gap.const)
    if model.genus == 0:
        dev += np.sqrt(rh.h2.dirichlet_norm2()) + abs(rh.h2.const)
    records.append(CheckRecord("holomorphic_input", "jump-holomorphic-input",
                               float(dev), 1e-9))
    if model.genus == 0:
        rep = verify_reflection(model, h, n=n)
        records.extend(rep.records)
        rep = verify_side_independence(model, h, n=n)
        records.extend(rep.records)
        records.append(CheckRecord("left_inverse", "left-inverse",
                                   left_inverse_residual(model, min(n, 16)), 1e-5))
    return Report.from_records("jump", records)


SUITES = {
    "kernels": suite_kernels,
    "schiffer": suite_schiffer,
    "jump": suite_jump,
}


# ---------------------------------------------------------------------------
# run / sweep
# ---------------------------------------------------------------------------

def run(config: ExperimentConfig) -> Report:
    """Execute the configured suites and write report files."""
    t_start = time.time()
    model = build_model(config.spec, config.truncation)
    rng = np.random.default_rng(config.seed)
    seeds = {name: int(rng.integers(1 << 31)) for name in SUITE_NAMES}

    timings = {}
    reports = {}

    def run_one(name):
        t0 = time.time()
        rep = SUITES[name](model, config.truncation, np.random.default_rng(seeds[name]))
        timings[name] = time.time() - t0
        return name, rep

    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            for name, rep in pool.map(run_one, config.suites):
                reports[name] = rep
    else:
        for name in config.suites:
            reports[name] = run_one(name)[1]

    combined = Report(title="verification", records=[])
    for name in sorted(reports):
        for rec in reports[name].records:
            combined.records.append(
                CheckRecord(f"{name}/{rec.name}", rec.identity, rec.residual,
                            rec.tolerance * config.tolerance_scale)
            )
    combined.timings = {**timings, "total": time.time() - t_start}
    combined.metadata = {
        "package": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "seed": config.seed,
        "truncation": config.truncation,
        "model": json.loads(config.spec.to_json()),
    }
    _write_outputs(config.out_dir, combined)
    return combined


def _write_outputs(out_dir: Path, report: Report) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "report.json").write_text(report.canonical_json())
    with open(out_dir / "summary.csv", "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["name", "identity", "residual", "tolerance", "pass"])
        for r in report.records:
            wr.writerow([r.name, r.identity, f"{r.residual:.16e}",
                         f"{r.tolerance:.3e}", int(r.passed)])
    meta = {"metadata": report.metadata, "timings": report.timings}
    (out_dir / "run_meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True))


def sweep(config: ExperimentConfig, parameter: str, values) -> list[dict]:
    """One verification row per parameter value, with trend columns."""
    if parameter not in SWEEP_PARAMS:
        raise ConfigInvalid(f"sweep parameter must be one of {SWEEP_PARAMS}")
    rows = []
    for v in values:
        spec, n = config.spec, config.truncation
        if parameter == "c":
            if spec.kind != "exterior_map":
                raise ConfigInvalid("c sweeps need an exterior_map model")
            spec = CurveSpec("exterior_map", coeffs=np.array([0.0, float(v)]))
        elif parameter == "N":
            n = int(v)
        elif parameter == "rho":
            spec = CurveSpec("torus_disk", tau=spec.tau, center=spec.center, rho=float(v))
        elif parameter == "tau_im":
            spec = CurveSpec("torus_disk", tau=complex(0, float(v)),
                             center=spec.center, rho=spec.rho)
        model = build_model(spec, n)
        if parameter == "eps-set":
            rng = np.random.default_rng(config.seed)
            h = _random_h(model, rng)
            base = jump(model, h, n_out=n, want_diagnostics=False)
            scaled = tuple(float(v) * e for e in (0.08, 0.04, 0.02, 0.01))
            alt = jump(model, h, n_out=n, eps_set=scaled, want_diagnostics=False)
            drift = float(np.max(np.abs(base.h1.a - alt.h1.a)))
            rows.append({"eps_scale": float(v), "jump_drift": drift})
            continue
        nu, _, sv_cross = grunsky_norm(model, n)
        rep = verify_complete_identity(model, n)
        rows.append({
            parameter: float(v),
            "grunsky_norm": nu,
            "sigma_min_cross": float(sv_cross.min()),
            "complete_identity_residual": rep.records[0].residual,
        })
    # trend columns
    for i, row in enumerate(rows):
        if parameter == "c" and i > 0:
            row["monotone_increase"] = int(row["grunsky_norm"] > rows[i - 1]["grunsky_norm"])
        if parameter == "N" and i > 0:
            prev = rows[i - 1]["complete_identity_residual"]
            row["residual_nonincreasing"] = int(
                row["complete_identity_residual"] <= prev + 1e-10
            )
    return rows


def _write_sweep(out_dir: Path, parameter: str, rows: list[dict]) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    name = {"c": "grunsky_vs_c.csv"}.get(parameter, f"sweep_{parameter}.csv")
    path = out_dir / name
    keys = sorted({k for row in rows for k in row})
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(keys)
        for row in rows:
            wr.writerow([row.get(k, "") for k in keys])
    return path


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="schifferops",
        description="verify comparison-operator and jump identities on a model",
    )
    parser.add_argument("--config", required=True, help="experiment config JSON path")
    parser.add_argument("--out", default=None, help="output directory (overrides config)")
    parser.add_argument("--suite", action="append", default=None,
                        help="suite name (repeatable; overrides config)")
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--sweep-param", default=None, choices=SWEEP_PARAMS)
    parser.add_argument("--sweep-values", default=None,
                        help="comma-separated values for the sweep parameter")
    args = parser.parse_args(argv)

    try:
        config = ExperimentConfig.from_json(Path(args.config).read_text())
        if args.out:
            config.out_dir = Path(args.out)
        if args.suite:
            for s in args.suite:
                if s not in SUITE_NAMES:
                    raise ConfigInvalid(f"unknown suite {s!r}")
            config.suites = tuple(args.suite)
        if args.threads is not None:
            config.threads = args.threads
        if args.seed is not None:
            config.seed = args.seed

        if args.sweep_param:
            if not args.sweep_values:
                raise ConfigInvalid("--sweep-values required with --sweep-param")
            values = [float(v) for v in args.sweep_values.split(",")]
            rows = sweep(config, args.sweep_param, values)
            path = _write_sweep(config.out_dir, args.sweep_param, rows)
            print(f"wrote {path}")
            return 0

        report = run(config)
        for line in report.summary_lines():
            print(line)
        if not report.passed:
            print("FAILED checks:")
            for r in report.records:
                if not r.passed:
                    print(f"  {r.name}: {r.residual:.3e} > {r.tolerance:.1e}")
            return 1
        return 0
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except SchifferOpsError as exc:
        print(f"run error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
