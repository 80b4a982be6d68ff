"""Command-line entry point: ``heatfcs {power,cumulants,pdf,validate}``.

Exit status: 0 on success, 2 for configuration errors, 3 for numerical
failures and 4 when ``validate`` finds a failing check.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .config import ConfigError, RunConfig, load_config
from .errors import HeatFCSError, InvalidExpansionError
from .mc import empirical_distribution, sample_heat
from .statistics import (
    finite_time_pdf,
    gaussian_envelope,
    longtime_cumulants,
    longtime_pdf,
    mean_heat,
    mean_heat_power,
)
from .tilted import characteristic_function, dss, eigenvalues, generator_matrix, propagate_populations

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VALIDATION = 0, 2, 3, 4


def _fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, columns: list[str], rows) -> None:
    lines = [",".join(columns)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, sort_keys=True, indent=1) + "\n")


def _map(cfg: RunConfig, fn, items):
    if cfg.threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def cmd_power(cfg: RunConfig, out: Path) -> int:
    sol, table, init = cfg.build()
    rows = []
    for n in cfg.times_tau:
        t = n * sol.tau
        rho = propagate_populations(table, init, t)
        rows.append((t, n, rho.p1, rho.p2, mean_heat_power(table, rho)))
    if table.relaxation_rate > 0:
        rho = dss(table)
        rows.append((math.inf, math.inf, rho.p1, rho.p2, mean_heat_power(table, rho)))
    write_csv(out / "power.csv", ["t", "t_over_tau", "rho11", "rho22", "power"], rows)
    return EXIT_OK


def _cumulant_row(cfg: RunConfig, value: float):
    sol, table, init = cfg.build()
    method = cfg.cumulant_method
    if method == "auto":
        method = "exact" if cfg.coupling == "sigma_z" else "longtime"
    rows = []
    for n in cfg.times_tau:
        t = n * sol.tau
        if method == "longtime":
            c = longtime_cumulants(table, t)
            cum = (c.mean, c.variance, c.skewness)
        else:
            d = finite_time_pdf(table, init, t, cfg.grid)
            cum = (d.mean(), d.variance(), d.central_moment(3))
        rows.append((value, t, n, *cum))
    return rows


def cmd_cumulants(cfg: RunConfig, out: Path) -> int:
    values = list(cfg.sweep_values) if cfg.sweep != "none" else [math.nan]
    results = _map(cfg, lambda v: _cumulant_row(cfg.with_sweep(v), v), values)
    rows = [r for block in results for r in block]
    name = cfg.sweep if cfg.sweep != "none" else "param"
    write_csv(
        out / "cumulants.csv",
        [name, "t", "t_over_tau", "mean", "variance", "skewness"],
        rows,
    )
    return EXIT_OK


def cmd_pdf(cfg: RunConfig, out: Path) -> int:
    sol, table, init = cfg.build()
    finite, longtime, env_rows = [], [], []
    for n in cfg.times_tau:
        t = n * sol.tau
        finite.append(finite_time_pdf(table, init, t, cfg.grid).to_dict())
        if t == 0 or cfg.coupling == "sigma_z":
            continue
        try:
            lp = longtime_pdf(table, init, t)
        except InvalidExpansionError:
            continue
        longtime.append(lp.to_dict())
        mu, sd = lp.mean(), math.sqrt(lp.variance())
        Q = np.linspace(mu - 6 * sd, mu + 6 * sd, cfg.envelope_points)
        env_rows += [(t, q, w) for q, w in zip(Q, gaussian_envelope(Q, t, table))]
    write_json(out / "pdf.json", {"finite_time": finite, "longtime": longtime})
    write_csv(out / "envelope.csv", ["t", "Q", "w"], env_rows)
    return EXIT_OK


def _check(name, passed, value, threshold):
    return {"name": name, "passed": bool(passed), "value": float(value), "threshold": float(threshold)}


def _run_checks(cfg: RunConfig):
    sol, table, init = cfg.build()
    rates = table.column("rate")
    yield _check("rates_nonnegative", np.all(rates >= 0) and np.all(np.isfinite(rates)), rates.min(initial=0.0), 0.0)
    M0 = generator_matrix(table, 0.0)
    scale = max(table.relaxation_rate, 1e-300)
    col = np.max(np.abs(M0.sum(axis=0))) / scale
    yield _check("generator_column_sums", col <= 1e-14, col, 1e-14)
    times = np.array([n * sol.tau for n in cfg.times_tau])
    norm = np.max(np.abs(characteristic_function(table, init, 0.0, times) - 1.0))
    yield _check("cf_normalization", norm <= 1e-12, norm, 1e-12)
    nu = np.linspace(-0.5, 0.5, 41) * sol.tau
    per = max(
        np.max(np.abs(a - b) / np.maximum(np.abs(a), scale))
        for a, b in zip(eigenvalues(table, nu), eigenvalues(table, nu + sol.tau))
    )
    yield _check("eigenvalue_periodicity", per <= 1e-10, per, 1e-10)
    for n, t in zip(cfg.times_tau, times):
        d = finite_time_pdf(table, init, t, cfg.grid)
        exact = mean_heat(table, init, t)
        dev = abs(d.mean() - exact) / max(abs(exact), sol.OmegaR * 1e-12, 1e-300)
        yield _check(f"pdf_mean_t{n:g}", dev <= 1e-8, dev, 1e-8)
    t = times[0] if times[0] > 0 else times[-1]
    d = finite_time_pdf(table, init, t, cfg.grid)
    ens = sample_heat(table, init, t, cfg.mc_samples, cfg.seed, threads=cfg.threads)
    N = ens.N
    var = d.variance()
    se_mean = math.sqrt(var / N) if var > 0 else 1e-300
    z_mean = abs(ens.mean() - d.mean()) / se_mean
    yield _check("mc_mean_zscore", z_mean <= 4, z_mean, 4)
    mu4 = d.central_moment(4)
    se_var = math.sqrt(max(mu4 - var**2, 0.0) / N) or 1e-300
    z_var = abs(ens.variance() - var) / se_var if N > 1 else 0.0
    yield _check("mc_variance_zscore", z_var <= 4, z_var, 4)
    emp = empirical_distribution(ens)
    yield _check("mc_on_lattice", True, len(emp), 0)


def cmd_validate(cfg: RunConfig, out: Path) -> int:
    checks = []
    try:
        for c in _run_checks(cfg):
            checks.append(c)
    except (HeatFCSError, ValueError) as exc:
        checks.append({"name": "error", "passed": False, "value": None, "threshold": None, "message": str(exc)})
    for c in checks:
        status = "PASS" if c["passed"] else "FAIL"
        if c["value"] is None:
            print(f"{status} {c['name']}: {c['message']}")
        else:
            print(f"{status} {c['name']} value={_fmt(c['value'])} threshold={_fmt(c['threshold'])}")
    ok = all(c["passed"] for c in checks)
    report = {"checks": checks, "passed": ok, "seed": cfg.seed, "mc_samples": cfg.mc_samples}
    write_json(out / "validate.json", report)
    return EXIT_OK if ok else EXIT_VALIDATION


COMMANDS = {"power": cmd_power, "cumulants": cmd_cumulants, "pdf": cmd_pdf, "validate": cmd_validate}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="heatfcs", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", help="key = value configuration file")
    ap.add_argument("--set", action="append", default=[], metavar="KEY=VALUE", help="override a config key (repeatable)")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"seed={args.seed}")
    if args.threads is not None:
        overrides.append(f"threads={args.threads}")
    if args.out is not None:
        overrides.append(f"out={args.out}")
    try:
        cfg = load_config(args.config, overrides)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](cfg, out)
    except (HeatFCSError, ValueError, FloatingPointError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
