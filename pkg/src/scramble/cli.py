"""Command-line entry point: sweep, verify-theory, critical, self-averaging."""

from __future__ import annotations

import argparse
import csv
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .config import load_selfavg_config, load_sweep_config, load_theory_config
from .errors import ConfigError, ResourceLimitError
from .montecarlo import mean_se, sample_haar_observables
from .persist import (
    fmt_float,
    read_sweep_records,
    write_critical_csv,
    write_manifest,
    write_sweep_csv,
    write_sweep_json,
)
from .sweep import (
    cells_from_records,
    estimate_critical_line,
    interpolate_surface,
    run_sweep,
    self_averaging_chi,
)
from .theory import (
    TheoryParams,
    bound_decoupling,
    bound_drs_lower,
    bound_drs_upper,
    bound_mutual_information,
    replica2_moment,
)

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _resolve_threads(args, config_threads: int = 1) -> int:
    if getattr(args, "threads", None):
        return args.threads
    env = os.environ.get("SCRAMBLE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SCRAMBLE_THREADS={env!r} is not an integer")
    return config_threads


def _cmd_sweep(args) -> int:
    config = load_sweep_config(args.config)
    if args.seed is not None:
        config.master_seed = args.seed
    config.threads = _resolve_threads(args, config.threads)
    config.validate()
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    started = _now()
    result = run_sweep(config)
    csv_path = out_dir / "sweep.csv"
    json_path = out_dir / "sweep.json"
    write_sweep_csv(result, csv_path)
    write_sweep_json(result, json_path)
    for (n, p, tau, quantity), stat in sorted(result.cells().items()):
        print(
            f"N={n} p={p:g} tau={tau:g} {quantity}: mean={stat.mean:.6g} "
            f"se={stat.se:.3g} (R={stat.count})"
        )
    write_manifest(
        out_dir / "manifest.json",
        command="sweep",
        config_echo=config.canonical_dict(),
        master_seed=config.master_seed,
        outputs=[csv_path, json_path],
        started=started,
        finished=_now(),
        version=__version__,
    )
    return EXIT_OK


def theory_report(n, gamma, p, samples, seed, corrupt=None) -> tuple[list[dict], bool]:
    """Closed forms vs Monte-Carlo table.  ``corrupt`` is a test hook that
    may rewrite the dict of closed-form values before comparison."""
    params = TheoryParams(n, gamma, p)
    kinds = ("purity_S", "purity_RS", "prob_sq", "cond_weight_sq")
    closed = {kind: replica2_moment(kind, params) for kind in kinds}
    if corrupt is not None:
        closed = corrupt(closed)
    want = kinds + ("trace_dist_maxmix", "mutual_info", "D_RS")
    samples_by_name = sample_haar_observables(params, samples, seed, want=want)
    rows = []
    for kind in kinds:
        mean, se = mean_se(samples_by_name[kind])
        ok = abs(mean - closed[kind]) <= 5 * se if se > 0 else abs(mean - closed[kind]) < 1e-12
        rows.append(
            {
                "quantity": kind,
                "closed_form": closed[kind],
                "mc_mean": mean,
                "mc_se": se,
                "rule": "|mean - closed| <= 5 SE",
                "passed": ok,
            }
        )
    mean, se = mean_se(samples_by_name["trace_dist_maxmix"])
    bound = bound_decoupling(params)
    rows.append(
        {
            "quantity": "decoupling_bound",
            "closed_form": bound,
            "mc_mean": mean,
            "mc_se": se,
            "rule": "mean <= bound + 3 SE",
            "passed": mean <= bound + 3 * se + 1e-9,
        }
    )
    mi_bound = bound_mutual_information(params)
    if mi_bound is not None:
        mean, se = mean_se(samples_by_name["mutual_info"])
        rows.append(
            {
                "quantity": "mutual_info_bound",
                "closed_form": mi_bound,
                "mc_mean": mean,
                "mc_se": se,
                "rule": "mean >= bound - 3 SE",
                "passed": mean >= mi_bound - 3 * se - 1e-9,
            }
        )
    mean, se = mean_se(samples_by_name["D_RS"])
    upper = bound_drs_upper(params)
    rows.append(
        {
            "quantity": "D_RS_upper_bound",
            "closed_form": upper,
            "mc_mean": mean,
            "mc_se": se,
            "rule": "mean <= bound + 3 SE",
            "passed": mean <= upper + 3 * se + 1e-9,
        }
    )
    if params.p > 1 - params.gamma:
        lower = bound_drs_lower(params)
        worst = float(min(samples_by_name["D_RS"]))
        rows.append(
            {
                "quantity": "D_RS_lower_bound",
                "closed_form": lower,
                "mc_mean": worst,
                "mc_se": 0.0,
                "rule": "every sample >= bound",
                "passed": worst >= lower - 1e-9,
            }
        )
    return rows, all(row["passed"] for row in rows)


def _cmd_verify_theory(args) -> int:
    cfg = load_theory_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows, all_pass = theory_report(**cfg)
    report = out_dir / "theory_report.csv"
    with open(report, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["quantity", "closed_form", "mc_mean", "mc_se", "rule", "passed"])
        for row in rows:
            writer.writerow(
                [
                    row["quantity"],
                    fmt_float(row["closed_form"]),
                    fmt_float(row["mc_mean"]),
                    fmt_float(row["mc_se"]),
                    row["rule"],
                    row["passed"],
                ]
            )
    for row in rows:
        status = "pass" if row["passed"] else "FAIL"
        print(
            f"{row['quantity']:>20}: closed={row['closed_form']:.8g} "
            f"mc={row['mc_mean']:.8g} +- {row['mc_se']:.2g} [{status}]"
        )
    return EXIT_OK if all_pass else EXIT_VERIFY_FAIL


def _cmd_critical(args) -> int:
    try:
        records = read_sweep_records(args.sweep)
    except (ValueError, OSError) as exc:
        raise ConfigError(f"cannot read sweep CSV: {exc}")
    cells = cells_from_records(records)
    ns = sorted({n for n, _, _, q in cells if q == args.quantity})
    if len(ns) < 3:
        raise ConfigError(f"need >= 3 sizes for quantity {args.quantity!r}, found {len(ns)}")
    surfaces = {n: interpolate_surface(cells, n, args.quantity) for n in ns}
    estimates = estimate_critical_line(surfaces, args.quantity, args.direction)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "critical.csv"
    write_critical_csv(estimates, out_path)
    for est in estimates:
        print(
            f"{args.quantity} @ {est.direction}-scan, fixed={est.coordinate:g}: "
            f"value={est.value:g} in [{est.lower_err:g}, {est.upper_err:g}] ({est.flag})"
        )
    return EXIT_OK


def _cmd_self_averaging(args) -> int:
    cfg = load_selfavg_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records = self_averaging_chi(
        cfg["n_list"],
        cfg["realizations"],
        cfg["p"],
        cfg["gamma"],
        master_seed=cfg["seed"],
        product_mode=cfg["product_mode"],
    )
    out_path = out_dir / "self_averaging.csv"
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "chi1", "chi2", "excluded_outcomes"])
        for rec in records:
            writer.writerow([rec.n, fmt_float(rec.chi1), fmt_float(rec.chi2), rec.excluded_outcomes])
    for rec in records:
        print(f"N={rec.n} chi1={rec.chi1:.6g} chi2={rec.chi2:.6g} excluded={rec.excluded_outcomes}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="scramble",
        description="Scrambling-dynamics sweeps, Haar-theory verification, and "
        "critical-line estimation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sweep = sub.add_parser("sweep", help="run a (p, tau) sweep from a config file")
    sweep.add_argument("--config", required=True)
    sweep.add_argument("--out-dir", default=".")
    sweep.add_argument("--seed", type=int, default=None)
    sweep.add_argument("--threads", type=int, default=None)
    sweep.set_defaults(func=_cmd_sweep)

    verify = sub.add_parser("verify-theory", help="closed forms vs Haar Monte-Carlo")
    verify.add_argument("--config", required=True)
    verify.add_argument("--out-dir", default=".")
    verify.add_argument("--seed", type=int, default=None)
    verify.set_defaults(func=_cmd_verify_theory)

    critical = sub.add_parser("critical", help="estimate critical points from a sweep CSV")
    critical.add_argument("--sweep", required=True)
    critical.add_argument("--quantity", required=True)
    critical.add_argument("--direction", choices=("p", "tau"), default="p")
    critical.add_argument("--out-dir", default=".")
    critical.set_defaults(func=_cmd_critical)

    selfavg = sub.add_parser("self-averaging", help="quenched vs annealed diagnostics")
    selfavg.add_argument("--config", required=True)
    selfavg.add_argument("--out-dir", default=".")
    selfavg.add_argument("--seed", type=int, default=None)
    selfavg.set_defaults(func=_cmd_self_averaging)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # argparse usage errors
        code = exc.code if isinstance(exc.code, int) else EXIT_USAGE
        return code
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceLimitError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


def entrypoint() -> None:
    sys.exit(main())
