"""Command-line front end.

Exit codes: 0 success, 1 theorem-check failure, 2 usage or validation error,
3 incompatible learner/environment.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import math
import subprocess
import sys
import time
from pathlib import Path

from hotstove import __version__, analytic, oracle
from hotstove.checks import SUITES, Budget, run_suites
from hotstove.config import ConfigError, config_schema, config_to_dict, load_config
from hotstove.distributions import FixedMean
from hotstove.engine import IncompatibleConfig, default_workers, run_experiment
from hotstove.learners import Averaging, RecencyWeighted
from hotstove.policies import Constant, Step
from hotstove.quadrature import QuadratureError, QuadratureSettings

EXIT_OK, EXIT_CHECK_FAILED, EXIT_USAGE, EXIT_INCOMPATIBLE = 0, 1, 2, 3

SUMMARY_COLUMNS = (
    "config_id", "trials", "seed", "mean_final_belief", "se_mean",
    "prob_below_ref", "se_prob", "ref_value",
)
HISTOGRAM_COLUMNS = ("bin_left", "bin_right", "count")


def version_string() -> str:
    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty", "--tags"],
            cwd=Path(__file__).resolve().parent, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+g{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def manifest(config: dict | None, seed, started: float, backends: list[str]) -> dict:
    return {
        "config": config,
        "version": version_string(),
        "seed": seed,
        "wall_clock_seconds": time.perf_counter() - started,
        "backends": backends,
    }


# --- argument types ---------------------------------------------------------


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}")
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


def _finite_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}")
    if not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return v


def _positive_float(text: str) -> float:
    v = _finite_float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text!r}")
    return v


def _add_step_flags(p: argparse.ArgumentParser, constant: bool = False) -> None:
    p.add_argument("--k", type=_positive_int, required=True, help="first-period sample size")
    p.add_argument("--high", type=_positive_int, help="second-period size above the threshold")
    p.add_argument("--low", type=_positive_int, help="second-period size at or below the threshold")
    p.add_argument("--threshold", type=_finite_float, default=0.0)
    if constant:
        p.add_argument("--constant", type=_positive_int, help="use a constant policy instead of a step")


def _write_rows(columns, rows, fmt: str, head: dict, out) -> None:
    if fmt == "json":
        json.dump({"manifest": head, "rows": [dict(zip(columns, r)) for r in rows]}, out, indent=2)
        out.write("\n")
        return
    out.write(f"# manifest: {json.dumps(head)}\n")
    w = csv.writer(out, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)


def _open_out(path):
    if path and path != "-":
        return open(path, "w", newline="")
    return contextlib.nullcontext(sys.stdout)


# --- subcommands ------------------------------------------------------------


def cmd_closed_form(args) -> int:
    started = time.perf_counter()
    value = analytic.step_policy_bias_closed_form(args.k, args.high, args.low, args.threshold, args.sigma)
    inputs = {"k": args.k, "high": args.high, "low": args.low, "threshold": args.threshold, "sigma": args.sigma}
    cols = ("k", "high", "low", "threshold", "sigma", "expected_final_average")
    row = (args.k, args.high, args.low, args.threshold, args.sigma, value)
    with _open_out(args.output) as out:
        _write_rows(cols, [row], args.format, manifest(inputs, None, started, ["analytic"]), out)
    return EXIT_OK


def cmd_simulate(args) -> int:
    started = time.perf_counter()
    try:
        model = load_config(args.config)
    except ConfigError as exc:
        print(f"config error at {exc.path}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        cfg = model.build()
    except IncompatibleConfig as exc:
        print(f"incompatible config: {exc}", file=sys.stderr)
        return EXIT_INCOMPATIBLE
    result = run_experiment(cfg, args.threads)
    s = result.summary
    head = manifest(config_to_dict(cfg), cfg.seed, started, ["engine"])
    row = (cfg.config_id, s.count, cfg.seed, s.mean, s.se_mean, s.prob_below_reference,
           s.se_prob_below, s.reference)
    with _open_out(args.output) as out:
        if args.format == "json":
            summary = dict(zip(SUMMARY_COLUMNS, row))
            summary.update(variance=s.variance, prob_above_ref=s.prob_above_reference,
                           se_prob_above=s.se_prob_above)
            json.dump({"manifest": head, "summary": summary}, out, indent=2)
            out.write("\n")
        else:
            _write_rows(SUMMARY_COLUMNS, [row], "csv", head, out)
    if result.histogram is not None:
        hist_path = args.histogram_output
        if hist_path is None:
            if args.output in (None, "-"):
                hist_path = f"{cfg.config_id}.histogram.csv"
            else:
                o = Path(args.output)
                hist_path = str(o.with_name(o.stem + ".histogram.csv"))
        with _open_out(hist_path) as out:
            _write_rows(HISTOGRAM_COLUMNS, list(result.histogram.rows()), "csv", head, out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    status = EXIT_OK
    with _open_out(args.output) as out:
        for path in args.configs:
            started = time.perf_counter()
            try:
                cfg = load_config(path).build()
            except ConfigError as exc:
                print(f"{path}: config error at {exc.path}: {exc}", file=sys.stderr)
                return EXIT_USAGE
            except IncompatibleConfig as exc:
                print(f"{path}: incompatible config: {exc}", file=sys.stderr)
                return EXIT_INCOMPATIBLE
            env = cfg.environment
            if not isinstance(env, FixedMean) or not hasattr(env.payoff, "as_finite"):
                print(f"{path}: the oracle needs a fixed_mean environment with a discrete payoff",
                      file=sys.stderr)
                return EXIT_INCOMPATIBLE
            try:
                if isinstance(cfg.learner, Averaging):
                    res = oracle.enumerate_expected_final_average(env.payoff, cfg.k, cfg.policy)
                    bias, cov, avg_cov = oracle.enumerate_covariance_identity(env.payoff, cfg.k, cfg.policy)
                    extra = {"bias": bias, "covariance": cov, "average_covariance": avg_cov}
                elif isinstance(cfg.learner, RecencyWeighted):
                    lr = cfg.learner
                    res = oracle.enumerate_expected_final_belief_recency(
                        env.payoff, cfg.k, cfg.policy, lr.weight, lr.initial, theorem_check=False)
                    extra = {}
                    if res.warning is None:
                        bias, cov = oracle.enumerate_recency_covariance_identity(
                            env.payoff, cfg.k, cfg.policy, lr.weight, lr.initial)
                        extra = {"bias": bias, "covariance": cov}
                else:
                    print(f"{path}: the oracle does not enumerate Bayesian learners", file=sys.stderr)
                    return EXIT_INCOMPATIBLE
            except oracle.PathLimitExceeded as exc:
                print(f"{path}: {exc}", file=sys.stderr)
                status = EXIT_USAGE
                continue
            record = {
                "manifest": manifest(config_to_dict(cfg), None, started, ["oracle"]),
                "expected_final_belief": res.expected_final_belief,
                "prob_final_above_u": res.prob_final_above_u,
                "prob_final_below_u": res.prob_final_below_u,
                "prob_final_equal_u": res.prob_final_equal_u,
                "total_paths": res.total_paths,
                "reference": res.reference,
                "warning": res.warning,
                **extra,
            }
            out.write(json.dumps(record) + "\n")
    return status


def cmd_quadrature(args) -> int:
    started = time.perf_counter()
    if args.constant is not None:
        policy = Constant(args.constant)
    elif args.high is not None and args.low is not None:
        policy = Step(args.threshold, args.high, args.low)
    else:
        print("quadrature: give --high and --low, or --constant", file=sys.stderr)
        return EXIT_USAGE
    q = QuadratureSettings(relative_tolerance=args.rel_tol)
    centred = analytic.shift_policy(policy, args.prior_mean) if args.prior_mean else policy
    try:
        pos_neg = analytic.flip_prob_pos_to_neg(args.k, centred, args.prior_variance, args.noise_variance, q)
        neg_pos = analytic.flip_prob_neg_to_pos(args.k, centred, args.prior_variance, args.noise_variance, q)
    except QuadratureError as exc:
        print(f"quadrature did not converge: {exc}", file=sys.stderr)
        return EXIT_CHECK_FAILED
    prob = 0.5 * pos_neg + 0.5 * (1.0 - neg_pos)
    inputs = {"k": args.k, "policy": repr(policy), "prior_mean": args.prior_mean,
              "prior_variance": args.prior_variance, "noise_variance": args.noise_variance,
              "relative_tolerance": args.rel_tol}
    cols = ("k", "prior_mean", "prior_variance", "noise_variance",
            "flip_pos_to_neg", "flip_neg_to_pos", "prob_final_below_prior_mean")
    row = (args.k, args.prior_mean, args.prior_variance, args.noise_variance, pos_neg, neg_pos, prob)
    with _open_out(args.output) as out:
        _write_rows(cols, [row], args.format, manifest(inputs, None, started, ["analytic"]), out)
    return EXIT_OK


def cmd_theorem_check(args) -> int:
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    budget = Budget(trials=args.trials, seed=args.seed, workers=args.threads)
    started = time.perf_counter()
    report = run_suites(names, budget)
    report["manifest"] = manifest(None, args.seed, started, ["engine", "oracle", "analytic"])
    text = json.dumps(report, indent=2)
    if args.report:
        Path(args.report).write_text(text + "\n")
    else:
        print(text)
    for name in names:
        for c in report["suites"][name]["checks"]:
            mark = "PASS" if c["passed"] else "FAIL"
            print(f"[{mark}] {c['name']}: observed={c['observed']!r} threshold {c['threshold']}",
                  file=sys.stderr)
    return EXIT_OK if report["passed"] else EXIT_CHECK_FAILED


def cmd_schema(args) -> int:
    print(json.dumps(config_schema(), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hotstove", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bias-closed-form", help="expected final average under a step policy")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--high", type=_positive_int, required=True)
    p.add_argument("--low", type=_positive_int, required=True)
    p.add_argument("--threshold", type=_finite_float, default=0.0)
    p.add_argument("--sigma", type=_positive_float, required=True, help="payoff standard deviation")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_closed_form)

    p = sub.add_parser("simulate", help="run a Monte Carlo experiment from a JSON config")
    p.add_argument("config")
    p.add_argument("--output", default="-")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--histogram-output", default=None)
    p.add_argument("--threads", type=_positive_int, default=None,
                   help="worker threads (default: $HOTSTOVE_THREADS or CPU count)")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("oracle", help="exact enumeration for discrete payoff configs")
    p.add_argument("configs", nargs="+")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("quadrature", help="P(final posterior mean < prior mean) by quadrature")
    _add_step_flags(p, constant=True)
    p.add_argument("--prior-mean", type=_finite_float, default=0.0)
    p.add_argument("--prior-variance", type=_positive_float, default=1.0)
    p.add_argument("--noise-variance", type=_positive_float, required=True)
    p.add_argument("--rel-tol", type=_positive_float, default=1e-9)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default="-")
    p.set_defaults(func=cmd_quadrature)

    p = sub.add_parser("theorem-check", help="run theorem check suites")
    p.add_argument("--suite", choices=[*sorted(SUITES), "all"], default="all")
    p.add_argument("--trials", type=_positive_int, default=1_000_000)
    p.add_argument("--seed", type=int, default=Budget.seed)
    p.add_argument("--threads", type=_positive_int, default=None)
    p.add_argument("--report", default=None, help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_theorem_check)

    p = sub.add_parser("schema", help="print the experiment config JSON schema")
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "threads", None) is None and args.command in ("simulate", "theorem-check"):
        try:
            args.threads = default_workers()
        except ValueError as exc:
            print(exc, file=sys.stderr)
            return EXIT_USAGE
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
