"""Command-line front end: analyze, simulate, optimize, sweep, model-dump.

Every command prints a human-readable summary by default and a single
self-describing JSON record with ``--json``.  Exit codes: 0 on success,
2 for usage errors (bad flags, unknown policy, invalid grid), 1 for
runtime failures (solver errors, unwritable output paths).

The default simulation seed can be set with the ``AOIPOWER_SEED``
environment variable; an explicit ``--seed`` always wins.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile

from . import __version__
from .optimize import (
    PowerModel,
    SearchSettings,
    objective,
    optimize,
    sweep_power,
    sweep_rho,
)
from .policies import (
    POLICY_NAMES,
    Policy,
    RatePair,
    build_model,
    closed_form_age,
    pwpa,
)
from .shs import model_to_json, solve_age_balance
from .simulation import SimConfig, SimConfigError, simulate

DEFAULT_SEED = 12345
CSV_HEADER_RHO = ["policy", "rho", "P", "mu2_star", "delta_star"]
CSV_HEADER_POWER = CSV_HEADER_RHO + ["rho_star"]


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not a number") from None
    if value <= 0 or value != value:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _default_seed() -> int:
    env = os.environ.get("AOIPOWER_SEED")
    if env is None:
        return DEFAULT_SEED
    try:
        return int(env)
    except ValueError:
        return DEFAULT_SEED


def _policy_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--policy", required=True, choices=POLICY_NAMES,
        help="update-processing policy",
    )


def _emit(record: dict, as_json: bool, human: str) -> None:
    if as_json:
        print(json.dumps(record))
    else:
        print(human)


def _record(argv: list[str], policy: str | None, params: dict, results: dict,
            seed: int | None = None) -> dict:
    rec = {
        "tool": "aoipower",
        "version": __version__,
        "command": argv,
        "policy": policy,
        "params": params,
        "results": results,
    }
    if seed is not None:
        rec["seed"] = seed
    return rec


def _write_text_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cmd_analyze(args: argparse.Namespace, argv: list[str]) -> int:
    policy = Policy(args.policy)
    rates = RatePair(mu2=args.mu2, rho=args.rho)
    model = build_model(policy)
    solution = solve_age_balance(model, rates.mu1, rates.mu2)
    closed = closed_form_age(policy, rates)
    activity = pwpa(policy, args.rho, args.alpha)
    results = {
        "closed_form_delta": closed,
        "shs_delta": solution.delta,
        "pi": {state: float(p) for state, p in zip(model.states, solution.pi)},
        "n1_bar": activity.n1_bar,
        "n2_bar": activity.n2_bar,
        "n_bar": activity.n_bar,
    }
    human = (
        f"policy {policy.value}: mu2={args.mu2:g} rho={args.rho:g} alpha={args.alpha:g}\n"
        f"  average age (closed form) = {closed:.12g}\n"
        f"  average age (SHS solve)   = {solution.delta:.12g}\n"
        f"  stationary distribution   = "
        + ", ".join(f"pi[{s}]={p:.6g}" for s, p in results["pi"].items())
        + "\n"
        f"  busy fractions            = N1={activity.n1_bar:.6g} N2={activity.n2_bar:.6g}"
        f" (power-weighted N={activity.n_bar:.6g})"
    )
    _emit(
        _record(argv, policy.value,
                {"mu2": args.mu2, "rho": args.rho, "alpha": args.alpha},
                results),
        args.json, human,
    )
    return 0


def _cmd_simulate(args: argparse.Namespace, argv: list[str]) -> int:
    policy = Policy(args.policy)
    rates = RatePair(mu2=args.mu2, rho=args.rho)
    power = PowerModel(budget=args.P, mean_cycles=args.ec, alpha=args.alpha)
    seed = args.seed if args.seed is not None else _default_seed()
    try:
        config = SimConfig(
            horizon_events=args.events,
            warmup_fraction=args.warmup_fraction,
            replications=args.reps,
            master_seed=seed,
            batch_count=args.batches,
        )
    except SimConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    result = simulate(policy, rates, power, config, collect_log=args.log is not None)
    if args.log is not None:
        result.event_logs[0].to_jsonl(args.log)
    results = {
        "mean_age": result.mean_age,
        "ci_half_width": result.ci_half_width,
        "n1_bar_hat": result.n1_bar_hat,
        "n2_bar_hat": result.n2_bar_hat,
        "power_hat": result.power_hat,
        "wasted_power_hat": result.wasted_power_hat,
        "useful_delivery_fraction": result.useful_delivery_fraction,
        "breakdown": result.breakdown.as_dict(),
        "deliveries": result.deliveries,
        "replications": result.replications,
    }
    human = (
        f"policy {policy.value}: mu2={args.mu2:g} rho={args.rho:g} "
        f"seed={seed} events={args.events} reps={args.reps}\n"
        f"  mean age        = {result.mean_age:.6f} +/- {result.ci_half_width:.6f} (95% CI)\n"
        f"  busy fractions  = N1={result.n1_bar_hat:.4f} N2={result.n2_bar_hat:.4f}\n"
        f"  consumed power  = {result.power_hat:.6f}\n"
        f"  wasted power    = {result.wasted_power_hat:.6f}\n"
        f"  useful deliveries = {result.useful_delivery_fraction:.4%}"
    )
    _emit(
        _record(argv, policy.value,
                {"mu2": args.mu2, "rho": args.rho, "P": args.P, "ec": args.ec,
                 "alpha": args.alpha, "events": args.events, "reps": args.reps,
                 "warmup_fraction": args.warmup_fraction, "batches": args.batches},
                results, seed=seed),
        args.json, human,
    )
    return 0


def _cmd_optimize(args: argparse.Namespace, argv: list[str]) -> int:
    policy = Policy(args.policy)
    power = PowerModel(budget=args.P, mean_cycles=args.ec, alpha=args.alpha)
    search = SearchSettings(rho_min=args.rho_min, rho_max=args.rho_max, tol=args.tol)
    result = optimize(policy, power, search)
    results = {
        "rho_star": result.rho_star,
        "mu2_star": result.mu2_star,
        "mu1_star": result.mu1_star,
        "delta_star": result.delta_star,
        "achieved_power": result.achieved_power,
        "iterations": result.iterations,
    }
    human = (
        f"policy {policy.value}: P={args.P:g} E[C]={args.ec:g} alpha={args.alpha:g}\n"
        f"  rho*   = {result.rho_star:.9f}\n"
        f"  mu2*   = {result.mu2_star:.9f}\n"
        f"  mu1*   = {result.mu1_star:.9f}\n"
        f"  age*   = {result.delta_star:.9f}\n"
        f"  power  = {result.achieved_power:.9f} (budget {args.P:g})"
    )
    _emit(
        _record(argv, policy.value,
                {"P": args.P, "ec": args.ec, "alpha": args.alpha,
                 "rho_min": args.rho_min, "rho_max": args.rho_max, "tol": args.tol},
                results),
        args.json, human,
    )
    return 0


def _sweep_grid(args: argparse.Namespace) -> list[float]:
    import numpy as np

    if args.log_spacing:
        return list(np.geomspace(args.min, args.max, args.count))
    return list(np.linspace(args.min, args.max, args.count))


def _cmd_sweep(args: argparse.Namespace, argv: list[str]) -> int:
    if args.policies.strip().lower() == "all":
        policies = [Policy(name) for name in POLICY_NAMES]
    else:
        policies = []
        for name in args.policies.split(","):
            name = name.strip().lower()
            if name not in POLICY_NAMES:
                print(
                    f"error: unknown policy {name!r}; valid names: "
                    + ", ".join(POLICY_NAMES),
                    file=sys.stderr,
                )
                return 2
            policies.append(Policy(name))
    grid = _sweep_grid(args)
    base = PowerModel(budget=args.P, mean_cycles=args.ec, alpha=args.alpha)

    buf = io.StringIO()
    writer = csv.writer(buf)
    summary: dict[str, dict] = {}
    if args.mode == "rho":
        writer.writerow(CSV_HEADER_RHO)
        for policy in policies:
            points, best = sweep_rho(policy, base, grid)
            for pt in points:
                writer.writerow(
                    [policy.value, f"{pt.rho:.12g}", f"{args.P:.12g}",
                     f"{pt.mu2_star:.12g}", f"{pt.delta_star:.12g}"]
                )
            summary[policy.value] = {
                "argmin_rho": points[best].rho,
                "min_delta_star": points[best].delta_star,
            }
    else:
        writer.writerow(CSV_HEADER_POWER)
        rows = sweep_power(policies, grid, base)
        for row in rows:
            writer.writerow(
                [row.policy.value, f"{row.rho_star:.12g}", f"{row.budget:.12g}",
                 f"{row.mu2_star:.12g}", f"{row.delta_star:.12g}",
                 f"{row.rho_star:.12g}"]
            )
        for policy in policies:
            own = [r for r in rows if r.policy is policy]
            summary[policy.value] = {
                "rho_star": own[0].rho_star,
                "delta_star_range": [own[-1].delta_star, own[0].delta_star],
            }

    try:
        _write_text_atomic(args.out, buf.getvalue())
    except OSError as exc:
        print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
        return 1

    n_rows = len(policies) * len(grid)
    results = {"out": args.out, "rows": n_rows, "summary": summary}
    human_lines = [f"wrote {n_rows} rows to {args.out}"]
    for name, info in summary.items():
        human_lines.append(f"  {name}: " + ", ".join(f"{k}={v}" for k, v in info.items()))
    _emit(
        _record(argv, None,
                {"mode": args.mode, "policies": [p.value for p in policies],
                 "P": args.P, "ec": args.ec, "alpha": args.alpha,
                 "min": args.min, "max": args.max, "count": args.count,
                 "log_spacing": args.log_spacing},
                results),
        args.json, "\n".join(human_lines),
    )
    return 0


def _cmd_model_dump(args: argparse.Namespace, argv: list[str]) -> int:
    policy = Policy(args.policy)
    text = model_to_json(build_model(policy))
    if args.out:
        try:
            _write_text_atomic(args.out, text + "\n")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 1
        if args.json:
            print(json.dumps(_record(argv, policy.value, {}, {"out": args.out})))
        else:
            print(f"wrote SHS model for {policy.value} to {args.out}")
    else:
        print(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aoipower",
        description="Age-of-information analysis and power-constrained "
                    "rate optimization for two-step update processing.",
    )
    parser.add_argument("--version", action="version", version=f"aoipower {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="closed-form and SHS age at fixed rates")
    _policy_arg(p)
    p.add_argument("--mu2", type=_positive, default=1.0, help="step-2 service rate")
    p.add_argument("--rho", type=_positive, default=1.0, help="rate ratio mu1/mu2")
    p.add_argument("--alpha", type=_positive, default=5.0, help="power exponent")
    p.add_argument("--json", action="store_true", help="emit a JSON record")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("simulate", help="Monte-Carlo simulation at fixed rates")
    _policy_arg(p)
    p.add_argument("--mu2", type=_positive, default=1.0)
    p.add_argument("--rho", type=_positive, default=1.0)
    p.add_argument("--P", type=_positive, default=8.0, help="power budget (echoed)")
    p.add_argument("--ec", type=_positive, default=1.0, help="mean CPU cycles per step")
    p.add_argument("--alpha", type=_positive, default=5.0)
    p.add_argument("--seed", type=int, default=None,
                   help=f"master seed (default: $AOIPOWER_SEED or {DEFAULT_SEED})")
    p.add_argument("--events", type=_positive_int, default=1_000_000,
                   help="deliveries per replication")
    p.add_argument("--reps", type=_positive_int, default=3, help="replications")
    p.add_argument("--warmup-fraction", type=float, default=0.1)
    p.add_argument("--batches", type=_positive_int, default=30)
    p.add_argument("--log", default=None, metavar="PATH",
                   help="write a JSONL event log of replication 0")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("optimize", help="find the age-optimal rate ratio")
    _policy_arg(p)
    p.add_argument("--P", type=_positive, default=8.0, help="power budget")
    p.add_argument("--ec", type=_positive, default=1.0)
    p.add_argument("--alpha", type=_positive, default=5.0)
    p.add_argument("--rho-min", type=_positive, default=1e-3)
    p.add_argument("--rho-max", type=_positive, default=1e3)
    p.add_argument("--tol", type=_positive, default=1e-8)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_optimize)

    p = sub.add_parser("sweep", help="objective/optimum curves to CSV")
    p.add_argument("--mode", required=True, choices=["rho", "power"])
    p.add_argument("--policies", default="all",
                   help="comma-separated policy names, or 'all'")
    p.add_argument("--P", type=_positive, default=8.0,
                   help="power budget (rho mode)")
    p.add_argument("--ec", type=_positive, default=1.0)
    p.add_argument("--alpha", type=_positive, default=5.0)
    p.add_argument("--min", type=_positive, required=True, help="grid lower end")
    p.add_argument("--max", type=_positive, required=True, help="grid upper end")
    p.add_argument("--count", type=_positive_int, required=True, help="grid size (>= 2)")
    p.add_argument("--log", dest="log_spacing", action="store_true",
                   help="log-spaced grid (default linear)")
    p.add_argument("--out", default="sweep.csv", help="output CSV path")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("model-dump", help="emit a policy's SHS model as JSON")
    _policy_arg(p)
    p.add_argument("--out", default=None, help="write to a file instead of stdout")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_model_dump)

    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        if args.count < 2:
            parser.error("--count must be >= 2")
        if not args.min < args.max:
            parser.error("--min must be strictly less than --max")
    try:
        return args.func(args, argv)
    except BrokenPipeError:
        return 1
    except Exception as exc:  # computational failure -> exit 1
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
