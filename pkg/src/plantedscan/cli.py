"""Command-line front end.

One subcommand per capability: sample graphs, run the scan tests, compute
detection thresholds (point or composition surface), estimate risk by
Monte Carlo, run the likelihood-ratio oracle, audit the regularity
assumptions, print the standard threshold table, and drive sweeps.

Configuration comes from a JSON file (--config); flags mirror config keys
and win on conflict.  Exit codes: 0 success, 2 validation error, 3 budget
error, 4 numeric error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Mapping, Sequence

from .audit import (
    DEFAULT_MARGIN_THRESHOLD,
    audit_assumption_1_1,
    audit_assumption_1_2,
    audit_assumption_2,
    audit_assumption_3,
)
from .boundary import (
    boundary_surface,
    standard_table,
    threshold_scaling,
    write_surface_csv,
)
from .errors import PlantedScanError, ValidationError
from .harness import ExperimentConfig, estimate_risk, run_sweep
from .lr import DEFAULT_EXACT_BUDGET, DEFAULT_SAMPLE_SIZE, LrProblem, bayes_risk
from .model import (
    PlantedAlternative,
    RankOne,
    model_from_json,
    read_edge_list,
    sample_alternative,
    sample_null,
    sample_null_sparse,
    write_edge_list,
)
from .scan import DEFAULT_SUBSET_BUDGET, Exhaustive, ScanConfig, scan_known, scan_unknown

__all__ = ["main"]


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ValidationError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ValidationError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError(f"config file {path} must hold a JSON object")
    return raw


def _config_dict(args) -> dict:
    return _load_json(args.config) if args.config else {}


def _model_from_args(args, cfg: Mapping):
    if "model" in cfg:
        return model_from_json(cfg["model"])
    if "variant" in cfg:
        return model_from_json(dict(cfg))
    raise ValidationError("no model: pass --config pointing to a model descriptor "
                          "(or an experiment config with a 'model' entry)")


def _parse_community(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part != "")
    except ValueError as exc:
        raise ValidationError(f"bad community {text!r}; expected comma-separated "
                              "vertex ids") from exc


def _emit_text(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")


def _emit_json(payload, out: str | None) -> None:
    _emit_text(json.dumps(payload, indent=1, sort_keys=True), out)


def _cell(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return ""
    return str(value)


def _emit_csv(columns: Sequence[str], rows: Sequence[Sequence], out: str | None) -> None:
    buf = io.StringIO()
    buf.write("#schema=1\n")
    writer = csv.writer(buf)
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    _emit_text(buf.getvalue(), out)


# -- subcommands ---------------------------------------------------------------


def cmd_sample(args) -> None:
    cfg = _config_dict(args)
    model = _model_from_args(args, cfg)
    seed = args.seed if args.seed is not None else int(cfg.get("seed", 0))
    if args.out is None:
        raise ValidationError("sample needs --out PATH for the edge list")
    if args.community:
        community = _parse_community(args.community)
        alt = PlantedAlternative(community, args.rho, model)
        g = sample_alternative(model, alt, seed)
    elif args.sparse:
        g = sample_null_sparse(model, seed)
    else:
        g = sample_null(model, seed)
    write_edge_list(g, args.out)
    print(f"wrote {args.out}: n={g.n} edges={g.total_edges()} seed={seed}")


def _scan_outcome_rows(outcome) -> tuple[list[str], list[list]]:
    columns = ["statistic", "threshold", "reject", "subset_size", "subset",
               "epsilon", "r"]
    subset = " ".join(str(v) for v in outcome.subset) if outcome.subset else ""
    rows = [[outcome.statistic, outcome.threshold, outcome.reject,
             len(outcome.subset) if outcome.subset else 0, subset,
             outcome.epsilon, outcome.r]]
    return columns, rows


def cmd_scan(args) -> None:
    cfg = _config_dict(args)
    sample = read_edge_list(args.graph)
    r = args.r if args.r is not None else cfg.get("r")
    if r is None:
        raise ValidationError("scan needs --r (or an 'r' config key)")
    epsilon = args.epsilon if args.epsilon is not None else float(cfg.get("epsilon", 0.2))
    family = None
    if args.min_size is not None or args.max_size is not None:
        if args.min_size is None or args.max_size is None:
            raise ValidationError("--min-size and --max-size go together")
        family = Exhaustive(args.min_size, args.max_size)
    budget = args.budget if args.budget is not None else int(cfg.get("budget", DEFAULT_SUBSET_BUDGET))
    scan_cfg = ScanConfig(int(r), epsilon, family, budget)
    if args.blind:
        outcome = scan_unknown(sample, scan_cfg)
    else:
        model = _model_from_args(args, cfg)
        outcome = scan_known(model, sample, scan_cfg)
    if args.fmt == "csv":
        columns, rows = _scan_outcome_rows(outcome)
        _emit_csv(columns, rows, args.out)
    else:
        _emit_json(outcome.to_json(), args.out)


def cmd_boundary(args) -> None:
    cfg = _config_dict(args)
    if args.surface:
        if not args.weights:
            raise ValidationError("--surface needs --weights w1,w2[,w3]")
        try:
            weights = [float(w) for w in args.weights.split(",")]
        except ValueError as exc:
            raise ValidationError(f"bad --weights {args.weights!r}") from exc
        if args.r is None:
            raise ValidationError("--surface needs --r (total community size)")
        n = args.n if args.n is not None else cfg.get("n")
        if n is None:
            raise ValidationError("--surface needs --n (ambient vertex count)")
        rows = boundary_surface(int(n), weights, r=args.r,
                                denominator=args.denominator, target=args.target)
        if args.out in (None, "-"):
            write_surface_csv(rows, sys.stdout)
        else:
            write_surface_csv(rows, args.out)
        return
    model = _model_from_args(args, cfg)
    community = args.community or cfg.get("community")
    if community is None:
        raise ValidationError("boundary needs --community i,j,k (or a config key)")
    if isinstance(community, str):
        community = _parse_community(community)
    result = threshold_scaling(model, community, target=args.target)
    if args.fmt == "csv":
        _emit_csv(
            ["rho_star", "optimal_size", "optimal_fraction", "objective", "feasible"],
            [[result.rho_star, result.optimal_size, result.optimal_fraction,
              result.objective, result.feasible]],
            args.out)
    else:
        _emit_json(result.to_json(), args.out)


def _experiment_config(args, cfg: Mapping, forced_test: str | None = None) -> ExperimentConfig:
    raw = {k: v for k, v in cfg.items() if k not in ("seed", "out", "format")}
    if "master_seed" not in raw and "seed" in cfg:
        raw["master_seed"] = cfg["seed"]
    if forced_test is not None:
        raw["test"] = forced_test
    elif args.test is not None:
        raw["test"] = args.test
    if args.seed is not None:
        raw["master_seed"] = args.seed
    if args.reps is not None:
        raw["null_replications"] = args.reps
        raw["alt_replications"] = args.reps
    if args.workers is not None:
        raw["workers"] = args.workers
    return ExperimentConfig.from_dict(raw)


def cmd_risk(args) -> None:
    cfg = _config_dict(args)
    if not cfg:
        raise ValidationError("risk needs --config with an experiment description")
    est = estimate_risk(_experiment_config(args, cfg))
    if args.fmt == "csv":
        rates = [r.rate for r in est.type2.values()]
        _emit_csv(
            ["type1", "type1_stderr", "type2_max", "type2_mean",
             "worst_case_risk", "average_risk"],
            [[est.type1.rate, est.type1.stderr, max(rates),
              sum(rates) / len(rates), est.worst_case_risk, est.average_risk]],
            args.out)
    else:
        _emit_json(est.to_json(), args.out)


def cmd_lr_risk(args) -> None:
    cfg = _config_dict(args)
    if not cfg:
        raise ValidationError("lr-risk needs --config with model, r, and rho")
    model = _model_from_args(args, cfg)
    for key in ("r", "rho"):
        if key not in cfg:
            raise ValidationError(f"lr-risk config needs {key!r}")
    problem = LrProblem(
        model, int(cfg["r"]), float(cfg["rho"]),
        exact_budget=int(cfg.get("lr_exact_budget", DEFAULT_EXACT_BUDGET)),
        sample_size=cfg.get("lr_sample_size", DEFAULT_SAMPLE_SIZE),
        community_seed=args.seed if args.seed is not None else int(cfg.get("master_seed", 0)),
    )
    reps = args.reps if args.reps is not None else int(cfg.get("replications", 1000))
    seed = args.seed if args.seed is not None else int(cfg.get("master_seed", 0))
    result = bayes_risk(problem, reps, seed)
    if args.fmt == "csv":
        _emit_csv(
            ["risk", "stderr", "replications", "mode", "communities",
             "mean_lr", "mean_lr_stderr"],
            [[result.risk, result.stderr, result.replications, result.mode,
              result.communities, result.mean_lr, result.mean_lr_stderr]],
            args.out)
    else:
        _emit_json(result.to_json(), args.out)


def cmd_audit(args) -> None:
    cfg = _config_dict(args)
    model = _model_from_args(args, cfg)
    community = args.community or cfg.get("community")
    if community is None:
        raise ValidationError("audit needs --community (or a config key)")
    if isinstance(community, str):
        community = _parse_community(community)
    reports = {
        "assumption_1_1": audit_assumption_1_1(model, community, delta=args.delta,
                                               gamma=args.gamma,
                                               threshold=args.threshold),
        "assumption_1_2": audit_assumption_1_2(model, community,
                                               threshold=args.threshold),
    }
    if args.rho is not None:
        alt = PlantedAlternative(tuple(community), args.rho, model)
        reports["assumption_2"] = audit_assumption_2([alt], threshold=args.threshold)
    if isinstance(model, RankOne):
        reports["assumption_3"] = audit_assumption_3(model, community,
                                                     threshold=args.threshold)
    all_passed = all(rep.all_passed for rep in reports.values())
    if args.fmt == "csv":
        columns = ["assumption", "check", "lhs", "rhs", "margin", "passed"]
        rows = [[key, e.name, e.lhs, e.rhs, e.margin, e.passed]
                for key, rep in sorted(reports.items()) for e in rep.entries]
        _emit_csv(columns, rows, args.out)
    else:
        _emit_json({"all_passed": all_passed,
                    "reports": {k: rep.to_json() for k, rep in reports.items()}},
                   args.out)


def cmd_table1(args) -> None:
    rows = standard_table(mode=args.mode, regime=args.regime, n=args.n)
    if args.fmt == "json":
        _emit_json(rows, args.out)
    else:
        _emit_csv(["distribution", "rho_star", "optimal_fraction"],
                  [[r["distribution"], r["rho_star"], r["optimal_fraction"]]
                   for r in rows],
                  args.out)


def cmd_sweep(args) -> None:
    cfg = _config_dict(args)
    if not cfg:
        raise ValidationError("sweep needs --config with 'base' and 'grid' entries")
    for key in ("base", "grid"):
        if key not in cfg:
            raise ValidationError(f"sweep config needs a {key!r} entry")
    out_dir = args.out or cfg.get("out")
    if not out_dir or out_dir == "-":
        raise ValidationError("sweep needs --out DIR for per-point results")
    base = dict(cfg["base"])
    if args.seed is not None:
        base["master_seed"] = args.seed
    if args.workers is not None:
        base["workers"] = args.workers
    if args.reps is not None:
        base["null_replications"] = args.reps
        base["alt_replications"] = args.reps
    csv_path = run_sweep(base, cfg["grid"], out_dir, kind=cfg.get("kind", "risk"))
    print(f"wrote {csv_path}")


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--seed", type=int, metavar="U64",
                        help="master seed (overrides config)")
    common.add_argument("--reps", type=int, metavar="N",
                        help="replication count (overrides config)")
    common.add_argument("--workers", type=int, metavar="N",
                        help="worker processes (default: $SCAN_WORKERS or 1)")
    common.add_argument("--out", metavar="PATH",
                        help="output path; '-' or absent means stdout")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"),
                        help="output format where both make sense")

    parser = argparse.ArgumentParser(
        prog="plantedscan",
        description="Scan tests and detection thresholds for a planted "
                    "community in an inhomogeneous random graph.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sample", parents=[common],
                       help="draw a graph and write it as an edge list")
    p.add_argument("--community", metavar="I,J,K",
                   help="plant on these vertices (comma-separated)")
    p.add_argument("--rho", type=float, default=1.0,
                   help="within-community probability multiplier (default 1)")
    p.add_argument("--sparse", action="store_true",
                   help="use the sparse null sampler (homogeneous models only)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("scan", parents=[common], help="run a scan test on a graph")
    p.add_argument("--graph", required=True, metavar="PATH", help="edge-list file")
    p.add_argument("--r", type=int, help="community size bound")
    p.add_argument("--epsilon", type=float, help="threshold slack (default 0.2)")
    p.add_argument("--blind", action="store_true",
                   help="unknown edge probabilities (no model needed)")
    p.add_argument("--min-size", type=int, help="family size lower bound")
    p.add_argument("--max-size", type=int, help="family size upper bound")
    p.add_argument("--budget", type=int, help="max subsets to enumerate")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("boundary", parents=[common],
                       help="detection threshold for a community, or a "
                            "composition surface (--surface)")
    p.add_argument("--community", metavar="I,J,K", help="community vertices")
    p.add_argument("--target", type=float, default=1.0,
                   help="target exponent level (default 1)")
    p.add_argument("--surface", action="store_true",
                   help="sweep two/three-class compositions to CSV")
    p.add_argument("--weights", metavar="W1,W2[,W3]",
                   help="class weights, strictly decreasing (surface mode)")
    p.add_argument("--r", type=int, help="total community size (surface mode)")
    p.add_argument("--n", type=int, help="ambient vertex count (surface mode)")
    p.add_argument("--denominator", choices=("log_n", "per_size"), default="log_n",
                   help="objective denominator (surface mode)")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("risk", parents=[common],
                       help="Monte Carlo risk estimate for a configured test")
    p.add_argument("--test", choices=("scan_known", "scan_unknown", "lr"),
                   help="override the configured test")
    p.set_defaults(func=cmd_risk)

    p = sub.add_parser("lr-risk", parents=[common],
                       help="Bayes risk of the likelihood-ratio oracle")
    p.set_defaults(func=cmd_lr_risk)

    p = sub.add_parser("audit", parents=[common],
                       help="check the regularity assumptions with margins")
    p.add_argument("--community", metavar="I,J,K", help="community vertices")
    p.add_argument("--delta", type=float, default=0.1,
                   help="size-exponent slack in (0, 0.5) (default 0.1)")
    p.add_argument("--gamma", type=float, required=True,
                   help="small-subgraph window exponent (> 0, no default)")
    p.add_argument("--rho", type=float,
                   help="also audit the signal-strength cap at this rho")
    p.add_argument("--threshold", type=float, default=DEFAULT_MARGIN_THRESHOLD,
                   help="margin required to pass (default 10)")
    p.set_defaults(func=cmd_audit)

    p = sub.add_parser("table1", parents=[common],
                       help="print the four standard threshold rows")
    p.add_argument("--mode", choices=("analytic", "numeric"), default="analytic")
    p.add_argument("--regime", choices=("polylog", "quarter_power"),
                   default="polylog")
    p.add_argument("--n", type=int, help="vertex count (quarter_power regime)")
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("sweep", parents=[common],
                       help="run a parameter grid with resumable per-point output")
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: Sequence[str] | None = None) -> None:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except PlantedScanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(exc.exit_code)
