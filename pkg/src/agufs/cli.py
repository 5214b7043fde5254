"""Command-line front end: reproducible runs with machine-readable outputs.

Subcommands: run (solve + evaluate), select (solve only), eval (metrics for
a fixed feature set), version. A run writes record.json (config, ranking,
trace, metrics), trace.csv (per-iteration diagnostics), and scores.csv
(per-feature scores).

record.json is deterministic for a given seed and input file except for its
timestamp field; wall-clock timings therefore go to trace.csv only.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import __version__
from .data import Dataset, load_csv, standardize
from .driver import AgufsConfig, FeatureRanking, SolverTrace, run_agufs
from .errors import NumericError, ParseError
from .evaluation import EvalReport, evaluate_selection


@dataclass(frozen=True)
class RunRecord:
    config: AgufsConfig
    ranking: FeatureRanking
    trace: SolverTrace
    eval_report: Optional[EvalReport]
    version: str
    timestamp: str

    def to_json_dict(self) -> dict:
        trace = {
            "initial_objective": self.trace.initial_objective,
            "objectives": list(self.trace.objectives),
            "frozen_prev_objectives": list(self.trace.frozen_prev_objectives),
            "w_residuals": list(self.trace.w_residuals),
            "f_residuals": list(self.trace.f_residuals),
            "s_rowsum_devs": list(self.trace.s_rowsum_devs),
            "w_inner_objectives": [list(map(float, o)) for o in self.trace.w_inner_objectives],
            "f_inner_objectives": [list(map(float, o)) for o in self.trace.f_inner_objectives],
            "converged": self.trace.converged,
        }
        report = None
        if self.eval_report is not None:
            report = dataclasses.asdict(self.eval_report)
        return {
            "config": dataclasses.asdict(self.config),
            "ranking": {
                "scores": list(map(float, self.ranking.scores)),
                "order": list(map(int, self.ranking.order)),
                "selected": list(map(int, self.ranking.selected)),
            },
            "trace": trace,
            "eval_report": report,
            "version": self.version,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "RunRecord":
        t = d["trace"]
        trace = SolverTrace(
            initial_objective=t["initial_objective"],
            objectives=list(t["objectives"]),
            frozen_prev_objectives=list(t["frozen_prev_objectives"]),
            w_residuals=list(t["w_residuals"]),
            f_residuals=list(t["f_residuals"]),
            s_rowsum_devs=list(t["s_rowsum_devs"]),
            wall_times=[],
            w_inner_objectives=[np.asarray(o) for o in t["w_inner_objectives"]],
            f_inner_objectives=[np.asarray(o) for o in t["f_inner_objectives"]],
            converged=t["converged"],
        )
        r = d["ranking"]
        ranking = FeatureRanking(
            scores=np.asarray(r["scores"]),
            order=np.asarray(r["order"], dtype=int),
            selected=np.asarray(r["selected"], dtype=int),
        )
        report = None
        if d["eval_report"] is not None:
            report = EvalReport(**d["eval_report"])
        return cls(
            config=AgufsConfig(**d["config"]),
            ranking=ranking,
            trace=trace,
            eval_report=report,
            version=d["version"],
            timestamp=d["timestamp"],
        )


def record_json(record: RunRecord) -> str:
    return json.dumps(record.to_json_dict(), sort_keys=True, indent=2) + "\n"


def _strip_timing(trace: SolverTrace) -> SolverTrace:
    return SolverTrace(
        initial_objective=trace.initial_objective,
        objectives=list(trace.objectives),
        frozen_prev_objectives=list(trace.frozen_prev_objectives),
        w_residuals=list(trace.w_residuals),
        f_residuals=list(trace.f_residuals),
        s_rowsum_devs=list(trace.s_rowsum_devs),
        wall_times=[],
        w_inner_objectives=list(trace.w_inner_objectives),
        f_inner_objectives=list(trace.f_inner_objectives),
        converged=trace.converged,
    )


def write_outputs(out_dir: str, record: RunRecord, trace: SolverTrace) -> None:
    os.makedirs(out_dir, exist_ok=True)
    with open(os.path.join(out_dir, "record.json"), "w") as fh:
        fh.write(record_json(record))
    with open(os.path.join(out_dir, "trace.csv"), "w") as fh:
        fh.write(
            "iteration,objective,frozen_prev_objective,"
            "w_residual,f_residual,s_rowsum_dev,wall_time\n"
        )
        for t in range(trace.n_outer):
            fh.write(
                f"{t + 1},{trace.objectives[t]!r},"
                f"{trace.frozen_prev_objectives[t]!r},"
                f"{trace.w_residuals[t]!r},{trace.f_residuals[t]!r},"
                f"{trace.s_rowsum_devs[t]!r},{trace.wall_times[t]!r}\n"
            )
    ranking = record.ranking
    rank_of = np.empty(len(ranking.order), dtype=int)
    rank_of[ranking.order] = np.arange(1, len(ranking.order) + 1)
    chosen = set(int(i) for i in ranking.selected)
    with open(os.path.join(out_dir, "scores.csv"), "w") as fh:
        fh.write("feature,score,rank,selected\n")
        for j in range(len(ranking.scores)):
            fh.write(
                f"{j},{float(ranking.scores[j])!r},{rank_of[j]},"
                f"{1 if j in chosen else 0}\n"
            )


def _label_column(text: str):
    if text == "none":
        return None
    if text == "last":
        return "last"
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"label column must be 'none', 'last', or an integer, got {text!r}"
        ) from None


def _index_list(text: str) -> list:
    try:
        return [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--data", required=True, help="CSV file, samples as rows")
    p.add_argument("--label-column", type=_label_column, default=None,
                   help="'none', 'last', or a 0-based column index")
    p.add_argument("--has-header", action="store_true")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--standardize", choices=["none", "zscore"], default="zscore")


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--k", type=int, default=5)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--top", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--epsilon", type=float, default=1e-6)
    p.add_argument("--max-outer-iters", type=int, default=30)
    p.add_argument("--outer-tol", type=float, default=1e-5)
    p.add_argument("--w-max-iters", type=int, default=20)
    p.add_argument("--w-tol", type=float, default=1e-6)
    p.add_argument("--f-max-iters", type=int, default=50)
    p.add_argument("--f-tol", type=float, default=1e-8)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="agufs",
        description="Adaptive-graph unsupervised feature selection",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="solve, rank, and evaluate")
    _add_data_flags(run_p)
    _add_solver_flags(run_p)
    run_p.add_argument("--restarts", type=int, default=30)
    run_p.add_argument("--out", required=True)

    sel_p = sub.add_parser("select", help="solve and rank only")
    _add_data_flags(sel_p)
    _add_solver_flags(sel_p)
    sel_p.add_argument("--out", required=True)

    eval_p = sub.add_parser("eval", help="cluster a fixed feature subset")
    _add_data_flags(eval_p)
    eval_p.add_argument("--features", type=_index_list, required=True,
                        help="comma-separated feature indices")
    eval_p.add_argument("--clusters", type=int, required=True)
    eval_p.add_argument("--restarts", type=int, default=30)
    eval_p.add_argument("--seed", type=int, default=0)

    sub.add_parser("version", help="print the package version")
    return parser


def _load(args) -> Dataset:
    ds = load_csv(
        args.data,
        has_header=args.has_header,
        label_column=args.label_column,
        delimiter=args.delimiter,
    )
    if not np.isfinite(ds.x).all():
        raise NumericError(f"{args.data}: data contains NaN or Inf values")
    return standardize(ds, args.standardize)


def _config_from_args(args) -> AgufsConfig:
    return AgufsConfig(
        lam=args.lam,
        alpha=args.alpha,
        k=args.k,
        c=args.clusters,
        top_t=args.top,
        epsilon=args.epsilon,
        max_outer_iters=args.max_outer_iters,
        outer_tol=args.outer_tol,
        w_max_iters=args.w_max_iters,
        w_tol=args.w_tol,
        f_max_iters=args.f_max_iters,
        f_tol=args.f_tol,
        seed=args.seed,
    )


def run_experiment(args, with_eval: bool) -> int:
    ds = _load(args)
    cfg = _config_from_args(args)
    ranking, w, f, s, trace = run_agufs(ds.x, cfg)

    report = None
    if with_eval and ds.labels is not None:
        report = evaluate_selection(
            ds.x,
            ds.labels,
            ranking.selected,
            k_clusters=args.clusters,
            restarts=args.restarts,
            seed=args.seed,
        )
    record = RunRecord(
        config=cfg,
        ranking=ranking,
        trace=_strip_timing(trace),
        eval_report=report,
        version=__version__,
        timestamp=datetime.now(timezone.utc).isoformat(),
    )
    write_outputs(args.out, record, trace)
    top = ", ".join(str(int(j)) for j in ranking.selected)
    print(f"selected features: {top}")
    if report is not None:
        print(
            f"acc {report.acc_mean:.4f} +/- {report.acc_std:.4f}  "
            f"nmi {report.nmi_mean:.4f} +/- {report.nmi_std:.4f}  "
            f"({report.restarts} restarts)"
        )
    print(f"outputs in {args.out}")
    return 0


def run_eval(args) -> int:
    ds = _load(args)
    if ds.labels is None:
        print("eval requires labeled data (--label-column)", file=sys.stderr)
        return 2
    report = evaluate_selection(
        ds.x,
        ds.labels,
        np.asarray(args.features, dtype=int),
        k_clusters=args.clusters,
        restarts=args.restarts,
        seed=args.seed,
    )
    print(json.dumps(dataclasses.asdict(report), sort_keys=True, indent=2))
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "version":
            print(__version__)
            return 0
        if args.command == "run":
            return run_experiment(args, with_eval=True)
        if args.command == "select":
            return run_experiment(args, with_eval=False)
        if args.command == "eval":
            return run_eval(args)
        parser.error(f"unknown command {args.command!r}")
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (NumericError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
