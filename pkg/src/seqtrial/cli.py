"""Command-line front end: simulate, fdp, whatif, serve.

Exit codes: 0 success, 2 validation problem (bad design document or
arguments), 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .designdoc import DesignValidationError, load_design
from .engine import TailTables, TrialData, predictive_cumulative_utility
from .errors import ConfigurationError, DomainError, NumericError
from .evaluate import (
    SamplingRegion,
    conditional_utility,
    estimate_fdp,
    estimate_ffp,
    write_scatter_csv,
    write_subcdf_csv,
)
from .mc import RngSpec
from .posterior import CONTROL, EXPERIMENTAL

EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _add_common(parser):
    parser.add_argument("--design", required=True, help="path to a design document (JSON)")
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")


def cmd_simulate(args) -> int:
    design = load_design(args.design)
    if args.reps < 1:
        raise DesignValidationError("reps", f"must be >= 1, got {args.reps}")
    region = SamplingRegion.from_code(args.region)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    report = conditional_utility(
        design,
        region,
        early_stop_enabled=not args.no_early_stop,
        n_reps=args.reps,
        rng=RngSpec(args.seed),
        n_workers=args.workers,
        forward_reps=args.forward_reps,
    )
    (out / "ocreport.json").write_text(report.to_json() + "\n")
    write_subcdf_csv(report, out / "subcdf.csv")
    write_scatter_csv(report, out / "scatter.csv")
    fractions = report.decision_fractions
    print(f"region={report.region} reps={report.n_reps} early_stop={report.early_stop_enabled}")
    for name in ("efficacy", "futility", "inconclusive"):
        print(f"  p({name}) = {fractions[name]:.4f}")
    print(f"  mean duration        = {report.mean_duration:.2f}")
    print(f"  mean expected utility= {report.conditional_mean_utility:.2f}")
    print(f"  mean realized utility= {report.mean_realized_utility:.2f}")
    print(f"wrote {out / 'ocreport.json'}, {out / 'subcdf.csv'}, {out / 'scatter.csv'}")
    return 0


def _print_conditional(label, est, eps, strict_label):
    if est.value is None:
        print(f"{label}: undefined (no conditioning stops in {est.n_reps} trials)")
        return
    half = 1.96 * est.std_error
    print(
        f"{label} = {est.value:.4f} (95% CI {max(0.0, est.value - half):.4f}..{est.value + half:.4f}, "
        f"n={est.n}) vs threshold {eps}"
    )
    print(f"  variance-reduced (posterior-tail average): {est.rb_value:.4f}")
    print(f"  {strict_label}: {est.companion_value:.4f}")


def cmd_fdp(args) -> int:
    design = load_design(args.design)
    if args.reps < 1:
        raise DesignValidationError("reps", f"must be >= 1, got {args.reps}")
    tables = TailTables(design)
    fdp = estimate_fdp(design, args.reps, RngSpec(args.seed), n_workers=args.workers, tables=tables)
    ffp = estimate_ffp(design, args.reps, RngSpec(args.seed + 1), n_workers=args.workers, tables=tables)
    _print_conditional("FDP", fdp, design.eps_e, "strict variant P(diff <= 0 | efficacy)")
    _print_conditional("FFP", ffp, design.eps_f, "margin variant P(diff >= delta | futility)")
    return 0


def _load_events(path) -> TrialData:
    data = TrialData()
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            event = json.loads(line)
            if event.get("type", "outcome") != "outcome":
                continue
            data.append(event["arm"], event["outcome"])
    return data


def cmd_whatif(args) -> int:
    design = load_design(args.design)
    data = _load_events(args.events) if args.events else TrialData()
    if args.counts:
        try:
            s0, f0, s1, f1 = (int(v) for v in args.counts.split(","))
        except ValueError:
            raise DesignValidationError("counts", f"expected s0,f0,s1,f1 got {args.counts!r}")
        data = TrialData()
        for _ in range(s0):
            data.append(CONTROL, 1)
        for _ in range(f0):
            data.append(CONTROL, 0)
        for _ in range(s1):
            data.append(EXPERIMENTAL, 1)
        for _ in range(f1):
            data.append(EXPERIMENTAL, 0)
    pcu = predictive_cumulative_utility(
        design, data, RngSpec(args.seed), reps=args.forward_reps
    )
    print(f"at n = {data.n}: predictive cumulative utility = {pcu.value:.2f} "
          f"(std error {pcu.std_error:.2f}, {pcu.forward_reps} forward replicates, seed {args.seed})")
    print(f"  P(stop for efficacy by T={design.horizon}) = {pcu.stop_prob_efficacy:.4f}")
    print(f"  P(stop for futility by T={design.horizon}) = {pcu.stop_prob_futility:.4f}")
    print(f"  expected additional patients = {pcu.expected_duration:.1f}")
    print(f"  inconclusive-stop rule says: {'STOP now' if pcu.value < 0 else 'continue'}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import SessionStore, create_app

    store = SessionStore(args.sessions_dir)
    dist = Path(args.frontend) if args.frontend else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(store, token=args.token, whatif_cap=args.whatif_cap,
                     frontend_dist=dist if dist.is_dir() else None)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="seqtrial",
        description="Sequential Bayesian two-arm superiority trial engine",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate replicated trials over a sampling region")
    _add_common(p)
    p.add_argument("--region", default="all",
                   help="a (efficacy), b (harm), c (gap), all, or fixed:theta0,theta1")
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--no-early-stop", action="store_true",
                   help="disable the predictive early-stopping rule")
    p.add_argument("--forward-reps", type=int, default=None,
                   help="forward replicates per early-stop check (default: design value)")
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fdp", help="estimate FDP and FFP for a design")
    _add_common(p)
    p.add_argument("--reps", type=int, default=2000)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_fdp)

    p = sub.add_parser("whatif", help="predictive utility of continuing from given data")
    _add_common(p)
    p.add_argument("--events", default=None, help="JSONL event log to fold")
    p.add_argument("--counts", default=None, help="s0,f0,s1,f1 outcome counts to fold")
    p.add_argument("--forward-reps", type=int, default=None)
    p.set_defaults(func=cmd_whatif)

    p = sub.add_parser("serve", help="run the interim-monitoring HTTP service")
    p.add_argument("--sessions-dir", default=None, help="directory for session logs")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8710)
    p.add_argument("--token", default=None, help="static bearer token")
    p.add_argument("--whatif-cap", type=int, default=1000)
    p.add_argument("--frontend", default=None, help="built cockpit directory to serve at /ui")
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DesignValidationError, ConfigurationError, DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
