"""Operating-characteristic simulation over replicated trials.

Estimates the conditional error criteria that take the place of frequentist
error rates in this design:

* FDP (false discovery probability): among trials that stop for efficacy,
  the fraction whose true rates satisfy theta1 - theta0 <= delta.  By the
  tower property this conditional probability is bounded by eps_e whenever
  the stopping rule is applied systematically, so the estimate doubles as
  a functional test of the whole engine.
* FFP (false futility probability): the futility mirror, bounded by eps_f.

Also provides fixed-truth operating characteristics (the hybrid
"type I error / power" reading, for comparison only), per-time stopping
sub-CDFs, and conditional expected-utility summaries with and without the
predictive early-stopping rule.

All estimators draw replicate-indexed random streams and aggregate by
replicate index, so results are bitwise identical at any worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import (
    ArmPriors,
    DecisionKind,
    TailTables,
    TrialDesign,
    run_trial,
)
from .errors import ConfigurationError, DomainError
from .mc import DOMAIN_TRUTH, McEstimate, RngSpec, spawn_generator

__all__ = [
    "SamplingRegion",
    "ConditionalErrorEstimate",
    "OCReport",
    "sample_truth",
    "estimate_fdp",
    "estimate_ffp",
    "fixed_truth_oc",
    "stopping_subcdf",
    "conditional_utility",
]


@dataclass(frozen=True)
class SamplingRegion:
    """Where the true (theta0, theta1) pairs come from in a simulation.

    The named regions condition the product prior on the sign/size of the
    true difference: "efficacy" is theta1 - theta0 > delta, "harm" is
    theta1 - theta0 < 0, and "gap" is the band between them.
    """

    kind: str
    theta0: float | None = None
    theta1: float | None = None

    _KINDS = ("efficacy", "harm", "gap", "unconditional", "fixed")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise DomainError(f"unknown sampling region {self.kind!r}")
        if self.kind == "fixed":
            if self.theta0 is None or self.theta1 is None:
                raise DomainError("fixed region needs both true rates")
            if not (0.0 < self.theta0 < 1.0 and 0.0 < self.theta1 < 1.0):
                raise DomainError("fixed true rates must lie in (0, 1)")

    @classmethod
    def efficacy(cls):
        return cls("efficacy")

    @classmethod
    def harm(cls):
        return cls("harm")

    @classmethod
    def gap(cls):
        return cls("gap")

    @classmethod
    def unconditional(cls):
        return cls("unconditional")

    @classmethod
    def fixed(cls, theta0: float, theta1: float):
        return cls("fixed", theta0=theta0, theta1=theta1)

    @classmethod
    def from_code(cls, code: str) -> "SamplingRegion":
        """Parse the CLI codes a / b / c / all / fixed:theta0,theta1."""
        named = {"a": "efficacy", "b": "harm", "c": "gap", "all": "unconditional"}
        if code in named:
            return cls(named[code])
        if code.startswith("fixed:"):
            try:
                t0, t1 = (float(v) for v in code[len("fixed:"):].split(","))
            except ValueError as exc:
                raise DomainError(f"cannot parse fixed region {code!r}") from exc
            return cls.fixed(t0, t1)
        raise DomainError(f"unknown region code {code!r}")

    def mask(self, t0: np.ndarray, t1: np.ndarray, delta: float) -> np.ndarray:
        diff = t1 - t0
        if self.kind == "efficacy":
            return diff > delta
        if self.kind == "harm":
            return diff < 0.0
        if self.kind == "gap":
            return (diff >= 0.0) & (diff <= delta)
        return np.ones_like(diff, dtype=bool)


def _sample_truths(priors: ArmPriors, region: SamplingRegion, rng: RngSpec,
                   size: int, delta: float) -> np.ndarray:
    """Batch rejection sampling of (theta0, theta1) from the product prior."""
    if region.kind == "fixed":
        return np.tile([region.theta0, region.theta1], (size, 1))
    gen = spawn_generator(rng, DOMAIN_TRUTH)
    out = np.empty((size, 2))
    got = 0
    attempts = 0
    batch = max(4096, 2 * size)
    while got < size:
        t0 = gen.beta(priors.control.alpha, priors.control.beta, size=batch)
        t1 = gen.beta(priors.experimental.alpha, priors.experimental.beta, size=batch)
        keep = region.mask(t0, t1, delta)
        attempts += batch
        k = int(keep.sum())
        take = min(k, size - got)
        if take:
            out[got : got + take, 0] = t0[keep][:take]
            out[got : got + take, 1] = t1[keep][:take]
            got += take
        if attempts >= 2_000_000 and got / attempts < 1e-6:
            raise ConfigurationError(
                f"sampling region {region.kind!r} acceptance rate below 1e-6 under the prior"
            )
    return out


def sample_truth(priors: ArmPriors, region: SamplingRegion, rng: RngSpec,
                 delta: float = 0.0) -> tuple[float, float]:
    """One true (theta0, theta1) pair from the region-conditioned prior."""
    row = _sample_truths(priors, region, rng, 1, delta)[0]
    return float(row[0]), float(row[1])


def _run_indexed(design: TrialDesign, truths: np.ndarray, rng: RngSpec,
                 n_workers: int, tables: TailTables, early_stop_enabled: bool,
                 early_check_points, forward_reps):
    """Run one trial per truth row; results indexed by replicate, any worker count."""
    results = [None] * len(truths)

    def work(i: int):
        results[i] = run_trial(
            design,
            (float(truths[i, 0]), float(truths[i, 1])),
            rng.child((rng.stream_id + i) % 2**64),
            early_stop_enabled=early_stop_enabled,
            early_check_points=early_check_points,
            tables=tables,
            record_trajectory=False,
            forward_reps=forward_reps,
        )

    if n_workers <= 1:
        for i in range(len(truths)):
            work(i)
    else:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(work, range(len(truths))))
    return results


@dataclass(frozen=True)
class ConditionalErrorEstimate:
    """A conditional error-probability estimate (FDP or FFP).

    `value` is the relative frequency of the error event among the
    conditioning stops with its binomial standard error; `rb_value` is the
    variance-reduced companion that averages the per-trial posterior tail
    at stopping instead of the 0/1 indicator.  `companion_value` is the
    nested-event variant (the strict inequality for FDP, the
    margin-strengthened one for FFP).  All are None when no trial stopped
    for the conditioning reason.
    """

    value: float | None
    std_error: float | None
    n: int
    rb_value: float | None
    companion_value: float | None
    n_reps: int

    def as_mc_estimate(self) -> McEstimate | None:
        if self.value is None:
            return None
        return McEstimate(value=self.value, std_error=self.std_error, n=self.n)


def _conditional_error(results, truths, delta, kind, event, companion_event, tail_attr):
    hits = [i for i, r in enumerate(results) if r.decision.kind is kind]
    m = len(hits)
    if m == 0:
        return ConditionalErrorEstimate(None, None, 0, None, None, len(results))
    diffs = truths[hits, 1] - truths[hits, 0]
    errors = event(diffs)
    p_hat = float(np.mean(errors))
    se = math.sqrt(p_hat * (1.0 - p_hat) / m)
    rb = float(np.mean([getattr(results[i].decision, tail_attr) for i in hits]))
    comp = float(np.mean(companion_event(diffs)))
    return ConditionalErrorEstimate(p_hat, se, m, rb, comp, len(results))


def estimate_fdp(design: TrialDesign, n_reps: int, rng: RngSpec,
                 n_workers: int = 1, tables: TailTables | None = None) -> ConditionalErrorEstimate:
    """False discovery probability: P(theta1 - theta0 <= delta | stopped for efficacy).

    Truths are drawn from the gatekeepers' prior unconditionally, trials
    are run under the design, and the error fraction is taken over the
    efficacy stops.  The systematic use of the eps_e threshold bounds the
    estimand by eps_e.  The companion value uses the strict event
    theta1 - theta0 <= 0, which is nested and therefore never larger.
    """
    tables = tables or TailTables(design)
    truths = _sample_truths(design.prior_e, SamplingRegion.unconditional(), rng, n_reps, design.delta)
    results = _run_indexed(design, truths, rng, n_workers, tables, False, None, None)
    return _conditional_error(
        results, truths, design.delta, DecisionKind.EFFICACY,
        event=lambda d: d <= design.delta,
        companion_event=lambda d: d <= 0.0,
        tail_attr="efficacy_tail",
    )


def estimate_ffp(design: TrialDesign, n_reps: int, rng: RngSpec,
                 n_workers: int = 1, tables: TailTables | None = None) -> ConditionalErrorEstimate:
    """False futility probability: P(theta1 - theta0 >= 0 | stopped for futility).

    Mirror of estimate_fdp with truths from the sponsors' prior and the
    margin-strengthened event theta1 - theta0 >= delta as the companion.
    """
    tables = tables or TailTables(design)
    truths = _sample_truths(design.prior_f, SamplingRegion.unconditional(), rng, n_reps, design.delta)
    results = _run_indexed(design, truths, rng, n_workers, tables, False, None, None)
    return _conditional_error(
        results, truths, design.delta, DecisionKind.FUTILITY,
        event=lambda d: d >= 0.0,
        companion_event=lambda d: d >= design.delta,
        tail_attr="futility_tail",
    )


def fixed_truth_oc(design: TrialDesign, theta0: float, theta_a: float, n_reps: int,
                   rng: RngSpec, n_workers: int = 1,
                   tables: TailTables | None = None) -> tuple[McEstimate, McEstimate]:
    """Fixed-truth efficacy-stop rates: at (theta0, theta0) and (theta0, theta_a).

    These are the quantities a frequentist-calibrated reading would call
    type I error rate and power.  They are provided for comparison and
    demonstration only; the design is governed by the conditional error
    criteria, not by these rates.
    """
    tables = tables or TailTables(design)
    out = []
    for k, t1 in enumerate((theta0, theta_a)):
        truths = _sample_truths(
            design.prior_e, SamplingRegion.fixed(theta0, t1), rng, n_reps, design.delta
        )
        results = _run_indexed(
            design, truths, rng.child((rng.stream_id + k * n_reps) % 2**64),
            n_workers, tables, False, None, None,
        )
        frac = float(np.mean([r.decision.kind is DecisionKind.EFFICACY for r in results]))
        out.append(McEstimate(frac, math.sqrt(max(frac * (1 - frac), 1e-12) / n_reps), n_reps))
    return out[0], out[1]


@dataclass(frozen=True)
class OCReport:
    """Simulation-derived operating characteristics for one configuration."""

    n_reps: int
    region: str
    early_stop_enabled: bool
    decision_fractions: dict[str, float]
    mean_duration: float
    conditional_mean_utility: float     # posterior-expected terminal utility minus costs
    mean_realized_utility: float        # true-theta terminal utility minus costs
    subcdf: dict[str, list[float]]      # per-time cumulative stop probability by decision
    scatter: list[tuple[int, float, str]] | None  # (duration, utility, decision)
    fdp: McEstimate | None = None       # populated by runs that condition on discoveries
    ffp: McEstimate | None = None

    def to_dict(self) -> dict:
        def mc(est):
            if est is None:
                return None
            return {"value": est.value, "std_error": est.std_error, "n": est.n}

        return {
            "n_reps": self.n_reps,
            "region": self.region,
            "early_stop_enabled": self.early_stop_enabled,
            "decision_fractions": self.decision_fractions,
            "mean_duration": self.mean_duration,
            "conditional_mean_utility": self.conditional_mean_utility,
            "mean_realized_utility": self.mean_realized_utility,
            "subcdf": self.subcdf,
            "scatter": self.scatter,
            "fdp": mc(self.fdp),
            "ffp": mc(self.ffp),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


_DECISION_NAMES = ("efficacy", "futility", "inconclusive")


def _build_report(design, region, results, early_stop_enabled, keep_scatter) -> OCReport:
    n = len(results)
    n_max = design.n_max
    counts = {name: 0 for name in _DECISION_NAMES}
    stops = {name: np.zeros(n_max + 1) for name in _DECISION_NAMES}
    durations = np.empty(n, dtype=np.int64)
    utilities = np.empty(n)
    realized = np.empty(n)
    scatter = [] if keep_scatter else None
    for i, r in enumerate(results):
        name = r.decision.kind.value
        counts[name] += 1
        durations[i] = r.n_enrolled
        stops[name][r.n_enrolled] += 1
        utilities[i] = r.expected_terminal_utility - r.sunk_cost
        realized[i] = r.realized_utility
        if scatter is not None:
            scatter.append((r.n_enrolled, utilities[i], name))
    subcdf = {name: list(np.cumsum(stops[name]) / n) for name in _DECISION_NAMES}
    return OCReport(
        n_reps=n,
        region=region.kind,
        early_stop_enabled=early_stop_enabled,
        decision_fractions={name: counts[name] / n for name in _DECISION_NAMES},
        mean_duration=float(np.mean(durations)),
        conditional_mean_utility=float(np.mean(utilities)),
        mean_realized_utility=float(np.mean(realized)),
        subcdf=subcdf,
        scatter=scatter,
    )


def stopping_subcdf(design: TrialDesign, region: SamplingRegion, n_reps: int, rng: RngSpec,
                    n_workers: int = 1, early_stop_enabled: bool = False,
                    tables: TailTables | None = None) -> OCReport:
    """Per-time cumulative stopping probabilities by cause, region-conditioned.

    Truths come from the sponsors' prior conditioned on the region; each
    sub-CDF is nondecreasing and ends at that decision's overall fraction.
    """
    tables = tables or TailTables(design)
    truths = _sample_truths(design.prior_f, region, rng, n_reps, design.delta)
    results = _run_indexed(design, truths, rng, n_workers, tables, early_stop_enabled, None, None)
    return _build_report(design, region, results, early_stop_enabled, keep_scatter=False)


def conditional_utility(design: TrialDesign, region: SamplingRegion,
                        early_stop_enabled: bool, n_reps: int, rng: RngSpec,
                        n_workers: int = 1, early_check_points=None,
                        forward_reps: int | None = None,
                        tables: TailTables | None = None) -> OCReport:
    """Joint (duration, utility) behaviour conditioned on a sampling region.

    The per-trial utility is the posterior-expected terminal utility at the
    stopping state minus the accrued per-patient costs; the realized
    (true-theta) mean is reported alongside.  With early stopping enabled,
    the predictive rule is checked at the given points (default every 25
    patients).  Comparing the same seed with the flag on and off isolates
    the effect of the early-stopping option, since the truth and outcome
    streams coincide.
    """
    tables = tables or TailTables(design)
    truths = _sample_truths(design.prior_f, region, rng, n_reps, design.delta)
    results = _run_indexed(
        design, truths, rng, n_workers, tables, early_stop_enabled, early_check_points, forward_reps
    )
    return _build_report(design, region, results, early_stop_enabled, keep_scatter=True)


def write_subcdf_csv(report: OCReport, path) -> None:
    """time, p_stop_efficacy, p_stop_futility, p_stop_inconclusive."""
    with open(path, "w") as fh:
        fh.write("time,p_stop_efficacy,p_stop_futility,p_stop_inconclusive\n")
        eff, fut, inc = (report.subcdf[name] for name in _DECISION_NAMES)
        for t in range(len(eff)):
            fh.write(f"{t},{eff[t]!r},{fut[t]!r},{inc[t]!r}\n")


def write_scatter_csv(report: OCReport, path) -> None:
    """tau, utility, decision — one row per simulated trial."""
    if report.scatter is None:
        raise DomainError("report carries no per-trial scatter")
    with open(path, "w") as fh:
        fh.write("tau,utility,decision\n")
        for tau, utility, decision in report.scatter:
            fh.write(f"{tau},{utility!r},{decision}\n")
