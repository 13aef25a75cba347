"""Conjugate Beta-Binomial posterior state for a two-arm trial.

The joint prior over the two success rates factorizes per arm, so each
arm's Beta posterior only ever sees that arm's outcomes.  The tail
probabilities driving the stopping rules,

    P(theta1 - theta0 <= delta | D)   (efficacy check)
    P(theta1 - theta0 >= 0     | D)   (futility check),

can be evaluated three interchangeable ways: closed-form/quadrature,
Monte Carlo, or a sequential recursion that adds the exact closed-form
innovation gain of each single conjugate update (derived from the Stein
equation for the Beta distribution).  The recursion makes the delta = 0
tail maintainable in O(1) per observed outcome.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import betamath
from .betamath import BetaParams, SeriesControl, gauss_2f1, log_beta_fn, tanh_sinh
from .errors import DomainError, UsageError
from .mc import RngSpec, p_greater_full, sample_beta

__all__ = [
    "CONTROL",
    "EXPERIMENTAL",
    "SUCCESS",
    "FAILURE",
    "ArmPairPosterior",
    "TailMethod",
    "update",
    "tail_efficacy",
    "tail_futility",
    "stein_tail_shift",
    "innovation_gain_zero_delta",
    "innovation_gain_delta",
    "innovation_gain_delta_series",
]

CONTROL = "control"
EXPERIMENTAL = "experimental"
SUCCESS = 1
FAILURE = 0


def _check_arm(arm):
    if arm not in (CONTROL, EXPERIMENTAL):
        raise UsageError(f"arm must be '{CONTROL}' or '{EXPERIMENTAL}', got {arm!r}")


def _check_outcome(outcome):
    if outcome not in (SUCCESS, FAILURE):
        raise UsageError(f"outcome must be {SUCCESS} (success) or {FAILURE} (failure), got {outcome!r}")


@dataclass(frozen=True)
class ArmPairPosterior:
    """Per-arm Beta posteriors plus the outcome counts that produced them.

    Immutable: update() returns a new state.  Posterior shapes equal prior
    shapes plus (successes, failures) per arm, which also lets the prior be
    recovered exactly for the sequential recursion.
    """

    control: BetaParams
    experimental: BetaParams
    n_control: int = 0
    n_experimental: int = 0
    successes_control: int = 0
    successes_experimental: int = 0

    def __post_init__(self):
        for n, s, label in (
            (self.n_control, self.successes_control, "control"),
            (self.n_experimental, self.successes_experimental, "experimental"),
        ):
            if n < 0 or s < 0 or s > n:
                raise DomainError(f"inconsistent {label} counts: {s} successes of {n}")

    @classmethod
    def from_priors(cls, control: BetaParams, experimental: BetaParams) -> "ArmPairPosterior":
        return cls(control=control, experimental=experimental)

    @property
    def failures_control(self) -> int:
        return self.n_control - self.successes_control

    @property
    def failures_experimental(self) -> int:
        return self.n_experimental - self.successes_experimental

    def prior(self) -> "ArmPairPosterior":
        """The prior state this posterior was folded from."""
        return ArmPairPosterior(
            control=BetaParams(
                self.control.alpha - self.successes_control,
                self.control.beta - self.failures_control,
            ),
            experimental=BetaParams(
                self.experimental.alpha - self.successes_experimental,
                self.experimental.beta - self.failures_experimental,
            ),
        )


def update(post: ArmPairPosterior, arm: str, outcome: int) -> ArmPairPosterior:
    """Conjugate update: success increments alpha, failure increments beta."""
    _check_arm(arm)
    _check_outcome(outcome)
    da, db = (1, 0) if outcome == SUCCESS else (0, 1)
    if arm == CONTROL:
        return ArmPairPosterior(
            control=BetaParams(post.control.alpha + da, post.control.beta + db),
            experimental=post.experimental,
            n_control=post.n_control + 1,
            n_experimental=post.n_experimental,
            successes_control=post.successes_control + da,
            successes_experimental=post.successes_experimental,
        )
    return ArmPairPosterior(
        control=post.control,
        experimental=BetaParams(post.experimental.alpha + da, post.experimental.beta + db),
        n_control=post.n_control,
        n_experimental=post.n_experimental + 1,
        successes_control=post.successes_control,
        successes_experimental=post.successes_experimental + da,
    )


@dataclass(frozen=True)
class TailMethod:
    """Evaluation-route selector for the posterior tail probabilities."""

    kind: str
    mc_n: int = 1000
    rng: RngSpec | None = None

    def __post_init__(self):
        if self.kind not in ("quadrature", "monte_carlo", "recursion"):
            raise DomainError(f"unknown tail method {self.kind!r}")
        if self.kind == "monte_carlo":
            if self.mc_n < 1:
                raise DomainError(f"monte_carlo sample size must be >= 1, got {self.mc_n}")
            if self.rng is None:
                raise DomainError("monte_carlo tail method requires an RngSpec")

    @classmethod
    def quadrature(cls) -> "TailMethod":
        return cls(kind="quadrature")

    @classmethod
    def monte_carlo(cls, n: int, rng: RngSpec) -> "TailMethod":
        return cls(kind="monte_carlo", mc_n=n, rng=rng)

    @classmethod
    def recursion(cls) -> "TailMethod":
        return cls(kind="recursion")


QUADRATURE = TailMethod.quadrature()
RECURSION = TailMethod.recursion()


def tail_efficacy(post: ArmPairPosterior, delta: float, method: TailMethod = QUADRATURE) -> float:
    """P(theta1 - theta0 <= delta | D) under the product posterior."""
    if method.kind == "quadrature":
        return betamath.prob_t1_lt_t0_plus_delta(post.control, post.experimental, delta)
    if method.kind == "monte_carlo":
        t0 = sample_beta(post.control, method.mc_n, method.rng)
        t1 = sample_beta(post.experimental, method.mc_n, method.rng.child(method.rng.stream_id ^ (1 << 63)))
        return p_greater_full(t0 + delta, t1).value
    # recursion: replay the per-arm counts from the prior, accumulating the
    # exact innovation gain of every conjugate update
    prior = post.prior()
    value = betamath.prob_t1_lt_t0_plus_delta(prior.control, prior.experimental, delta)
    state = prior
    for arm, successes, failures in (
        (CONTROL, post.successes_control, post.failures_control),
        (EXPERIMENTAL, post.successes_experimental, post.failures_experimental),
    ):
        for outcome, count in ((SUCCESS, successes), (FAILURE, failures)):
            for _ in range(count):
                value += innovation_gain_delta(state, arm, outcome, -delta)
                state = update(state, arm, outcome)
    return min(1.0, max(0.0, value))


def tail_futility(post: ArmPairPosterior, method: TailMethod = QUADRATURE) -> float:
    """P(theta1 - theta0 >= 0 | D), the exact complement of the delta = 0 tail."""
    return 1.0 - tail_efficacy(post, 0.0, method)


def stein_tail_shift(params: BetaParams, t: float) -> float:
    """Increment of P(theta > t) caused by alpha -> alpha + 1.

    From the Stein equation for the Beta distribution:
    P_{a+1,b}(theta > t) = P_{a,b}(theta > t) + t^a (1-t)^b / (a B(a, b)).
    The mirrored beta update follows by the reflection identity.
    """
    if not (0.0 <= t <= 1.0):
        raise DomainError(f"t must lie in [0, 1], got {t!r}")
    if t == 0.0 or t == 1.0:
        return 0.0
    a, b = params.alpha, params.beta
    return math.exp(a * math.log(t) + b * math.log1p(-t) - math.log(a) - log_beta_fn(a, b))


# sign of the P(theta0 > theta1 + delta) gain per (arm, outcome)
_GAIN_SIGN = {
    (CONTROL, SUCCESS): 1.0,
    (CONTROL, FAILURE): -1.0,
    (EXPERIMENTAL, SUCCESS): -1.0,
    (EXPERIMENTAL, FAILURE): 1.0,
}


def innovation_gain_zero_delta(post: ArmPairPosterior, arm: str, outcome: int) -> float:
    """Signed change of P(theta0 > theta1) caused by one conjugate update.

    All four (arm, outcome) cases share the magnitude
    B(a0 + a1, b0 + b1) / (s * B(a0, b0) * B(a1, b1)), where s is the shape
    parameter being incremented; the sign follows from which tail the
    update inflates.
    """
    _check_arm(arm)
    _check_outcome(outcome)
    a0, b0 = post.control.alpha, post.control.beta
    a1, b1 = post.experimental.alpha, post.experimental.beta
    bumped = {
        (CONTROL, SUCCESS): a0,
        (CONTROL, FAILURE): b0,
        (EXPERIMENTAL, SUCCESS): a1,
        (EXPERIMENTAL, FAILURE): b1,
    }[(arm, outcome)]
    log_gain = (
        log_beta_fn(a0 + a1, b0 + b1)
        - log_beta_fn(a0, b0)
        - log_beta_fn(a1, b1)
        - math.log(bumped)
    )
    return _GAIN_SIGN[(arm, outcome)] * math.exp(log_gain)


def _gain_expectation_quad(a0, b0, a1, b1, c):
    """(1 / (a0 B(a0,b0))) E_{a1,b1}[ ((t+c)^+)^a0 ((1-t-c)^+)^b0 ].

    The expectation integrand is supported on (max(0,-c), min(1, 1-c)); the
    factors vanishing at the integration limits are computed from the exact
    node distances to avoid cancellation.
    """
    lo = max(0.0, -c)
    hi = min(1.0, 1.0 - c)
    if hi <= lo:
        return 0.0
    log_norm = -math.log(a0) - log_beta_fn(a0, b0) - log_beta_fn(a1, b1)

    def integrand(t, omt, dlo, dhi):
        # t + c == dlo when lo == -c; 1 - t - c == dhi when hi == 1 - c
        tpc = dlo if lo > 0.0 else t + c
        omtc = dhi if hi < 1.0 else omt - c
        with np.errstate(divide="ignore"):
            logv = (
                (a1 - 1.0) * np.log(t)
                + (b1 - 1.0) * np.log(omt)
                + a0 * np.log(tpc)
                + b0 * np.log(omtc)
            )
        return np.exp(logv + log_norm)

    return tanh_sinh(integrand, lo, hi, rtol=1e-12, atol=1e-16)


def innovation_gain_delta(
    post: ArmPairPosterior,
    arm: str,
    outcome: int,
    delta: float,
    ctl: SeriesControl | None = None,
) -> float:
    """Signed change of P(theta0 > theta1 + delta) from one conjugate update.

    Evaluated through the expectation form by 1-D quadrature, which is
    robust for any |delta| < 1.  The terminating double-series expansion
    for integer shapes is available as innovation_gain_delta_series for
    cross-checking.
    """
    _check_arm(arm)
    _check_outcome(outcome)
    if not abs(delta) < 1.0:
        raise DomainError(f"innovation gain requires |delta| < 1, got {delta!r}")
    if delta == 0.0:
        return innovation_gain_zero_delta(post, arm, outcome)
    a0, b0 = post.control.alpha, post.control.beta
    a1, b1 = post.experimental.alpha, post.experimental.beta
    args = {
        (CONTROL, SUCCESS): (a0, b0, a1, b1, delta),
        (CONTROL, FAILURE): (b0, a0, b1, a1, -delta),
        (EXPERIMENTAL, SUCCESS): (a1, b1, a0, b0, -delta),
        (EXPERIMENTAL, FAILURE): (b1, a1, b0, a0, delta),
    }[(arm, outcome)]
    return _GAIN_SIGN[(arm, outcome)] * _gain_expectation_quad(*args)


def _gain_expectation_series(a0, b0, a1, b1, c, ctl: SeriesControl):
    """Terminating double-series twin of _gain_expectation_quad (integer shapes).

    Expands ((t+c))^a0 ((1-t-c))^b0 by the generalized binomial formula; for
    integer a0, b0 both binomial-coefficient sequences terminate, and each
    surviving term's incomplete integral reduces to a polynomial 2F1.
    """
    ia0, ib0 = int(a0), int(b0)
    if ia0 != a0 or ib0 != b0:
        raise DomainError("series expansion of the innovation gain needs integer shapes")
    cm = max(-c, 0.0)  # lower integration limit
    cp = max(c, 0.0)
    hi = 1.0 - cp
    log_norm = -math.log(a0) - log_beta_fn(a0, b0) - log_beta_fn(a1, b1)
    total = 0.0
    for k in range(ia0 + ib0 + 1):
        coeff_k = 0.0
        for el in range(0, min(k, ib0) + 1):
            if k - el > ia0:
                continue
            m = a0 + a1 + el - k
            b_exp = b0 + b1 - el
            binoms = math.comb(ib0, el) * math.comb(ia0, k - el)
            if binoms == 0:
                continue
            upper = hi**m / m * gauss_2f1(m, 1.0 - b_exp, m + 1.0, hi, ctl)
            lower = 0.0
            if cm > 0.0:
                lower = cm**m / m * gauss_2f1(m, 1.0 - b_exp, m + 1.0, cm, ctl)
            coeff_k += (-1.0) ** el * binoms * (upper - lower)
        total += (c**k) * coeff_k
    return total * math.exp(log_norm)


def innovation_gain_delta_series(
    post: ArmPairPosterior,
    arm: str,
    outcome: int,
    delta: float,
    ctl: SeriesControl | None = None,
) -> float:
    """Double-series cross-check of innovation_gain_delta for integer shapes."""
    _check_arm(arm)
    _check_outcome(outcome)
    ctl = ctl or betamath.DEFAULT_SERIES_CONTROL
    if not abs(delta) < 1.0:
        raise DomainError(f"innovation gain requires |delta| < 1, got {delta!r}")
    if delta == 0.0:
        return innovation_gain_zero_delta(post, arm, outcome)
    a0, b0 = post.control.alpha, post.control.beta
    a1, b1 = post.experimental.alpha, post.experimental.beta
    args = {
        (CONTROL, SUCCESS): (a0, b0, a1, b1, delta),
        (CONTROL, FAILURE): (b0, a0, b1, a1, -delta),
        (EXPERIMENTAL, SUCCESS): (a1, b1, a0, b0, -delta),
        (EXPERIMENTAL, FAILURE): (b1, a1, b0, a0, delta),
    }[(arm, outcome)]
    return _GAIN_SIGN[(arm, outcome)] * _gain_expectation_series(*args, ctl)
