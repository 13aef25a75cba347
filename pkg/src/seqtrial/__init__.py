"""Sequential Bayesian two-arm superiority trial engine."""

from .betamath import BetaParams, SeriesControl
from .engine import (
    ArmPriors,
    Decision,
    DecisionKind,
    Schedule,
    TrialData,
    TrialDesign,
    TrialResult,
    UtilitySpec,
    run_trial,
)
from .evaluate import OCReport, SamplingRegion, estimate_fdp, estimate_ffp
from .mc import McEstimate, RngSpec
from .posterior import ArmPairPosterior, TailMethod, tail_efficacy, tail_futility

__all__ = [
    "ArmPairPosterior",
    "ArmPriors",
    "BetaParams",
    "Decision",
    "DecisionKind",
    "McEstimate",
    "OCReport",
    "RngSpec",
    "SamplingRegion",
    "Schedule",
    "SeriesControl",
    "TailMethod",
    "TrialData",
    "TrialDesign",
    "TrialResult",
    "UtilitySpec",
    "estimate_fdp",
    "estimate_ffp",
    "run_trial",
    "tail_efficacy",
    "tail_futility",
]
__version__ = "0.1.0"
