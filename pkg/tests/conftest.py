import pytest

from seqtrial.betamath import BetaParams
from seqtrial.engine import ArmPriors, TailTables, TrialDesign, UtilitySpec


def worked_example_design(**overrides) -> TrialDesign:
    """The worked-example configuration used throughout the suite.

    Uniform priors for both parties, eps_e = eps_f = 0.05, margin 0.05,
    maximum size and horizon 500, gains/losses (2500, 500, 1000, 1000).
    """
    kwargs = dict(
        prior_e=ArmPriors.uniform(),
        prior_f=ArmPriors.uniform(),
        eps_e=0.05,
        eps_f=0.05,
        delta=0.05,
        n_max=500,
        horizon=500,
        utilities=UtilitySpec(
            gain_efficacy=2500.0,
            gain_futility=500.0,
            loss_efficacy=1000.0,
            loss_futility=1000.0,
            cost_per_patient=1.0,
            inconclusive_value=0.0,
        ),
    )
    kwargs.update(overrides)
    if "n_max" in overrides and "horizon" not in overrides:
        kwargs["horizon"] = kwargs["n_max"]
    return TrialDesign(**kwargs)


@pytest.fixture(scope="session")
def design():
    return worked_example_design()


@pytest.fixture(scope="session")
def tables(design):
    # shared across the whole run: caches make later tests much faster
    return TailTables(design)


@pytest.fixture
def uniform():
    return BetaParams(1.0, 1.0)
