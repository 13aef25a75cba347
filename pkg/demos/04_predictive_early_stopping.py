"""Deciding whether continuing a trial is worth the cost.

At any interim one can simulate the trial's own future from the posterior
predictive distribution: draw plausible true rates, extend the data, apply
the stopping rules, and price each future with the stakeholder utilities
minus per-patient costs.  A negative predictive value means continuing is
expected to destroy value, which is the trigger for stopping with an
inconclusive result.
"""

from seqtrial.engine import (
    ArmPriors,
    TailTables,
    TrialData,
    TrialDesign,
    UtilitySpec,
    early_stop_check,
    predictive_cumulative_utility,
)
from seqtrial.mc import RngSpec
from seqtrial.posterior import CONTROL, EXPERIMENTAL

design = TrialDesign(
    prior_e=ArmPriors.uniform(),
    prior_f=ArmPriors.uniform(),
    eps_e=0.05,
    eps_f=0.05,
    delta=0.05,
    n_max=500,
    horizon=500,
    utilities=UtilitySpec(2500, 500, 1000, 1000),
)
tables = TailTables(design)


def describe(label, data):
    pcu = predictive_cumulative_utility(design, data, RngSpec(42), tables=tables, reps=400)
    action = early_stop_check(design, data, RngSpec(42), tables=tables, reps=400)
    print(f"{label} (n = {data.n}):")
    print(f"  predictive cumulative utility: {pcu.value:9.1f} +- {pcu.std_error:.1f}")
    print(f"  P(efficacy stop by T)        : {pcu.stop_prob_efficacy:.3f}")
    print(f"  P(futility stop by T)        : {pcu.stop_prob_futility:.3f}")
    print(f"  expected additional patients : {pcu.expected_duration:.1f}")
    print(f"  rule says                    : {action.value}\n")


print("Scenario 1: nothing observed yet.  Under the uniform prior a trial is")
print("worth starting: most futures reach a conclusive, valuable stop.\n")
describe("fresh trial", TrialData())

print("Scenario 2: 200 patients per arm with identical success counts.")
print("Neither rule is in reach and the margin makes efficacy implausible,")
print("so continuing mostly burns patient costs.\n")
data = TrialData()
for _ in range(100):
    data.append(CONTROL, 1)
    data.append(EXPERIMENTAL, 1)
for _ in range(100):
    data.append(CONTROL, 0)
    data.append(EXPERIMENTAL, 0)
describe("dead-even trial", data)
