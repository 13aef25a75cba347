"""One simulated trial, interim by interim.

Patients arrive in randomized blocks of two; after every outcome the two
posterior tails are compared with their thresholds.  The trial below uses
a strong true effect, so it should stop early for efficacy.
"""

from seqtrial.engine import ArmPriors, TailTables, TrialDesign, UtilitySpec, run_trial
from seqtrial.mc import RngSpec

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

result = run_trial(design, truth=(0.35, 0.75), rng=RngSpec(2024, 0),
                   tables=TailTables(design))

print(f"true rates: control 0.35, experimental 0.75  (difference 0.40 > delta {design.delta})")
print(f"decision  : {result.decision.kind.value} at n = {result.decision.n}")
print(f"tails at stopping: efficacy {result.decision.efficacy_tail:.4f} "
      f"(threshold {design.eps_e}), futility {result.decision.futility_tail:.4f}")
print(f"realized utility : {result.realized_utility:.0f} "
      f"(= {result.terminal_utility:.0f} gain - {result.sunk_cost:.0f} patient costs)")
print("\ntrajectory (n, efficacy tail, futility tail):")
for n, eff, fut in result.trajectory:
    bar = "#" * max(1, int(40 * eff))
    print(f"  n={n:3d}  eff={eff:8.4f}  fut={fut:8.4f}  {bar}")
