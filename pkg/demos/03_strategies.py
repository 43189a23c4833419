"""The four query-selection strategies side by side.

Run with: python3 demos/03_strategies.py
"""

from inquest import Hard, Mode, StrategySpec, Thresholds, figure4, run_to_termination

spec = figure4()

# With the stock (0.95, 0.05) band every session sweeps all six
# indicators, which makes the selection orders easy to compare.
print("query orders over a full sweep (all answers positive):")
for mode in Mode:
    order = []

    def source(leaf):
        order.append(leaf)
        return Hard(1)

    run_to_termination(spec, StrategySpec(mode=mode), source)
    print(f"  {mode.value:<12} {' '.join(order)}")

# Grouped walks one branch to exhaustion; flat interleaves branches by
# the strength of each indicator's synthesized link to the root.

# With a reachable band the strategies stop early, and the differences
# in when they check the goal show up as different query counts.
reachable = spec.with_thresholds(
    {
        "N1": Thresholds(0.80, 0.18),
        "N11": Thresholds(0.95, 0.05),
        "N12": Thresholds(0.95, 0.05),
    }
)
print("\nall-negative case at a reachable band (root: 0.80/0.18):")
for mode in Mode:
    final = run_to_termination(reachable, StrategySpec(mode=mode), lambda leaf: Hard(0))
    print(
        f"  {mode.value:<12} {final.query_count} queries, "
        f"decision {final.decisions['N1'].value!r}, "
        f"P(N1) = {final.belief.posterior['N1']:.4f}"
    )

# The distributed mode notices the root crossing its band mid-subgoal;
# the isolated mode insists on finishing the subgoal first.
