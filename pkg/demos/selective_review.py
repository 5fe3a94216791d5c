"""Choosing per case between automating a decision and escalating it.

For each observed symbol the automated policy carries its conditional
Bayes risk; escalation carries a flat review cost.  The optimal rule is a
simple threshold: escalate exactly the symbols whose automated risk
exceeds the cost.  Sweeping the cost traces the risk-coverage frontier.
"""

import numpy as np

from delnet import (
    ESCALATE,
    InformationState,
    LossMatrix,
    ReviewProblem,
    Space,
    automated_risk,
    optimal_review,
    review_frontier,
)

# A triage setting: three findings, posteriors over benign/urgent.
y = Space("y", ("benign", "urgent"))
m = Space("m", ("clear", "ambiguous", "flagged"))
state = InformationState(
    "triage", m, y,
    np.array([0.3, 0.4, 0.3]),
    np.array([[0.9, 0.1], [0.5, 0.5], [0.2, 0.8]]))
loss = LossMatrix.zero_one(y)

# With a 0.25 review cost, only the ambiguous symbol is worth escalating.
problem = ReviewProblem.uniform_cost(state, loss, 0.25)

# Fully automated: the middle symbol is a coin flip and costs 0.5.
auto = automated_risk(problem)
print("automated risk per symbol:", auto.symbol_risks)
print("fully automated value:", f"{auto.value:.4f}")

policy = optimal_review(problem)
for i, sym in enumerate(m.labels):
    choice = ("escalate" if policy.actions[i] == ESCALATE
              else f"act {y.labels[policy.actions[i]]!r}")
    print(f"  on {sym}: {choice}")
print(f"value {policy.value:.4f}, escalated mass {policy.escalation_mass:.2f}")

# Per-symbol costs work too: make review expensive only on clear cases.
uneven = ReviewProblem(state, loss, np.array([0.9, 0.05, 0.9]))
print("uneven costs escalate:", optimal_review(uneven).escalated)

# The frontier: value and escalated mass at each cost level.  Value rises
# with cost and mass falls, both monotonically.
costs = [0.0, 0.05, 0.15, 0.3, 0.6, 1.0]
print("cost  escalated  value")
for point in review_frontier(problem, costs):
    print(f"{point.review_cost:4.2f}  {point.escalation_mass:9.2f}"
          f"  {point.value:.4f}")
