"""Compressing a signal alphabet under a message budget.

An encoder with k messages can be taken deterministic without loss of
optimality, so the search runs over partitions of the signal alphabet.
The demo compresses a six-signal state under both a zero-one loss and the
log rule and shows how the best grouping depends on the objective.
"""

import numpy as np

from delnet import (
    BudgetSpec,
    LOG_SCORE,
    Distribution,
    InformationState,
    Kernel,
    LossMatrix,
    Space,
    apply_encoder,
    bayes_risk,
    optimal_encoder,
    optimal_values_by_budget,
)

# Six signals, perfectly informative but with very uneven weight.
y = Space.of_size("y", 6)
prior = Distribution(y, [0.3, 0.3, 0.2, 0.1, 0.06, 0.04])
state = InformationState.from_kernel(prior, Kernel.identity(y))

zero_one = LossMatrix.zero_one(y)
print("budget -> optimal zero-one risk:")
for k, value in enumerate(optimal_values_by_budget(state, zero_one), start=1):
    print(f"  k={k}: {value:.6f}")

# At budget 4 the optimum keeps the three heavy signals separate and pools
# the light tail; only the tail's non-modal mass is lost.
result = optimal_encoder(state, BudgetSpec(4), zero_one)
print("budget-4 grouping (signal -> message):", result.assignment)
print("budget-4 risk:", f"{result.value:.6f}", "exact:", result.exact)

# The encoded state really achieves that value.
encoded = apply_encoder(state, result.encoder)
assert abs(bayes_risk(encoded, zero_one).value - result.value) < 1e-12

# Under the log rule there are no free merges: every pooling of distinct
# posteriors costs information, so the curve is strictly decreasing.
log_values = optimal_values_by_budget(state, LOG_SCORE)
print("budget -> optimal log value (nats):")
for k, value in enumerate(log_values, start=1):
    print(f"  k={k}: {value:.6f}")
assert all(log_values[i] > log_values[i + 1] + 1e-12 for i in range(5))

# Signals that share a Bayes action can merge for free under a loss; the
# budget-5 zero-one optimum already matches the uncompressed value of a
# state whose two lightest signals lean the same way.
lean = InformationState(
    "m", Space.of_size("m", 3), Space.of_size("y", 2),
    np.array([0.5, 0.3, 0.2]),
    np.array([[0.9, 0.1], [0.8, 0.2], [0.3, 0.7]]))
two = optimal_encoder(state=lean, budget=BudgetSpec(2),
                      objective=LossMatrix.zero_one(lean.label_space))
print("same-action merge (signal -> message):", two.assignment)
full = bayes_risk(lean, LossMatrix.zero_one(lean.label_space)).value
print(f"budget-2 risk {two.value:.6f} equals uncompressed risk {full:.6f}")
assert abs(two.value - full) < 1e-12
