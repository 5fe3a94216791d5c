"""Bayes risk, proper scoring rules, and the cost of relaying a signal.

Shows the two ways the library prices an information state: expected loss
of the best per-signal action, and expected score of the posterior
forecast.  Then it charges a noisy relay both ways and checks that the
value gap equals the expected posterior divergence.
"""

import numpy as np

from delnet import (
    BRIER_SCORE,
    LOG_SCORE,
    Distribution,
    InformationState,
    Kernel,
    LossMatrix,
    Space,
    bayes_risk,
    communication_tax,
    scoring_value,
)

labels = Space("y", ("low", "high"))
prior = Distribution(labels, [0.7, 0.3])
channel = Kernel.symmetric(labels, 0.85, Space.of_size("m", 2))
state = InformationState.from_kernel(prior, channel)

# Acting: pick one action per observed signal to minimize expected loss.
zero_one = LossMatrix.zero_one(labels)
solution = bayes_risk(state, zero_one)
print("zero-one Bayes risk:", f"{solution.value:.6f}")
for i, sig in enumerate(state.alphabet.labels):
    act = labels.labels[solution.actions[i]]
    print(f"  on {sig}: act {act!r}, conditional risk {solution.symbol_risks[i]:.4f}")

# Forecasting: report the posterior itself and take its proper score.
print("log value (expected surprisal, nats):",
      f"{scoring_value(state, LOG_SCORE):.6f}")
print("brier value:", f"{scoring_value(state, BRIER_SCORE):.6f}")

# Now charge a second noisy hop.  The tax breakdown prices the hop as the
# value difference, and as the expected divergence between the posterior
# you had and the posterior the relay leaves you with; they agree to
# roundoff.  Under the log rule the gap is also a conditional mutual
# information.
relay = Kernel.symmetric(channel.to_space, 0.75, Space.of_size("r", 2))
for rule, name in ((LOG_SCORE, "log"), (BRIER_SCORE, "brier")):
    tax = communication_tax(state, relay, rule)
    print(f"{name} tax: direct {tax.value_source:.6f}, "
          f"relayed {tax.value_relayed:.6f}, gap {tax.gap:.6f}, "
          f"E[divergence] {tax.expected_divergence:.6f}")
    assert abs(tax.gap - tax.expected_divergence) < 1e-12
log_tax = communication_tax(state, relay, LOG_SCORE)
print("log gap equals conditional mutual information:",
      f"{log_tax.conditional_mi:.6f}")

# A lossless relabeling is free under every rule.
swap = Kernel.deterministic(channel.to_space, Space.of_size("p", 2), [1, 0])
free = communication_tax(state, swap, LOG_SCORE)
print("tax of a pure relabeling:", f"{free.gap:.2e}")
assert abs(free.gap) < 1e-12
