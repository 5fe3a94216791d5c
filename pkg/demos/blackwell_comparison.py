"""Comparing two experiments: garbling witnesses and separating losses.

Two signal structures over the same label admit a clean dichotomy: either
one is a stochastically degraded copy of the other (and then it is weakly
worse for every decision problem), or there is a concrete loss on which
each side strictly beats the other.  The library returns the witness in
the first case and constructs the separating loss in the second.
"""

import numpy as np

from delnet import (
    Distribution,
    Experiment,
    InformationState,
    Kernel,
    Space,
    bayes_risk,
    compose,
    is_dominated,
    separating_loss,
)

y = Space.of_size("y", 2)
prior = Distribution(y, [0.6, 0.4])

# Case 1: S is T pushed through a known noise stage, so T dominates S.
kt = Kernel(y, Space.of_size("t", 2), [[0.9, 0.1], [0.1, 0.9]])
noise = Kernel(kt.to_space, Space.of_size("s", 2), [[0.85, 0.15], [0.2, 0.8]])
s = Experiment(prior, compose(kt, noise))
t = Experiment(prior, kt)

check = is_dominated(s, t)
print("is S a degraded copy of T?", check.dominated)
print("recovered garbling (rows: T signals -> S signals):")
print(check.witness.channel.rows)
print("reconstruction residual:", f"{check.witness.residual:.2e}")
assert np.allclose(kt.rows @ check.witness.channel.rows, s.kernel.rows)

# Case 2: neither experiment degrades into the other.  S is sharper about
# label 0, T about label 1, so each wins somewhere.
ks = Kernel(y, Space.of_size("s", 2), [[0.9, 0.1], [0.4, 0.6]])
kt2 = Kernel(y, Space.of_size("t", 2), [[0.7, 0.3], [0.1, 0.9]])
s2 = Experiment(prior, ks)
t2 = Experiment(prior, kt2)
print("\nS degraded copy of T?", is_dominated(s2, t2).dominated)
print("T degraded copy of S?", is_dominated(t2, s2).dominated)

# The separating loss is a decision problem where S strictly beats T.
sep = separating_loss(s2, t2)
print("separating loss values (rows: actions, cols: labels):")
print(sep.loss.values)
print("verified margin:", f"{sep.margin:.6f}")

val_s = bayes_risk(InformationState.from_kernel(prior, ks), sep.loss).value
val_t = bayes_risk(InformationState.from_kernel(prior, kt2), sep.loss).value
print(f"Bayes value with S: {val_s:.6f}, with T: {val_t:.6f}")
assert val_t - val_s >= sep.margin - 1e-12
