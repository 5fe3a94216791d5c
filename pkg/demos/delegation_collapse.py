"""A delegated network cannot beat one agent seeing every signal.

Builds a two-observer network whose reports funnel through a single
decision node, prices it, and compares against the centralized benchmark
that conditions on all exogenous signals jointly.  The gap is always
nonnegative; here it is strictly positive because the funnel discards
cross-checking information.
"""

from delnet import (
    DelegatedNetwork,
    Distribution,
    InformationState,
    JointModel,
    Kernel,
    LossMatrix,
    NetworkNode,
    Space,
    VariableSpec,
    bayes_risk,
    centralized_state,
    collapse_gap,
    network_loss,
    node_input_state,
    with_bayes_terminal,
)

# Ground truth: a binary label with two independent noisy looks at it.
y = Space.of_size("y", 2)
prior = Distribution.uniform(y)


def look(name):
    out = Space.of_size(name, 2)
    return VariableSpec(name, out, ("y",), Kernel.symmetric(y, 0.8, out))


model = JointModel(y, prior, (look("a"), look("b")))

# The network: observer a relays its signal through a noisy hop; the
# decider sees only that relay, not observer b at all.
hop = Kernel.symmetric(Space.of_size("a", 2), 0.9, Space.of_size("r", 2))
placeholder = Kernel.constant(hop.to_space, Distribution.uniform(y))
net = DelegatedNetwork(
    model,
    (NetworkNode("relay", ("a",), hop),
     NetworkNode("decide", ("relay",), placeholder, is_terminal=True)),
    (("relay", "decide"),))

# Replace the placeholder terminal rule with the Bayes-optimal one for the
# information actually reaching it, then price the network.
loss = LossMatrix.zero_one(y)
net = with_bayes_terminal(net, loss)
print("network loss:", f"{network_loss(net, loss):.6f}")

# What the decider actually knows: the posterior at its input.
decide_state = node_input_state(net, "decide")
for i, sig in enumerate(decide_state.alphabet.labels):
    print(f"  decider sees {sig}: posterior {decide_state.posteriors[i]}")

# The centralized benchmark conditions on (a, b) jointly.
central = centralized_state(net)
print("centralized value:", f"{bayes_risk(central, loss).value:.6f}")

report = collapse_gap(net, loss)
print(f"gap: {report.gap:.6f} "
      f"(network {report.network_loss:.6f} "
      f"vs centralized {report.centralized_value:.6f})")
assert report.gap > 0.0

# Routing observer b into the decision recovers the centralized value
# here: the relay noise on a's path never flips the combined decision.
wired = DelegatedNetwork(
    model,
    (NetworkNode("relay", ("a",), hop),
     NetworkNode("decide", ("relay", "b"),
                 Kernel.constant(Space.of_size("rb", 4),
                                 Distribution.uniform(y)),
                 is_terminal=True)),
    (("relay", "decide"),))
wired = with_bayes_terminal(wired, loss)
better = collapse_gap(wired, loss)
print(f"after wiring b to the decider: network {better.network_loss:.6f}, "
      f"gap {better.gap:.6f}")
assert better.network_loss < report.network_loss
assert better.gap >= -1e-12
