"""Walk through the exact-inference primitives: spaces, kernels, posteriors.

Everything here is small enough to check by hand; the printed numbers are
exact up to float roundoff because all computation is dense enumeration.
"""

import numpy as np

from delnet import Distribution, InformationState, Kernel, Space, compose

# A label space with two weather states and a skewed prior.
weather = Space("w", ("dry", "rain"))
prior = Distribution(weather, [0.8, 0.2])
print("prior:", dict(zip(weather.labels, prior.probs)))

# A sensor that reports the weather with 90% fidelity.
sensor = Kernel.symmetric(weather, 0.9, Space.of_size("s", 2))
print("sensor rows:")
print(sensor.rows)

# Composing the sensor with a lossy relay gives the end-to-end channel.
relay = Kernel.symmetric(sensor.to_space, 0.8, Space.of_size("r", 2))
end_to_end = compose(sensor, relay)
print("end-to-end rows (0.9*0.8 + 0.1*0.2 on the diagonal):")
print(end_to_end.rows)

# An information state bundles the prior with the channel: it keeps the
# marginal weight of each signal and the posterior over labels given it.
state = InformationState.from_kernel(prior, end_to_end)
for i, signal in enumerate(state.alphabet.labels):
    w = state.weights[i]
    post = state.posteriors[i]
    print(f"signal {signal}: weight {w:.4f}, "
          f"posterior dry={post[0]:.4f} rain={post[1]:.4f}")

# The signal marginal and the label marginal both sum to one.
print("signal weights sum:", state.weights.sum())
print("label marginal:", state.label_marginal.probs)

# A point-mass prior makes every posterior collapse onto that label.
certain = InformationState.from_kernel(
    Distribution.point_mass(weather, "rain"), sensor)
print("posteriors under a point-mass prior:")
print(certain.posteriors)

# Deterministic kernels act as pure relabelings.
flip = Kernel.deterministic(weather, Space("f", ("yes", "no")), [1, 0])
print("deterministic flip rows:")
print(flip.rows)
assert np.allclose(flip.rows.sum(axis=1), 1.0)
