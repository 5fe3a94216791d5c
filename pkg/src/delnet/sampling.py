"""Seeded random instances for sweeps and batteries.

Scenario runs and property batteries draw their random priors, kernels,
states, losses and networks from here so a single seed pins everything.
All draws use a caller-supplied numpy Generator; nothing touches global
random state.
"""

from __future__ import annotations

import numpy as np

from .decision import InformationState, LossMatrix
from .network import DelegatedNetwork, NetworkNode
from .prob import Distribution, InputError, JointModel, Kernel, Space, VariableSpec


def random_distribution(rng: np.random.Generator, space: Space) -> Distribution:
    return Distribution(space, rng.dirichlet(np.ones(space.size)))


def random_kernel(rng: np.random.Generator, from_space: Space,
                  to_space: Space) -> Kernel:
    rows = rng.dirichlet(np.ones(to_space.size), size=from_space.size)
    return Kernel(from_space, to_space, rows)


def random_state(rng: np.random.Generator, n_symbols: int, n_labels: int,
                 name: str = "h") -> InformationState:
    """Random weights and posteriors, both Dirichlet(1)."""
    alphabet = Space.of_size(name, n_symbols)
    labels = Space.of_size("y", n_labels)
    weights = rng.dirichlet(np.ones(n_symbols))
    posteriors = rng.dirichlet(np.ones(n_labels), size=n_symbols)
    return InformationState(name, alphabet, labels, weights, posteriors)


def random_loss(rng: np.random.Generator, n_actions: int, labels: Space,
                bound: float = 1.0) -> LossMatrix:
    actions = Space.of_size("a", n_actions)
    values = rng.uniform(0.0, bound, size=(n_actions, labels.size))
    return LossMatrix(actions, labels, values)


def random_stochastic_encoders(rng: np.random.Generator, count: int,
                               n_symbols: int, k: int) -> np.ndarray:
    """(count, n_symbols, k) batch of row-stochastic matrices, Dirichlet(1)."""
    g = rng.standard_gamma(1.0, size=(count, n_symbols, k))
    return g / g.sum(axis=2, keepdims=True)


def random_network(rng: np.random.Generator, *, max_nodes: int = 5,
                   max_card: int = 6, extra_exogenous: int = 1,
                   min_card: int = 2) -> DelegatedNetwork:
    """A random delegated network within the given size envelope.

    One shared signal is always present; up to ``extra_exogenous`` further
    exogenous signals may be drawn.  Node inputs are sampled from the
    exogenous signals and earlier nodes, so the graph is acyclic by
    construction.  The last node is terminal.
    """
    if max_nodes < 1:
        raise InputError("need at least one node")

    def card() -> int:
        return int(rng.integers(min_card, max_card + 1))

    label_space = Space.of_size("y", card())
    prior = random_distribution(rng, label_space)
    variables = []
    exo_names = []
    for i in range(1 + int(rng.integers(0, extra_exogenous + 1))):
        name = "b" if i == 0 else f"z{i}"
        space = Space.of_size(name, card())
        variables.append(VariableSpec(name, space, (label_space.name,),
                                      random_kernel(rng, label_space, space)))
        exo_names.append(name)
    model = JointModel(label_space, prior, tuple(variables))

    space_of = {v.name: v.space for v in variables}
    n_nodes = int(rng.integers(1, max_nodes + 1))
    nodes, edges = [], []
    sources = list(exo_names)
    for i in range(n_nodes):
        node_id = f"n{i + 1}"
        n_in = int(rng.integers(1, min(2, len(sources)) + 1))
        picked = rng.choice(len(sources), size=n_in, replace=False)
        inputs = tuple(sources[int(j)] for j in sorted(picked))
        in_size = 1
        for name in inputs:
            in_size *= space_of[name].size
        out_space = Space.of_size(node_id, card())
        rule = Kernel(Space.of_size("in", in_size), out_space,
                      rng.dirichlet(np.ones(out_space.size), size=in_size))
        nodes.append(NetworkNode(node_id, inputs, rule,
                                 is_terminal=(i == n_nodes - 1)))
        edges.extend((name, node_id) for name in inputs if name not in exo_names)
        space_of[node_id] = out_space
        sources.append(node_id)
    return DelegatedNetwork(model, tuple(nodes), tuple(edges))
