"""Delegated decision networks: exact evaluation and the centralization bound.

A DelegatedNetwork is a DAG of stochastic processing nodes fed by exogenous
signals that are jointly distributed with a label variable.  Nodes never read
the label itself, only signals and upstream node outputs, so the terminal
action is conditionally independent of the label given the exogenous signals.
That makes the centralized Bayes risk on the full signal vector a lower bound
on the loss of any such network, whatever the intermediate rules do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .decision import InformationState, LossMatrix, bayes_risk
from .prob import (
    EnumerationLimitError,
    GraphError,
    InputError,
    JointModel,
    JointTable,
    Kernel,
    Space,
    attach_factor,
    enumeration_cap,
    full_joint,
)


@dataclass(frozen=True, eq=False)
class NetworkNode:
    """One processing stage: a stochastic rule over its ordered inputs.

    ``inputs`` name exogenous signals or upstream node ids; the rule's input
    alphabet is their row-major product in the declared order.
    """

    id: str
    inputs: tuple[str, ...]
    rule: Kernel
    is_terminal: bool = False

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if not self.id:
            raise InputError("node id must be nonempty")
        if not self.inputs:
            raise InputError(f"node {self.id!r} reads no inputs")
        if len(set(self.inputs)) != len(self.inputs):
            raise InputError(f"node {self.id!r} lists a duplicate input")

    @property
    def output_space(self) -> Space:
        return self.rule.to_space


@dataclass(frozen=True, eq=False)
class DelegatedNetwork:
    """Exogenous joint model plus a DAG of nodes, exactly one terminal."""

    exogenous: JointModel
    nodes: tuple[NetworkNode, ...]
    edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(self.nodes))
        object.__setattr__(self, "edges", tuple((str(a), str(b)) for a, b in self.edges))
        exo_names = set(self.exogenous.names)
        label = self.exogenous.label_space.name
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise GraphError("duplicate node ids")
        clash = set(ids) & exo_names
        if clash:
            raise GraphError(f"node ids {sorted(clash)} collide with exogenous names")
        terminals = [n.id for n in self.nodes if n.is_terminal]
        if len(terminals) != 1:
            raise GraphError(f"need exactly one terminal node, found {terminals!r}")
        id_set = set(ids)
        derived = set()
        for node in self.nodes:
            for name in node.inputs:
                if name == label:
                    raise GraphError(
                        f"node {node.id!r} reads the label variable {label!r} directly")
                if name in id_set:
                    derived.add((name, node.id))
                elif name not in exo_names:
                    raise GraphError(f"node {node.id!r} reads unknown input {name!r}")
        declared = set(self.edges)
        if declared != derived:
            raise GraphError(
                f"declared edges {sorted(declared)} do not match the edges implied "
                f"by node inputs {sorted(derived)}"
            )
        self._toposort()  # raises on cycles
        space_of = self._space_of()
        for node in self.nodes:
            want = math.prod(space_of[name].size for name in node.inputs)
            if node.rule.rows.shape[0] != want:
                raise InputError(
                    f"node {node.id!r}: rule has {node.rule.rows.shape[0]} input rows, "
                    f"expected {want} for inputs {node.inputs!r}"
                )

    def _space_of(self) -> dict[str, Space]:
        out = {n: sp for n, sp in zip(self.exogenous.names, self.exogenous.spaces)}
        out.update({node.id: node.output_space for node in self.nodes})
        return out

    def _toposort(self) -> list[NetworkNode]:
        """Kahn's algorithm over node-to-node edges, declaration order on ties."""
        by_id = {n.id: n for n in self.nodes}
        indeg = {n.id: 0 for n in self.nodes}
        consumers: dict[str, list[str]] = {n.id: [] for n in self.nodes}
        for src, dst in sorted(set(self.edges)):
            indeg[dst] += 1
            consumers[src].append(dst)
        ready = [n.id for n in self.nodes if indeg[n.id] == 0]
        order = []
        while ready:
            nid = ready.pop(0)
            order.append(by_id[nid])
            for dst in consumers[nid]:
                indeg[dst] -= 1
                if indeg[dst] == 0:
                    ready.append(dst)
            ready.sort(key=lambda x: self.nodes.index(by_id[x]))
        if len(order) != len(self.nodes):
            stuck = sorted(set(by_id) - {n.id for n in order})
            raise GraphError(f"network graph has a cycle through {stuck}")
        return order

    @property
    def terminal(self) -> NetworkNode:
        return next(n for n in self.nodes if n.is_terminal)


def _joint_with_nodes(net: DelegatedNetwork, targets: Sequence[str],
                      cap: int | None) -> JointTable:
    """Joint over the label, every exogenous signal, and the target nodes.

    Evaluates only ancestors of the targets; intermediate node outputs are
    summed out as soon as no unprocessed consumer needs them.  The cell cap
    applies to every intermediate table.
    """
    cap_val = enumeration_cap(cap)
    targets = set(targets)
    by_id = {n.id: n for n in net.nodes}
    unknown = targets - set(by_id)
    if unknown:
        raise InputError(f"unknown node ids {sorted(unknown)}")
    order = net._toposort()
    needed = set(targets)
    for node in reversed(order):
        if node.id in needed:
            needed.update(name for name in node.inputs if name in by_id)
    pending = [n for n in order if n.id in needed]

    base = full_joint(net.exogenous, cap_val)
    names = list(base.names)
    spaces = list(base.spaces)
    arr = np.asarray(base.table)
    axis_of = {n: i for i, n in enumerate(names)}
    card_of = {n: sp.size for n, sp in zip(names, spaces)}

    remaining_consumers = {
        nid: sum(1 for p in pending if nid in p.inputs) for nid in by_id
    }
    for node in pending:
        if arr.size * node.output_space.size > cap_val:
            raise EnumerationLimitError(arr.size * node.output_space.size, cap_val,
                                        what=f"joint at node {node.id!r}")
        arr = attach_factor(arr, axis_of, card_of, node.inputs, node.rule.rows)
        names.append(node.id)
        spaces.append(node.output_space)
        axis_of[node.id] = arr.ndim - 1
        card_of[node.id] = node.output_space.size
        # Retire upstream node outputs nothing else will read.
        for name in node.inputs:
            if name in by_id:
                remaining_consumers[name] -= 1
        drop = [n for n in names
                if n in by_id and n not in targets
                and remaining_consumers[n] == 0 and n in axis_of]
        for name in drop:
            ax = axis_of.pop(name)
            arr = arr.sum(axis=ax)
            names.remove(name)
            spaces.pop(ax)
            axis_of = {n: (i if i < ax else i - 1) for n, i in axis_of.items()}
    return JointTable(tuple(names), tuple(spaces), arr)


def terminal_joint(net: DelegatedNetwork, cap: int | None = None) -> JointTable:
    """Exact joint over (label, exogenous signals, terminal output)."""
    return _joint_with_nodes(net, [net.terminal.id], cap)


def network_loss(net: DelegatedNetwork, loss: LossMatrix,
                 cap: int | None = None) -> float:
    """Expected loss of the terminal output against the label.

    The terminal output alphabet is identified with the action set
    positionally; sizes must match.
    """
    term = net.terminal
    label = net.exogenous.label_space
    if loss.actions.size != term.output_space.size:
        raise InputError(
            f"loss has {loss.actions.size} actions but terminal node {term.id!r} "
            f"emits {term.output_space.size} symbols"
        )
    if loss.labels.size != label.size:
        raise InputError("loss label space does not match the network label space")
    joint = terminal_joint(net, cap).marginal((label.name, term.id))
    return float(np.einsum("ya,ay->", joint.table, loss.values))


@dataclass(frozen=True, eq=False)
class CollapseReport:
    """Network loss vs the centralized Bayes risk on all exogenous signals."""

    network_loss: float
    centralized_value: float

    @property
    def gap(self) -> float:
        return self.network_loss - self.centralized_value


def centralized_state(net: DelegatedNetwork, cap: int | None = None) -> InformationState:
    """Information state of an agent seeing every exogenous signal at once."""
    model = net.exogenous
    if not model.variables:
        raise InputError("network has no exogenous signals")
    joint = full_joint(model, cap)
    signals = tuple(v.name for v in model.variables)
    return InformationState.from_joint(joint, model.label_space.name, signals,
                                       name="exogenous")


def collapse_gap(net: DelegatedNetwork, loss: LossMatrix,
                 cap: int | None = None) -> CollapseReport:
    """Certify the centralization bound for one network and loss.

    The gap is nonnegative up to roundoff for every delegated network,
    because the terminal action is conditionally independent of the label
    given the exogenous signals.
    """
    value = network_loss(net, loss, cap)
    central = bayes_risk(centralized_state(net, cap), loss).value
    return CollapseReport(value, central)


def node_input_state(net: DelegatedNetwork, node_id: str,
                     cap: int | None = None) -> InformationState:
    """Information state of the named node's (joint) input."""
    node = next((n for n in net.nodes if n.id == node_id), None)
    if node is None:
        raise InputError(f"no node named {node_id!r}")
    upstream = [name for name in node.inputs if name not in set(net.exogenous.names)]
    joint = _joint_with_nodes(net, upstream, cap)
    return InformationState.from_joint(joint, net.exogenous.label_space.name,
                                       node.inputs, name=f"{node_id}-input")


def with_bayes_terminal(net: DelegatedNetwork, loss: LossMatrix,
                        cap: int | None = None) -> DelegatedNetwork:
    """Replace the terminal rule by the Bayes policy on its input.

    The new terminal emits action indices (the loss's action space), which
    never increases network_loss relative to any stochastic terminal rule.
    """
    term = net.terminal
    state = node_input_state(net, term.id, cap)
    solution = bayes_risk(state, loss)
    rows = np.zeros((state.alphabet.size, loss.actions.size))
    rows[np.arange(rows.shape[0]), solution.actions] = 1.0
    rule = Kernel(state.alphabet, loss.actions, rows)
    nodes = tuple(replace(n, rule=rule) if n.id == term.id else n
                  for n in net.nodes)
    return DelegatedNetwork(net.exogenous, nodes, net.edges)
