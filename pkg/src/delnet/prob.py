"""Exact finite probability: spaces, distributions, kernels, joint models.

Everything downstream (Bayes envelopes, Blackwell comparison, network
evaluation) reduces to sums over fully enumerated joint tables, so this module
is deliberately exact: no sampling, no approximation, just dense numpy arrays
over small product alphabets with an explicit cell cap.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

# Tolerances used across the package.
STRUCT_TOL = 1e-12  # stochasticity of rows / distributions
IDENT_TOL = 1e-9    # normalization of derived joints, identity checks

DEFAULT_CELL_CAP = 10_000_000
CELL_CAP_ENV = "DELNET_ENUM_CAP"


class DelnetError(Exception):
    """Base class for every error raised by this package."""


class InputError(DelnetError, ValueError):
    """An input violates a documented contract (shape, domain, naming)."""


class EnumerationLimitError(DelnetError):
    """An exact enumeration would exceed the configured cell cap."""

    def __init__(self, size: int, cap: int, what: str = "joint table",
                 remedy: str | None = None):
        self.size = size
        self.cap = cap
        if remedy is None:
            remedy = f"raise {CELL_CAP_ENV}, pass a higher cap, or restructure"
        super().__init__(
            f"{what}: size {size} exceeds the cap of {cap}; {remedy}")


class NullEvidenceError(DelnetError):
    """Conditioning on an event of probability zero."""


class GraphError(DelnetError):
    """A network graph is malformed (cycle, missing edge, bad reference)."""


class ConfigError(DelnetError):
    """A scenario config is malformed.  Carries a best-effort line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


def enumeration_cap(cap: int | None = None) -> int:
    """Resolve the exact-enumeration cell cap.

    Explicit argument wins, then the ``DELNET_ENUM_CAP`` environment
    variable, then the built-in default.
    """
    if cap is not None:
        cap = int(cap)
        if cap < 1:
            raise InputError("enumeration cap must be positive")
        return cap
    env = os.environ.get(CELL_CAP_ENV)
    if env is not None:
        try:
            return enumeration_cap(int(env))
        except ValueError as exc:
            raise InputError(f"{CELL_CAP_ENV}={env!r} is not an integer") from exc
    return DEFAULT_CELL_CAP


@dataclass(frozen=True)
class Space:
    """A named finite alphabet with ordered, distinct labels."""

    name: str
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.name:
            raise InputError("space name must be nonempty")
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise InputError(f"space {self.name!r} has no labels")
        if len(set(labels)) != len(labels):
            raise InputError(f"space {self.name!r} has duplicate labels")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str | int) -> int:
        """Resolve a label or an integer index to an index."""
        if isinstance(label, (int, np.integer)):
            i = int(label)
            if not 0 <= i < self.size:
                raise InputError(f"index {i} out of range for space {self.name!r}")
            return i
        try:
            return self.labels.index(label)
        except ValueError:
            raise InputError(f"label {label!r} not in space {self.name!r}") from None

    @staticmethod
    def of_size(name: str, n: int, prefix: str | None = None) -> "Space":
        if n < 1:
            raise InputError("space size must be at least 1")
        prefix = name if prefix is None else prefix
        return Space(name, tuple(f"{prefix}{i}" for i in range(n)))


def product_space(name: str, spaces: Sequence[Space]) -> Space:
    """Row-major product alphabet; labels join component labels with '|'."""
    if not spaces:
        raise InputError("product over no spaces")
    labels = [""]
    for sp in spaces:
        labels = [f"{a}|{b}" if a else b for a in labels for b in sp.labels]
    return Space(name, tuple(labels))


def _as_prob_vector(values, n: int | None, what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise InputError(f"{what} must be a vector")
    if n is not None and arr.shape[0] != n:
        raise InputError(f"{what} has length {arr.shape[0]}, expected {n}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{what} has non-finite entries")
    if arr.min(initial=0.0) < -STRUCT_TOL:
        raise InputError(f"{what} has negative entries")
    arr = np.where(arr < 0.0, 0.0, arr)  # clip roundoff-scale negatives only
    if abs(arr.sum() - 1.0) > STRUCT_TOL:
        raise InputError(f"{what} sums to {arr.sum()!r}, not 1")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Distribution:
    """A probability vector over a Space.  Entries >= 0, sum 1 within 1e-12."""

    space: Space
    probs: np.ndarray

    def __post_init__(self):
        arr = _as_prob_vector(self.probs, self.space.size,
                              f"distribution over {self.space.name!r}")
        object.__setattr__(self, "probs", arr)

    def __getitem__(self, label: str | int) -> float:
        return float(self.probs[self.space.index(label)])

    @property
    def support(self) -> np.ndarray:
        return self.probs > 0.0

    def allclose(self, other: "Distribution", tol: float = STRUCT_TOL) -> bool:
        return (self.space.size == other.space.size
                and bool(np.all(np.abs(self.probs - other.probs) <= tol)))

    @staticmethod
    def uniform(space: Space) -> "Distribution":
        return Distribution(space, np.full(space.size, 1.0 / space.size))

    @staticmethod
    def point_mass(space: Space, at: str | int) -> "Distribution":
        v = np.zeros(space.size)
        v[space.index(at)] = 1.0
        return Distribution(space, v)


@dataclass(frozen=True, eq=False)
class Kernel:
    """A row-stochastic matrix from one Space to another.

    ``rows[i, j] = P(to = j | from = i)``; every row sums to 1 within 1e-12.
    """

    from_space: Space
    to_space: Space
    rows: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.rows, dtype=float)
        if arr.shape != (self.from_space.size, self.to_space.size):
            raise InputError(
                f"kernel {self.from_space.name!r}->{self.to_space.name!r} has shape "
                f"{arr.shape}, expected {(self.from_space.size, self.to_space.size)}"
            )
        if not np.all(np.isfinite(arr)):
            raise InputError("kernel has non-finite entries")
        if arr.min(initial=0.0) < -STRUCT_TOL:
            raise InputError("kernel has negative entries")
        arr = np.where(arr < 0.0, 0.0, arr)
        bad = np.abs(arr.sum(axis=1) - 1.0) > STRUCT_TOL
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise InputError(f"kernel row {i} sums to {arr[i].sum()!r}, not 1")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "rows", arr)

    def row(self, i: str | int) -> Distribution:
        return Distribution(self.to_space, self.rows[self.from_space.index(i)])

    def then(self, other: "Kernel") -> "Kernel":
        return compose(self, other)

    def push(self, dist: Distribution) -> Distribution:
        """Marginal of the output when the input follows ``dist``."""
        if dist.space.size != self.from_space.size:
            raise InputError("distribution does not match kernel input space")
        return Distribution(self.to_space, dist.probs @ self.rows)

    @staticmethod
    def identity(space: Space) -> "Kernel":
        return Kernel(space, space, np.eye(space.size))

    @staticmethod
    def constant(from_space: Space, dist: Distribution) -> "Kernel":
        rows = np.tile(dist.probs, (from_space.size, 1))
        return Kernel(from_space, dist.space, rows)

    @staticmethod
    def deterministic(from_space: Space, to_space: Space,
                      mapping: Sequence[int]) -> "Kernel":
        if len(mapping) != from_space.size:
            raise InputError("mapping length must match the input space")
        rows = np.zeros((from_space.size, to_space.size))
        for i, j in enumerate(mapping):
            rows[i, to_space.index(j)] = 1.0
        return Kernel(from_space, to_space, rows)

    @staticmethod
    def symmetric(space: Space, fidelity: float,
                  to_space: Space | None = None) -> "Kernel":
        """Square channel keeping mass ``fidelity`` on the diagonal.

        The off-diagonal mass (1 - fidelity) is split evenly over the other
        symbols.  A one-symbol space only admits fidelity 1.
        """
        n = space.size
        if not 0.0 <= fidelity <= 1.0:
            raise InputError("fidelity must lie in [0, 1]")
        if n == 1:
            if fidelity != 1.0:
                raise InputError("a one-symbol space only admits fidelity 1")
            rows = np.ones((1, 1))
        else:
            off = (1.0 - fidelity) / (n - 1)
            rows = np.full((n, n), off)
            np.fill_diagonal(rows, fidelity)
        return Kernel(space, to_space if to_space is not None else space, rows)


def compose(first: Kernel, second: Kernel) -> Kernel:
    """Feed ``first``'s output into ``second``: rows = first.rows @ second.rows."""
    if first.to_space.size != second.from_space.size:
        raise InputError(
            f"cannot compose {first.to_space.name!r} (size {first.to_space.size}) "
            f"into {second.from_space.name!r} (size {second.from_space.size})"
        )
    return Kernel(first.from_space, second.to_space, first.rows @ second.rows)


@dataclass(frozen=True, eq=False)
class VariableSpec:
    """One exogenous variable: its space and a kernel from its parents.

    Parents are the label variable and/or earlier variables; the kernel's
    input space must have size equal to the product of the parents' sizes,
    rows indexed row-major in declared parent order.  A variable with no
    parents uses a one-row kernel (its marginal law).
    """

    name: str
    space: Space
    parents: tuple[str, ...]
    kernel: Kernel

    def __post_init__(self):
        object.__setattr__(self, "parents", tuple(self.parents))
        if self.kernel.to_space.size != self.space.size:
            raise InputError(f"variable {self.name!r}: kernel output size "
                             f"{self.kernel.to_space.size} != space size {self.space.size}")

    @staticmethod
    def root(name: str, dist: Distribution) -> "VariableSpec":
        unit = Space("unit", ("*",))
        return VariableSpec(name, dist.space, (),
                            Kernel(unit, dist.space, dist.probs[None, :]))


@dataclass(frozen=True, eq=False)
class JointModel:
    """A label prior plus conditionally specified variables, in order."""

    label_space: Space
    prior: Distribution
    variables: tuple[VariableSpec, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        if self.prior.space.size != self.label_space.size:
            raise InputError("prior does not match the label space")
        sizes = {self.label_space.name: self.label_space.size}
        for var in self.variables:
            if var.name in sizes:
                raise InputError(f"duplicate variable name {var.name!r}")
            expected = 1
            for p in var.parents:
                if p not in sizes:
                    raise InputError(
                        f"variable {var.name!r} lists parent {p!r}, which is not "
                        "the label variable or an earlier variable"
                    )
                expected *= sizes[p]
            if var.kernel.rows.shape[0] != expected:
                raise InputError(
                    f"variable {var.name!r}: kernel has {var.kernel.rows.shape[0]} "
                    f"rows, expected {expected} for parents {var.parents!r}"
                )
            sizes[var.name] = var.space.size

    @property
    def names(self) -> tuple[str, ...]:
        return (self.label_space.name,) + tuple(v.name for v in self.variables)

    @property
    def spaces(self) -> tuple[Space, ...]:
        return (self.label_space,) + tuple(v.space for v in self.variables)


@dataclass(frozen=True, eq=False)
class JointTable:
    """A dense joint probability table over named variables."""

    names: tuple[str, ...]
    spaces: tuple[Space, ...]
    table: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "spaces", tuple(self.spaces))
        if len(self.names) != len(self.spaces) or not self.names:
            raise InputError("names and spaces must align and be nonempty")
        if len(set(self.names)) != len(self.names):
            raise InputError("duplicate variable names in joint table")
        arr = np.asarray(self.table, dtype=float)
        shape = tuple(sp.size for sp in self.spaces)
        if arr.shape != shape:
            raise InputError(f"table shape {arr.shape} != alphabet sizes {shape}")
        if not np.all(np.isfinite(arr)):
            raise InputError("joint table has non-finite entries")
        if arr.min(initial=0.0) < -STRUCT_TOL:
            raise InputError("joint table has negative entries")
        arr = np.where(arr < 0.0, 0.0, arr)
        if abs(arr.sum() - 1.0) > IDENT_TOL:
            raise InputError(f"joint table sums to {arr.sum()!r}, not 1")
        arr.setflags(write=False)
        object.__setattr__(self, "table", arr)

    def axis(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise InputError(f"no variable named {name!r} in joint table") from None

    def space(self, name: str) -> Space:
        return self.spaces[self.axis(name)]

    def prob(self, assignment: Mapping[str, str | int]) -> float:
        """Probability of a full assignment (one label per variable)."""
        if set(assignment) != set(self.names):
            raise InputError("assignment must cover exactly the table's variables")
        idx = tuple(self.spaces[i].index(assignment[n])
                    for i, n in enumerate(self.names))
        return float(self.table[idx])

    def as_dict(self) -> dict[tuple[str, ...], float]:
        out = {}
        for idx in np.ndindex(*self.table.shape):
            key = tuple(sp.labels[i] for sp, i in zip(self.spaces, idx))
            out[key] = float(self.table[idx])
        return out

    def marginal(self, names: Sequence[str]) -> "JointTable":
        return marginal(self, names)

    def condition(self, evidence: Mapping[str, str | int]) -> "JointTable":
        """Joint over the remaining variables given exact evidence.

        Raises NullEvidenceError when the evidence has probability zero.
        """
        if not evidence:
            return self
        keep, sel = [], [slice(None)] * len(self.names)
        for i, n in enumerate(self.names):
            if n in evidence:
                sel[i] = self.spaces[i].index(evidence[n])
            else:
                keep.append(i)
        extra = set(evidence) - set(self.names)
        if extra:
            raise InputError(f"evidence names {sorted(extra)} not in joint table")
        if not keep:
            raise InputError("cannot condition away every variable")
        sub = self.table[tuple(sel)]
        mass = float(sub.sum())
        if mass <= 0.0:
            raise NullEvidenceError(f"evidence {dict(evidence)!r} has probability zero")
        return JointTable(tuple(self.names[i] for i in keep),
                          tuple(self.spaces[i] for i in keep), sub / mass)


def attach_factor(arr: np.ndarray, axis_of: Mapping[str, int],
                  card_of: Mapping[str, int], parents: Sequence[str],
                  rows: np.ndarray) -> np.ndarray:
    """Append a conditional factor as a trailing axis of a joint array.

    ``rows`` is row-stochastic over the row-major product of ``parents``.
    The gather index broadcasts, so nothing bigger than the result is
    allocated.
    """
    flat = np.zeros((1,) * arr.ndim, dtype=np.intp)
    for p in parents:
        ax, c = axis_of[p], card_of[p]
        shape = [1] * arr.ndim
        shape[ax] = c
        flat = flat * c + np.arange(c, dtype=np.intp).reshape(shape)
    return arr[..., None] * rows[flat]


def full_joint(model: JointModel, cap: int | None = None) -> JointTable:
    """Enumerate the full joint table of a JointModel.

    Axes follow declaration order (label variable first).  The product of
    all alphabet sizes must not exceed the enumeration cap.
    """
    cap_val = enumeration_cap(cap)
    size = math.prod(sp.size for sp in model.spaces)
    if size > cap_val:
        raise EnumerationLimitError(size, cap_val)
    arr = model.prior.probs.copy()
    axis_of = {model.label_space.name: 0}
    card_of = {model.label_space.name: model.label_space.size}
    for var in model.variables:
        arr = attach_factor(arr, axis_of, card_of, var.parents, var.kernel.rows)
        axis_of[var.name] = arr.ndim - 1
        card_of[var.name] = var.space.size
    return JointTable(model.names, model.spaces, arr)


def marginal(joint: JointTable, names: Sequence[str]) -> JointTable:
    """Marginalize onto ``names``, axes reordered to the requested order."""
    names = tuple(names)
    if not names:
        raise InputError("marginal needs at least one variable")
    if len(set(names)) != len(names):
        raise InputError("duplicate names in marginal request")
    axes = [joint.axis(n) for n in names]
    drop = tuple(i for i in range(len(joint.names)) if i not in axes)
    table = joint.table.sum(axis=drop) if drop else joint.table
    kept = [n for n in joint.names if n in names]
    perm = [kept.index(n) for n in names]
    table = np.transpose(table, perm) if perm != list(range(len(perm))) else table
    return JointTable(names, tuple(joint.space(n) for n in names), table)


def posterior(model: JointModel | JointTable, target: str,
              given: Mapping[str, str | int], cap: int | None = None) -> Distribution:
    """Conditional law of ``target`` given exact evidence on other variables."""
    joint = full_joint(model, cap) if isinstance(model, JointModel) else model
    if target in given:
        raise InputError(f"target {target!r} cannot also be evidence")
    sub = joint.marginal((target,) + tuple(given)) if given else joint.marginal((target,))
    cond = sub.condition(dict(given)) if given else sub
    return Distribution(joint.space(target), cond.table)
