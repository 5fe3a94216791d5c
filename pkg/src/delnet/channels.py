"""Budgeted interface design and the price of re-encoding.

apply_encoder pushes an information state through a message channel by
mixing posteriors.  optimal_encoder searches deterministic symbol partitions
for the best k-message interface; deterministic encoders suffice for the
optimum because a state's value under either objective kind is an infimum of
linear functionals of the channel, hence concave, hence minimized at a
vertex of the stochastic-encoder polytope.  communication_tax splits the
value lost through a channel into per-symbol divergences, and
chain_decomposition does the same stage by stage along a relay chain under
the log rule, where each stage's tax is a conditional mutual information.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .decision import (
    InformationState,
    LOG_SCORE,
    LossMatrix,
    ScoringRule,
    conditional_mutual_information,
    divergence,
    scoring_value,
    state_value,
)
from .prob import EnumerationLimitError, InputError, Kernel, Space

EXACT_SEARCH_LIMIT = 12  # alphabet size above which exact search refuses


@dataclass(frozen=True, eq=False)
class Encoder:
    """A message channel over a state's alphabet, possibly deterministic."""

    kernel: Kernel
    deterministic: bool

    @property
    def message_count(self) -> int:
        return self.kernel.to_space.size

    @staticmethod
    def identity(space: Space) -> "Encoder":
        return Encoder(Kernel.identity(space), True)

    @staticmethod
    def pool_all(space: Space) -> "Encoder":
        one = Space.of_size("m", 1)
        return Encoder(Kernel(space, one, np.ones((space.size, 1))), True)

    @staticmethod
    def from_partition(space: Space, assignment: Sequence[int]) -> "Encoder":
        """Deterministic encoder from a block assignment vector.

        Blocks must be numbered 0..k-1 with every number used (restricted
        growth normalization keeps encoders canonical and comparable).
        """
        assignment = tuple(int(a) for a in assignment)
        if len(assignment) != space.size:
            raise InputError("assignment length must match the alphabet")
        k = max(assignment) + 1
        if sorted(set(assignment)) != list(range(k)):
            raise InputError("blocks must be numbered 0..k-1 with no gaps")
        messages = Space.of_size("m", k)
        return Encoder(Kernel.deterministic(space, messages, assignment), True)


@dataclass(frozen=True)
class BudgetSpec:
    """Message budget: the encoder may emit at most ``k`` distinct symbols."""

    k: int

    def __post_init__(self):
        if self.k < 1:
            raise InputError("budget must allow at least one message")


@dataclass(frozen=True, eq=False)
class ChainSpec:
    """A relay chain: an initial state and kernels applied in sequence."""

    initial: InformationState
    kernels: tuple[Kernel, ...]

    def __post_init__(self):
        object.__setattr__(self, "kernels", tuple(self.kernels))
        if not self.kernels:
            raise InputError("chain needs at least one kernel")
        size = self.initial.alphabet.size
        for i, k in enumerate(self.kernels):
            if k.from_space.size != size:
                raise InputError(
                    f"chain stage {i}: kernel reads {k.from_space.size} symbols, "
                    f"upstream emits {size}"
                )
            size = k.to_space.size

    def states(self) -> list[InformationState]:
        out = [self.initial]
        for k in self.kernels:
            out.append(apply_encoder(out[-1], k))
        return out


def apply_encoder(state: InformationState, channel) -> InformationState:
    """Push a state through a channel; posteriors mix, information degrades.

    Zero-weight output symbols take the state's label marginal as their
    posterior.
    """
    kernel = channel.kernel if isinstance(channel, Encoder) else channel
    if kernel.from_space.size != state.alphabet.size:
        raise InputError("channel does not read the state's alphabet")
    joint = state.joint()                        # (h, y)
    out_joint = kernel.rows.T @ joint            # (m, y)
    w = out_joint.sum(axis=1)
    post = np.tile(state.label_marginal.probs, (kernel.to_space.size, 1))
    pos = w > 0.0
    post[pos] = out_joint[pos] / w[pos, None]
    return InformationState(kernel.to_space.name, kernel.to_space,
                            state.label_space, w, post)


def restricted_growth_strings(n: int, max_blocks: int) -> Iterator[tuple[int, ...]]:
    """All set partitions of n items into at most max_blocks blocks.

    Emitted as restricted growth strings: a[0] = 0 and each later entry is
    at most one above the running maximum.  Ordering is lexicographic.
    """
    if n < 1:
        raise InputError("need at least one item")
    if max_blocks < 1:
        raise InputError("need at least one block")
    a = [0] * n
    prefix_max = [0] * n
    while True:
        yield tuple(a)
        i = n - 1
        while i > 0 and a[i] >= min(prefix_max[i] + 1, max_blocks - 1):
            i -= 1
        if i == 0:
            return
        a[i] += 1
        run = max(prefix_max[i], a[i])
        for j in range(i + 1, n):
            a[j] = 0
            prefix_max[j] = run
        # prefix_max entries before i are unchanged; at i it is the old value.


def _partition_values(joint: np.ndarray, assignments: np.ndarray,
                      n_blocks: int, objective) -> np.ndarray:
    """Vectorized value of each partition in a same-block-count batch."""
    onehot = np.eye(n_blocks)[assignments]              # (n, symbols, blocks)
    merged = np.einsum("nhk,hy->nky", onehot, joint)
    if isinstance(objective, LossMatrix):
        lam = np.einsum("nmy,ay->nma", merged, objective.values)
        return lam.min(axis=2).sum(axis=1)
    w = merged.sum(axis=2)
    if objective.kind == "log":
        ent = np.zeros_like(merged)
        mask = merged > 0.0
        ent[mask] = merged[mask] * np.log(merged[mask])
        wl = np.zeros_like(w)
        wmask = w > 0.0
        wl[wmask] = w[wmask] * np.log(w[wmask])
        return wl.sum(axis=1) - ent.sum(axis=(1, 2))
    norms = np.einsum("nmy,nmy->nm", merged, merged)
    pos = w > 0.0
    out = np.where(pos, w, 1.0) - np.where(pos, norms / np.where(pos, w, 1.0), 0.0)
    return np.where(pos, out, 0.0).sum(axis=1)


@dataclass(frozen=True, eq=False)
class EncoderSearchResult:
    """Best encoder found, its value, and whether the search was exhaustive."""

    encoder: Encoder
    value: float
    assignment: tuple[int, ...]
    exact: bool


def _search_partitions(state: InformationState, max_blocks: int,
                       objective, batch: int = 512):
    """Exhaustive scan; returns (best value, best assignment) per block count."""
    n = state.alphabet.size
    joint = state.joint()
    best_value = np.full(max_blocks + 1, math.inf)
    best_assign: list[tuple[int, ...] | None] = [None] * (max_blocks + 1)
    buckets: dict[int, list[tuple[int, ...]]] = {}
    for rgs in restricted_growth_strings(n, max_blocks):
        k = max(rgs) + 1
        buckets.setdefault(k, []).append(rgs)
        if len(buckets[k]) >= batch:
            _flush_bucket(joint, buckets, k, objective, best_value, best_assign)
    for k in list(buckets):
        _flush_bucket(joint, buckets, k, objective, best_value, best_assign)
    return best_value, best_assign


def _flush_bucket(joint, buckets, k, objective, best_value, best_assign):
    batch = np.array(buckets.pop(k), dtype=np.intp)
    values = _partition_values(joint, batch, k, objective)
    i = int(np.argmin(values))
    if values[i] < best_value[k]:
        best_value[k] = float(values[i])
        best_assign[k] = tuple(int(x) for x in batch[i])


def optimal_encoder(state: InformationState, budget: BudgetSpec, objective, *,
                    exact_limit: int = EXACT_SEARCH_LIMIT,
                    method: str = "exact") -> EncoderSearchResult:
    """Best deterministic encoder within a message budget.

    method="exact" enumerates every partition of the alphabet into at most
    ``budget.k`` blocks (refusing alphabets above ``exact_limit``);
    method="greedy" does best-improvement pairwise merging from the identity
    and its result is flagged non-exact.  Ties prefer fewer messages, then
    enumeration order of the restricted growth strings.
    """
    _check_objective(objective)
    n = state.alphabet.size
    if method == "greedy":
        return _greedy_merge(state, budget, objective)
    if method != "exact":
        raise InputError(f"unknown search method {method!r}")
    if n > exact_limit:
        raise EnumerationLimitError(
            n, exact_limit, what="exact partition search",
            remedy="use method='greedy' (reported non-exact), raise "
                   "exact_limit, or shrink the alphabet")
    max_blocks = min(budget.k, n)
    best_value, best_assign = _search_partitions(state, max_blocks, objective)
    k = int(np.argmin(best_value[1:])) + 1
    assignment = best_assign[k]
    return EncoderSearchResult(
        Encoder.from_partition(state.alphabet, assignment),
        float(best_value[k]), assignment, True)


def optimal_values_by_budget(state: InformationState, objective, *,
                             exact_limit: int = EXACT_SEARCH_LIMIT) -> np.ndarray:
    """Exact optimum value for every budget k = 1..alphabet size, one scan.

    Entry k-1 is the best value over partitions into at most k blocks; the
    sequence is nonincreasing in k by construction.
    """
    _check_objective(objective)
    n = state.alphabet.size
    if n > exact_limit:
        raise EnumerationLimitError(
            n, exact_limit, what="exact partition search",
            remedy="raise exact_limit or shrink the alphabet")
    best_value, _ = _search_partitions(state, n, objective)
    return np.minimum.accumulate(best_value[1:])


def _check_objective(objective) -> None:
    if not isinstance(objective, (LossMatrix, ScoringRule)):
        raise InputError(f"unsupported objective {type(objective).__name__}")


def _greedy_merge(state: InformationState, budget: BudgetSpec,
                  objective) -> EncoderSearchResult:
    n = state.alphabet.size
    assignment = list(range(n))
    k = n
    joint = state.joint()
    while k > budget.k:
        candidates = []
        for a in range(k):
            for b in range(a + 1, k):
                merged = [x if x < b else (a if x == b else x - 1)
                          for x in assignment]
                candidates.append(merged)
        batch = np.array(candidates, dtype=np.intp)
        values = _partition_values(joint, batch, k - 1, objective)
        i = int(np.argmin(values))
        assignment = candidates[i]
        k -= 1
    assignment = _normalize_rgs(assignment)
    enc = Encoder.from_partition(state.alphabet, assignment)
    value = state_value(apply_encoder(state, enc), objective)
    return EncoderSearchResult(enc, value, assignment, False)


def _normalize_rgs(assignment: Sequence[int]) -> tuple[int, ...]:
    seen: dict[int, int] = {}
    out = []
    for a in assignment:
        if a not in seen:
            seen[a] = len(seen)
        out.append(seen[a])
    return tuple(out)


@dataclass(frozen=True, eq=False)
class TaxBreakdown:
    """Value lost through a channel and its posterior-divergence identity.

    gap = value_relayed - value_source equals expected_divergence exactly (up
    to roundoff) for proper scoring rules; under the log rule it also equals
    the conditional mutual information I(label; source | relayed), reported
    in ``conditional_mi`` (None for other rules).
    """

    value_source: float
    value_relayed: float
    expected_divergence: float
    conditional_mi: float | None

    @property
    def gap(self) -> float:
        return self.value_relayed - self.value_source


def communication_tax(state: InformationState, channel,
                      rule: ScoringRule) -> TaxBreakdown:
    """Price of re-encoding a state through a channel, under a proper rule."""
    if not isinstance(rule, ScoringRule):
        raise InputError("communication_tax needs a proper scoring rule")
    kernel = channel.kernel if isinstance(channel, Encoder) else channel
    relayed = apply_encoder(state, kernel)
    v_h = scoring_value(state, rule)
    v_m = scoring_value(relayed, rule)
    q = kernel.rows
    ediv = 0.0
    for h in range(state.alphabet.size):
        wh = state.weights[h]
        if wh == 0.0:
            continue
        for m in range(kernel.to_space.size):
            if q[h, m] > 0.0:
                ediv += wh * q[h, m] * divergence(rule, state.posteriors[h],
                                                  relayed.posteriors[m])
    cmi = None
    if rule.kind == "log":
        p = np.einsum("hy,hm->yhm", state.joint(), q)
        cmi = conditional_mutual_information(p)
    return TaxBreakdown(v_h, v_m, float(ediv), cmi)


@dataclass(frozen=True, eq=False)
class ChainDecomposition:
    """Stage-by-stage information taxes along a relay chain (log rule).

    ``stage_terms[i]`` is I(label; stage-i input | stage-i output); the terms
    telescope so their sum matches ``total_gap``, the end-to-end value
    difference, up to roundoff.
    """

    stage_values: tuple[float, ...]
    stage_terms: tuple[float, ...]

    @property
    def total_gap(self) -> float:
        return self.stage_values[-1] - self.stage_values[0]

    @property
    def term_sum(self) -> float:
        return float(sum(self.stage_terms))


def chain_decomposition(chain: ChainSpec) -> ChainDecomposition:
    """Split a chain's end-to-end log-rule tax into per-stage taxes."""
    states = chain.states()
    values = tuple(scoring_value(s, LOG_SCORE) for s in states)
    terms = []
    for i, kernel in enumerate(chain.kernels):
        p = np.einsum("hy,hm->yhm", states[i].joint(), kernel.rows)
        terms.append(conditional_mutual_information(p))
    return ChainDecomposition(values, tuple(terms))
