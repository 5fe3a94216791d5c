"""Selective review: per-symbol choice between automating and escalating.

Each observed symbol h carries a minimum automated posterior risk R_a(h) and
an escalation loss R_h(h).  The optimal policy automates exactly where
R_a(h) <= R_h(h) and attains value E[min(R_a(H), R_h(H))].
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .decision import InformationState, LossMatrix, bayes_risk
from .prob import InputError

ESCALATE = -1


@dataclass(frozen=True, eq=False)
class ReviewProblem:
    """An information state, an action loss, and a per-symbol escalation loss."""

    state: InformationState
    loss: LossMatrix
    review_loss: np.ndarray

    def __post_init__(self):
        costs = np.asarray(self.review_loss, dtype=float)
        if costs.shape != (self.state.alphabet.size,):
            raise InputError(
                f"review_loss needs one entry per symbol: expected "
                f"{self.state.alphabet.size}, got shape {costs.shape}")
        if not np.all(np.isfinite(costs)) or np.any(costs < 0):
            raise InputError("review_loss entries must be finite and >= 0")
        if len(self.loss.labels) != self.state.label_space.size:
            raise InputError(
                f"loss is over {len(self.loss.labels)} labels but the state "
                f"has {self.state.label_space.size}")
        costs.setflags(write=False)
        object.__setattr__(self, "review_loss", costs)

    @classmethod
    def uniform_cost(cls, state, loss, cost):
        """Scalar shorthand: the same escalation loss for every symbol."""
        return cls(state, loss, np.full(state.alphabet.size, float(cost)))


@dataclass(frozen=True, eq=False)
class ReviewPolicy:
    """Per-symbol decision (action index, or ESCALATE) and its value."""

    actions: np.ndarray
    value: float
    escalation_mass: float

    @property
    def escalated(self):
        return self.actions == ESCALATE


@dataclass(frozen=True, eq=False)
class FrontierPoint:
    review_cost: float
    escalation_mass: float
    value: float


def automated_risk(problem):
    """Minimum posterior risk per symbol, with the attaining action recorded.

    Returns a BayesSolution: symbol_risks[h] = R_a(h), actions[h] the
    lowest-index minimizer, value their prior-weighted mean.
    """
    return bayes_risk(problem.state, problem.loss)


def optimal_review(problem):
    """Automate where R_a(h) <= R_h(h), escalate elsewhere.

    Ties go to automation; the value is E[min(R_a(H), R_h(H))], which no
    other (possibly randomized) symbol-measurable policy can beat.
    """
    auto = automated_risk(problem)
    escalate = auto.symbol_risks > problem.review_loss
    actions = np.where(escalate, ESCALATE, auto.actions)
    actions.setflags(write=False)
    weights = problem.state.weights
    value = float(weights @ np.minimum(auto.symbol_risks, problem.review_loss))
    mass = float(weights[escalate].sum())
    return ReviewPolicy(actions, value, mass)


def review_frontier(problem, costs):
    """Sweep a scalar escalation cost over ``costs``; one point per grid value.

    As the cost c rises, the optimal value is nondecreasing and the mass of
    escalated symbols is nonincreasing.
    """
    grid = np.asarray(costs, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InputError("cost grid must be a nonempty 1-d sequence")
    if not np.all(np.isfinite(grid)) or np.any(grid < 0):
        raise InputError("cost grid entries must be finite and >= 0")
    points = []
    for c in grid:
        at_c = dataclasses.replace(
            problem, review_loss=np.full(problem.state.alphabet.size, c))
        policy = optimal_review(at_c)
        points.append(FrontierPoint(float(c), policy.escalation_mass,
                                    policy.value))
    return tuple(points)
