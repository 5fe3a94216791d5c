"""Decision objectives over finite posteriors.

A decision problem is a bounded loss matrix (actions x labels) or a proper
scoring rule (log or quadratic).  An InformationState is a finite mixture of
posteriors; its value under an objective is the Bayes envelope (expected
minimal posterior loss) or the expected proper score.  All logarithms are
natural; callers wanting bits divide by ln 2 at presentation time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .prob import (
    IDENT_TOL,
    STRUCT_TOL,
    Distribution,
    InputError,
    JointTable,
    Kernel,
    Space,
    product_space,
)


def _xlogy(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """x * log(y) with the 0 * log(0) = 0 convention."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    out = np.zeros(np.broadcast(x, y).shape)
    mask = x != 0.0
    yb = np.broadcast_to(y, out.shape)
    xb = np.broadcast_to(x, out.shape)
    out[mask] = xb[mask] * np.log(yb[mask])
    return out


@dataclass(frozen=True, eq=False)
class LossMatrix:
    """Bounded loss ``values[a, y]`` for action a against label y."""

    actions: Space
    labels: Space
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != (self.actions.size, self.labels.size):
            raise InputError(
                f"loss shape {arr.shape} != (actions, labels) "
                f"{(self.actions.size, self.labels.size)}"
            )
        if not np.all(np.isfinite(arr)):
            raise InputError("loss has non-finite entries")
        if arr.min(initial=0.0) < 0.0:
            raise InputError("loss entries must be nonnegative")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    @property
    def bound(self) -> float:
        return float(self.values.max())

    @staticmethod
    def zero_one(labels: Space, actions: Space | None = None) -> "LossMatrix":
        """Misclassification loss.  Actions default to the label space itself."""
        actions = labels if actions is None else actions
        if actions.size != labels.size:
            raise InputError("zero-one loss needs one action per label")
        return LossMatrix(actions, labels, 1.0 - np.eye(labels.size))


@dataclass(frozen=True)
class ScoringRule:
    """A strictly proper scoring rule, ``kind`` in {'log', 'brier'}.

    score(q, y) charges a forecast q when label y occurs:
      log:   -ln q(y)            (+inf when q(y) = 0)
      brier: sum_y' (q(y') - 1{y'=y})^2
    """

    kind: str

    def __post_init__(self):
        if self.kind not in ("log", "brier"):
            raise InputError(f"unknown scoring rule kind {self.kind!r}")

    def score(self, forecast, y: int) -> float:
        q = np.asarray(forecast, dtype=float)
        if self.kind == "log":
            qy = q[y]
            return math.inf if qy <= 0.0 else -math.log(qy)
        d = q.copy()
        d[y] -= 1.0
        return float(d @ d)

    def expected_score(self, truth, forecast) -> float:
        """sum_y p(y) score(q, y); +inf when log and q misses p's support."""
        p = np.asarray(truth, dtype=float)
        q = np.asarray(forecast, dtype=float)
        if p.shape != q.shape:
            raise InputError("distributions must share an alphabet")
        if self.kind == "log":
            if np.any((p > 0.0) & (q <= 0.0)):
                return math.inf
            return float(-_xlogy(p, q).sum())
        # E sum_y' (q - e_Y)^2 = |q|^2 - 2 <p, q> + 1
        return float(q @ q - 2.0 * (p @ q) + 1.0)

    def value_at(self, forecast) -> float:
        """Generalized entropy: the expected score of an honest forecast."""
        q = np.asarray(forecast, dtype=float)
        if self.kind == "log":
            return float(-_xlogy(q, q).sum())
        return float(1.0 - q @ q)


LOG_SCORE = ScoringRule("log")
BRIER_SCORE = ScoringRule("brier")


def divergence(rule: ScoringRule, p, q) -> float:
    """Scoring-rule divergence D(p, q) = E_p[score(q, Y) - score(p, Y)].

    Log gives Kullback-Leibler divergence, and returns math.inf when q lacks
    mass somewhere p has it.  Brier gives the squared Euclidean distance.
    Both are nonnegative; roundoff-scale negatives are clamped to 0.
    """
    pv = p.probs if isinstance(p, Distribution) else np.asarray(p, dtype=float)
    qv = q.probs if isinstance(q, Distribution) else np.asarray(q, dtype=float)
    if pv.shape != qv.shape:
        raise InputError("divergence needs distributions on one alphabet")
    if rule.kind == "log":
        if np.any((pv > 0.0) & (qv <= 0.0)):
            return math.inf
        mask = pv > 0.0
        val = float(np.sum(pv[mask] * np.log(pv[mask] / qv[mask])))
        return max(val, 0.0)
    d = pv - qv
    return float(d @ d)


@dataclass(frozen=True, eq=False)
class InformationState:
    """A weighted finite family of posteriors over one label space.

    ``weights[h]`` is the probability of symbol h; ``posteriors[h]`` is the
    conditional label law given h.  Zero-weight symbols keep a stochastic
    posterior row (constructors fill in the label marginal) so that every
    operation stays total.
    """

    name: str
    alphabet: Space
    label_space: Space
    weights: np.ndarray
    posteriors: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.shape != (self.alphabet.size,):
            raise InputError("weights must have one entry per symbol")
        if not np.all(np.isfinite(w)) or w.min(initial=0.0) < -STRUCT_TOL:
            raise InputError("weights must be finite and nonnegative")
        w = np.where(w < 0.0, 0.0, w)
        if abs(w.sum() - 1.0) > STRUCT_TOL:
            raise InputError(f"weights sum to {w.sum()!r}, not 1")
        post = np.asarray(self.posteriors, dtype=float)
        if post.shape != (self.alphabet.size, self.label_space.size):
            raise InputError(
                f"posteriors shape {post.shape} != "
                f"{(self.alphabet.size, self.label_space.size)}"
            )
        if not np.all(np.isfinite(post)) or post.min(initial=0.0) < -STRUCT_TOL:
            raise InputError("posteriors must be finite and nonnegative")
        post = np.where(post < 0.0, 0.0, post)
        bad = np.abs(post.sum(axis=1) - 1.0) > STRUCT_TOL
        if np.any(bad):
            i = int(np.flatnonzero(bad)[0])
            raise InputError(f"posterior row {i} sums to {post[i].sum()!r}, not 1")
        w.setflags(write=False)
        post.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "posteriors", post)

    @property
    def label_marginal(self) -> Distribution:
        """The implied prior over labels: the weight-mixture of posteriors."""
        return Distribution(self.label_space, self.weights @ self.posteriors)

    def joint(self) -> np.ndarray:
        """Joint array P(h, y) = weights[h] * posteriors[h, y]."""
        return self.weights[:, None] * self.posteriors

    @staticmethod
    def from_kernel(prior: Distribution, kernel: Kernel,
                    name: str | None = None) -> "InformationState":
        """State induced by observing ``kernel``'s output under ``prior``."""
        if kernel.from_space.size != prior.space.size:
            raise InputError("kernel input space does not match the prior")
        joint = prior.probs[:, None] * kernel.rows          # (y, h)
        w = joint.sum(axis=0)
        post = np.tile(prior.probs, (kernel.to_space.size, 1))
        pos = w > 0.0
        post[pos] = joint[:, pos].T / w[pos, None]
        return InformationState(name or kernel.to_space.name,
                                kernel.to_space, prior.space, w, post)

    @staticmethod
    def from_joint(joint: JointTable, label: str, signals: Sequence[str],
                   name: str | None = None) -> "InformationState":
        """State of jointly observing ``signals``, row-major in given order."""
        signals = tuple(signals)
        if not signals:
            raise InputError("need at least one signal variable")
        sub = joint.marginal((label,) + signals)
        ysize = sub.spaces[0].size
        flat = sub.table.reshape(ysize, -1)                 # (y, product signal)
        flat = flat / flat.sum()  # tables are 1e-9-normalized; states need 1e-12
        alpha = product_space(name or "+".join(signals),
                              [joint.space(s) for s in signals])
        w = flat.sum(axis=0)
        post = np.tile(flat.sum(axis=1), (alpha.size, 1))   # label marginal rows
        pos = w > 0.0
        post[pos] = flat[:, pos].T / w[pos, None]
        return InformationState(name or alpha.name, alpha,
                                joint.space(label), w, post)


@dataclass(frozen=True, eq=False)
class BayesSolution:
    """Bayes envelope of a state: value, per-symbol actions and risks."""

    value: float
    actions: np.ndarray       # action index per symbol (first minimizer)
    symbol_risks: np.ndarray  # min_a sum_y loss[a, y] * posterior[h, y]


def posterior_risks(state: InformationState, loss: LossMatrix) -> np.ndarray:
    """Expected-loss table Lambda[h, a] = sum_y loss[a, y] posterior[h, y]."""
    if loss.labels.size != state.label_space.size:
        raise InputError("loss label space does not match the state")
    return state.posteriors @ loss.values.T


def bayes_risk(state: InformationState, loss: LossMatrix) -> BayesSolution:
    """Minimal expected loss and the minimizing policy.

    Ties at a symbol resolve to the lowest action index (argmin order).
    """
    lam = posterior_risks(state, loss)
    actions = np.argmin(lam, axis=1)
    risks = lam[np.arange(lam.shape[0]), actions]
    return BayesSolution(float(state.weights @ risks), actions, risks)


def scoring_value(state: InformationState, rule: ScoringRule) -> float:
    """Expected proper score of honest forecasting, weight-averaged.

    Log gives the conditional label entropy given the symbol (in nats);
    brier gives E[1 - |posterior|^2].  Always finite.
    """
    post = state.posteriors
    if rule.kind == "log":
        per = -_xlogy(post, post).sum(axis=1)
    else:
        per = 1.0 - np.einsum("hy,hy->h", post, post)
    return float(state.weights @ per)


def state_value(state: InformationState, objective) -> float:
    """Value of a state under either objective kind."""
    if isinstance(objective, LossMatrix):
        return bayes_risk(state, objective).value
    if isinstance(objective, ScoringRule):
        return scoring_value(state, objective)
    raise InputError(f"unsupported objective {type(objective).__name__}")


def conditional_mutual_information(joint) -> float:
    """I(Y; H | M) in nats from a dense three-axis joint over (Y, H, M).

    Accepts a numpy array or a three-variable JointTable (axis order taken
    as given).  Mathematically nonnegative; the returned float may carry
    roundoff of order 1e-16.
    """
    if isinstance(joint, JointTable):
        arr = joint.table
    else:
        arr = np.asarray(joint, dtype=float)
    if arr.ndim != 3:
        raise InputError("conditional mutual information needs three axes (Y, H, M)")
    if not np.all(np.isfinite(arr)) or arr.min(initial=0.0) < 0.0:
        raise InputError("joint must be finite and nonnegative")
    total = arr.sum()
    if abs(total - 1.0) > IDENT_TOL:
        raise InputError(f"joint sums to {total!r}, not 1")
    p_m = arr.sum(axis=(0, 1))
    p_ym = arr.sum(axis=1)
    p_hm = arr.sum(axis=0)
    mask = arr > 0.0
    num = arr * p_m[None, None, :]
    den = p_ym[:, None, :] * p_hm[None, :, :]
    return float(np.sum(arr[mask] * np.log(num[mask] / den[mask])))
