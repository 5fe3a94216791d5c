"""Blackwell comparison of finite experiments.

An experiment is a prior plus a signal kernel.  T dominates S when S's kernel
factors through T's via some row-stochastic channel; the check is a linear
feasibility problem over that channel.  When it fails, the Farkas certificate
converts mechanically into a bounded loss under which S's Bayes risk strictly
beats T's, so "not a garbling" is always witnessed by an actual decision
problem, and the claimed margin is re-verified through the Bayes envelope
before being returned.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .decision import InformationState, LossMatrix, bayes_risk
from .prob import (
    DelnetError,
    Distribution,
    InputError,
    JointTable,
    Kernel,
    Space,
    product_space,
)
from .simplex import solve_equality_feasibility

WITNESS_TOL = 1e-9      # max reconstruction error for a garbling witness
SEPARATION_MARGIN = 1e-7


class DominanceDetectedError(DelnetError):
    """separating_loss was asked to separate a dominated pair."""


class SeparationNotFoundError(DelnetError):
    """No verified separating loss was found (certificate and fallback)."""


@dataclass(frozen=True, eq=False)
class Experiment:
    """A prior over labels plus a signal kernel from the label space."""

    prior: Distribution
    kernel: Kernel

    def __post_init__(self):
        if self.kernel.from_space.size != self.prior.space.size:
            raise InputError("experiment kernel must read the label space")

    @property
    def label_space(self) -> Space:
        return self.prior.space

    @property
    def signal_space(self) -> Space:
        return self.kernel.to_space

    def state(self, name: str | None = None) -> InformationState:
        return InformationState.from_kernel(self.prior, self.kernel, name)


@dataclass(frozen=True, eq=False)
class GarblingWitness:
    """Row-stochastic channel with K_S = K_T @ channel up to ``residual``."""

    channel: Kernel
    residual: float


@dataclass(frozen=True, eq=False)
class InfeasibilityCertificate:
    """Farkas dual showing no garbling channel exists.

    ``label_weights[y, s]`` multiplies the matching constraint for signal s
    at label y (zero rows for excluded zero-prior labels); ``row_weights[t]``
    multiplies the stochasticity constraint of channel row t.  Feasible
    channels would force the certificate value to be nonpositive, yet it
    evaluates to ``violation`` > 0 on the actual pair.
    """

    label_weights: np.ndarray
    row_weights: np.ndarray
    violation: float
    excluded_labels: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class DominanceCheck:
    """Outcome of is_dominated: a witness or a certificate, never both."""

    dominated: bool
    witness: GarblingWitness | None
    certificate: InfeasibilityCertificate | None
    excluded_labels: tuple[int, ...]


def _same_prior(s: Experiment, t: Experiment) -> None:
    if s.label_space.size != t.label_space.size:
        raise InputError("experiments must share a label space")
    if not s.prior.allclose(t.prior):
        raise InputError("experiments must share one prior")


def is_dominated(s: Experiment, t: Experiment,
                 tol: float = WITNESS_TOL) -> DominanceCheck:
    """Does T Blackwell-dominate S (is S a garbling of T)?

    Zero-prior labels impose no constraint and are excluded (reported in the
    result).  On the feasible side the recovered channel is cleaned up to be
    exactly row-stochastic and must reproduce S's kernel within ``tol`` on
    every positive-prior row.
    """
    _same_prior(s, t)
    ks, kt = s.kernel.rows, t.kernel.rows
    ns, nt = s.signal_space.size, t.signal_space.size
    pos = np.flatnonzero(s.prior.probs > 0.0)
    excluded = tuple(int(i) for i in np.flatnonzero(s.prior.probs == 0.0))

    npos = pos.size
    A = np.zeros((npos * ns + nt, nt * ns))
    b = np.zeros(npos * ns + nt)
    for i, y in enumerate(pos):
        for sig in range(ns):
            row = i * ns + sig
            A[row, np.arange(nt) * ns + sig] = kt[y]
            b[row] = ks[y, sig]
    for tsig in range(nt):
        A[npos * ns + tsig, tsig * ns:(tsig + 1) * ns] = 1.0
        b[npos * ns + tsig] = 1.0

    result = solve_equality_feasibility(A, b)
    if result.feasible:
        g = np.maximum(result.x.reshape(nt, ns), 0.0)
        g /= g.sum(axis=1, keepdims=True)
        residual = float(np.abs(kt[pos] @ g - ks[pos]).max())
        if residual > tol:
            raise DelnetError(
                f"feasible garbling solve left residual {residual:.3e} above {tol:.1e}")
        channel = Kernel(t.signal_space, s.signal_space, g)
        return DominanceCheck(True, GarblingWitness(channel, residual), None, excluded)

    y = result.farkas
    lam = np.zeros((s.label_space.size, ns))
    lam[pos] = y[:npos * ns].reshape(npos, ns)
    mu = y[npos * ns:]
    violation = float((lam[pos] * ks[pos]).sum() + mu.sum())
    cert = InfeasibilityCertificate(lam, mu, violation, excluded)
    return DominanceCheck(False, None, cert, excluded)


@dataclass(frozen=True, eq=False)
class SeparatingLoss:
    """A decision problem on which S strictly beats T.

    ``margin`` is bayes_risk(T) - bayes_risk(S), recomputed through the
    Bayes envelope (not taken on faith from the certificate).
    """

    actions: Space
    loss: LossMatrix
    margin: float
    method: str  # "certificate" or "search"


def _verified_margin(s: Experiment, t: Experiment, loss: LossMatrix) -> float:
    vs = bayes_risk(s.state(), loss).value
    vt = bayes_risk(t.state(), loss).value
    return vt - vs


def _loss_from_certificate(s: Experiment,
                           cert: InfeasibilityCertificate) -> LossMatrix:
    """Certificate -> bounded loss with a unit value gap in exact arithmetic.

    Scaling the dual so its violation equals 1 and dividing the label weights
    by the prior yields a payoff u(signal, y) whose truthful use under S
    out-earns every decision rule applied to T by at least 1; subtracting
    from the payoff's maximum turns it into a nonnegative bounded loss with
    the same gap.
    """
    prior = s.prior.probs
    lam = cert.label_weights / cert.violation
    u = np.zeros((s.signal_space.size, prior.size))
    pos = prior > 0.0
    u[:, pos] = lam[pos].T / prior[pos]
    values = u.max() - u
    return LossMatrix(s.signal_space, s.label_space, values)


def separating_loss(s: Experiment, t: Experiment, *,
                    min_margin: float = SEPARATION_MARGIN,
                    attempts: int = 200, seed: int = 0) -> SeparatingLoss:
    """Build and verify a loss under which S strictly beats T.

    Raises DominanceDetectedError when T dominates S (no such loss exists),
    and SeparationNotFoundError when neither the certificate construction
    nor the randomized fallback clears ``min_margin``.
    """
    check = is_dominated(s, t)
    if check.dominated:
        raise DominanceDetectedError(
            "S is a garbling of T; every loss weakly favors T")

    loss = _loss_from_certificate(s, check.certificate)
    margin = _verified_margin(s, t, loss)
    if margin >= min_margin:
        return SeparatingLoss(loss.actions, loss, margin, "certificate")

    # Randomized fallback, still verified through the Bayes envelope.
    rng = np.random.default_rng(seed)
    best, best_loss = margin, loss
    ny = s.label_space.size
    for trial in range(attempts):
        n_act = int(rng.integers(2, s.signal_space.size + 2))
        actions = Space.of_size("a", n_act)
        cand = LossMatrix(actions, s.label_space,
                          rng.uniform(0.0, 1.0, size=(n_act, ny)))
        m = _verified_margin(s, t, cand)
        if m > best:
            best, best_loss = m, cand
        if best >= min_margin:
            return SeparatingLoss(best_loss.actions, best_loss, best, "search")
    raise SeparationNotFoundError(
        f"no loss with margin >= {min_margin:.1e} found; best margin {best:.3e}")


@dataclass(frozen=True, eq=False)
class VerificationGain:
    """Value of consulting an extra signal W next to a message M."""

    value_without: float
    value_with: float
    redundant: bool
    check: DominanceCheck

    @property
    def gain(self) -> float:
        return self.value_without - self.value_with


def verification_gain(joint, loss: LossMatrix) -> VerificationGain:
    """Bayes value of (M, W) versus M alone under one loss.

    ``joint`` is a dense array over (Y, M, W) (or a three-variable
    JointTable in that axis order).  The gain is nonnegative up to roundoff
    for every loss; it is zero for every loss exactly when the joint
    experiment (M, W) is Blackwell-redundant given M, which is decided by
    the dominance check and reported alongside the values.
    """
    if isinstance(joint, JointTable):
        arr = joint.table
        spaces = joint.spaces
    else:
        arr = np.asarray(joint, dtype=float)
        spaces = None
    if arr.ndim != 3:
        raise InputError("verification gain needs a joint over (Y, M, W)")
    if not np.all(np.isfinite(arr)) or arr.min(initial=0.0) < 0.0:
        raise InputError("joint must be finite and nonnegative")
    total = arr.sum()
    if abs(total - 1.0) > 1e-9:
        raise InputError(f"joint sums to {total!r}, not 1")
    arr = arr / total

    ny, nm, nw = arr.shape
    if spaces is not None:
        y_space, m_space, w_space = spaces
    else:
        y_space = Space.of_size("y", ny)
        m_space = Space.of_size("m", nm)
        w_space = Space.of_size("w", nw)
    if loss.labels.size != ny:
        raise InputError("loss label space does not match the joint")

    prior = arr.sum(axis=(1, 2))
    pos = prior > 0.0
    rows_m = np.full((ny, nm), 1.0 / nm)
    rows_mw = np.full((ny, nm * nw), 1.0 / (nm * nw))
    rows_m[pos] = arr.sum(axis=2)[pos] / prior[pos, None]
    rows_mw[pos] = arr.reshape(ny, nm * nw)[pos] / prior[pos, None]

    prior_dist = Distribution(y_space, prior)
    exp_m = Experiment(prior_dist, Kernel(y_space, m_space, rows_m))
    mw_space = product_space("m+w", [m_space, w_space])
    exp_mw = Experiment(prior_dist, Kernel(y_space, mw_space, rows_mw))

    value_without = bayes_risk(exp_m.state(), loss).value
    value_with = bayes_risk(exp_mw.state(), loss).value
    check = is_dominated(exp_mw, exp_m)
    return VerificationGain(value_without, value_with, check.dominated, check)
