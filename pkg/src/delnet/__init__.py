"""Exact finite-probability toolkit for delegated decision networks.

Builds discrete joint models, evaluates message-passing networks of
stochastic agents against a centralized Bayes baseline, optimizes
budget-constrained encoders, prices communication via proper scoring
rules, checks Blackwell dominance, and derives selective-review policies.
"""

from .blackwell import (
    DominanceCheck,
    DominanceDetectedError,
    Experiment,
    GarblingWitness,
    InfeasibilityCertificate,
    SeparatingLoss,
    SeparationNotFoundError,
    VerificationGain,
    is_dominated,
    separating_loss,
    verification_gain,
)
from .channels import (
    BudgetSpec,
    ChainDecomposition,
    ChainSpec,
    Encoder,
    EncoderSearchResult,
    TaxBreakdown,
    apply_encoder,
    chain_decomposition,
    communication_tax,
    optimal_encoder,
    optimal_values_by_budget,
)
from .decision import (
    BRIER_SCORE,
    LOG_SCORE,
    BayesSolution,
    InformationState,
    LossMatrix,
    ScoringRule,
    bayes_risk,
    conditional_mutual_information,
    divergence,
    posterior_risks,
    scoring_value,
    state_value,
)
from .network import (
    CollapseReport,
    DelegatedNetwork,
    NetworkNode,
    centralized_state,
    collapse_gap,
    network_loss,
    node_input_state,
    terminal_joint,
    with_bayes_terminal,
)
from .prob import (
    ConfigError,
    DelnetError,
    Distribution,
    EnumerationLimitError,
    GraphError,
    InputError,
    JointModel,
    JointTable,
    Kernel,
    NullEvidenceError,
    Space,
    VariableSpec,
    compose,
    full_joint,
    marginal,
    posterior,
    product_space,
)
from .review import (
    ESCALATE,
    FrontierPoint,
    ReviewPolicy,
    ReviewProblem,
    automated_risk,
    optimal_review,
    review_frontier,
)

__version__ = "0.1.0"
