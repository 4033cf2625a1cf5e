"""Pluggable inference roles: oracle, heuristic, and LLM-backed."""

from .base import (
    UNREACHED_GOAL,
    UNSATISFIED_PRECONDITION,
    ErrorPredictor,
    PredictedError,
    ProblemChecker,
    ProblemEdit,
    ProposerContext,
    ProposerError,
    ProposerSet,
    SemanticsGenerator,
    TrajectorySampler,
    apply_edit,
    explain_failure,
    simulate,
    solves,
)
from .heuristic import (
    HeuristicChecker,
    HeuristicErrorPredictor,
    HeuristicLearner,
    HeuristicSampler,
    HeuristicSemanticsGenerator,
    lift_atom,
)
from .llm import (
    ChatClient,
    LlmChecker,
    LlmEndpointConfig,
    LlmErrorPredictor,
    LlmSemanticsGenerator,
    LlmTrajectorySampler,
    llm_goal_condition,
    validate_templates,
)
from .oracle import (
    OracleChecker,
    OracleErrorPredictor,
    OracleSampler,
    OracleSemanticsGenerator,
)

__all__ = [
    "UNREACHED_GOAL", "UNSATISFIED_PRECONDITION", "ErrorPredictor",
    "PredictedError", "ProblemChecker", "ProblemEdit", "ProposerContext",
    "ProposerError", "ProposerSet", "SemanticsGenerator", "TrajectorySampler",
    "apply_edit", "explain_failure", "simulate", "solves",
    "HeuristicChecker", "HeuristicErrorPredictor", "HeuristicLearner",
    "HeuristicSampler", "HeuristicSemanticsGenerator", "lift_atom",
    "ChatClient", "LlmChecker", "LlmEndpointConfig", "LlmErrorPredictor",
    "LlmSemanticsGenerator", "LlmTrajectorySampler", "llm_goal_condition",
    "validate_templates", "OracleChecker", "OracleErrorPredictor",
    "OracleSampler", "OracleSemanticsGenerator",
]
