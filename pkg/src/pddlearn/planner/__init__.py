"""Plan search, plan validation, and the external planner adapter."""

from .external import (
    ExternalPlanner,
    ExternalPlannerConfig,
    ExternalPlannerError,
    external_plan,
    parse_plan_file,
)
from .search import (
    PlanResult,
    PlanStatus,
    PlannerConfig,
    PlannerError,
    ValidationReport,
    ground_actions,
    plan,
    validate_plan,
)

__all__ = [
    "ExternalPlanner", "ExternalPlannerConfig", "ExternalPlannerError",
    "external_plan", "parse_plan_file", "PlanResult", "PlanStatus",
    "PlannerConfig", "PlannerError", "ValidationReport", "ground_actions",
    "plan", "validate_plan",
]
