"""PDDL toolchain: types, parser, printer, execution semantics."""

from .model import (
    ActionSchema,
    And,
    Atom,
    Condition,
    Constant,
    Domain,
    Exists,
    GroundAction,
    Literal,
    Or,
    PddlError,
    PredicateDecl,
    Problem,
    ValidationError,
    Variable,
    When,
    condition_text,
    ground_atom,
    parse_atom_text,
    state_from,
    top_level_conjuncts,
    validate_problem,
)
from .parser import ParseError, parse_condition, parse_domain, parse_problem, read_sexprs
from .printer import print_domain, print_problem
from .semantics import (
    EvaluationError,
    applicable,
    apply_effect,
    execute,
    expand_exists,
    goal_conjunct_counts,
    ground,
    holds,
    substitute,
)

__all__ = [
    "ActionSchema", "And", "Atom", "Condition", "Constant", "Domain", "Exists",
    "GroundAction", "Literal", "Or", "PddlError", "PredicateDecl", "Problem",
    "ValidationError", "Variable", "When", "condition_text", "ground_atom",
    "parse_atom_text", "state_from", "top_level_conjuncts", "validate_problem",
    "ParseError", "parse_condition", "parse_domain", "parse_problem", "read_sexprs",
    "print_domain", "print_problem", "EvaluationError", "applicable", "apply_effect",
    "execute", "expand_exists", "goal_conjunct_counts", "ground", "holds", "substitute",
]
