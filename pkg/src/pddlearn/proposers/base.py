"""The four pluggable inference roles of the loop.

Every role (trajectory sampler, semantics generator, error predictor, problem
checker) has oracle, heuristic, and LLM-backed implementations behind the same
interface, so the orchestrator runs identically whichever is plugged in.
"""

from __future__ import annotations

import abc
from dataclasses import dataclass, field, replace

from ..envs.base import APPLIED, Observation
from ..pddl.model import (
    Atom,
    Condition,
    Domain,
    GroundAction,
    Literal,
    PddlError,
    Problem,
    conjunctive_literals,
    top_level_conjuncts,
    validate_problem,
)
from ..pddl.semantics import apply_effect, expand_exists, ground, holds

UNSATISFIED_PRECONDITION = "unsatisfied_precondition"
UNREACHED_GOAL = "unreached_goal"


class ProposerError(PddlError):
    pass


@dataclass(frozen=True)
class PredictedError:
    kind: str
    failing_index: int | None
    literals: tuple[str, ...]   # violated literals / unmet goal conjuncts, as text
    text: str = ""

    def __post_init__(self):
        if self.kind == UNSATISFIED_PRECONDITION and self.failing_index is None:
            raise ProposerError("precondition errors need a failing index")
        if self.kind == UNREACHED_GOAL and not self.literals:
            raise ProposerError("goal errors need at least one unmet conjunct")


@dataclass(frozen=True)
class ProblemEdit:
    atoms_to_add: tuple[Atom, ...] = ()
    atoms_to_remove: tuple[Atom, ...] = ()
    objects_to_add: tuple[tuple[str, str], ...] = ()

    @property
    def empty(self) -> bool:
        return not (self.atoms_to_add or self.atoms_to_remove or self.objects_to_add)


def apply_edit(problem: Problem, edit: ProblemEdit, domain: Domain) -> Problem:
    """Applies an edit and re-validates; the goal is never touched here."""
    objects = tuple(sorted(set(problem.objects) | set(edit.objects_to_add)))
    init = (problem.init - frozenset(edit.atoms_to_remove)) | frozenset(edit.atoms_to_add)
    edited = Problem(name=problem.name, domain_name=problem.domain_name,
                     objects=objects, init=init, goal=problem.goal)
    validate_problem(edited, domain)
    return edited


@dataclass
class ProposerContext:
    """Everything a role may look at for one iteration."""

    domain: Domain                      # current sampled/believed domain
    problem: Problem
    observations: list[Observation]
    actions: list[GroundAction] = field(default_factory=list)
    statuses: list[str] = field(default_factory=list)
    mismatch_index: int | None = None
    partial_plan: list[GroundAction] | None = None
    predicted_error: PredictedError | None = None
    goal_reached: bool = False

    def __post_init__(self):
        if len(self.observations) != len(self.actions) + 1:
            raise ProposerError(
                f"history misaligned: {len(self.observations)} observations for "
                f"{len(self.actions)} actions")
        if len(self.statuses) != len(self.actions):
            raise ProposerError("one status per action required")

    def failing_index(self) -> int | None:
        if self.mismatch_index is not None:
            return self.mismatch_index
        for i, status in enumerate(self.statuses):
            if status != APPLIED:
                return i
        return None

    def with_error(self, error: PredictedError) -> "ProposerContext":
        return replace(self, predicted_error=error)


class TrajectorySampler(abc.ABC):
    @abc.abstractmethod
    def sample(self, ctx: ProposerContext) -> list[GroundAction]:
        ...


class SemanticsGenerator(abc.ABC):
    @abc.abstractmethod
    def generate(self, ctx: ProposerContext) -> "ProposedSemantics":
        ...


class ErrorPredictor(abc.ABC):
    @abc.abstractmethod
    def predict(self, ctx: ProposerContext) -> PredictedError:
        ...


class ProblemChecker(abc.ABC):
    @abc.abstractmethod
    def check(self, ctx: ProposerContext) -> ProblemEdit | None:
        ...


@dataclass
class ProposerSet:
    sampler: TrajectorySampler
    generator: SemanticsGenerator
    error_predictor: ErrorPredictor
    checker: ProblemChecker


# --------------------------------------------------------------------------
# Shared mechanics
# --------------------------------------------------------------------------

def scratch_problem(problem: Problem, observations: list[Observation],
                    init: frozenset[Atom]) -> Problem:
    """A problem over the union of declared and observed objects."""
    objects = set(problem.objects)
    for obs in observations:
        objects |= set(obs.objects)
    return Problem(name=problem.name, domain_name=problem.domain_name,
                   objects=tuple(sorted(objects)), init=init, goal=problem.goal)


def simulate(domain: Domain, problem: Problem,
             actions: list[GroundAction] | tuple[GroundAction, ...]) -> frozenset[Atom] | None:
    """Final state if every step is applicable under `domain`, else None."""
    state = problem.init
    for action in actions:
        schema = domain.action_map.get(action.name)
        if schema is None:
            return None
        try:
            pre, eff = ground(schema, action.args, domain, problem)
        except PddlError:
            return None
        if not holds(state, pre):
            return None
        state = apply_effect(state, eff)
    return state


def solves(domain: Domain, problem: Problem,
           actions: list[GroundAction] | tuple[GroundAction, ...]) -> bool:
    final = simulate(domain, problem, actions)
    if final is None:
        return False
    goal = expand_exists(problem.goal, domain, problem)
    return holds(final, goal)


def explain_failure(ctx: ProposerContext, domain: Domain) -> PredictedError:
    """Builds an error explanation by evaluating `domain` against the history.

    Oracles pass the hidden ground-truth domain; the heuristic role passes the
    believed one. Both produce the same report shape.
    """
    if ctx.goal_reached and ctx.failing_index() is None:
        raise ProposerError("no error to predict: the trajectory reached the goal")

    idx = ctx.failing_index()
    if idx is not None:
        action = ctx.actions[idx]
        pre_atoms = ctx.observations[idx].atoms
        schema = domain.action_map.get(action.name)
        literals: list[str] = []
        if schema is not None:
            base = scratch_problem(ctx.problem, ctx.observations, pre_atoms)
            try:
                pre, eff = ground(schema, action.args, domain, base)
                violated = [lit for lit in conjunctive_literals(pre)
                            if not holds(pre_atoms, lit)]
                literals = [str(lit) for lit in violated]
                if not literals and idx + 1 < len(ctx.observations):
                    predicted = apply_effect(pre_atoms, eff)
                    observed = ctx.observations[idx + 1].atoms
                    literals = sorted(str(Literal(a)) for a in predicted - observed)
                    literals += sorted(str(Literal(a, True)) for a in observed - predicted)
            except PddlError:
                literals = []
        text = (f"step {idx} {action} failed; "
                f"candidate violated conditions: {' '.join(literals) or 'unknown'}")
        return PredictedError(UNSATISFIED_PRECONDITION, idx, tuple(literals), text)

    final = ctx.observations[-1].atoms
    base = scratch_problem(ctx.problem, ctx.observations, final)
    unmet = []
    for conjunct in top_level_conjuncts(ctx.problem.goal):
        expanded = expand_exists(conjunct, domain, base)
        if not holds(final, expanded):
            from ..pddl.model import condition_text
            unmet.append(condition_text(conjunct))
    if not unmet:
        raise ProposerError("no error to predict: the goal holds in the final state")
    text = f"trajectory ended without reaching the goal; unmet: {' '.join(unmet)}"
    return PredictedError(UNREACHED_GOAL, None, tuple(unmet), text)
