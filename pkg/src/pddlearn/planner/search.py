"""Forward state-space search under a candidate domain.

Greedy best-first on the goal-conjunct-count heuristic (default) or plain
breadth-first, with duplicate detection, a wall-clock budget, and a node
budget. When no complete plan is found, the result carries the best-effort
prefix: the path to the explored state satisfying the most top-level goal
conjuncts (ties: shortest prefix, then lexicographically smallest action
sequence).
"""

from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from enum import Enum

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
from ..pddl.semantics import (
    apply_effect,
    expand_exists,
    ground,
    holds,
)


class PlannerError(PddlError):
    pass


class PlanStatus(Enum):
    COMPLETE = "complete"
    PARTIAL = "partial"
    UNSOLVABLE = "unsolvable"
    BUDGET_EXHAUSTED = "budget_exhausted"


@dataclass(frozen=True)
class PlannerConfig:
    time_budget: float = 30.0
    node_budget: int = 1_000_000
    search_mode: str = "greedy"  # "greedy" | "breadth-first"

    def __post_init__(self):
        if self.time_budget <= 0:
            raise PlannerError("time_budget must be > 0")
        if self.node_budget <= 0:
            raise PlannerError("node_budget must be > 0")
        if self.search_mode not in ("greedy", "breadth-first"):
            raise PlannerError(f"unknown search_mode {self.search_mode!r}")


@dataclass(frozen=True)
class PlanResult:
    status: PlanStatus
    plan: tuple[GroundAction, ...] = ()
    partial: tuple[GroundAction, ...] = ()
    satisfied_goal_conjuncts: int = 0
    total_goal_conjuncts: int = 0
    nodes_expanded: int = 0

    @property
    def complete(self) -> bool:
        return self.status is PlanStatus.COMPLETE


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    failing_index: int | None = None
    reason: str | None = None  # "precondition" | "goal"


@dataclass
class _Grounded:
    action: GroundAction
    precondition: Condition
    effect: Condition


def ground_actions(domain: Domain, problem: Problem) -> list[_Grounded]:
    """All well-typed ground actions, statically pruned and sorted by name."""
    static_preds = _static_predicates(domain)
    init = problem.init
    out: list[_Grounded] = []
    for schema in domain.actions:
        pools = [problem.objects_of_type(p.type, domain) for p in schema.params]
        for combo in itertools.product(*pools):
            pre, eff = ground(schema, combo, domain, problem)
            if not _static_ok(pre, static_preds, init):
                continue
            out.append(_Grounded(GroundAction(schema.name, combo), pre, eff))
    out.sort(key=lambda g: str(g.action))
    return out


def _static_predicates(domain: Domain) -> frozenset[str]:
    changed: set[str] = set()

    def walk(c: Condition) -> None:
        if isinstance(c, Literal):
            changed.add(c.atom.predicate)
        elif hasattr(c, "children"):
            for ch in c.children:
                walk(ch)
        else:  # When
            walk(c.consequent)

    for a in domain.actions:
        walk(a.effect)
    return frozenset(p.name for p in domain.predicates) - frozenset(changed)


def _static_ok(pre: Condition, static_preds: frozenset[str],
               init: frozenset[Atom]) -> bool:
    for lit in conjunctive_literals(pre):
        if lit.atom.predicate in static_preds and lit.atom.is_ground:
            if (lit.atom in init) == lit.negated:
                return False
    return True


def _goal_checker(domain: Domain, problem: Problem):
    conjuncts = [expand_exists(c, domain, problem)
                 for c in top_level_conjuncts(problem.goal)]
    total = len(conjuncts)

    def satisfied(state: frozenset[Atom]) -> int:
        return sum(1 for c in conjuncts if holds(state, c))

    return satisfied, total


def plan(domain: Domain, problem: Problem, cfg: PlannerConfig | None = None) -> PlanResult:
    """Searches for an action sequence from the problem init to its goal."""
    cfg = cfg or PlannerConfig()
    validate_problem(problem, domain)

    satisfied_count, total = _goal_checker(domain, problem)
    init = problem.init
    init_sat = satisfied_count(init)
    if init_sat == total:
        return PlanResult(PlanStatus.COMPLETE, plan=(),
                          satisfied_goal_conjuncts=total, total_goal_conjuncts=total)

    grounded = ground_actions(domain, problem)
    deadline = time.monotonic() + cfg.time_budget

    # parent-pointer bookkeeping: state -> (parent_state, action)
    parents: dict[frozenset[Atom], tuple[frozenset[Atom] | None, GroundAction | None]] = {
        init: (None, None)}
    depth: dict[frozenset[Atom], int] = {init: 0}

    def path_to(state: frozenset[Atom]) -> tuple[GroundAction, ...]:
        actions: list[GroundAction] = []
        cur: frozenset[Atom] | None = state
        while cur is not None:
            parent, act = parents[cur]
            if act is not None:
                actions.append(act)
            cur = parent
        return tuple(reversed(actions))

    best_state = init
    best_key = (-init_sat, 0, ())

    def consider(state: frozenset[Atom], sat: int) -> None:
        nonlocal best_state, best_key
        key = (-sat, depth[state], tuple(str(a) for a in path_to(state)))
        if key < best_key:
            best_key = key
            best_state = state

    counter = itertools.count()
    use_heap = cfg.search_mode == "greedy"
    frontier: list = []
    if use_heap:
        heapq.heappush(frontier, (total - init_sat, next(counter), init))
    else:
        frontier = [init]
    expanded = 0

    def finish(status: PlanStatus) -> PlanResult:
        prefix = path_to(best_state)
        sat = -best_key[0]
        if status is PlanStatus.UNSOLVABLE and sat > init_sat:
            status = PlanStatus.PARTIAL
        return PlanResult(status, partial=prefix, satisfied_goal_conjuncts=sat,
                          total_goal_conjuncts=total, nodes_expanded=expanded)

    while frontier:
        if expanded >= cfg.node_budget or time.monotonic() > deadline:
            return finish(PlanStatus.BUDGET_EXHAUSTED)
        if use_heap:
            _, _, state = heapq.heappop(frontier)
        else:
            state = frontier.pop(0)
        expanded += 1
        for g in grounded:
            if not holds(state, g.precondition):
                continue
            succ = apply_effect(state, g.effect)
            if succ in parents:
                continue
            parents[succ] = (state, g.action)
            depth[succ] = depth[state] + 1
            sat = satisfied_count(succ)
            if sat == total:
                full = path_to(succ)
                return PlanResult(PlanStatus.COMPLETE, plan=full,
                                  satisfied_goal_conjuncts=total,
                                  total_goal_conjuncts=total, nodes_expanded=expanded)
            consider(succ, sat)
            if use_heap:
                heapq.heappush(frontier, (total - sat, next(counter), succ))
            else:
                frontier.append(succ)

    return finish(PlanStatus.UNSOLVABLE)


def validate_plan(domain: Domain, problem: Problem,
                  actions: list[GroundAction] | tuple[GroundAction, ...]) -> ValidationReport:
    """Checks applicability step by step, then goal satisfaction at the end."""
    state = problem.init
    for idx, action in enumerate(actions):
        schema = domain.action_map.get(action.name)
        if schema is None:
            raise PlannerError(f"unknown action {action.name}")
        try:
            pre, eff = ground(schema, action.args, domain, problem)
        except PddlError:
            return ValidationReport(False, idx, "precondition")
        if not holds(state, pre):
            return ValidationReport(False, idx, "precondition")
        state = apply_effect(state, eff)
    goal = expand_exists(problem.goal, domain, problem)
    if not holds(state, goal):
        return ValidationReport(False, len(actions), "goal")
    return ValidationReport(True)
