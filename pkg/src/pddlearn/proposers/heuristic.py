"""Fully offline learner: version-space-style semantics from executed steps.

Postconditions: the lifted add/delete deltas of successful executions,
intersected across executions. Preconditions: the intersection of lifted
pre-state atoms over successful executions, which starts as a superset of the
truth and shrinks as experience diversifies. Atoms mentioning objects that are
not arguments of the action are dropped when lifting.

Failures end episodes cheaply and are kept for contradiction detection (a
failing state in which every current candidate holds signals a precondition
outside the positive-conjunction space); they never delete candidates, since a
single failure cannot identify which conjunct was the culprit.
"""

from __future__ import annotations

import random
from collections import Counter

from ..belief import ProposedSemantics
from ..envs.base import APPLIED, NO_CHANGE, Observation
from ..pddl.model import (
    And,
    Atom,
    Condition,
    Constant,
    Domain,
    GroundAction,
    Literal,
    Problem,
    Variable,
)
from ..pddl.semantics import apply_effect, expand_exists, goal_conjunct_counts, holds
from ..planner.search import ground_actions
from .base import (
    ErrorPredictor,
    ProblemChecker,
    ProblemEdit,
    PredictedError,
    ProposerContext,
    ProposerError,
    SemanticsGenerator,
    TrajectorySampler,
    explain_failure,
    solves,
)


def lift_atom(atom: Atom, arg_to_param: dict[str, Variable]) -> Atom | None:
    """Replaces argument constants with parameter variables; None if any
    constant is not an argument of the action."""
    terms = []
    for t in atom.args:
        param = arg_to_param.get(t.name)
        if param is None:
            return None
        terms.append(param)
    return Atom(atom.predicate, tuple(terms))


class HeuristicLearner:
    """Accumulated transition experience shared by the heuristic roles."""

    def __init__(self, skeleton: Domain):
        self.skeleton = skeleton
        self.post_adds: dict[str, set[Atom]] = {}
        self.post_dels: dict[str, set[Atom]] = {}
        self.pre_candidates: dict[str, set[Atom]] = {}
        self.schema_successes: Counter = Counter()
        self.attempts: Counter = Counter()
        self.failed_states: dict[str, set[frozenset[Atom]]] = {}
        self.contradictions: list[tuple[GroundAction, frozenset[Atom]]] = []

    def known_failure(self, action: GroundAction, state: frozenset[Atom]) -> bool:
        """Whether an equivalent (lifted) state already failed for this schema."""
        failed = self.failed_states.get(action.name)
        if not failed:
            return False
        mapping = self._arg_map(action)
        if mapping is None:
            return False
        return frozenset(self._lift_state(state, mapping)) in failed

    def pattern_novelty(self, action: GroundAction, state: frozenset[Atom]) -> int:
        """Distance from this (action, state) to the nearest recorded failure.

        Higher means the situation looks less like anything that failed, so an
        unproven action is more worth probing here.
        """
        failed = self.failed_states.get(action.name)
        mapping = self._arg_map(action)
        if not failed or mapping is None:
            return 1_000_000
        pattern = frozenset(self._lift_state(state, mapping))
        return min(len(pattern ^ f) for f in failed)

    def _arg_map(self, action: GroundAction) -> dict[str, Variable] | None:
        schema = self.skeleton.action_map.get(action.name)
        if schema is None or len(schema.params) != len(action.args):
            return None
        mapping: dict[str, Variable] = {}
        for param, arg in zip(schema.params, action.args):
            mapping.setdefault(arg, param)
        return mapping

    def _lift_state(self, atoms: frozenset[Atom],
                    arg_to_param: dict[str, Variable]) -> set[Atom]:
        out = set()
        for atom in atoms:
            lifted = lift_atom(atom, arg_to_param)
            if lifted is not None:
                out.add(lifted)
        return out

    def ingest(self, ctx: ProposerContext) -> None:
        """Consumes one iteration's executed steps (never re-fed)."""
        for i, action in enumerate(ctx.actions):
            self.attempts[str(action)] += 1
            mapping = self._arg_map(action)
            if mapping is None:
                continue
            pre = ctx.observations[i].atoms
            if ctx.statuses[i] == APPLIED and (ctx.mismatch_index is None
                                               or i < ctx.mismatch_index):
                post = ctx.observations[i + 1].atoms
                adds = self._lift_state(frozenset(post - pre), mapping)
                dels = self._lift_state(frozenset(pre - post), mapping)
                pre_lifted = self._lift_state(pre, mapping)
                name = action.name
                if name not in self.pre_candidates:
                    self.post_adds[name] = adds
                    self.post_dels[name] = dels
                    self.pre_candidates[name] = pre_lifted
                else:
                    self.post_adds[name] &= adds
                    self.post_dels[name] &= dels
                    self.pre_candidates[name] &= pre_lifted
                self.schema_successes[name] += 1
            elif ctx.statuses[i] == NO_CHANGE:
                pre_lifted = self._lift_state(pre, mapping)
                self.failed_states.setdefault(action.name, set()).add(
                    frozenset(pre_lifted))
                candidates = self.pre_candidates.get(action.name)
                if candidates is not None and candidates <= pre_lifted:
                    self.contradictions.append((action, frozenset(pre)))

    def ingest_transition(self, pre: frozenset[Atom], action: GroundAction,
                          post: frozenset[Atom] | None) -> None:
        """Feeds one raw transition (post=None marks a failed attempt)."""
        obs = [Observation(pre, ()), Observation(post if post is not None else pre, ())]
        ctx = ProposerContext(domain=self.skeleton, problem=_DUMMY_PROBLEM,
                              observations=obs, actions=[action],
                              statuses=[APPLIED if post is not None else NO_CHANGE])
        self.ingest(ctx)

    def hypotheses(self) -> ProposedSemantics:
        trees = []
        for schema in self.skeleton.actions:
            name = schema.name
            if name in self.pre_candidates:
                pre = And(tuple(sorted((Literal(a) for a in self.pre_candidates[name]),
                                       key=str)))
                post_lits = [Literal(a) for a in self.post_adds[name]]
                post_lits += [Literal(a, True) for a in self.post_dels[name]]
                post = And(tuple(sorted(post_lits, key=str)))
            else:
                pre, post = And(()), And(())
            trees.append((name, pre, post))
        return ProposedSemantics(tuple(trees))


_DUMMY_PROBLEM = Problem(name="scratch", domain_name="scratch", objects=(),
                         init=frozenset(), goal=And(()))


class HeuristicSemanticsGenerator(SemanticsGenerator):
    def __init__(self, learner: HeuristicLearner):
        self.learner = learner

    def generate(self, ctx: ProposerContext) -> ProposedSemantics:
        if not ctx.actions:
            raise ProposerError("semantics generation needs at least one executed step")
        self.learner.ingest(ctx)
        return self.learner.hypotheses()


class HeuristicSampler(TrajectorySampler):
    """Goal-directed random walk in belief space, biased toward novelty and
    any partial plan the planner produced."""

    def __init__(self, learner: HeuristicLearner, seed: int = 0,
                 max_len: int = 15, explore: float = 0.5):
        self.learner = learner
        self.max_len = max_len
        self.explore = explore
        self._rng = random.Random(f"{seed}/heuristic-sampler")

    def sample(self, ctx: ProposerContext) -> list[GroundAction]:
        domain, problem = ctx.domain, ctx.problem
        if ctx.partial_plan and solves(domain, problem, ctx.partial_plan):
            return list(ctx.partial_plan)

        grounded = ground_actions(domain, problem)
        if not grounded:
            raise ProposerError("no ground actions available")
        goal = expand_exists(problem.goal, domain, problem)
        state = problem.init
        traj: list[GroundAction] = []

        if ctx.partial_plan:
            by_str = {str(g.action): g for g in grounded}
            for action in ctx.partial_plan:
                g = by_str.get(str(action))
                if g is None or not holds(state, g.precondition):
                    break
                traj.append(g.action)
                state = apply_effect(state, g.effect)

        local_tries: dict[str, int] = {}
        while len(traj) < self.max_len:
            if holds(state, goal):
                break
            apps = [g for g in grounded if holds(state, g.precondition)]
            pool = apps or grounded
            fresh = [g for g in pool
                     if not self.learner.known_failure(g.action, state)]
            pool = fresh or pool
            if self._rng.random() < self.explore:
                choice = self._novel(pool, state, local_tries)
            else:
                choice = self._greedy(pool, state, domain, problem)
            local_tries[str(choice.action)] = local_tries.get(str(choice.action), 0) + 1
            traj.append(choice.action)
            state = apply_effect(state, choice.effect)

        if not traj:
            traj = [self._novel(grounded, problem.init, local_tries).action]
        return traj

    def _novel(self, pool, state, local_tries):
        # avoid re-attempting an action in a state it is already known to
        # fail in; among unproven candidates prefer the one whose situation
        # looks least like its recorded failures
        def key(g):
            name = str(g.action)
            return (1 if self.learner.known_failure(g.action, state) else 0,
                    self.learner.schema_successes.get(g.action.name, 0),
                    -self.learner.pattern_novelty(g.action, state),
                    self.learner.attempts.get(name, 0) + local_tries.get(name, 0),
                    name)
        best = min(key(g) for g in pool)[:4]
        ties = [g for g in pool if key(g)[:4] == best]
        return self._rng.choice(ties)

    def _greedy(self, pool, state, domain, problem):
        # among equally goal-advancing candidates, proven schemas execute
        # reliably and keep the episode alive
        proven = [g for g in pool
                  if self.learner.schema_successes.get(g.action.name, 0) > 0]
        pool = proven or pool

        def score(g):
            nxt = apply_effect(state, g.effect)
            sat, _ = goal_conjunct_counts(nxt, problem.goal, domain, problem)
            return sat
        top = max(score(g) for g in pool)
        ties = [g for g in pool if score(g) == top]
        return self._rng.choice(ties)


class HeuristicErrorPredictor(ErrorPredictor):
    def predict(self, ctx: ProposerContext) -> PredictedError:
        return explain_failure(ctx, ctx.domain)


class HeuristicChecker(ProblemChecker):
    """Reconciles the problem with observations without any truth access.

    The first observation of an episode is the visible slice of the initial
    state, so its diff against the declared init is trusted outright. Later
    observations contribute only atoms that mention a previously undeclared
    object: those are discoveries by exploration, not effect changes, which
    the believed (and possibly still empty) effect model cannot separate out.
    """

    def check(self, ctx: ProposerContext) -> ProblemEdit | None:
        first = ctx.observations[0]
        declared = {n for n, _ in ctx.problem.objects} | set(ctx.domain.constant_types)
        observed_objects = set()
        for obs in ctx.observations:
            observed_objects |= set(obs.objects)
        new_names = {n for n, _ in observed_objects} - declared
        objects = tuple(sorted((n, t) for n, t in observed_objects
                               if n in new_names))

        adds = set(first.atoms - ctx.problem.init)
        for obs in ctx.observations[1:]:
            for atom in obs.atoms - ctx.problem.init:
                if any(t.name in new_names for t in atom.args
                       if isinstance(t, Constant)):
                    adds.add(atom)
        removes: set[Atom] = set()
        for atom in ctx.problem.init - first.atoms:
            if self._fully_visible(atom, first):
                removes.add(atom)

        edit = ProblemEdit(tuple(sorted(adds, key=str)),
                           tuple(sorted(removes, key=str)), objects)
        return None if edit.empty else edit

    @staticmethod
    def _fully_visible(atom: Atom, obs) -> bool:
        known = {n for n, _ in obs.objects}
        return all(t.name in known for t in atom.args if isinstance(t, Constant))
