"""Ground-truth-backed proposer implementations with injectable noise.

These peek at the environment's hidden domain and true state. They exist to
exercise the loop end to end without any model dependency and to provide the
upper-baseline trace the metrics are checked against.
"""

from __future__ import annotations

import random

from ..belief import BeliefMemory, ProposedSemantics, assemble_condition, condition_leaves
from ..envs.base import SymbolicEnv
from ..pddl.model import And, GroundAction, Problem
from ..planner.search import PlanStatus, PlannerConfig, plan
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


class OracleSampler(TrajectorySampler):
    """Returns the ground-truth plan, optionally corrupted at a seeded rate."""

    def __init__(self, env: SymbolicEnv, planner_cfg: PlannerConfig | None = None,
                 corruption_rate: float = 0.0, seed: int = 0):
        self.env = env
        self.planner_cfg = planner_cfg or PlannerConfig(time_budget=10.0)
        self.corruption_rate = corruption_rate
        self._rng = random.Random(f"{seed}/oracle-sampler")

    def sample(self, ctx: ProposerContext) -> list[GroundAction]:
        if ctx.partial_plan and solves(ctx.domain, ctx.problem, ctx.partial_plan):
            return list(ctx.partial_plan)
        truth = self.env.ground_truth_domain()
        state = self.env.true_state()
        if state == self.env.true_initial_state() and self.env.reference_plan():
            actions = list(self.env.reference_plan())
        else:
            result = plan(truth, self.env.truth_problem_at(state), self.planner_cfg)
            if result.status is not PlanStatus.COMPLETE:
                raise ProposerError(f"oracle cannot plan: {result.status.value}")
            actions = list(result.plan)
        if self.corruption_rate > 0.0:
            actions = self._corrupt(actions)
        if not actions:
            raise ProposerError("oracle produced an empty trajectory")
        return actions

    def _corrupt(self, actions: list[GroundAction]) -> list[GroundAction]:
        objects = [n for n, _ in self.env.task.objects]
        out = []
        for a in actions:
            if self._rng.random() < self.corruption_rate and objects:
                args = tuple(self._rng.choice(objects) for _ in a.args)
                out.append(GroundAction(a.name, args))
            else:
                out.append(a)
        return out


class OracleSemanticsGenerator(SemanticsGenerator):
    """Emits the hidden trees for every action; noise drops leaves at random."""

    def __init__(self, env: SymbolicEnv, noise_rate: float = 0.0, seed: int = 0):
        self.env = env
        self.noise_rate = noise_rate
        self._rng = random.Random(f"{seed}/oracle-semantics")

    def generate(self, ctx: ProposerContext) -> ProposedSemantics:
        trees = []
        for schema in self.env.ground_truth_domain().actions:
            pre, post = schema.precondition, schema.effect
            if self.noise_rate > 0.0:
                pre = self._drop_leaves(pre)
                post = self._drop_leaves(post)
            trees.append((schema.name, pre, post))
        return ProposedSemantics(tuple(trees))

    def _drop_leaves(self, cond):
        kept = [(chain, lit) for chain, lit in condition_leaves(cond)
                if self._rng.random() >= self.noise_rate]
        return assemble_condition(kept)


class OracleErrorPredictor(ErrorPredictor):
    def __init__(self, env: SymbolicEnv):
        self.env = env

    def predict(self, ctx: ProposerContext) -> PredictedError:
        return explain_failure(ctx, self.env.ground_truth_domain())


class OracleChecker(ProblemChecker):
    """Set-difference repair against the true initial state, restricted to
    what the agent has actually observed."""

    def __init__(self, env: SymbolicEnv):
        self.env = env

    def check(self, ctx: ProposerContext) -> ProblemEdit | None:
        true_init = self.env.true_initial_state()
        observed_atoms = frozenset().union(*(o.atoms for o in ctx.observations))
        observed_objects = set()
        for obs in ctx.observations:
            observed_objects |= set(obs.objects)
        declared = set(ctx.problem.objects)
        adds = tuple(sorted((true_init & observed_atoms) - ctx.problem.init, key=str))
        removes = tuple(sorted(ctx.problem.init - true_init, key=str))
        objects = tuple(sorted(observed_objects - declared))
        edit = ProblemEdit(adds, removes, objects)
        return None if edit.empty else edit
