"""The induction loop: sample a domain from beliefs, verify with the planner,
sample/prospect a trajectory, execute, explain, learn, repeat.

One iteration is one episode attempt. Termination: an executed goal-reaching
trajectory whose belief-derived domain the planner re-validates, or a reset /
step budget. In reset-free mode the problem file is re-derived from the
current observation before each iteration instead of resetting the world.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from ..belief import (
    BeliefConfig,
    BeliefMemory,
    best_domain,
    memory_records,
    sample_domain,
    update,
)
from ..envs.base import APPLIED, EPISODE_RESET, NO_CHANGE, Observation, SymbolicEnv, stepwise_check
from ..metrics import f1 as compute_f1
from ..pddl.model import (
    Condition,
    Domain,
    GroundAction,
    PddlError,
    Problem,
    condition_text,
)
from ..pddl.printer import print_domain, print_problem
from ..pddl.semantics import (
    apply_effect,
    expand_exists,
    goal_conjunct_counts,
    ground,
    holds,
)
from ..planner.search import PlannerConfig, PlanStatus, ground_actions, plan
from ..proposers.base import (
    ProposerContext,
    ProposerError,
    ProposerSet,
    apply_edit,
)
from . import trace as tr
from .goals import build_goal
from .trace import TraceWriter


class LoopError(PddlError):
    pass


class ProspectionError(LoopError):
    pass


@dataclass(frozen=True)
class LoopConfig:
    prospection_k: int = 5
    max_resets: int = 50
    max_executed_steps: int = 400
    max_iterations: int = 0          # 0 = derived from max_resets
    mode: str = "reset"              # "reset" | "reset_free"
    stepwise_detector: bool = False
    retrieval_corpus: str | None = None
    planner: PlannerConfig = field(default_factory=lambda: PlannerConfig())
    belief: BeliefConfig = field(default_factory=BeliefConfig)
    success_threshold: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.prospection_k < 0:
            raise LoopError("prospection_k must be >= 0")
        if self.max_resets <= 0 or self.max_executed_steps <= 0:
            raise LoopError("budgets must be > 0")
        if self.mode not in ("reset", "reset_free"):
            raise LoopError(f"unknown mode {self.mode!r}")

    @property
    def iteration_budget(self) -> int:
        return self.max_iterations or max(self.max_resets * 10, 100)


@dataclass(frozen=True)
class RunReport:
    success: bool
    nr: int
    nes: int
    iterations: int
    f1: float
    gc: float
    final_domain: str
    seed: int


def transcribe_problem(obs: Observation, goal: Condition, skeleton: Domain,
                       name: str) -> Problem:
    """Direct symbolic transcription of an observation into a problem file."""
    return Problem(name=name, domain_name=skeleton.name, objects=obs.objects,
                   init=obs.atoms, goal=goal)


def init_problem(obs: Observation, task_text: str, skeleton: Domain,
                 corpus_path: str | None = None, llm_goal_fn=None,
                 name: str = "task"):
    """Step-0 problem initialization: objects/init from the observation, goal
    from the task text (retrieval-assisted). The goal stays fixed afterwards."""
    object_names = {n for n, _ in obs.objects} | set(skeleton.constant_types)
    goal, exemplars = build_goal(task_text, object_names, skeleton,
                                 corpus_path=corpus_path, llm_goal_fn=llm_goal_fn)
    return transcribe_problem(obs, goal, skeleton, name), exemplars


def prospect(trajectory: list[GroundAction], domain: Domain, problem: Problem,
             k: int, rng: random.Random, attempts: int = 10) -> list[GroundAction]:
    """Repairs the first min(k, len) actions to be applicable in simulation.

    Inapplicable prefix actions are replaced by resampling among ground
    actions (bounded attempts per position, then the trajectory is truncated
    at the last valid prefix). If the original prefix is already valid the
    trajectory is returned unchanged. Finding nothing applicable at position
    0 raises.
    """
    if k <= 0 or not trajectory:
        return trajectory
    grounded = ground_actions(domain, problem)
    by_str = {str(g.action): g for g in grounded}
    state = problem.init
    limit = min(k, len(trajectory))
    out: list[GroundAction] = []
    changed = False
    for position in range(limit):
        action = trajectory[position]
        g = by_str.get(str(action))
        if g is not None and holds(state, g.precondition):
            out.append(action)
            state = apply_effect(state, g.effect)
            continue
        replacement = None
        order = rng.sample(range(len(grounded)), min(attempts, len(grounded))) \
            if grounded else []
        for idx in order:
            candidate = grounded[idx]
            if holds(state, candidate.precondition):
                replacement = candidate
                break
        if replacement is None:
            if position == 0:
                raise ProspectionError("no applicable action found for position 0")
            return out
        changed = True
        out.append(replacement.action)
        state = apply_effect(state, replacement.effect)
    if not changed:
        return trajectory
    out.extend(trajectory[limit:])
    return out


class Loop:
    """Mutable run state; one instance drives one seeded run."""

    def __init__(self, cfg: LoopConfig, env: SymbolicEnv, proposers: ProposerSet,
                 trace: TraceWriter, llm_goal_fn=None):
        self.cfg = cfg
        self.env = env
        self.proposers = proposers
        self.trace = trace
        self.llm_goal_fn = llm_goal_fn
        self.skeleton = env.domain_skeleton()
        self.memory = BeliefMemory()
        self.nr = 0
        self.nes = 0
        self.iteration = 0
        self.success = False
        self.gc = 0.0
        self._belief_rng = random.Random(f"{cfg.seed}/belief")
        self._prospect_rng = random.Random(f"{cfg.seed}/prospect")

        obs = env.reset()
        trace.emit(tr.ENV_RESET, cause="initial", counted=False)
        self.problem, exemplars = init_problem(
            obs, env.goal_text, self.skeleton, corpus_path=cfg.retrieval_corpus,
            llm_goal_fn=llm_goal_fn, name=env.task.id)
        self.initial_problem = self.problem
        self.goal = self.problem.goal
        if exemplars:
            trace.emit("goal_exemplars",
                       exemplars=[{"text": e.text, "goal": e.goal_text,
                                   "score": round(e.score, 6)} for e in exemplars])

    # -- helpers ---------------------------------------------------------------

    def _goal_probe(self, obs: Observation) -> bool:
        try:
            expanded = expand_exists(self.goal, self.skeleton, self.problem)
            return holds(obs.atoms, expanded)
        except PddlError:
            return False

    def _true_gc(self) -> float:
        sat, total = goal_conjunct_counts(
            self.env.true_state(), self.env.goal_condition(),
            self.env.ground_truth_domain(), self.env.truth_problem_at())
        return sat / total if total else 1.0

    def _learn(self, ctx: ProposerContext) -> None:
        proposal = self.proposers.generator.generate(ctx)
        self.trace.emit(tr.PROPOSED_SEMANTICS, iteration=self.iteration,
                        actions={a: {"pre": _ctext(pre), "post": _ctext(post)}
                                 for a, pre, post in proposal.trees})
        self.memory = update(self.memory, proposal, self.cfg.belief)
        self.trace.emit(tr.BELIEF_UPDATE, iteration=self.iteration,
                        leaves=memory_records(self.memory))

    def _validated_success(self) -> bool:
        """A belief-derived domain must let the planner re-derive a valid plan."""
        best = best_domain(self.memory, self.skeleton, self.cfg.success_threshold)
        try:
            result = plan(best, self.initial_problem, self.cfg.planner)
        except PddlError:
            return False
        return result.status is PlanStatus.COMPLETE

    def _reset_episode(self, cause: str, counted: bool) -> None:
        self.env.reset()
        if counted:
            self.nr += 1
        self.trace.emit(tr.ENV_RESET, cause=cause, counted=counted)

    def _well_formed(self, action: GroundAction) -> bool:
        schema = self.skeleton.action_map.get(action.name)
        if schema is None:
            return False
        try:
            ground(schema, action.args, self.skeleton, self.problem)
            return True
        except PddlError:
            return False

    def _apply_problem_edit(self, edit) -> None:
        self.problem = apply_edit(self.problem, edit, self.skeleton)
        self.trace.emit(tr.PROBLEM_EDIT, iteration=self.iteration,
                        add=[str(a) for a in edit.atoms_to_add],
                        remove=[str(a) for a in edit.atoms_to_remove],
                        objects=[list(o) for o in edit.objects_to_add])
        if self.cfg.mode == "reset":
            # episodes restart from the initial state, so the edited problem
            # is a better description of it
            self.initial_problem = self.problem
        else:
            objects = tuple(sorted(set(self.initial_problem.objects)
                                   | set(edit.objects_to_add)))
            self.initial_problem = Problem(
                name=self.initial_problem.name,
                domain_name=self.initial_problem.domain_name,
                objects=objects, init=self.initial_problem.init, goal=self.goal)

    # -- one pass --------------------------------------------------------------

    def run_iteration(self) -> None:
        self.iteration += 1
        cfg = self.cfg

        if cfg.mode == "reset_free" and self.iteration > 1:
            self.problem = transcribe_problem(self.env.observe(), self.goal,
                                              self.skeleton, self.env.task.id)

        sampled = sample_domain(self.memory, self.skeleton, self._belief_rng)
        self.trace.emit(tr.ITERATION_START, iteration=self.iteration,
                        domain=print_domain(sampled), problem=print_problem(self.problem))

        result = plan(sampled, self.problem, cfg.planner)
        self.trace.emit(tr.PLANNER_RESULT, iteration=self.iteration,
                        status=result.status.value,
                        plan=[str(a) for a in result.plan],
                        partial=[str(a) for a in result.partial],
                        satisfied=result.satisfied_goal_conjuncts,
                        total=result.total_goal_conjuncts)

        partial: list[GroundAction] | None = None
        if result.status is PlanStatus.COMPLETE:
            trajectory = list(result.plan)
            source = "planner"
        else:
            partial = list(result.partial)
            obs0 = self.env.observe()
            ctx0 = ProposerContext(domain=sampled, problem=self.problem,
                                   observations=[obs0], partial_plan=partial)
            try:
                trajectory = self.proposers.sampler.sample(ctx0)
            except ProposerError as exc:
                self.trace.emit("sampler_failed", iteration=self.iteration,
                                reason=str(exc))
                trajectory = []
            source = "sampler"

        prospected = False
        if trajectory:
            try:
                repaired = prospect(trajectory, sampled, self.problem,
                                    cfg.prospection_k, self._prospect_rng)
                prospected = repaired is not trajectory
                trajectory = repaired
            except ProspectionError as exc:
                self.trace.emit("prospection_failed", iteration=self.iteration,
                                reason=str(exc))
                trajectory = []
        self.trace.emit(tr.TRAJECTORY, iteration=self.iteration, source=source,
                        prospected=prospected, actions=[str(a) for a in trajectory])

        observations = [self.env.observe()]
        statuses: list[str] = []
        executed: list[GroundAction] = []
        mismatch_index: int | None = None
        goal_hit = False
        fatal_reset = False
        budget_stop = False

        for action in trajectory:
            if self.nes >= cfg.max_executed_steps:
                budget_stop = True
                break
            if not self._well_formed(action):
                self.trace.emit("malformed_action", iteration=self.iteration,
                                action=str(action))
                break
            feedback = self.env.step(action)
            self.nes += 1
            executed.append(action)
            statuses.append(feedback.status)
            observations.append(feedback.observation)
            self.trace.emit(tr.STEP, iteration=self.iteration,
                            index=len(executed) - 1, action=str(action),
                            status=feedback.status, goal_reached=feedback.goal_reached,
                            observation=sorted(str(a) for a in feedback.observation.atoms))
            if feedback.status == EPISODE_RESET:
                fatal_reset = True
                self.nr += 1
                self.trace.emit(tr.ENV_RESET, cause="fatal", counted=True)
                break
            if feedback.status == NO_CHANGE:
                break
            if cfg.stepwise_detector and feedback.status == APPLIED:
                ok = stepwise_check(observations[-2], action, observations[-1],
                                    sampled, self.problem)
                if not ok:
                    mismatch_index = len(executed) - 1
                    self.trace.emit(tr.MISMATCH, iteration=self.iteration,
                                    index=mismatch_index)
                    break
            if feedback.goal_reached:
                goal_hit = True
                break

        if not trajectory:
            goal_hit = self._goal_probe(observations[0])

        ctx = ProposerContext(domain=sampled, problem=self.problem,
                              observations=observations, actions=executed,
                              statuses=statuses, mismatch_index=mismatch_index,
                              partial_plan=partial, goal_reached=goal_hit)

        if goal_hit:
            if executed:
                self._learn(ctx)
            if self._validated_success():
                self.success = True
        elif budget_stop:
            pass  # surfaced as a terminal run status by run()
        else:
            edit = None
            try:
                edit = self.proposers.checker.check(ctx)
            except ProposerError as exc:
                self.trace.emit("checker_failed", iteration=self.iteration,
                                reason=str(exc))
            if edit is not None and not edit.empty:
                try:
                    self._apply_problem_edit(edit)
                except PddlError as exc:
                    self.trace.emit("edit_rejected", iteration=self.iteration,
                                    reason=str(exc))
                    edit = None
            else:
                edit = None
            # an accepted edit restarts trajectory sampling without learning
            if edit is None and executed:
                try:
                    error = self.proposers.error_predictor.predict(ctx)
                    ctx = ctx.with_error(error)
                    self.trace.emit(tr.PREDICTED_ERROR, iteration=self.iteration,
                                    kind=error.kind, index=error.failing_index,
                                    literals=list(error.literals), text=error.text)
                except ProposerError as exc:
                    self.trace.emit("error_prediction_failed",
                                    iteration=self.iteration, reason=str(exc))
                self._learn(ctx)

        self.gc = self._true_gc()
        self.trace.emit(tr.EPISODE_END, iteration=self.iteration, nr=self.nr,
                        nes=self.nes, gc=round(self.gc, 6),
                        goal_reached=goal_hit, success=self.success)

        if not self.success and not fatal_reset and cfg.mode == "reset":
            self._reset_episode(cause="episode_end" if not goal_hit
                                else "goal_reached_revalidation",
                                counted=not goal_hit)

    # -- whole run ---------------------------------------------------------------

    def run(self) -> RunReport:
        cfg = self.cfg
        while True:
            if self.success:
                break
            if self.nr >= cfg.max_resets:
                break
            if self.nes >= cfg.max_executed_steps:
                break
            if self.iteration >= cfg.iteration_budget:
                break
            self.run_iteration()

        best = best_domain(self.memory, self.skeleton, cfg.success_threshold)
        try:
            score = compute_f1(best, self.env.ground_truth_domain()).f1
        except PddlError:
            score = 0.0
        report = RunReport(success=self.success, nr=self.nr, nes=self.nes,
                           iterations=self.iteration, f1=round(score, 6),
                           gc=round(self.gc, 6), final_domain=print_domain(best),
                           seed=cfg.seed)
        self.trace.emit(tr.RUN_REPORT, success=report.success, nr=report.nr,
                        nes=report.nes, iterations=report.iterations,
                        f1=report.f1, gc=report.gc, seed=report.seed)
        return report


def _ctext(cond) -> str:
    return condition_text(cond)


def run(cfg: LoopConfig, env: SymbolicEnv, proposers: ProposerSet,
        trace: TraceWriter, llm_goal_fn=None) -> RunReport:
    return Loop(cfg, env, proposers, trace, llm_goal_fn=llm_goal_fn).run()
