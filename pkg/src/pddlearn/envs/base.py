"""Symbolic environments with hidden ground-truth dynamics.

The agent-facing contract mirrors real execution: feedback never explains why
an action failed. Status is one of applied / no_change / episode_reset, plus
the current observation and a goal flag. The hidden domain, true state, and
reference plan are exposed separately for oracles and evaluation only.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

from ..pddl.model import (
    ActionSchema,
    And,
    Atom,
    Condition,
    Domain,
    GroundAction,
    PddlError,
    Problem,
    parse_atom_text,
    state_from,
)
from ..pddl.parser import parse_condition, parse_domain, read_sexprs
from ..pddl.semantics import (
    apply_effect,
    expand_exists,
    ground,
    holds,
)

APPLIED = "applied"
NO_CHANGE = "no_change"
EPISODE_RESET = "episode_reset"


class EnvError(PddlError):
    pass


@dataclass(frozen=True)
class Observation:
    atoms: frozenset[Atom]
    objects: tuple[tuple[str, str], ...]  # (name, type), sorted

    @property
    def text(self) -> str:
        objs = " ".join(f"{n}:{t}" for n, t in self.objects)
        atoms = " ".join(str(a) for a in sorted(self.atoms, key=str))
        return f"objects: {objs}\natoms: {atoms}"


@dataclass(frozen=True)
class ExecutionFeedback:
    step_index: int
    status: str
    observation: Observation
    goal_reached: bool


@dataclass(frozen=True)
class EnvConfig:
    env_id: str
    task_id: str
    observability: str = "full"      # "full" | "partial"
    noise_probability: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.noise_probability <= 1.0:
            raise EnvError("noise_probability must be in [0, 1]")
        if self.observability not in ("full", "partial"):
            raise EnvError(f"unknown observability {self.observability!r}")


@dataclass(frozen=True)
class TaskSpec:
    id: str
    domain: Domain
    objects: tuple[tuple[str, str], ...]
    init: frozenset[Atom]
    goal_text: str
    goal: Condition
    reference_plan: tuple[GroundAction, ...]


def _data_root():
    return resources.files("pddlearn.envs") / "data"


def load_task(env_id: str, task_id: str, data_dir: str | Path | None = None) -> TaskSpec:
    """Loads a declarative task file plus the hidden domain it references."""
    if data_dir is not None:
        base = Path(data_dir) / env_id
        task_path = base / f"{task_id}.yaml"
        if not task_path.exists():
            raise EnvError(f"unknown task {env_id}/{task_id}")
        raw = yaml.safe_load(task_path.read_text(encoding="utf-8"))
        domain_text = (base / raw["domain"]).read_text(encoding="utf-8")
    else:
        base = _data_root() / env_id
        task_res = base / f"{task_id}.yaml"
        try:
            raw = yaml.safe_load(task_res.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise EnvError(f"unknown task {env_id}/{task_id}") from None
        domain_text = (base / raw["domain"]).read_text(encoding="utf-8")

    domain = parse_domain(domain_text)
    objects: list[tuple[str, str]] = []
    for entry in raw["objects"]:
        parts = str(entry).split()
        if len(parts) == 1:
            objects.append((parts[0], "object"))
        elif len(parts) == 3 and parts[1] == "-":
            objects.append((parts[0], parts[2]))
        else:
            raise EnvError(f"bad object entry {entry!r}")
    init = frozenset(parse_atom_text(a) for a in raw["init"])
    goal = parse_condition(read_sexprs(raw["goal"])[0])
    plan = tuple(GroundAction.parse(p) for p in raw.get("reference_plan", []))
    return TaskSpec(id=raw["id"], domain=domain, objects=tuple(objects),
                    init=init, goal_text=" ".join(str(raw["goal_text"]).split()),
                    goal=goal, reference_plan=plan)


class SymbolicEnv:
    """Simulator around a hidden domain; subclasses add noise/fatal/visibility."""

    env_id = "base"

    def __init__(self, config: EnvConfig, task: TaskSpec):
        self.config = config
        self.task = task
        self._rng = random.Random(f"{config.seed}/{config.env_id}/{config.task_id}")
        self._truth_problem = Problem(
            name=task.id, domain_name=task.domain.name, objects=task.objects,
            init=task.init, goal=task.goal)
        self._state: frozenset[Atom] = task.init
        self._step_index = 0
        self._visited_atoms: set[Atom] = set()
        self.corrupted_steps = 0
        self.total_steps = 0
        self.noise_eligible_steps = 0

    # -- agent-facing surface -------------------------------------------------

    def reset(self) -> Observation:
        self._state = self.task.init
        self._step_index = 0
        self._visited_atoms = set()
        self._refresh_visibility()
        return self.observe()

    def observe(self) -> Observation:
        if self.config.observability == "full":
            atoms = self._state
        else:
            atoms = frozenset(self._visited_atoms)
        return Observation(atoms=atoms, objects=self._observed_objects(atoms))

    def step(self, action: GroundAction) -> ExecutionFeedback:
        schema = self.task.domain.action_map.get(action.name)
        if schema is None:
            raise EnvError(f"unknown action {action.name}")
        # malformed actions are rejected before execution, not silently absorbed
        pre, eff = ground(schema, action.args, self.task.domain, self._truth_problem)
        index = self._step_index
        self._step_index += 1
        self.total_steps += 1

        if not holds(self._state, pre):
            self._refresh_visibility()
            return ExecutionFeedback(index, NO_CHANGE, self.observe(), self._goal_reached())

        if self._is_fatal(action):
            self._state = self.task.init
            self._step_index = 0
            self._visited_atoms = set()
            self._refresh_visibility()
            return ExecutionFeedback(index, EPISODE_RESET, self.observe(), False)

        corrupted = self._corrupt_effect(action)
        if corrupted is not None:
            eff = corrupted
            self.corrupted_steps += 1
        self._state = apply_effect(self._state, eff)
        self._refresh_visibility()
        return ExecutionFeedback(index, APPLIED, self.observe(), self._goal_reached())

    def domain_skeleton(self) -> Domain:
        """Action signatures, predicates and types only; semantics stripped."""
        truth = self.task.domain
        actions = tuple(ActionSchema(a.name, a.params, And(()), And(()))
                        for a in truth.actions)
        return Domain(name=truth.name, actions=actions, predicates=truth.predicates,
                      types=truth.types, constants=truth.constants,
                      requirements=(":strips", ":typing") if truth.types else (":strips",))

    @property
    def goal_text(self) -> str:
        return self.task.goal_text

    # -- oracle/evaluation surface --------------------------------------------

    def ground_truth_domain(self) -> Domain:
        return self.task.domain

    def true_state(self) -> frozenset[Atom]:
        return self._state

    def true_initial_state(self) -> frozenset[Atom]:
        return self.task.init

    def goal_condition(self) -> Condition:
        return self.task.goal

    def reference_plan(self) -> tuple[GroundAction, ...]:
        return self.task.reference_plan

    def truth_problem_at(self, state: frozenset[Atom] | None = None) -> Problem:
        if state is None:
            return self._truth_problem
        return Problem(name=self.task.id, domain_name=self.task.domain.name,
                       objects=self.task.objects, init=state, goal=self.task.goal)

    # -- hooks ----------------------------------------------------------------

    def _corrupt_effect(self, action: GroundAction) -> Condition | None:
        return None

    def _is_fatal(self, action: GroundAction) -> bool:
        return False

    def _visible_atoms(self) -> frozenset[Atom]:
        return self._state

    def _refresh_visibility(self) -> None:
        if self.config.observability == "partial":
            self._visited_atoms |= self._visible_atoms()

    def _observed_objects(self, atoms: frozenset[Atom]) -> tuple[tuple[str, str], ...]:
        if self.config.observability == "full":
            return self.task.objects
        types = dict(self.task.objects) | self.task.domain.constant_types
        names = {t.name for a in atoms for t in a.args}
        return tuple(sorted((n, types[n]) for n in names if n in types))

    def _goal_reached(self) -> bool:
        goal = expand_exists(self.task.goal, self.task.domain, self._truth_problem)
        return holds(self._state, goal)


def stepwise_check(pre_obs: Observation, action: GroundAction, post_obs: Observation,
                   believed_domain: Domain, problem: Problem) -> bool:
    """True iff the observed transition matches the believed effect of `action`.

    With a believed-applicable action, applying the believed effect to the
    pre-observation must reproduce the post-observation exactly; with a
    believed-inapplicable one, no change is predicted. Both observations must
    expose every atom the effect touches, i.e. this check is meaningful under
    full observability.
    """
    schema = believed_domain.action_map.get(action.name)
    if schema is None:
        raise EnvError(f"action {action.name} absent from believed domain")
    scratch = Problem(name=problem.name, domain_name=believed_domain.name,
                      objects=tuple(set(problem.objects) | set(pre_obs.objects)),
                      init=pre_obs.atoms, goal=And(()))
    try:
        pre, eff = ground(schema, action.args, believed_domain, scratch)
        predicted = apply_effect(pre_obs.atoms, eff) if holds(pre_obs.atoms, pre) \
            else pre_obs.atoms
    except PddlError:
        predicted = pre_obs.atoms
    return predicted == post_obs.atoms
