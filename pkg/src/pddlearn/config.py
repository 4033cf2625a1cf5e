"""Run configuration: one human-editable YAML file, CLI flags override values.

The resolved config echoed into the trace header pins the task and seed but
excludes the output directory, so reruns into different directories stay
byte-identical.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .belief import BeliefConfig
from .envs.base import EnvConfig
from .orchestrator.loop import LoopConfig
from .pddl.model import PddlError
from .planner.search import PlannerConfig
from .proposers.llm import LlmEndpointConfig, validate_templates

ROLES = ("trajectory", "semantics", "error", "checker")
ROLE_CHOICES = ("oracle", "heuristic", "llm")


class ConfigError(PddlError):
    pass


@dataclass
class RunConfig:
    env_id: str = "blocksworld"
    tasks: list[str] = field(default_factory=lambda: ["task1"])
    observability: str = "full"
    noise_probability: float = 0.0
    proposers: dict[str, str] = field(
        default_factory=lambda: {r: "oracle" for r in ROLES})
    seeds: list[int] = field(default_factory=lambda: [0])
    out_dir: str = "runs"
    loop: dict = field(default_factory=dict)
    planner: dict = field(default_factory=dict)
    belief: dict = field(default_factory=dict)
    llm: dict | None = None
    sampler: dict = field(default_factory=dict)   # heuristic sampler knobs

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        raw = dict(raw or {})
        env = dict(raw.pop("env", {}))
        tasks = env.get("task", env.get("tasks", ["task1"]))
        if isinstance(tasks, str):
            tasks = [tasks]
        cfg = cls(
            env_id=env.get("id", "blocksworld"),
            tasks=[str(t) for t in tasks],
            observability=env.get("observability", "full"),
            noise_probability=float(env.get("noise_probability", 0.0)),
            proposers={**{r: "oracle" for r in ROLES}, **raw.pop("proposers", {})},
            seeds=[int(s) for s in raw.pop("seeds", [0])],
            out_dir=str(raw.pop("out_dir", "runs")),
            loop=dict(raw.pop("loop", {})),
            planner=dict(raw.pop("planner", {})),
            belief=dict(raw.pop("belief", {})),
            llm=raw.pop("llm", None),
            sampler=dict(raw.pop("sampler", {})),
        )
        if raw:
            raise ConfigError(f"unknown config keys: {sorted(raw)}")
        return cfg

    @classmethod
    def from_file(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
        except yaml.YAMLError as exc:
            raise ConfigError(f"config does not parse: {exc}") from exc
        return cls.from_dict(raw)

    def apply_overrides(self, *, seed: int | None = None, env: str | None = None,
                        task: str | None = None, proposer: str | None = None,
                        out: str | None = None) -> None:
        if seed is not None:
            self.seeds = [int(seed)]
        if env is not None:
            self.env_id = env
        if task is not None:
            self.tasks = [task]
        if proposer is not None:
            self.proposers = {r: proposer for r in ROLES}
        if out is not None:
            self.out_dir = out

    # -- validation -------------------------------------------------------------

    def validate(self) -> None:
        from .envs import ENV_CLASSES

        if self.env_id not in ENV_CLASSES:
            raise ConfigError(f"unknown environment {self.env_id!r}")
        if not self.tasks:
            raise ConfigError("at least one task is required")
        if not self.seeds:
            raise ConfigError("seeds must be nonempty")
        for role, choice in self.proposers.items():
            if role not in ROLES:
                raise ConfigError(f"unknown proposer role {role!r}")
            if choice not in ROLE_CHOICES:
                raise ConfigError(f"unknown proposer {choice!r} for role {role}")
        if any(choice == "llm" for choice in self.proposers.values()):
            if not self.llm:
                raise ConfigError("llm proposers selected but no llm section configured")
            try:
                validate_templates(self.llm_config())
            except PddlError as exc:
                raise ConfigError(str(exc)) from exc
        corpus = self.loop.get("retrieval_corpus")
        if corpus and not Path(corpus).exists():
            raise ConfigError(f"retrieval corpus not found: {corpus}")
        # construct the typed configs once to surface range errors early
        self.loop_config(seed=self.seeds[0])
        for task in self.tasks:
            self.env_config(task, self.seeds[0])

    # -- typed views --------------------------------------------------------------

    def env_config(self, task: str, seed: int) -> EnvConfig:
        try:
            return EnvConfig(env_id=self.env_id, task_id=task,
                             observability=self.observability,
                             noise_probability=self.noise_probability, seed=seed)
        except PddlError as exc:
            raise ConfigError(str(exc)) from exc

    def loop_config(self, seed: int) -> LoopConfig:
        try:
            planner = PlannerConfig(**self.planner) if self.planner else PlannerConfig()
            belief = BeliefConfig(seed=seed, **self.belief)
            return LoopConfig(planner=planner, belief=belief, seed=seed,
                              **self.loop)
        except (TypeError, PddlError) as exc:
            raise ConfigError(str(exc)) from exc

    def llm_config(self) -> LlmEndpointConfig:
        if not self.llm:
            raise ConfigError("no llm section configured")
        try:
            return LlmEndpointConfig(**self.llm)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def resolved(self, task: str, seed: int) -> dict:
        """The fully resolved config echoed into a trace header."""
        return {
            "env": {"id": self.env_id, "task": task,
                    "observability": self.observability,
                    "noise_probability": self.noise_probability},
            "proposers": dict(sorted(self.proposers.items())),
            "loop": dict(sorted(self.loop.items())),
            "planner": dict(sorted(self.planner.items())),
            "belief": dict(sorted(self.belief.items())),
            "sampler": dict(sorted(self.sampler.items())),
            "seed": seed,
        }
