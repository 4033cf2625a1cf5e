"""Wires a RunConfig into environments, proposers, and seeded loop runs."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import asdict
from pathlib import Path

from .config import ROLES, ConfigError, RunConfig
from .envs import make_env
from .envs.base import SymbolicEnv
from .orchestrator import trace as tr
from .orchestrator.loop import Loop, RunReport
from .orchestrator.trace import SCHEMA_VERSION, TraceWriter
from .planner.search import PlannerConfig
from .proposers import (
    ChatClient,
    HeuristicChecker,
    HeuristicErrorPredictor,
    HeuristicLearner,
    HeuristicSampler,
    HeuristicSemanticsGenerator,
    LlmChecker,
    LlmErrorPredictor,
    LlmSemanticsGenerator,
    LlmTrajectorySampler,
    OracleChecker,
    OracleErrorPredictor,
    OracleSampler,
    OracleSemanticsGenerator,
    ProposerSet,
    llm_goal_condition,
)

log = logging.getLogger(__name__)


def build_proposers(config: RunConfig, env: SymbolicEnv, seed: int,
                    trace: TraceWriter | None = None):
    """(ProposerSet, llm goal hook or None) for one seeded run."""
    roles = config.proposers
    learner: HeuristicLearner | None = None
    client: ChatClient | None = None

    def heuristic_learner() -> HeuristicLearner:
        nonlocal learner
        if learner is None:
            learner = HeuristicLearner(env.domain_skeleton())
        return learner

    def chat_client() -> ChatClient:
        nonlocal client
        if client is None:
            hook = None
            if trace is not None:
                def hook(role: str, payload: dict, content: str) -> None:
                    trace.emit(tr.LLM_EXCHANGE, role=role, request=payload,
                               response=content)
            client = ChatClient(config.llm_config(), exchange_hook=hook)
        return client

    planner_cfg = PlannerConfig(**config.planner) if config.planner else \
        PlannerConfig(time_budget=10.0)
    sampler_kwargs = dict(config.sampler)

    def make_role(role: str):
        choice = roles[role]
        if role == "trajectory":
            if choice == "oracle":
                return OracleSampler(env, planner_cfg, seed=seed)
            if choice == "heuristic":
                return HeuristicSampler(heuristic_learner(), seed=seed,
                                        **sampler_kwargs)
            return LlmTrajectorySampler(chat_client())
        if role == "semantics":
            if choice == "oracle":
                return OracleSemanticsGenerator(env, seed=seed)
            if choice == "heuristic":
                return HeuristicSemanticsGenerator(heuristic_learner())
            return LlmSemanticsGenerator(chat_client())
        if role == "error":
            if choice == "oracle":
                return OracleErrorPredictor(env)
            if choice == "heuristic":
                return HeuristicErrorPredictor()
            return LlmErrorPredictor(chat_client())
        if choice == "oracle":
            return OracleChecker(env)
        if choice == "heuristic":
            return HeuristicChecker()
        return LlmChecker(chat_client())

    proposers = ProposerSet(sampler=make_role("trajectory"),
                            generator=make_role("semantics"),
                            error_predictor=make_role("error"),
                            checker=make_role("checker"))

    llm_goal_fn = None
    if any(roles[r] == "llm" for r in ROLES):
        def llm_goal_fn(task_text: str, exemplars_text: str):
            objects_text = " ".join(f"{n} - {t}" for n, t in env.task.objects)
            return llm_goal_condition(chat_client(), task_text, objects_text,
                                      exemplars_text)
    return proposers, llm_goal_fn


def trace_filename(config: RunConfig, task: str, seed: int) -> str:
    return f"{config.env_id}-{task}-seed{seed}.trace.jsonl"


def execute_run(config: RunConfig, task: str, seed: int,
                out_dir: str | Path | None = None) -> tuple[RunReport, Path]:
    """One seeded run on one task; returns the report and the trace path."""
    out = Path(out_dir if out_dir is not None else config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    trace_path = out / trace_filename(config, task, seed)

    env = make_env(config.env_config(task, seed))
    with TraceWriter(trace_path) as trace:
        trace.emit(tr.RUN_HEADER, schema_version=SCHEMA_VERSION,
                   config=config.resolved(task, seed), seed=seed)
        proposers, llm_goal_fn = build_proposers(config, env, seed, trace)
        loop = Loop(config.loop_config(seed), env, proposers, trace,
                    llm_goal_fn=llm_goal_fn)
        report = loop.run()
    log.info("run %s/%s seed=%d: success=%s nr=%d nes=%d f1=%.1f",
             config.env_id, task, seed, report.success, report.nr, report.nes,
             report.f1)
    return report, trace_path


def execute_all(config: RunConfig) -> dict:
    """Every (task, seed) pair; writes summary.json and a per-run CSV table."""
    config.validate()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for task in config.tasks:
        for seed in config.seeds:
            report, trace_path = execute_run(config, task, seed)
            row = {"env": config.env_id, "task": task, **asdict(report),
                   "trace_path": str(trace_path)}
            rows.append(row)

    summary = {
        "env": config.env_id,
        "tasks": config.tasks,
        "seeds": config.seeds,
        "runs": rows,
        "mean_f1": round(sum(r["f1"] for r in rows) / len(rows), 6),
        "mean_nes": round(sum(r["nes"] for r in rows) / len(rows), 6),
        "mean_nr": round(sum(r["nr"] for r in rows) / len(rows), 6),
        "success_rate": round(sum(1 for r in rows if r["success"]) / len(rows), 6),
    }
    summary_path = out / "summary.json"
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n",
                            encoding="utf-8")
    csv_path = out / "runs.csv"
    fields = ["env", "task", "seed", "success", "nr", "nes", "iterations",
              "f1", "gc", "trace_path"]
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=fields, extrasaction="ignore")
        writer.writeheader()
        writer.writerows(rows)
    summary["summary_path"] = str(summary_path)
    summary["csv_path"] = str(csv_path)
    return summary
