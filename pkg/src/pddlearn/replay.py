"""Deterministic trace replay: re-execute recorded actions, compare feedback.

Only the environment is re-driven; proposer decisions (including any LLM
replies) are taken from the recording, so replay never touches an endpoint.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from .envs import make_env
from .envs.base import EnvConfig
from .orchestrator.trace import SCHEMA_VERSION, read_trace
from .pddl.model import GroundAction, PddlError


class ReplayError(PddlError):
    pass


@dataclass(frozen=True)
class ReplayResult:
    ok: bool
    iteration: int | None = None
    step_index: int | None = None
    message: str = ""


def env_config_from_header(header: dict) -> EnvConfig:
    cfg = header.get("config", {})
    env = cfg.get("env", {})
    return EnvConfig(env_id=env["id"], task_id=env["task"],
                     observability=env.get("observability", "full"),
                     noise_probability=float(env.get("noise_probability", 0.0)),
                     seed=int(cfg.get("seed", header.get("seed", 0))))


def replay_trace(path: str | Path) -> ReplayResult:
    events = read_trace(path)
    if not events or events[0].get("event") != "run_header":
        raise ReplayError("trace has no run_header")
    header = events[0]
    if header.get("schema_version") != SCHEMA_VERSION:
        raise ReplayError(
            f"unsupported trace schema {header.get('schema_version')!r}")

    env = make_env(env_config_from_header(header))
    for ev in events[1:]:
        kind = ev.get("event")
        if kind == "env_reset":
            if ev.get("cause") == "fatal":
                continue  # the environment resets itself on fatal steps
            env.reset()
        elif kind == "step":
            feedback = env.step(GroundAction.parse(ev["action"]))
            observed = sorted(str(a) for a in feedback.observation.atoms)
            if feedback.status != ev["status"]:
                return ReplayResult(False, ev["iteration"], ev["index"],
                                    f"status {feedback.status!r} != recorded "
                                    f"{ev['status']!r}")
            if feedback.goal_reached != ev["goal_reached"]:
                return ReplayResult(False, ev["iteration"], ev["index"],
                                    "goal flag diverged")
            if observed != ev["observation"]:
                return ReplayResult(False, ev["iteration"], ev["index"],
                                    "observation diverged")
    return ReplayResult(True)
