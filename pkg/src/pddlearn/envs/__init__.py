"""Symbolic environments exposing the no-error-message feedback contract."""

from .base import (
    APPLIED,
    EPISODE_RESET,
    NO_CHANGE,
    EnvConfig,
    EnvError,
    ExecutionFeedback,
    Observation,
    SymbolicEnv,
    TaskSpec,
    load_task,
    stepwise_check,
)
from .blocksworld import BlocksWorldEnv
from .gridquest import GridQuestEnv

ENV_CLASSES = {
    "blocksworld": BlocksWorldEnv,
    "gridquest": GridQuestEnv,
}


def make_env(config: EnvConfig) -> SymbolicEnv:
    cls = ENV_CLASSES.get(config.env_id)
    if cls is None:
        raise EnvError(f"unknown environment {config.env_id!r}")
    return cls(config)


__all__ = [
    "APPLIED", "EPISODE_RESET", "NO_CHANGE", "EnvConfig", "EnvError",
    "ExecutionFeedback", "Observation", "SymbolicEnv", "TaskSpec", "load_task",
    "stepwise_check", "BlocksWorldEnv", "GridQuestEnv", "ENV_CLASSES", "make_env",
]
