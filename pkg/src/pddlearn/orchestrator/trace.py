"""Append-only run traces: line-delimited JSON, one record per event.

Records carry no timestamps or other wall-clock material so that two runs
with identical configuration and seed serialize byte-identically.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

SCHEMA_VERSION = 1

RUN_HEADER = "run_header"
ITERATION_START = "iteration_start"
PLANNER_RESULT = "planner_result"
TRAJECTORY = "trajectory"
STEP = "step"
MISMATCH = "stepwise_mismatch"
PROBLEM_EDIT = "problem_edit"
PREDICTED_ERROR = "predicted_error"
PROPOSED_SEMANTICS = "proposed_semantics"
BELIEF_UPDATE = "belief_update"
EPISODE_END = "episode_end"
ENV_RESET = "env_reset"
LLM_EXCHANGE = "llm_exchange"
RUN_REPORT = "run_report"


def encode_event(event: dict) -> str:
    return json.dumps(event, sort_keys=True, separators=(",", ":"))


class TraceWriter:
    """Writes events to an optional file while keeping them in memory."""

    def __init__(self, path: str | Path | None = None):
        self.path = Path(path) if path else None
        self.events: list[dict] = []
        self._fh = open(self.path, "w", encoding="utf-8") if self.path else None

    def emit(self, event: str, **fields) -> None:
        record = {"event": event, **fields}
        self.events.append(record)
        if self._fh:
            self._fh.write(encode_event(record) + "\n")
            self._fh.flush()

    def close(self) -> None:
        if self._fh:
            self._fh.close()
            self._fh = None

    def __enter__(self) -> "TraceWriter":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def read_trace(path: str | Path) -> list[dict]:
    events = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                events.append(json.loads(line))
    return events


def iterate_episodes(events: Iterable[dict]) -> list[list[dict]]:
    """Groups step events by iteration, preserving order."""
    episodes: dict[int, list[dict]] = {}
    for ev in events:
        if ev.get("event") == STEP:
            episodes.setdefault(ev["iteration"], []).append(ev)
    return [episodes[k] for k in sorted(episodes)]
