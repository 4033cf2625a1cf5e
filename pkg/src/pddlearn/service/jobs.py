"""Background execution of runs with an in-memory job registry."""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field

from ..config import RunConfig
from ..runner import execute_all

QUEUED = "queued"
RUNNING = "running"
DONE = "done"
ERROR = "error"


@dataclass
class Job:
    run_id: str
    config: RunConfig
    state: str = QUEUED
    error: str | None = None
    summary: dict | None = None
    thread: threading.Thread | None = field(default=None, repr=False)


class JobRegistry:
    def __init__(self):
        self._jobs: dict[str, Job] = {}
        self._lock = threading.Lock()

    def submit(self, config: RunConfig) -> Job:
        """Validates eagerly (raises ConfigError), then runs in the background."""
        config.validate()
        job = Job(run_id=uuid.uuid4().hex[:12], config=config)
        with self._lock:
            self._jobs[job.run_id] = job

        def target() -> None:
            job.state = RUNNING
            try:
                job.summary = execute_all(config)
                job.state = DONE
            except Exception as exc:  # surfaced through the status endpoint
                job.error = f"{type(exc).__name__}: {exc}"
                job.state = ERROR

        job.thread = threading.Thread(target=target, daemon=True)
        job.thread.start()
        return job

    def get(self, run_id: str) -> Job | None:
        with self._lock:
            return self._jobs.get(run_id)

    def all(self) -> list[Job]:
        with self._lock:
            return list(self._jobs.values())
