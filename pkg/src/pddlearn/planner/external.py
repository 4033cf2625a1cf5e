"""Adapter for an external planner invoked as a subprocess.

The command template gets {domain}, {problem} and {plan} substituted with file
paths inside the working directory. The external process must exit 0 and write
one '(action arg ...)' per line to the plan path; the resulting plan is always
re-validated internally before being reported as complete.
"""

from __future__ import annotations

import shlex
import subprocess
import threading
from dataclasses import dataclass
from pathlib import Path

from ..pddl.model import Domain, GroundAction, Problem
from ..pddl.printer import print_domain, print_problem
from .search import PlanResult, PlannerError, PlanStatus, validate_plan


class ExternalPlannerError(PlannerError):
    def __init__(self, kind: str, message: str):
        self.kind = kind  # "process" | "parse" | "validation"
        super().__init__(f"{kind}: {message}")


@dataclass
class ExternalPlannerConfig:
    command: str                 # e.g. "fast-downward {domain} {problem} --plan-file {plan}"
    workdir: str | Path
    timeout: float = 60.0


class ExternalPlanner:
    """Runs one external solve at a time per adapter instance."""

    def __init__(self, config: ExternalPlannerConfig):
        self.config = config
        self._lock = threading.Lock()

    def plan(self, domain: Domain, problem: Problem) -> PlanResult:
        with self._lock:
            return self._plan_locked(domain, problem)

    def _plan_locked(self, domain: Domain, problem: Problem) -> PlanResult:
        workdir = Path(self.config.workdir)
        workdir.mkdir(parents=True, exist_ok=True)
        domain_path = workdir / "domain.pddl"
        problem_path = workdir / "problem.pddl"
        plan_path = workdir / "plan.txt"
        domain_path.write_text(print_domain(domain), encoding="utf-8")
        problem_path.write_text(print_problem(problem), encoding="utf-8")
        if plan_path.exists():
            plan_path.unlink()

        cmd = self.config.command.format(domain=domain_path, problem=problem_path,
                                         plan=plan_path)
        try:
            proc = subprocess.run(shlex.split(cmd), cwd=workdir, capture_output=True,
                                  text=True, timeout=self.config.timeout)
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise ExternalPlannerError("process", str(exc)) from exc
        if proc.returncode != 0:
            raise ExternalPlannerError(
                "process", f"exit code {proc.returncode}: {proc.stderr.strip()[:500]}")
        if not plan_path.exists():
            raise ExternalPlannerError("process", "no plan file written")

        actions = parse_plan_file(plan_path.read_text(encoding="utf-8"))
        report = validate_plan(domain, problem, actions)
        if not report.valid:
            raise ExternalPlannerError(
                "validation",
                f"external plan rejected at step {report.failing_index} ({report.reason})")
        return PlanResult(PlanStatus.COMPLETE, plan=tuple(actions),
                          satisfied_goal_conjuncts=0, total_goal_conjuncts=0)


def parse_plan_file(text: str) -> list[GroundAction]:
    actions: list[GroundAction] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith(";"):
            continue
        try:
            actions.append(GroundAction.parse(line))
        except Exception as exc:
            raise ExternalPlannerError("parse", f"bad plan line {line!r}") from exc
    return actions


def external_plan(domain: Domain, problem: Problem,
                  adapter: ExternalPlanner | ExternalPlannerConfig) -> PlanResult:
    if isinstance(adapter, ExternalPlannerConfig):
        adapter = ExternalPlanner(adapter)
    return adapter.plan(domain, problem)
