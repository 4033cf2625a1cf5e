"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class RunSubmitRequest(BaseModel):
    config_path: str | None = None
    config: dict | None = None
    overrides: dict = Field(default_factory=dict)


class RunSubmitResponse(BaseModel):
    run_id: str
    state: str


class SeedReport(BaseModel):
    env: str
    task: str
    seed: int
    success: bool
    nr: int
    nes: int
    iterations: int
    f1: float
    gc: float
    trace_path: str


class RunStatusResponse(BaseModel):
    run_id: str
    state: str                    # queued | running | done | error
    error: str | None = None
    reports: list[SeedReport] = Field(default_factory=list)
    summary: dict | None = None
    out_dir: str | None = None


class ReplayRequest(BaseModel):
    trace_path: str


class ReplayResponse(BaseModel):
    ok: bool
    iteration: int | None = None
    step_index: int | None = None
    message: str = ""


class EvalRequest(BaseModel):
    trace_paths: list[str]
    threshold: float = 0.5


class EvalRow(BaseModel):
    trace_path: str
    f1: float
    nr: int
    nes: int
    success: bool
    gc: float


class EvalResponse(BaseModel):
    rows: list[EvalRow]


class PrintDomainRequest(BaseModel):
    trace_path: str
    threshold: float = 0.5


class PrintDomainResponse(BaseModel):
    pddl: str


class HealthResponse(BaseModel):
    status: str
    version: str
