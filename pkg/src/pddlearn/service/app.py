"""HTTP surface over the induction engine: submit runs, poll, replay, score."""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..belief import best_domain, memory_from_records
from ..config import ConfigError, RunConfig
from ..envs import make_env
from ..metrics import summarize
from ..orchestrator.trace import read_trace
from ..pddl.model import PddlError
from ..pddl.printer import print_domain
from ..replay import ReplayError, env_config_from_header, replay_trace
from . import schemas
from .jobs import DONE, JobRegistry


def _load_config(req: schemas.RunSubmitRequest) -> RunConfig:
    if req.config_path:
        config = RunConfig.from_file(req.config_path)
    elif req.config is not None:
        config = RunConfig.from_dict(req.config)
    else:
        raise ConfigError("either config_path or an inline config is required")
    config.apply_overrides(**{k: v for k, v in req.overrides.items()
                              if k in ("seed", "env", "task", "proposer", "out")})
    return config


def create_app() -> FastAPI:
    app = FastAPI(title="pddlearn", version=__version__)
    registry = JobRegistry()

    @app.get("/health", response_model=schemas.HealthResponse)
    def health() -> schemas.HealthResponse:
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/runs", response_model=schemas.RunSubmitResponse)
    def submit_run(req: schemas.RunSubmitRequest) -> schemas.RunSubmitResponse:
        try:
            config = _load_config(req)
            job = registry.submit(config)
        except (ConfigError, PddlError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return schemas.RunSubmitResponse(run_id=job.run_id, state=job.state)

    @app.get("/runs/{run_id}", response_model=schemas.RunStatusResponse)
    def run_status(run_id: str) -> schemas.RunStatusResponse:
        job = registry.get(run_id)
        if job is None:
            raise HTTPException(status_code=404, detail=f"unknown run {run_id}")
        reports = []
        if job.state == DONE and job.summary:
            reports = [schemas.SeedReport(**{
                k: row[k] for k in ("env", "task", "seed", "success", "nr", "nes",
                                    "iterations", "f1", "gc", "trace_path")})
                for row in job.summary["runs"]]
        return schemas.RunStatusResponse(
            run_id=job.run_id, state=job.state, error=job.error, reports=reports,
            summary={k: v for k, v in (job.summary or {}).items() if k != "runs"}
            or None,
            out_dir=job.config.out_dir)

    @app.get("/runs", response_model=list[schemas.RunStatusResponse])
    def list_runs() -> list[schemas.RunStatusResponse]:
        return [run_status(job.run_id) for job in registry.all()]

    @app.post("/replay", response_model=schemas.ReplayResponse)
    def replay(req: schemas.ReplayRequest) -> schemas.ReplayResponse:
        try:
            result = replay_trace(req.trace_path)
        except (ReplayError, FileNotFoundError, PddlError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return schemas.ReplayResponse(ok=result.ok, iteration=result.iteration,
                                      step_index=result.step_index,
                                      message=result.message)

    @app.post("/eval", response_model=schemas.EvalResponse)
    def evaluate(req: schemas.EvalRequest) -> schemas.EvalResponse:
        rows = []
        for path in req.trace_paths:
            try:
                events = read_trace(path)
                env = make_env(env_config_from_header(events[0]))
                record = summarize(events, env.ground_truth_domain(),
                                   threshold=req.threshold)
            except (PddlError, FileNotFoundError, IndexError, KeyError) as exc:
                raise HTTPException(status_code=400,
                                    detail=f"{path}: {exc}") from exc
            rows.append(schemas.EvalRow(trace_path=str(path), f1=record["f1"],
                                        nr=record["nr"], nes=record["nes"],
                                        success=record["success"], gc=record["gc"]))
        return schemas.EvalResponse(rows=rows)

    @app.post("/print-domain", response_model=schemas.PrintDomainResponse)
    def print_domain_endpoint(req: schemas.PrintDomainRequest
                              ) -> schemas.PrintDomainResponse:
        try:
            events = read_trace(req.trace_path)
            env = make_env(env_config_from_header(events[0]))
            leaves = None
            for ev in events:
                if ev.get("event") == "belief_update":
                    leaves = ev["leaves"]
            memory = memory_from_records(leaves or [])
            domain = best_domain(memory, env.domain_skeleton(), req.threshold)
        except (PddlError, FileNotFoundError, IndexError, KeyError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        return schemas.PrintDomainResponse(pddl=print_domain(domain))

    return app


app = create_app()
