"""The induction loop, goal construction, and run traces."""

from .goals import Exemplar, GoalError, build_goal, retrieve_top2, token_f1, translate_goal
from .loop import (
    Loop,
    LoopConfig,
    LoopError,
    ProspectionError,
    RunReport,
    init_problem,
    prospect,
    run,
    transcribe_problem,
)
from .trace import SCHEMA_VERSION, TraceWriter, encode_event, read_trace

__all__ = [
    "Exemplar", "GoalError", "build_goal", "retrieve_top2", "token_f1",
    "translate_goal", "Loop", "LoopConfig", "LoopError", "ProspectionError",
    "RunReport", "init_problem", "prospect", "run", "transcribe_problem",
    "SCHEMA_VERSION", "TraceWriter", "encode_event", "read_trace",
]
