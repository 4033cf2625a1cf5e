"""Run metrics: path-set F1 plus the NR / NES / success / GC summary.

The F1 is computed over root-to-leaf path strings pooled across actions. The
two orientation choices for which set sits in which denominator give the same
harmonic mean, so both are reported and the headline F1 is orientation-free.
Degenerate cases: identical empty sets score 100 (nothing to learn), an empty
side against a nonempty one scores 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .belief import BeliefMemory, enumerate_paths, memory_from_records
from .pddl.model import Domain, PddlError


class MetricsError(PddlError):
    pass


@dataclass(frozen=True)
class ActionCounts:
    truth: int
    predicted: int
    common: int


@dataclass(frozen=True)
class F1Report:
    f1: float                      # percent
    precision: float               # common / truth   (as written in the source formula)
    recall: float                  # common / predicted
    precision_conventional: float  # common / predicted
    recall_conventional: float     # common / truth
    per_action: dict[str, ActionCounts] = field(default_factory=dict)
    missing: tuple[str, ...] = ()
    spurious: tuple[str, ...] = ()


def _action_of(path: str) -> str:
    return path.split("_", 1)[0]


def path_set_f1(predicted: set[str], truth: set[str]) -> tuple[float, float, float]:
    """(precision, recall, f1) in percent, precision/recall per the pooled formula."""
    common = len(predicted & truth)
    if not predicted and not truth:
        return 100.0, 100.0, 100.0
    precision = 100.0 * common / len(truth) if truth else 0.0
    recall = 100.0 * common / len(predicted) if predicted else 0.0
    if precision + recall == 0.0:
        return precision, recall, 0.0
    return precision, recall, 2.0 * precision * recall / (precision + recall)


def f1(predicted: Domain | BeliefMemory | set, truth: Domain) -> F1Report:
    """Path-set F1 between a predicted domain (or memory snapshot) and ground truth."""
    if isinstance(predicted, Domain):
        if {a.name for a in predicted.actions} != {a.name for a in truth.actions}:
            raise MetricsError("predicted and truth domains declare different actions")
        pred_paths = enumerate_paths(predicted)
    elif isinstance(predicted, BeliefMemory):
        pred_paths = enumerate_paths(predicted)
    else:
        pred_paths = set(predicted)
    truth_paths = enumerate_paths(truth)

    precision, recall, score = path_set_f1(pred_paths, truth_paths)
    per_action: dict[str, ActionCounts] = {}
    for schema in truth.actions:
        t = {p for p in truth_paths if _action_of(p) == schema.name}
        p = {q for q in pred_paths if _action_of(q) == schema.name}
        per_action[schema.name] = ActionCounts(len(t), len(p), len(t & p))
    return F1Report(
        f1=score, precision=precision, recall=recall,
        precision_conventional=recall, recall_conventional=precision,
        per_action=per_action,
        missing=tuple(sorted(truth_paths - pred_paths)),
        spurious=tuple(sorted(pred_paths - truth_paths)))


def summarize(trace_events: list[dict], truth: Domain,
              threshold: float = 0.5) -> dict:
    """Final metrics from a recorded run trace.

    Reads the counters from the last episode record, rebuilds the final belief
    memory snapshot, and scores it against the ground-truth domain. Also emits
    the belief trajectory (per-iteration leaf beliefs) for plotting.
    """
    if trace_events and trace_events[-1].get("event") not in ("run_report",):
        pass  # a truncated trace still summarizes from whatever is present
    nr = 0
    nes = 0
    success = False
    gc = 0.0
    last_beliefs: list[dict] | None = None
    series: list[dict] = []
    for ev in trace_events:
        kind = ev.get("event")
        if kind == "episode_end":
            nr = ev["nr"]
            nes = ev["nes"]
            gc = ev.get("gc", gc)
        elif kind == "belief_update":
            last_beliefs = ev["leaves"]
            series.append({"iteration": ev["iteration"],
                           "beliefs": {r["path"]: r["belief"] for r in ev["leaves"]}})
        elif kind == "run_report":
            nr = ev.get("nr", nr)
            nes = ev.get("nes", nes)
            success = bool(ev.get("success", success))
            gc = ev.get("gc", gc)

    if last_beliefs is None:
        report = f1(set(), truth)
    else:
        memory = memory_from_records(last_beliefs)
        kept = {n.path_key for n in memory.nodes if n.belief >= threshold}
        report = f1(kept, truth)
    return {
        "f1": report.f1,
        "precision": report.precision,
        "recall": report.recall,
        "nr": nr,
        "nes": nes,
        "success": success,
        "gc": gc,
        "missing_paths": list(report.missing),
        "spurious_paths": list(report.spurious),
        "belief_series": series,
    }
