"""Goal construction from task text, with token-overlap exemplar retrieval.

Retrieval replaces embedding similarity with plain token F1 behind the same
top-2 interface: the corpus is a JSONL file of {"text": ..., "goal": ...}
rows. Translation itself is rule-based per environment phrasing; an exact
corpus match is used as a fallback, and an LLM hook can take over when one
is configured.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

from ..pddl.model import And, Condition, Domain, PddlError, ground_atom
from ..pddl.parser import parse_condition, read_sexprs


class GoalError(PddlError):
    pass


@dataclass(frozen=True)
class Exemplar:
    text: str
    goal_text: str
    score: float


def _tokens(text: str) -> set[str]:
    return set(re.findall(r"[a-z0-9]+", text.lower()))


def token_f1(a: str, b: str) -> float:
    ta, tb = _tokens(a), _tokens(b)
    if not ta or not tb:
        return 0.0
    common = len(ta & tb)
    if common == 0:
        return 0.0
    precision = common / len(tb)
    recall = common / len(ta)
    return 2 * precision * recall / (precision + recall)


def load_corpus(path: str | Path) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def retrieve_top2(task_text: str, corpus: list[dict]) -> list[Exemplar]:
    scored = [Exemplar(row["text"], row["goal"], token_f1(task_text, row["text"]))
              for row in corpus]
    scored.sort(key=lambda e: (-e.score, e.text))
    return scored[:2]


_ON_TOP = re.compile(r"([a-z0-9-]+)\s+should\s+be\s+on\s+(?:top\s+of\s+)?([a-z0-9-]+)")
_ON_TABLE = re.compile(r"([a-z0-9-]+)\s+should\s+be\s+on\s+the\s+table")
_DEFEAT = re.compile(r"defeat\s+the\s+([a-z0-9-]+)")


def translate_goal(task_text: str, object_names: set[str], domain: Domain) -> Condition:
    """Pattern-based text-to-condition translation for the supported phrasings."""
    text = task_text.lower()
    conjuncts: list[Condition] = []
    predicates = domain.predicate_map
    for who in _ON_TABLE.finditer(text):
        block = who.group(1)
        if block in object_names and "on-table" in predicates:
            conjuncts.append(ground_atom_literal("on-table", block))
    for m in _ON_TOP.finditer(text):
        a, b = m.group(1), m.group(2)
        if b == "the":  # matched the on-the-table phrasing
            continue
        if a in object_names and b in object_names and "on" in predicates:
            conjuncts.append(ground_atom_literal("on", a, b))
    for m in _DEFEAT.finditer(text):
        target = m.group(1)
        if "defeated" in predicates and (
                target in object_names or target in domain.constant_types):
            conjuncts.append(ground_atom_literal("defeated", target))
    if not conjuncts:
        raise GoalError(f"could not translate goal text: {task_text!r}")
    seen = set()
    unique = []
    for c in conjuncts:
        if str(c) not in seen:
            seen.add(str(c))
            unique.append(c)
    if len(unique) == 1:
        return And((unique[0],))
    return And(tuple(unique))


def ground_atom_literal(pred: str, *names: str):
    from ..pddl.model import Literal

    return Literal(ground_atom(pred, *names))


def build_goal(task_text: str, object_names: set[str], domain: Domain,
               corpus_path: str | Path | None = None,
               llm_goal_fn: Callable[[str, str], Condition] | None = None,
               ) -> tuple[Condition, list[Exemplar]]:
    """Goal condition plus the exemplars that informed it (possibly empty)."""
    exemplars: list[Exemplar] = []
    if corpus_path:
        exemplars = retrieve_top2(task_text, load_corpus(corpus_path))
    if llm_goal_fn is not None:
        exemplar_text = "\n".join(f"task: {e.text}\ngoal: {e.goal_text}"
                                  for e in exemplars) or "(none)"
        return llm_goal_fn(task_text, exemplar_text), exemplars
    try:
        return translate_goal(task_text, object_names, domain), exemplars
    except GoalError:
        for e in exemplars:
            if e.score == 1.0:
                return parse_condition(read_sexprs(e.goal_text)[0]), exemplars
        raise
