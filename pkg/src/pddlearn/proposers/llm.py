"""LLM-backed proposer roles over a generic chat-completion HTTP contract.

The client posts {model, messages, temperature} and reads back the first
choice's message content, with exponential backoff on failures. Prompts are
plain-text template files with named placeholders. Every reply is gated
through the PDDL parser before it can reach the belief memory or the problem
file; unparseable fragments are dropped and reported, never guessed at.
"""

from __future__ import annotations

import logging
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import httpx

from ..belief import ProposedSemantics
from ..pddl.model import And, Atom, Condition, Domain, GroundAction, PddlError
from ..pddl.parser import ParseError, parse_condition, read_sexprs
from ..pddl.printer import print_domain, print_problem
from .base import (
    UNREACHED_GOAL,
    UNSATISFIED_PRECONDITION,
    ErrorPredictor,
    PredictedError,
    ProblemChecker,
    ProblemEdit,
    ProposerContext,
    ProposerError,
    SemanticsGenerator,
    TrajectorySampler,
)

log = logging.getLogger(__name__)

ROLES = ("trajectory", "semantics", "error", "checker", "goal")

DEFAULT_TEMPERATURES = {
    "trajectory": 0.7,
    "semantics": 0.0,
    "error": 0.0,
    "checker": 0.0,
    "goal": 0.0,
}


@dataclass(frozen=True)
class LlmEndpointConfig:
    base_url: str
    model: str
    credential_env: str = "PDDLEARN_API_KEY"
    temperatures: dict = field(default_factory=lambda: dict(DEFAULT_TEMPERATURES))
    max_retries: int = 3
    timeout: float = 60.0
    templates_dir: str | Path | None = None   # defaults to the packaged templates

    def __post_init__(self):
        if self.max_retries < 0:
            raise ProposerError("max_retries must be >= 0")


def _default_templates_dir() -> Path:
    return Path(__file__).parent / "templates"


def load_template(cfg: LlmEndpointConfig, role: str) -> str:
    base = Path(cfg.templates_dir) if cfg.templates_dir else _default_templates_dir()
    path = base / f"{role}.txt"
    if not path.exists():
        raise ProposerError(f"missing prompt template for role {role!r}: {path}")
    return path.read_text(encoding="utf-8")


def validate_templates(cfg: LlmEndpointConfig) -> None:
    for role in ROLES:
        load_template(cfg, role)


class ChatClient:
    """Minimal chat-completion client with retry/backoff."""

    def __init__(self, cfg: LlmEndpointConfig,
                 transport: httpx.BaseTransport | None = None,
                 sleeper: Callable[[float], None] = time.sleep,
                 exchange_hook: Callable[[str, dict, str], None] | None = None):
        self.cfg = cfg
        self._client = httpx.Client(base_url=cfg.base_url, timeout=cfg.timeout,
                                    transport=transport)
        self._sleep = sleeper
        self._hook = exchange_hook

    def complete(self, role: str, prompt: str) -> str:
        headers = {}
        key = os.environ.get(self.cfg.credential_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        payload = {
            "model": self.cfg.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.cfg.temperatures.get(role, 0.0),
        }
        last_error: Exception | None = None
        for attempt in range(self.cfg.max_retries + 1):
            try:
                resp = self._client.post("/v1/chat/completions", json=payload,
                                         headers=headers)
                resp.raise_for_status()
                content = resp.json()["choices"][0]["message"]["content"]
                if self._hook:
                    self._hook(role, payload, content)
                return content
            except (httpx.HTTPError, KeyError, ValueError) as exc:
                last_error = exc
                if attempt < self.cfg.max_retries:
                    self._sleep(min(2.0 ** attempt, 30.0))
        raise ProposerError(f"llm endpoint failed after retries: {last_error}")


def render(template: str, **fields: str) -> str:
    out = template
    for key, value in fields.items():
        out = out.replace("{" + key + "}", value)
    return out


def _context_fields(ctx: ProposerContext) -> dict[str, str]:
    obs_log = "\n".join(f"o{i}: {o.text}" for i, o in enumerate(ctx.observations))
    act_log = "\n".join(f"a{i + 1}: {a} -> {s}"
                        for i, (a, s) in enumerate(zip(ctx.actions, ctx.statuses)))
    return {
        "domain_text": print_domain(ctx.domain),
        "problem_text": print_problem(ctx.problem),
        "observation_log": obs_log or "(none)",
        "action_log": act_log or "(none)",
        "partial_plan": "\n".join(str(a) for a in (ctx.partial_plan or [])) or "(none)",
        "error_text": ctx.predicted_error.text if ctx.predicted_error else "(none)",
    }


_ACTION_LINE = re.compile(r"\([^()]+\)")


class LlmTrajectorySampler(TrajectorySampler):
    def __init__(self, client: ChatClient):
        self.client = client
        self.template = load_template(client.cfg, "trajectory")

    def sample(self, ctx: ProposerContext) -> list[GroundAction]:
        reply = self.client.complete("trajectory",
                                     render(self.template, **_context_fields(ctx)))
        known = {n for n, _ in ctx.problem.objects} | set(ctx.domain.constant_types)
        actions: list[GroundAction] = []
        for fragment in _ACTION_LINE.findall(reply):
            try:
                action = GroundAction.parse(fragment)
            except PddlError:
                continue
            schema = ctx.domain.action_map.get(action.name)
            if schema is None or len(schema.params) != len(action.args):
                continue
            if any(arg not in known for arg in action.args):
                continue
            actions.append(action)
        if not actions:
            raise ProposerError("no parseable actions in the model reply")
        return actions


class LlmSemanticsGenerator(SemanticsGenerator):
    """One call produces pre/post trees for all actions; bad blocks drop out."""

    _BLOCK = re.compile(
        r"\(:action\s+(?P<name>[^\s()]+)(?P<body>.*?)(?=\(:action|\Z)", re.S)

    def __init__(self, client: ChatClient):
        self.client = client
        self.template = load_template(client.cfg, "semantics")

    def generate(self, ctx: ProposerContext) -> ProposedSemantics:
        reply = self.client.complete("semantics",
                                     render(self.template, **_context_fields(ctx)))
        trees: list[tuple[str, Condition, Condition]] = []
        dropped: list[str] = []
        for match in self._BLOCK.finditer(reply):
            name = match.group("name").lower()
            if name not in ctx.domain.action_map:
                dropped.append(name)
                continue
            pre = self._section(match.group("body"), ":precondition", allow_when=False)
            post = self._section(match.group("body"), ":effect", allow_when=True)
            if pre is None and post is None:
                dropped.append(name)
                continue
            trees.append((name, pre or And(()), post or And(())))
        if dropped:
            log.warning("dropped unparseable semantics for: %s", ", ".join(dropped))
        if not trees:
            raise ProposerError("model reply contained no parseable action semantics")
        by_name = {t[0]: t for t in trees}
        full = []
        for schema in ctx.domain.actions:
            full.append(by_name.get(schema.name, (schema.name, And(()), And(()))))
        return ProposedSemantics(tuple(full))

    @staticmethod
    def _section(body: str, key: str, allow_when: bool) -> Condition | None:
        idx = body.find(key)
        if idx < 0:
            return None
        rest = body[idx + len(key):]
        start = rest.find("(")
        if start < 0:
            return None
        depth = 0
        for j, ch in enumerate(rest[start:], start):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
                if depth == 0:
                    try:
                        node = read_sexprs(rest[start:j + 1])[0]
                        return parse_condition(node, allow_when=allow_when)
                    except (ParseError, PddlError, IndexError):
                        return None
        return None


class LlmErrorPredictor(ErrorPredictor):
    def __init__(self, client: ChatClient):
        self.client = client
        self.template = load_template(client.cfg, "error")

    def predict(self, ctx: ProposerContext) -> PredictedError:
        reply = self.client.complete("error",
                                     render(self.template, **_context_fields(ctx)))
        kind = UNSATISFIED_PRECONDITION if "unsatisfied" in reply.lower() \
            else UNREACHED_GOAL
        index = None
        m = re.search(r"index\s*[:=]\s*(\d+)", reply, re.I)
        if m:
            index = int(m.group(1))
        literals = tuple(_ACTION_LINE.findall(reply))
        if kind == UNSATISFIED_PRECONDITION and index is None:
            index = ctx.failing_index() or 0
        if kind == UNREACHED_GOAL and not literals:
            literals = ("(unknown)",)
        return PredictedError(kind, index, literals, reply.strip())


class LlmChecker(ProblemChecker):
    _ADD = re.compile(r"^add\s+(\(.+\))\s*$", re.I)
    _REMOVE = re.compile(r"^remove\s+(\(.+\))\s*$", re.I)
    _OBJECT = re.compile(r"^add-object\s+([^\s]+)(?:\s+-\s+([^\s]+))?\s*$", re.I)

    def __init__(self, client: ChatClient):
        self.client = client
        self.template = load_template(client.cfg, "checker")

    def check(self, ctx: ProposerContext) -> ProblemEdit | None:
        reply = self.client.complete("checker",
                                     render(self.template, **_context_fields(ctx)))
        if "no-edit" in reply.lower():
            return None
        adds: list[Atom] = []
        removes: list[Atom] = []
        objects: list[tuple[str, str]] = []
        from ..pddl.model import parse_atom_text

        for line in reply.splitlines():
            line = line.strip()
            if m := self._ADD.match(line):
                try:
                    adds.append(parse_atom_text(m.group(1)))
                except PddlError:
                    continue
            elif m := self._REMOVE.match(line):
                try:
                    removes.append(parse_atom_text(m.group(1)))
                except PddlError:
                    continue
            elif m := self._OBJECT.match(line):
                objects.append((m.group(1).lower(), (m.group(2) or "object").lower()))
        edit = ProblemEdit(tuple(adds), tuple(removes), tuple(objects))
        return None if edit.empty else edit


def llm_goal_condition(client: ChatClient, task_text: str, objects_text: str,
                       exemplars_text: str) -> Condition:
    template = load_template(client.cfg, "goal")
    reply = client.complete("goal", render(
        template, task_text=task_text, objects_text=objects_text,
        exemplars_text=exemplars_text))
    start = reply.find("(")
    if start < 0:
        raise ProposerError("no goal condition in model reply")
    depth = 0
    for j, ch in enumerate(reply[start:], start):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
            if depth == 0:
                return parse_condition(read_sexprs(reply[start:j + 1])[0])
    raise ProposerError("unbalanced goal condition in model reply")
