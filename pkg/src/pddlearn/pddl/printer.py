"""model objects -> canonical PDDL text.

Output is deterministic: actions stay in insertion order, init atoms are
sorted lexicographically, objects sorted by (type, name). An empty :init
section is omitted entirely.
"""

from __future__ import annotations

from .model import ROOT_TYPE, Domain, Problem, Variable, condition_text


def _typed_seq(pairs: list[tuple[str, str]]) -> str:
    """Renders names with '- type' markers, grouping consecutive equal types."""
    parts: list[str] = []
    group: list[str] = []
    group_type: str | None = None
    for name, typ in pairs:
        if group and typ != group_type:
            parts.append(" ".join(group) + f" - {group_type}")
            group = []
        group.append(name)
        group_type = typ
    if group:
        if group_type == ROOT_TYPE:
            parts.append(" ".join(group))
        else:
            parts.append(" ".join(group) + f" - {group_type}")
    return " ".join(parts)


def _params_text(params: tuple[Variable, ...]) -> str:
    return _typed_seq([(v.name, v.type) for v in params])


def print_domain(domain: Domain) -> str:
    lines = [f"(define (domain {domain.name})"]
    lines.append(f"  (:requirements {' '.join(domain.requirements)})")
    if domain.types:
        lines.append(f"  (:types {_typed_seq(list(domain.types))})")
    if domain.constants:
        lines.append(f"  (:constants {_typed_seq(list(domain.constants))})")
    if domain.predicates:
        lines.append("  (:predicates")
        for p in domain.predicates:
            if p.params:
                lines.append(f"    ({p.name} {_params_text(p.params)})")
            else:
                lines.append(f"    ({p.name})")
        lines.append("  )")
    for a in domain.actions:
        lines.append(f"  (:action {a.name}")
        lines.append(f"    :parameters ({_params_text(a.params)})")
        lines.append(f"    :precondition {condition_text(a.precondition)}")
        lines.append(f"    :effect {condition_text(a.effect)}")
        lines.append("  )")
    lines.append(")")
    return "\n".join(lines) + "\n"


def print_problem(problem: Problem) -> str:
    lines = [f"(define (problem {problem.name})"]
    lines.append(f"  (:domain {problem.domain_name})")
    if problem.objects:
        by_type = sorted(problem.objects, key=lambda p: (p[1], p[0]))
        lines.append(f"  (:objects {_typed_seq(by_type)})")
    if problem.init:
        lines.append("  (:init")
        for atom in sorted(problem.init, key=str):
            lines.append(f"    {atom}")
        lines.append("  )")
    lines.append(f"  (:goal {condition_text(problem.goal)})")
    lines.append(")")
    return "\n".join(lines) + "\n"
