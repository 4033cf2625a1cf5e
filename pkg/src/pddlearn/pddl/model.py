"""Core PDDL value types: terms, atoms, condition trees, schemas, domains, problems.

Everything is immutable after construction. Identifiers are case-insensitive
and canonicalized to lowercase. States are ground-atom sets read closed-world:
an absent atom is false.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Iterator, Union

ROOT_TYPE = "object"

SUPPORTED_REQUIREMENTS = (
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":disjunctive-preconditions",
    ":conditional-effects",
    ":existential-preconditions",
)


class PddlError(Exception):
    """Base error for PDDL construction and use."""


class ValidationError(PddlError):
    """A structural rule was violated (arity, typing, duplicate names, ...)."""


def canon(name: str) -> str:
    if not name:
        raise ValidationError("identifier must be nonempty")
    return name.lower()


@dataclass(frozen=True)
class Variable:
    """A typed variable; the name carries the leading '?'."""

    name: str
    type: str = ROOT_TYPE

    def __post_init__(self):
        object.__setattr__(self, "name", canon(self.name))
        object.__setattr__(self, "type", canon(self.type))
        if not self.name.startswith("?"):
            raise ValidationError(f"variable name must start with '?': {self.name!r}")

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Constant:
    """An object name used as a term."""

    name: str

    def __post_init__(self):
        object.__setattr__(self, "name", canon(self.name))
        if self.name.startswith("?"):
            raise ValidationError(f"constant must not start with '?': {self.name!r}")

    def __str__(self) -> str:
        return self.name


Term = Union[Variable, Constant]


@dataclass(frozen=True)
class Atom:
    """A predicate applied to terms. Ground iff every term is a Constant."""

    predicate: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "predicate", canon(self.predicate))
        object.__setattr__(self, "args", tuple(self.args))

    @property
    def is_ground(self) -> bool:
        return all(isinstance(t, Constant) for t in self.args)

    def __str__(self) -> str:
        if not self.args:
            return f"({self.predicate})"
        return f"({self.predicate} {' '.join(str(t) for t in self.args)})"


def ground_atom(predicate: str, *names: str) -> Atom:
    return Atom(predicate, tuple(Constant(n) for n in names))


def parse_atom_text(text: str) -> Atom:
    """Parse a single '(pred a b)' string into a ground-or-lifted Atom."""
    parts = text.strip()
    if not (parts.startswith("(") and parts.endswith(")")):
        raise ValidationError(f"not an atom: {text!r}")
    tokens = parts[1:-1].split()
    if not tokens:
        raise ValidationError(f"empty atom: {text!r}")
    args: list[Term] = []
    for tok in tokens[1:]:
        args.append(Variable(tok) if tok.startswith("?") else Constant(tok))
    return Atom(tokens[0], tuple(args))


# --------------------------------------------------------------------------
# Condition trees
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def negate(self) -> "Literal":
        return Literal(self.atom, not self.negated)

    def __str__(self) -> str:
        return f"(not {self.atom})" if self.negated else str(self.atom)


@dataclass(frozen=True)
class And:
    children: tuple["Condition", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class Or:
    children: tuple["Condition", ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))


@dataclass(frozen=True)
class When:
    """Conditional effect: consequent applies when antecedent holds pre-state."""

    antecedent: "Condition"
    consequent: "Condition"


@dataclass(frozen=True)
class Exists:
    variables: tuple[Variable, ...]
    body: "Condition"

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))


Condition = Union[Literal, And, Or, When, Exists]

TRUE = And(())


def condition_text(cond: Condition) -> str:
    """Canonical single-line rendering; empty connectives keep a space: '(and )'."""
    if isinstance(cond, Literal):
        return str(cond)
    if isinstance(cond, And):
        inner = " ".join(condition_text(c) for c in cond.children)
        return f"(and {inner})"
    if isinstance(cond, Or):
        inner = " ".join(condition_text(c) for c in cond.children)
        return f"(or {inner})"
    if isinstance(cond, When):
        return f"(when {condition_text(cond.antecedent)} {condition_text(cond.consequent)})"
    if isinstance(cond, Exists):
        vars_txt = " ".join(f"{v.name} - {v.type}" for v in cond.variables)
        return f"(exists ({vars_txt}) {condition_text(cond.body)})"
    raise TypeError(f"not a condition: {cond!r}")


def canonical_condition_text(cond: Condition) -> str:
    """Rendering that ignores child order inside and/or (used for node identity)."""
    if isinstance(cond, And):
        inner = " ".join(sorted(canonical_condition_text(c) for c in cond.children))
        return f"(and {inner})"
    if isinstance(cond, Or):
        inner = " ".join(sorted(canonical_condition_text(c) for c in cond.children))
        return f"(or {inner})"
    if isinstance(cond, When):
        return (f"(when {canonical_condition_text(cond.antecedent)} "
                f"{canonical_condition_text(cond.consequent)})")
    return condition_text(cond)


def iter_literals(cond: Condition) -> Iterator[Literal]:
    if isinstance(cond, Literal):
        yield cond
    elif isinstance(cond, (And, Or)):
        for c in cond.children:
            yield from iter_literals(c)
    elif isinstance(cond, When):
        yield from iter_literals(cond.antecedent)
        yield from iter_literals(cond.consequent)
    elif isinstance(cond, Exists):
        yield from iter_literals(cond.body)


def conjunctive_literals(cond: Condition) -> list[Literal]:
    """Literals that must hold whenever the condition holds (top-level and-paths)."""
    if isinstance(cond, Literal):
        return [cond]
    if isinstance(cond, And):
        out: list[Literal] = []
        for c in cond.children:
            out.extend(conjunctive_literals(c))
        return out
    return []


def top_level_conjuncts(cond: Condition) -> tuple[Condition, ...]:
    if isinstance(cond, And) and cond.children:
        return cond.children
    if isinstance(cond, And):
        return ()
    return (cond,)


def free_variables(cond: Condition, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(cond, Literal):
        return {t.name for t in cond.atom.args
                if isinstance(t, Variable) and t.name not in bound}
    if isinstance(cond, (And, Or)):
        out: set[str] = set()
        for c in cond.children:
            out |= free_variables(c, bound)
        return out
    if isinstance(cond, When):
        return free_variables(cond.antecedent, bound) | free_variables(cond.consequent, bound)
    if isinstance(cond, Exists):
        inner = bound | {v.name for v in cond.variables}
        return free_variables(cond.body, inner)
    raise TypeError(f"not a condition: {cond!r}")


# --------------------------------------------------------------------------
# Schemas, domains, problems
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PredicateDecl:
    name: str
    params: tuple[Variable, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "name", canon(self.name))
        object.__setattr__(self, "params", tuple(self.params))

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class ActionSchema:
    name: str
    params: tuple[Variable, ...]
    precondition: Condition
    effect: Condition

    def __post_init__(self):
        object.__setattr__(self, "name", canon(self.name))
        object.__setattr__(self, "params", tuple(self.params))
        seen = set()
        for p in self.params:
            if p.name in seen:
                raise ValidationError(f"duplicate parameter {p.name} in action {self.name}")
            seen.add(p.name)


@dataclass(frozen=True)
class Domain:
    """An action domain: type forest, predicate declarations, action schemas."""

    name: str
    actions: tuple[ActionSchema, ...] = ()
    predicates: tuple[PredicateDecl, ...] = ()
    types: tuple[tuple[str, str], ...] = ()       # (child, parent) pairs
    constants: tuple[tuple[str, str], ...] = ()   # (name, type) pairs
    requirements: tuple[str, ...] = (":strips",)

    def __post_init__(self):
        object.__setattr__(self, "name", canon(self.name))
        object.__setattr__(self, "actions", tuple(self.actions))
        object.__setattr__(self, "predicates", tuple(self.predicates))
        object.__setattr__(self, "types", tuple((canon(c), canon(p)) for c, p in self.types))
        object.__setattr__(self, "constants", tuple((canon(n), canon(t)) for n, t in self.constants))
        object.__setattr__(self, "requirements", tuple(self.requirements))
        self._validate()

    # -- lookups ------------------------------------------------------------

    @cached_property
    def predicate_map(self) -> dict[str, PredicateDecl]:
        return {p.name: p for p in self.predicates}

    @cached_property
    def action_map(self) -> dict[str, ActionSchema]:
        return {a.name: a for a in self.actions}

    @cached_property
    def parent_map(self) -> dict[str, str]:
        return dict(self.types)

    @cached_property
    def declared_types(self) -> frozenset[str]:
        names = {ROOT_TYPE}
        for child, parent in self.types:
            names.add(child)
            names.add(parent)
        return frozenset(names)

    @cached_property
    def constant_types(self) -> dict[str, str]:
        return dict(self.constants)

    def is_subtype(self, child: str, ancestor: str) -> bool:
        if ancestor == ROOT_TYPE:
            return True
        cur: str | None = child
        while cur is not None:
            if cur == ancestor:
                return True
            cur = self.parent_map.get(cur)
        return False

    # -- validation ----------------------------------------------------------

    def _validate(self) -> None:
        for req in self.requirements:
            if req not in SUPPORTED_REQUIREMENTS:
                raise ValidationError(f"unsupported requirement {req}")
        seen_p: set[str] = set()
        for p in self.predicates:
            if p.name in seen_p:
                raise ValidationError(f"duplicate predicate {p.name}")
            seen_p.add(p.name)
        seen_a: set[str] = set()
        for a in self.actions:
            if a.name in seen_a:
                raise ValidationError(f"duplicate action name {a.name}")
            seen_a.add(a.name)
        # type forest rooted at object, no cycles
        for child, _parent in self.types:
            hops = 0
            cur: str | None = child
            while cur is not None and cur != ROOT_TYPE:
                cur = self.parent_map.get(cur)
                hops += 1
                if hops > len(self.types) + 1:
                    raise ValidationError(f"type cycle involving {child}")
        for name, typ in self.constants:
            if typ not in self.declared_types:
                raise ValidationError(f"constant {name} has unknown type {typ}")
        for a in self.actions:
            bound = frozenset(p.name for p in a.params)
            self._check_condition(a.precondition, bound, effect=False, action=a.name)
            self._check_condition(a.effect, bound, effect=True, action=a.name)

    def _check_condition(self, cond: Condition, bound: frozenset[str],
                         *, effect: bool, action: str, in_when: bool = False) -> None:
        if isinstance(cond, Literal):
            self.check_atom(cond.atom, bound)
            return
        if isinstance(cond, And):
            for c in cond.children:
                self._check_condition(c, bound, effect=effect, action=action, in_when=in_when)
            return
        if isinstance(cond, Or):
            if effect:
                raise ValidationError(f"or is not allowed inside the effect of {action}")
            for c in cond.children:
                self._check_condition(c, bound, effect=effect, action=action)
            return
        if isinstance(cond, When):
            if not effect or in_when:
                raise ValidationError(f"when is only legal at effect top level ({action})")
            self._check_condition(cond.antecedent, bound, effect=False, action=action)
            self._check_condition(cond.consequent, bound, effect=True, action=action, in_when=True)
            return
        if isinstance(cond, Exists):
            if effect:
                raise ValidationError(f"exists is not allowed inside the effect of {action}")
            for v in cond.variables:
                if v.type not in self.declared_types:
                    raise ValidationError(f"unknown type {v.type} in exists ({action})")
            inner = bound | {v.name for v in cond.variables}
            self._check_condition(cond.body, inner, effect=False, action=action)
            return
        raise TypeError(f"not a condition: {cond!r}")

    def check_atom(self, atom: Atom, bound: frozenset[str] = frozenset(),
                   object_types: dict[str, str] | None = None) -> None:
        """Arity/typing/binding check for one atom against this domain."""
        decl = self.predicate_map.get(atom.predicate)
        if decl is None:
            raise ValidationError(f"unknown predicate {atom.predicate}")
        if len(atom.args) != decl.arity:
            raise ValidationError(
                f"arity mismatch for {atom.predicate}: got {len(atom.args)}, "
                f"declared {decl.arity}")
        for term, param in zip(atom.args, decl.params):
            if isinstance(term, Variable):
                if term.name not in bound:
                    raise ValidationError(f"unbound variable {term.name} in {atom}")
                continue
            typ = self.constant_types.get(term.name)
            if typ is None and object_types is not None:
                typ = object_types.get(term.name)
            if typ is None:
                raise ValidationError(f"unknown object {term.name} in {atom}")
            if not self.is_subtype(typ, param.type):
                raise ValidationError(
                    f"type violation in {atom}: {term.name} is {typ}, "
                    f"expected {param.type}")


def infer_requirements(preconditions: Iterable[Condition],
                       effects: Iterable[Condition],
                       typed: bool) -> tuple[str, ...]:
    """Minimal requirement flags implied by a domain's condition trees."""
    reqs = [":strips"]
    if typed:
        reqs.append(":typing")
    flags = set()

    def walk(cond: Condition, in_precondition: bool) -> None:
        if isinstance(cond, Literal):
            if cond.negated and in_precondition:
                flags.add(":negative-preconditions")
        elif isinstance(cond, And):
            for c in cond.children:
                walk(c, in_precondition)
        elif isinstance(cond, Or):
            flags.add(":disjunctive-preconditions")
            for c in cond.children:
                walk(c, in_precondition)
        elif isinstance(cond, When):
            flags.add(":conditional-effects")
            walk(cond.antecedent, True)
            walk(cond.consequent, False)
        elif isinstance(cond, Exists):
            flags.add(":existential-preconditions")
            walk(cond.body, in_precondition)

    for cond in preconditions:
        walk(cond, True)
    for cond in effects:
        walk(cond, False)
    reqs.extend(r for r in SUPPORTED_REQUIREMENTS if r in flags)
    return tuple(reqs)


@dataclass(frozen=True)
class Problem:
    """Objects, initial ground-atom set, and a goal condition."""

    name: str
    domain_name: str
    objects: tuple[tuple[str, str], ...]   # (name, type), stored sorted
    init: frozenset[Atom]
    goal: Condition

    def __post_init__(self):
        object.__setattr__(self, "name", canon(self.name))
        object.__setattr__(self, "domain_name", canon(self.domain_name))
        objs = tuple(sorted((canon(n), canon(t)) for n, t in self.objects))
        names = [n for n, _ in objs]
        if len(names) != len(set(names)):
            raise ValidationError("duplicate object declaration")
        object.__setattr__(self, "objects", objs)
        object.__setattr__(self, "init", frozenset(self.init))
        for atom in self.init:
            if not atom.is_ground:
                raise ValidationError(f"init atom must be ground: {atom}")

    @cached_property
    def object_types(self) -> dict[str, str]:
        return dict(self.objects)

    def objects_of_type(self, typ: str, domain: Domain) -> list[str]:
        pool = list(self.objects) + list(domain.constants)
        return sorted({n for n, t in pool if domain.is_subtype(t, typ)})


def validate_problem(problem: Problem, domain: Domain) -> None:
    """Cross-checks a problem against its domain (predicates, objects, goal)."""
    if problem.domain_name != domain.name:
        raise ValidationError(
            f"problem references domain {problem.domain_name}, got {domain.name}")
    for _name, typ in problem.objects:
        if typ not in domain.declared_types:
            raise ValidationError(f"object with unknown type {typ}")
    for atom in sorted(problem.init, key=str):
        domain.check_atom(atom, object_types=problem.object_types)
    _check_goal(problem.goal, domain, problem.object_types, frozenset())


def _check_goal(cond: Condition, domain: Domain, object_types: dict[str, str],
                bound: frozenset[str]) -> None:
    if isinstance(cond, Literal):
        domain.check_atom(cond.atom, bound, object_types)
    elif isinstance(cond, (And, Or)):
        for c in cond.children:
            _check_goal(c, domain, object_types, bound)
    elif isinstance(cond, Exists):
        for v in cond.variables:
            if v.type not in domain.declared_types:
                raise ValidationError(f"unknown type {v.type} in goal exists")
        _check_goal(cond.body, domain, object_types, bound | {v.name for v in cond.variables})
    elif isinstance(cond, When):
        raise ValidationError("when is not allowed in a goal")
    else:
        raise TypeError(f"not a condition: {cond!r}")


# --------------------------------------------------------------------------
# Ground actions and states
# --------------------------------------------------------------------------

State = frozenset  # frozenset[Atom], all ground

_GROUND_ACTION_RE = re.compile(r"^\(\s*([^\s()]+)((?:\s+[^\s()]+)*)\s*\)$")


@dataclass(frozen=True)
class GroundAction:
    name: str
    args: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "name", canon(self.name))
        object.__setattr__(self, "args", tuple(canon(a) for a in self.args))

    @classmethod
    def parse(cls, text: str) -> "GroundAction":
        m = _GROUND_ACTION_RE.match(text.strip())
        if not m:
            raise ValidationError(f"not a ground action: {text!r}")
        return cls(m.group(1), tuple(m.group(2).split()))

    def __str__(self) -> str:
        if not self.args:
            return f"({self.name})"
        return f"({self.name} {' '.join(self.args)})"


def state_from(atoms: Iterable[Atom]) -> frozenset[Atom]:
    out = frozenset(atoms)
    for a in out:
        if not a.is_ground:
            raise ValidationError(f"state atom must be ground: {a}")
    return out
