"""Execution semantics over ground states: grounding, evaluation, application.

States are closed-world ground atom sets. Effects use delete-then-add: within
one effect, a literal that is both deleted and added ends up present. All
conditional effects read the pre-state.
"""

from __future__ import annotations

from .model import (
    ActionSchema,
    And,
    Atom,
    Condition,
    Constant,
    Domain,
    Exists,
    GroundAction,
    Literal,
    Or,
    PddlError,
    Problem,
    Term,
    Variable,
    When,
)


class EvaluationError(PddlError):
    """Raised when a condition cannot be evaluated or applied as requested."""


def substitute(cond: Condition, binding: dict[str, Constant]) -> Condition:
    if isinstance(cond, Literal):
        args: list[Term] = []
        for t in cond.atom.args:
            if isinstance(t, Variable) and t.name in binding:
                args.append(binding[t.name])
            else:
                args.append(t)
        return Literal(Atom(cond.atom.predicate, tuple(args)), cond.negated)
    if isinstance(cond, And):
        return And(tuple(substitute(c, binding) for c in cond.children))
    if isinstance(cond, Or):
        return Or(tuple(substitute(c, binding) for c in cond.children))
    if isinstance(cond, When):
        return When(substitute(cond.antecedent, binding),
                    substitute(cond.consequent, binding))
    if isinstance(cond, Exists):
        inner = {k: v for k, v in binding.items()
                 if k not in {v2.name for v2 in cond.variables}}
        return Exists(cond.variables, substitute(cond.body, inner))
    raise TypeError(f"not a condition: {cond!r}")


def expand_exists(cond: Condition, domain: Domain, problem: Problem) -> Condition:
    """Replaces each Exists with an Or over the declared objects of its types.

    A quantifier over a type with no objects expands to an empty Or, which
    evaluates false.
    """
    if isinstance(cond, Literal):
        return cond
    if isinstance(cond, And):
        return And(tuple(expand_exists(c, domain, problem) for c in cond.children))
    if isinstance(cond, Or):
        return Or(tuple(expand_exists(c, domain, problem) for c in cond.children))
    if isinstance(cond, When):
        return When(expand_exists(cond.antecedent, domain, problem),
                    expand_exists(cond.consequent, domain, problem))
    if isinstance(cond, Exists):
        body = expand_exists(cond.body, domain, problem)
        disjuncts = [body]
        for v in cond.variables:
            names = problem.objects_of_type(v.type, domain)
            expanded = []
            for d in disjuncts:
                for name in names:
                    expanded.append(substitute(d, {v.name: Constant(name)}))
            disjuncts = expanded
        return Or(tuple(disjuncts))
    raise TypeError(f"not a condition: {cond!r}")


def ground(schema: ActionSchema, args: tuple[str, ...] | list[str],
           domain: Domain, problem: Problem) -> tuple[Condition, Condition]:
    """Grounds one schema application; returns (precondition, effect) trees."""
    args = tuple(args)
    if len(args) != len(schema.params):
        raise EvaluationError(
            f"arity mismatch for {schema.name}: got {len(args)}, "
            f"expected {len(schema.params)}")
    binding: dict[str, Constant] = {}
    for param, arg in zip(schema.params, args):
        typ = problem.object_types.get(arg, domain.constant_types.get(arg))
        if typ is None:
            raise EvaluationError(f"unknown object {arg} for {schema.name}")
        if not domain.is_subtype(typ, param.type):
            raise EvaluationError(
                f"type violation: {arg} is {typ}, {schema.name} expects {param.type}")
        binding[param.name] = Constant(arg)
    pre = expand_exists(substitute(schema.precondition, binding), domain, problem)
    eff = substitute(schema.effect, binding)
    return pre, eff


def holds(state: frozenset[Atom], cond: Condition) -> bool:
    """Closed-world evaluation of a ground condition."""
    if isinstance(cond, Literal):
        if not cond.atom.is_ground:
            raise EvaluationError(f"free variables in {cond}")
        return (cond.atom in state) != cond.negated
    if isinstance(cond, And):
        return all(holds(state, c) for c in cond.children)
    if isinstance(cond, Or):
        return any(holds(state, c) for c in cond.children)
    if isinstance(cond, Exists):
        raise EvaluationError("exists must be expanded before evaluation")
    if isinstance(cond, When):
        raise EvaluationError("when is not evaluable as a condition")
    raise TypeError(f"not a condition: {cond!r}")


def _collect_effect(effect: Condition, base: frozenset[Atom],
                    adds: set[Atom], dels: set[Atom]) -> None:
    if isinstance(effect, Literal):
        if not effect.atom.is_ground:
            raise EvaluationError(f"free variables in effect literal {effect}")
        (dels if effect.negated else adds).add(effect.atom)
        return
    if isinstance(effect, And):
        for c in effect.children:
            _collect_effect(c, base, adds, dels)
        return
    if isinstance(effect, When):
        if holds(base, effect.antecedent):
            _collect_effect(effect.consequent, base, adds, dels)
        return
    if isinstance(effect, Or):
        raise EvaluationError("or is not a legal effect")
    if isinstance(effect, Exists):
        raise EvaluationError("exists is not a legal effect")
    raise TypeError(f"not a condition: {effect!r}")


def apply_effect(state: frozenset[Atom], effect: Condition) -> frozenset[Atom]:
    """Delete-then-add application; 'when' antecedents read the input state."""
    adds: set[Atom] = set()
    dels: set[Atom] = set()
    _collect_effect(effect, state, adds, dels)
    return (state - dels) | adds


def applicable(state: frozenset[Atom], action: GroundAction,
               domain: Domain, problem: Problem) -> bool:
    schema = domain.action_map.get(action.name)
    if schema is None:
        raise EvaluationError(f"unknown action {action.name}")
    try:
        pre, _ = ground(schema, action.args, domain, problem)
    except EvaluationError:
        return False
    return holds(state, pre)


def execute(state: frozenset[Atom], action: GroundAction,
            domain: Domain, problem: Problem) -> frozenset[Atom] | None:
    """One checked step: the successor state, or None when inapplicable."""
    schema = domain.action_map.get(action.name)
    if schema is None:
        raise EvaluationError(f"unknown action {action.name}")
    try:
        pre, eff = ground(schema, action.args, domain, problem)
    except EvaluationError:
        return None
    if not holds(state, pre):
        return None
    return apply_effect(state, eff)


def goal_conjunct_counts(state: frozenset[Atom], goal: Condition,
                         domain: Domain, problem: Problem) -> tuple[int, int]:
    """(satisfied, total) over the goal's top-level conjuncts."""
    from .model import top_level_conjuncts

    conjuncts = top_level_conjuncts(goal)
    if not conjuncts:
        return 0, 0
    satisfied = 0
    for c in conjuncts:
        expanded = expand_exists(c, domain, problem)
        if holds(state, expanded):
            satisfied += 1
    return satisfied, len(conjuncts)
