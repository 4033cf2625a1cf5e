"""Belief-weighted trees of candidate action semantics.

Per action we keep two trees (preconditions, postconditions). Internal nodes
are connectors (and / or / when); leaves are statements carrying a belief in
[0, 1]. A leaf is identified by its root-to-leaf connector chain plus the
literal text, e.g. ``putdown_pre-and-(arm-empty)``. The two branches of a
`when` are told apart by ``if``/``then`` markers, and each `when` node is
keyed by its canonical antecedent text so that distinct conditional effects
at the same level never merge.

Updates follow an exponential forgetting rule with a contradiction penalty:
a freshly predicted statement starts at 1 (minus the penalty when its
negation is predicted in the same step); afterwards beliefs decay
geometrically toward the current prediction indicator.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Union

from .pddl.model import (
    ActionSchema,
    And,
    Condition,
    Domain,
    Exists,
    Literal,
    Or,
    PddlError,
    When,
    canonical_condition_text,
    infer_requirements,
    parse_atom_text,
)

PRE = "pre"
POST = "post"


class BeliefError(PddlError):
    pass


@dataclass(frozen=True)
class BeliefConfig:
    alpha: float = 0.7   # contradiction penalty
    beta: float = 0.8    # forgetting factor
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise BeliefError("alpha must be in [0, 1]")
        if not 0.0 <= self.beta < 1.0:
            raise BeliefError("beta must be in [0, 1)")


def clamp01(x: float) -> float:
    return max(0.0, min(1.0, x))


def negate(literal: Literal) -> Literal:
    return literal.negate()


# --------------------------------------------------------------------------
# Leaf extraction from condition trees
# --------------------------------------------------------------------------

def _when_key(when: When) -> str:
    return "when{" + canonical_condition_text(when.antecedent) + "}"


def condition_leaves(cond: Condition) -> list[tuple[tuple[str, ...], Literal]]:
    """(connector chain, literal) per leaf; a bare literal root counts as (and)."""
    out: list[tuple[tuple[str, ...], Literal]] = []

    def walk(c: Condition, chain: tuple[str, ...]) -> None:
        if isinstance(c, Literal):
            out.append((chain, c))
        elif isinstance(c, And):
            for ch in c.children:
                walk(ch, chain + ("and",))
        elif isinstance(c, Or):
            for ch in c.children:
                walk(ch, chain + ("or",))
        elif isinstance(c, When):
            key = _when_key(c)
            walk(c.antecedent, chain + (key, "if"))
            walk(c.consequent, chain + (key, "then"))
        elif isinstance(c, Exists):
            raise BeliefError("exists is not allowed in a semantics tree")
        else:
            raise TypeError(f"not a condition: {c!r}")

    # a bare-literal root behaves like a one-child conjunction
    root = cond if isinstance(cond, (And, Or, When)) else And((cond,))
    walk(root, ())
    return out


def assemble_condition(leaves: Iterable[tuple[tuple[str, ...], Literal]]) -> Condition:
    """Rebuilds a condition tree from (chain, literal) leaves.

    At each level there is at most one `and` child, one `or` child, and one
    `when` child per antecedent key; leaf paths are the identity, so
    structurally equivalent proposals land on the same nodes.
    """
    tree: dict = {}
    for chain, lit in leaves:
        if not chain:
            raise BeliefError(f"leaf without a connector chain: {lit}")
        node = tree
        for tok in chain:
            node = node.setdefault(tok, {})
        node.setdefault("_lits", []).append(lit)

    def realize(token: str, node: dict) -> Condition:
        if token == "and" or token == "or":
            parts: list[Condition] = sorted(node.get("_lits", []), key=str)
            for tok in sorted(k for k in node if k != "_lits"):
                parts.append(realize(tok, node[tok]))
            return And(tuple(parts)) if token == "and" else Or(tuple(parts))
        if token.startswith("when{"):
            return When(realize_branch(node.get("if", {})),
                        realize_branch(node.get("then", {})))
        raise BeliefError(f"unknown connector token {token!r}")

    def realize_branch(node: dict) -> Condition:
        parts: list[Condition] = sorted(node.get("_lits", []), key=str)
        for tok in sorted(k for k in node if k != "_lits"):
            parts.append(realize(tok, node[tok]))
        if len(parts) == 1:
            return parts[0]
        return And(tuple(parts))

    roots = [realize(tok, tree[tok]) for tok in sorted(tree)]
    if not roots:
        return And(())
    if len(roots) == 1:
        return roots[0]
    return And(tuple(roots))


# --------------------------------------------------------------------------
# Statement nodes and memory
# --------------------------------------------------------------------------

def leaf_key(action: str, kind: str, chain: tuple[str, ...], literal: Literal) -> str:
    return f"{action}_{kind}-{'-'.join(chain)}-{literal}"


@dataclass(frozen=True)
class StatementNode:
    action: str
    kind: str                  # "pre" | "post"
    chain: tuple[str, ...]
    literal: Literal
    belief: float
    negation_link: str | None = None   # path_key of the opposite-polarity sibling

    @property
    def path_key(self) -> str:
        return leaf_key(self.action, self.kind, self.chain, self.literal)

    @property
    def sibling_key(self) -> str:
        return leaf_key(self.action, self.kind, self.chain, self.literal.negate())


@dataclass(frozen=True)
class ProposedSemantics:
    """One pre/post tree pair per action; membership is binary (no beliefs)."""

    trees: tuple[tuple[str, Condition, Condition], ...]  # (action, pre, post)

    def __post_init__(self):
        names = [a for a, _, _ in self.trees]
        if len(names) != len(set(names)):
            raise BeliefError("duplicate action in proposal")
        for _action, pre, post in self.trees:
            condition_leaves(pre)
            condition_leaves(post)

    def leaves(self) -> dict[str, Literal]:
        out: dict[str, Literal] = {}
        for action, pre, post in self.trees:
            for kind, cond in ((PRE, pre), (POST, post)):
                for chain, lit in condition_leaves(cond):
                    out[leaf_key(action, kind, chain, lit)] = lit
        return out

    def leaf_records(self) -> dict[str, tuple[str, str, tuple[str, ...], Literal]]:
        out = {}
        for action, pre, post in self.trees:
            for kind, cond in ((PRE, pre), (POST, post)):
                for chain, lit in condition_leaves(cond):
                    out[leaf_key(action, kind, chain, lit)] = (action, kind, chain, lit)
        return out


@dataclass(frozen=True)
class BeliefMemory:
    nodes: tuple[StatementNode, ...] = ()

    @cached_property
    def by_key(self) -> dict[str, StatementNode]:
        return {n.path_key: n for n in self.nodes}

    def belief(self, key: str) -> float:
        node = self.by_key.get(key)
        return node.belief if node else 0.0

    def leaves_for(self, action: str, kind: str) -> list[StatementNode]:
        return [n for n in self.nodes if n.action == action and n.kind == kind]


def update(memory: BeliefMemory, proposed: ProposedSemantics,
           cfg: BeliefConfig) -> BeliefMemory:
    """One belief step over every node predicted now or ever seen before."""
    predicted = proposed.leaf_records()
    known: dict[str, tuple[str, str, tuple[str, ...], Literal]] = {
        n.path_key: (n.action, n.kind, n.chain, n.literal) for n in memory.nodes}
    universe = dict(known)
    universe.update(predicted)

    new_nodes: list[StatementNode] = []
    for key in sorted(universe):
        action, kind, chain, literal = universe[key]
        sibling = leaf_key(action, kind, chain, literal.negate())
        phi = 1.0 if key in predicted else 0.0
        neg = 1.0 if sibling in predicted else 0.0
        p_t = memory.belief(key)
        if p_t == 0.0:
            p_next = clamp01(phi - cfg.alpha * neg)
        else:
            p_next = clamp01(cfg.beta * p_t + (1.0 - cfg.beta) * phi
                             - cfg.alpha * (1.0 - cfg.beta) * neg)
        new_nodes.append(StatementNode(action, kind, chain, literal, p_next))

    keys = {n.path_key for n in new_nodes}
    linked = [StatementNode(n.action, n.kind, n.chain, n.literal, n.belief,
                            n.sibling_key if n.sibling_key in keys else None)
              for n in new_nodes]
    return BeliefMemory(tuple(linked))


# --------------------------------------------------------------------------
# Turning memory into concrete domains
# --------------------------------------------------------------------------

def _build_domain(base: Domain, chosen: dict[tuple[str, str], list]) -> Domain:
    actions = []
    pres, posts = [], []
    for schema in base.actions:
        pre = assemble_condition(chosen.get((schema.name, PRE), []))
        post = assemble_condition(chosen.get((schema.name, POST), []))
        actions.append(ActionSchema(schema.name, schema.params, pre, post))
        pres.append(pre)
        posts.append(post)
    reqs = infer_requirements(pres, posts, typed=bool(base.types))
    return Domain(name=base.name, actions=tuple(actions), predicates=base.predicates,
                  types=base.types, constants=base.constants, requirements=reqs)


def sample_domain(memory: BeliefMemory, base: Domain,
                  cfg_or_rng: Union[BeliefConfig, random.Random]) -> Domain:
    """Bernoulli draw per leaf: include it with probability equal to its belief."""
    rng = cfg_or_rng if isinstance(cfg_or_rng, random.Random) \
        else random.Random(f"{cfg_or_rng.seed}/sample")
    chosen: dict[tuple[str, str], list] = {}
    for node in sorted(memory.nodes, key=lambda n: n.path_key):
        if rng.random() < node.belief:
            chosen.setdefault((node.action, node.kind), []).append(
                (node.chain, node.literal))
    return _build_domain(base, chosen)


def best_domain(memory: BeliefMemory, base: Domain, threshold: float = 0.5) -> Domain:
    """Deterministic snapshot: exactly the leaves with belief >= threshold."""
    chosen: dict[tuple[str, str], list] = {}
    for node in sorted(memory.nodes, key=lambda n: n.path_key):
        if node.belief >= threshold:
            chosen.setdefault((node.action, node.kind), []).append(
                (node.chain, node.literal))
    return _build_domain(base, chosen)


# --------------------------------------------------------------------------
# Path enumeration (shared by the F1 metric)
# --------------------------------------------------------------------------

def enumerate_paths(source: Union[BeliefMemory, ProposedSemantics, Domain]) -> set[str]:
    """One ``<action>_<pre|post>-<chain>-<literal>`` string per statement leaf."""
    if isinstance(source, BeliefMemory):
        return {n.path_key for n in source.nodes}
    if isinstance(source, ProposedSemantics):
        return set(source.leaves())
    if isinstance(source, Domain):
        out: set[str] = set()
        for schema in source.actions:
            for kind, cond in ((PRE, schema.precondition), (POST, schema.effect)):
                for chain, lit in condition_leaves(cond):
                    out.add(leaf_key(schema.name, kind, chain, lit))
        return out
    raise TypeError(f"cannot enumerate paths of {type(source).__name__}")


def proposal_from_domain(domain: Domain) -> ProposedSemantics:
    return ProposedSemantics(tuple(
        (a.name, a.precondition, a.effect) for a in domain.actions))


# --------------------------------------------------------------------------
# Line-oriented serialization (one record per leaf)
# --------------------------------------------------------------------------

def memory_records(memory: BeliefMemory) -> list[dict]:
    return [
        {"action": n.action, "kind": n.kind, "chain": list(n.chain),
         "literal": str(n.literal), "belief": n.belief, "path": n.path_key}
        for n in sorted(memory.nodes, key=lambda x: x.path_key)
    ]


def memory_from_records(records: Iterable[dict]) -> BeliefMemory:
    nodes = []
    for rec in records:
        text = rec["literal"]
        negated = text.startswith("(not ")
        atom = parse_atom_text(text[5:-1] if negated else text)
        nodes.append(StatementNode(rec["action"], rec["kind"], tuple(rec["chain"]),
                                   Literal(atom, negated), float(rec["belief"])))
    keys = {n.path_key for n in nodes}
    linked = tuple(StatementNode(n.action, n.kind, n.chain, n.literal, n.belief,
                                 n.sibling_key if n.sibling_key in keys else None)
                   for n in nodes)
    return BeliefMemory(linked)


def save_memory(memory: BeliefMemory, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in memory_records(memory):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def load_memory(path: str | Path) -> BeliefMemory:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return memory_from_records(records)
