"""PDDL text -> model objects.

Supported fragment: :strips, :typing, :negative-preconditions,
:disjunctive-preconditions, :conditional-effects, :existential-preconditions.
Anything outside it is a parse error. Comments run from ';' to end of line.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    ROOT_TYPE,
    SUPPORTED_REQUIREMENTS,
    ActionSchema,
    And,
    Atom,
    Condition,
    Constant,
    Domain,
    Exists,
    Literal,
    Or,
    PddlError,
    PredicateDecl,
    Problem,
    Term,
    Variable,
    When,
    validate_problem,
)


class ParseError(PddlError):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        super().__init__(f"line {line}, col {col}: {message}" if line else message)


@dataclass(frozen=True)
class SNode:
    """S-expression node: either a symbol leaf or a list of children."""

    value: str | None
    children: tuple["SNode", ...]
    line: int
    col: int

    @property
    def is_symbol(self) -> bool:
        return self.value is not None

    def sym(self) -> str:
        if self.value is None:
            raise ParseError("expected a symbol, found a list", self.line, self.col)
        return self.value


def tokenize(text: str) -> list[tuple[str, int, int]]:
    tokens: list[tuple[str, int, int]] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch in " \t\r":
            col += 1
            i += 1
            continue
        if ch in "()":
            tokens.append((ch, line, col))
            col += 1
            i += 1
            continue
        start = i
        start_col = col
        while i < n and text[i] not in " \t\r\n();":
            i += 1
            col += 1
        tokens.append((text[start:i].lower(), line, start_col))
    return tokens


def read_sexprs(text: str) -> list[SNode]:
    tokens = tokenize(text)
    pos = 0

    def parse_one() -> SNode:
        nonlocal pos
        tok, line, col = tokens[pos]
        if tok == ")":
            raise ParseError("unexpected ')'", line, col)
        if tok == "(":
            pos += 1
            children: list[SNode] = []
            while True:
                if pos >= len(tokens):
                    raise ParseError("missing ')'", line, col)
                if tokens[pos][0] == ")":
                    pos += 1
                    return SNode(None, tuple(children), line, col)
                children.append(parse_one())
        pos += 1
        return SNode(tok, (), line, col)

    out: list[SNode] = []
    while pos < len(tokens):
        out.append(parse_one())
    return out


def _parse_typed_list(nodes: tuple[SNode, ...], default_type: str = ROOT_TYPE,
                      what: str = "name") -> list[tuple[str, str]]:
    """Parses 'a b - t c - u d' style lists into (name, type) pairs."""
    out: list[tuple[str, str]] = []
    pending: list[SNode] = []
    i = 0
    while i < len(nodes):
        node = nodes[i]
        if node.is_symbol and node.sym() == "-":
            if not pending:
                raise ParseError(f"dangling '-' in {what} list", node.line, node.col)
            if i + 1 >= len(nodes) or not nodes[i + 1].is_symbol:
                raise ParseError("expected a type after '-'", node.line, node.col)
            typ = nodes[i + 1].sym()
            out.extend((p.sym(), typ) for p in pending)
            pending = []
            i += 2
            continue
        if not node.is_symbol:
            raise ParseError(f"expected a {what}, found a list", node.line, node.col)
        pending.append(node)
        i += 1
    out.extend((p.sym(), default_type) for p in pending)
    return out


def _term(node: SNode) -> Term:
    tok = node.sym()
    return Variable(tok) if tok.startswith("?") else Constant(tok)


def _parse_atom(node: SNode) -> Atom:
    if node.is_symbol or not node.children:
        raise ParseError("expected an atom '(pred ...)'", node.line, node.col)
    head = node.children[0]
    if not head.is_symbol:
        raise ParseError("predicate name expected", head.line, head.col)
    return Atom(head.sym(), tuple(_term(c) for c in node.children[1:]))


def parse_condition(node: SNode, *, allow_when: bool = False) -> Condition:
    """Parses a goal/precondition/effect tree; 'when' only when allowed."""
    if node.is_symbol:
        raise ParseError(f"expected a condition, found {node.sym()!r}", node.line, node.col)
    if not node.children:
        # "()" is treated as an empty conjunction
        return And(())
    head = node.children[0]
    if not head.is_symbol:
        raise ParseError("connector or predicate expected", head.line, head.col)
    op = head.sym()
    rest = node.children[1:]
    if op == "and":
        return And(tuple(parse_condition(c, allow_when=allow_when) for c in rest))
    if op == "or":
        return Or(tuple(parse_condition(c, allow_when=allow_when) for c in rest))
    if op == "not":
        if len(rest) != 1:
            raise ParseError("'not' takes exactly one atom", node.line, node.col)
        return Literal(_parse_atom(rest[0]), negated=True)
    if op == "when":
        if not allow_when:
            raise ParseError("'when' is only legal inside an effect", node.line, node.col)
        if len(rest) != 2:
            raise ParseError("'when' takes a condition and an effect", node.line, node.col)
        return When(parse_condition(rest[0], allow_when=False),
                    parse_condition(rest[1], allow_when=False))
    if op == "exists":
        if len(rest) != 2 or rest[0].is_symbol:
            raise ParseError("'exists' takes a variable list and a body", node.line, node.col)
        pairs = _parse_typed_list(rest[0].children, what="variable")
        variables = []
        for name, typ in pairs:
            if not name.startswith("?"):
                raise ParseError(f"exists binds variables, got {name!r}",
                                 rest[0].line, rest[0].col)
            variables.append(Variable(name, typ))
        return Exists(tuple(variables), parse_condition(rest[1], allow_when=False))
    if op in ("forall", "imply", "=", ">=", "<=", "increase", "decrease", "assign"):
        raise ParseError(f"unsupported construct {op!r}", node.line, node.col)
    return Literal(_parse_atom(node))


def _expect_define(node: SNode, section: str) -> tuple[str, tuple[SNode, ...]]:
    if node.is_symbol or not node.children:
        raise ParseError(f"expected '(define ({section} ...))'", node.line, node.col)
    head = node.children[0]
    if not (head.is_symbol and head.sym() == "define"):
        raise ParseError("expected 'define'", node.line, node.col)
    if len(node.children) < 2 or node.children[1].is_symbol:
        raise ParseError(f"expected '({section} <name>)'", node.line, node.col)
    decl = node.children[1]
    if (len(decl.children) != 2 or not decl.children[0].is_symbol
            or decl.children[0].sym() != section or not decl.children[1].is_symbol):
        raise ParseError(f"expected '({section} <name>)'", decl.line, decl.col)
    return decl.children[1].sym(), node.children[2:]


def parse_domain(text: str) -> Domain:
    """Parses a single '(define (domain ...))' form."""
    forms = read_sexprs(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one domain definition")
    name, sections = _expect_define(forms[0], "domain")

    requirements: tuple[str, ...] = (":strips",)
    types: list[tuple[str, str]] = []
    constants: list[tuple[str, str]] = []
    predicates: list[PredicateDecl] = []
    actions: list[ActionSchema] = []

    for sec in sections:
        if sec.is_symbol or not sec.children or not sec.children[0].is_symbol:
            raise ParseError("expected a (:section ...)", sec.line, sec.col)
        key = sec.children[0].sym()
        body = sec.children[1:]
        if key == ":requirements":
            reqs = []
            for r in body:
                if r.sym() not in SUPPORTED_REQUIREMENTS:
                    raise ParseError(f"unsupported requirement {r.sym()}", r.line, r.col)
                reqs.append(r.sym())
            requirements = tuple(reqs) if reqs else (":strips",)
        elif key == ":types":
            types.extend(_parse_typed_list(body, what="type"))
        elif key == ":constants":
            constants.extend(_parse_typed_list(body, what="constant"))
        elif key == ":predicates":
            for p in body:
                if p.is_symbol or not p.children or not p.children[0].is_symbol:
                    raise ParseError("bad predicate declaration", p.line, p.col)
                pairs = _parse_typed_list(p.children[1:], what="parameter")
                params = []
                for pname, ptyp in pairs:
                    if not pname.startswith("?"):
                        raise ParseError(f"predicate parameter must be a variable: {pname}",
                                         p.line, p.col)
                    params.append(Variable(pname, ptyp))
                predicates.append(PredicateDecl(p.children[0].sym(), tuple(params)))
        elif key == ":action":
            actions.append(_parse_action(sec))
        else:
            raise ParseError(f"unsupported section {key}", sec.line, sec.col)

    try:
        return Domain(name=name, actions=tuple(actions), predicates=tuple(predicates),
                      types=tuple(types), constants=tuple(constants),
                      requirements=requirements)
    except PddlError as exc:
        raise ParseError(str(exc)) from exc


def _parse_action(sec: SNode) -> ActionSchema:
    body = sec.children[1:]
    if not body or not body[0].is_symbol:
        raise ParseError("action name expected", sec.line, sec.col)
    name = body[0].sym()
    params: tuple[Variable, ...] = ()
    precondition: Condition = And(())
    effect: Condition = And(())
    i = 1
    while i < len(body):
        key_node = body[i]
        if not key_node.is_symbol:
            raise ParseError("expected :parameters/:precondition/:effect",
                             key_node.line, key_node.col)
        key = key_node.sym()
        if i + 1 >= len(body):
            raise ParseError(f"missing value for {key}", key_node.line, key_node.col)
        val = body[i + 1]
        if key == ":parameters":
            if val.is_symbol:
                raise ParseError(":parameters expects a list", val.line, val.col)
            pairs = _parse_typed_list(val.children, what="parameter")
            plist = []
            for pname, ptyp in pairs:
                if not pname.startswith("?"):
                    raise ParseError(f"parameter must be a variable: {pname}", val.line, val.col)
                plist.append(Variable(pname, ptyp))
            params = tuple(plist)
        elif key == ":precondition":
            precondition = parse_condition(val, allow_when=False)
        elif key == ":effect":
            effect = parse_condition(val, allow_when=True)
        else:
            raise ParseError(f"unsupported action field {key}", key_node.line, key_node.col)
        i += 2
    return ActionSchema(name, params, precondition, effect)


def parse_problem(text: str, domain: Domain) -> Problem:
    """Parses a '(define (problem ...))' form and validates it against the domain."""
    forms = read_sexprs(text)
    if len(forms) != 1:
        raise ParseError("expected exactly one problem definition")
    name, sections = _expect_define(forms[0], "problem")

    domain_name = ""
    objects: list[tuple[str, str]] = []
    init: list[Atom] = []
    goal: Condition | None = None

    for sec in sections:
        if sec.is_symbol or not sec.children or not sec.children[0].is_symbol:
            raise ParseError("expected a (:section ...)", sec.line, sec.col)
        key = sec.children[0].sym()
        body = sec.children[1:]
        if key == ":domain":
            if len(body) != 1 or not body[0].is_symbol:
                raise ParseError(":domain expects one name", sec.line, sec.col)
            domain_name = body[0].sym()
        elif key == ":objects":
            objects.extend(_parse_typed_list(body, what="object"))
        elif key == ":init":
            for node in body:
                atom = _parse_atom(node)
                if not atom.is_ground:
                    raise ParseError("init atoms must be ground", node.line, node.col)
                init.append(atom)
        elif key == ":goal":
            if len(body) != 1:
                raise ParseError(":goal expects one condition", sec.line, sec.col)
            goal = parse_condition(body[0], allow_when=False)
        elif key == ":requirements":
            continue
        else:
            raise ParseError(f"unsupported section {key}", sec.line, sec.col)

    if goal is None:
        raise ParseError("problem has no :goal")
    try:
        problem = Problem(name=name, domain_name=domain_name or domain.name,
                          objects=tuple(objects), init=frozenset(init), goal=goal)
        validate_problem(problem, domain)
    except PddlError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc)) from exc
    return problem
