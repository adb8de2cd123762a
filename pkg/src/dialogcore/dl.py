"""Definitional concept language: terminologies, fact bases, instance checks.

The language is deliberately small: atomic concepts, conjunction,
disjunction, qualified existential and value restrictions, role inverse and
role union.  There is no negation, so every definition denotes a positive
query and instance checking stays open world: an individual is either
*proved* to belong to a concept or the question stays open (*unproved*).

Terminologies are definitional and acyclic; defined names unfold into
primitive vocabulary in finitely many steps.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

from .errors import (
    CyclicTerminologyError,
    DomainSyntaxError,
    UndefinedNameError,
    UnsatisfiableDefinitionError,
)


# ---------------------------------------------------------------------------
# expressions
# ---------------------------------------------------------------------------

class ConceptExpr:
    __slots__ = ()


class RoleExpr:
    __slots__ = ()


@dataclass(frozen=True)
class Atomic(ConceptExpr):
    name: str


@dataclass(frozen=True)
class Top(ConceptExpr):
    pass


@dataclass(frozen=True)
class Conjunction(ConceptExpr):
    parts: tuple[ConceptExpr, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("empty conjunction")


@dataclass(frozen=True)
class Disjunction(ConceptExpr):
    parts: tuple[ConceptExpr, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("empty disjunction")


@dataclass(frozen=True)
class Exists(ConceptExpr):
    role: RoleExpr
    filler: ConceptExpr


@dataclass(frozen=True)
class Forall(ConceptExpr):
    role: RoleExpr
    filler: ConceptExpr


@dataclass(frozen=True)
class AtomicRole(RoleExpr):
    name: str


@dataclass(frozen=True)
class Inverse(RoleExpr):
    role: RoleExpr


@dataclass(frozen=True)
class RoleUnion(RoleExpr):
    parts: tuple[RoleExpr, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise ValueError("empty role union")


def conj(parts: Iterable[ConceptExpr]) -> ConceptExpr:
    """Conjunction, flattening nested conjunctions left to right."""
    flat: list[ConceptExpr] = []
    for p in parts:
        if isinstance(p, Conjunction):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Conjunction(tuple(flat))


def disj(parts: Iterable[ConceptExpr]) -> ConceptExpr:
    flat: list[ConceptExpr] = []
    for p in parts:
        if isinstance(p, Disjunction):
            flat.extend(p.parts)
        else:
            flat.append(p)
    if len(flat) == 1:
        return flat[0]
    return Disjunction(tuple(flat))


def inverse(r: RoleExpr) -> RoleExpr:
    """Inverse constructor; a double inverse cancels."""
    if isinstance(r, Inverse):
        return r.role
    return Inverse(r)


def conjuncts(c: ConceptExpr) -> tuple[ConceptExpr, ...]:
    if isinstance(c, Conjunction):
        return c.parts
    return (c,)


def concept_names(c: ConceptExpr) -> set[str]:
    if isinstance(c, Atomic):
        return {c.name}
    if isinstance(c, Top):
        return set()
    if isinstance(c, (Conjunction, Disjunction)):
        out: set[str] = set()
        for p in c.parts:
            out |= concept_names(p)
        return out
    if isinstance(c, (Exists, Forall)):
        return concept_names(c.filler)
    raise TypeError(f"not a concept: {c!r}")


def role_names(c: ConceptExpr | RoleExpr) -> set[str]:
    if isinstance(c, AtomicRole):
        return {c.name}
    if isinstance(c, Inverse):
        return role_names(c.role)
    if isinstance(c, RoleUnion):
        out: set[str] = set()
        for p in c.parts:
            out |= role_names(p)
        return out
    if isinstance(c, (Atomic, Top)):
        return set()
    if isinstance(c, (Conjunction, Disjunction)):
        out = set()
        for p in c.parts:
            out |= role_names(p)
        return out
    if isinstance(c, (Exists, Forall)):
        return role_names(c.role) | role_names(c.filler)
    raise TypeError(f"not an expression: {c!r}")


def concept_text(c: ConceptExpr) -> str:
    if isinstance(c, Atomic):
        return c.name
    if isinstance(c, Top):
        return "top"
    if isinstance(c, Conjunction):
        return " and ".join(_wrap(p) for p in c.parts)
    if isinstance(c, Disjunction):
        return " or ".join(_wrap(p) for p in c.parts)
    if isinstance(c, Exists):
        return f"exists {role_text(c.role)}.{_wrap(c.filler)}"
    if isinstance(c, Forall):
        return f"forall {role_text(c.role)}.{_wrap(c.filler)}"
    raise TypeError(f"not a concept: {c!r}")


def _wrap(c: ConceptExpr) -> str:
    if isinstance(c, (Conjunction, Disjunction)):
        return f"({concept_text(c)})"
    return concept_text(c)


def role_text(r: RoleExpr) -> str:
    if isinstance(r, AtomicRole):
        return r.name
    if isinstance(r, Inverse):
        return f"inv({role_text(r.role)})"
    if isinstance(r, RoleUnion):
        return "(" + " or ".join(role_text(p) for p in r.parts) + ")"
    raise TypeError(f"not a role: {r!r}")


# ---------------------------------------------------------------------------
# terminology and fact base
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RoleDecl:
    name: str
    domain: ConceptExpr
    range: ConceptExpr


@dataclass(frozen=True)
class Terminology:
    primitive_concepts: tuple[str, ...]
    roles: Mapping[str, RoleDecl]
    definitions: Mapping[str, ConceptExpr]  # insertion order = declaration order
    user_concept: str
    synonym_axioms: Mapping[str, str] = field(default_factory=dict)  # surface -> target
    question_templates: Mapping[str, str] = field(default_factory=dict)  # role -> text

    def declared_concepts(self) -> set[str]:
        return set(self.primitive_concepts) | set(self.definitions) | {self.user_concept}

    def is_declared(self, name: str) -> bool:
        return name in self.declared_concepts() or name in self.roles


@dataclass
class FactBase:
    """Ground assertions: concept memberships and role tuples."""

    individuals: set[str] = field(default_factory=set)
    concept_assertions: set[tuple[str, str]] = field(default_factory=set)  # (individual, concept)
    role_assertions: set[tuple[str, str, str]] = field(default_factory=set)  # (subject, role, object)

    def assert_concept(self, individual: str, concept: str) -> None:
        self.individuals.add(individual)
        self.concept_assertions.add((individual, concept))

    def assert_role(self, subject: str, role: str, obj: str) -> None:
        self.individuals.update((subject, obj))
        self.role_assertions.add((subject, role, obj))

    def holds_concept(self, individual: str, concept: str) -> bool:
        return (individual, concept) in self.concept_assertions

    def copy(self) -> "FactBase":
        return FactBase(
            set(self.individuals),
            set(self.concept_assertions),
            set(self.role_assertions),
        )


class ProofStatus(Enum):
    PROVED = "proved"
    UNPROVED = "unproved"


PROVED = ProofStatus.PROVED
UNPROVED = ProofStatus.UNPROVED


# ---------------------------------------------------------------------------
# concept expression parser
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*|[().]")
_KEYWORDS = {"and", "or", "exists", "forall", "inv", "top"}


def _tokenize_expr(text: str, line_no: int) -> list[str]:
    tokens = _TOKEN_RE.findall(text)
    if re.sub(r"\s+", "", text) != "".join(tokens):
        # something in the line matched neither a name nor punctuation
        raise DomainSyntaxError(line_no, f"cannot tokenize expression: {text!r}")
    return tokens


class _ExprParser:
    """Recursive descent over the tiny concept grammar.

    or binds loosest, then and; quantifier prefixes bind tightest.  Inside a
    quantifier the role position runs up to the separating dot and may use
    inv(...) and or for role union.
    """

    def __init__(self, tokens: list[str], line_no: int):
        self.tokens = tokens
        self.pos = 0
        self.line_no = line_no

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None:
            raise DomainSyntaxError(self.line_no, "unexpected end of expression")
        if expected is not None and tok != expected:
            raise DomainSyntaxError(self.line_no, f"expected {expected!r}, got {tok!r}")
        self.pos += 1
        return tok

    def parse(self) -> ConceptExpr:
        expr = self.parse_or()
        if self.peek() is not None:
            raise DomainSyntaxError(self.line_no, f"trailing tokens at {self.peek()!r}")
        return expr

    def parse_or(self) -> ConceptExpr:
        parts = [self.parse_and()]
        while self.peek() == "or":
            self.take()
            parts.append(self.parse_and())
        return disj(parts) if len(parts) > 1 else parts[0]

    def parse_and(self) -> ConceptExpr:
        parts = [self.parse_quant()]
        while self.peek() == "and":
            self.take()
            parts.append(self.parse_quant())
        return conj(parts) if len(parts) > 1 else parts[0]

    def parse_quant(self) -> ConceptExpr:
        tok = self.peek()
        if tok in ("exists", "forall"):
            self.take()
            role = self.parse_role()
            self.take(".")
            filler = self.parse_quant()
            return Exists(role, filler) if tok == "exists" else Forall(role, filler)
        return self.parse_atom()

    def parse_atom(self) -> ConceptExpr:
        tok = self.take()
        if tok == "top":
            return Top()
        if tok == "(":
            inner = self.parse_or()
            self.take(")")
            return inner
        if tok in _KEYWORDS or tok in "().":
            raise DomainSyntaxError(self.line_no, f"unexpected token {tok!r}")
        return Atomic(tok)

    def parse_role(self) -> RoleExpr:
        parts = [self.parse_role_term()]
        while self.peek() == "or":
            self.take()
            parts.append(self.parse_role_term())
        if len(parts) > 1:
            return RoleUnion(tuple(parts))
        return parts[0]

    def parse_role_term(self) -> RoleExpr:
        tok = self.take()
        if tok == "inv":
            self.take("(")
            inner = self.parse_role()
            self.take(")")
            return inverse(inner)
        if tok == "(":
            inner = self.parse_role()
            self.take(")")
            return inner
        if tok in _KEYWORDS or tok in "().":
            raise DomainSyntaxError(self.line_no, f"unexpected token {tok!r} in role")
        return AtomicRole(tok)


def parse_concept_expr(
    text: str, t: "Terminology | None" = None, line_no: int = 0
) -> ConceptExpr:
    """Parse a concept expression; with a terminology given, every mentioned
    name must be declared there."""
    expr = _ExprParser(_tokenize_expr(text, line_no), line_no).parse()
    if t is not None:
        for cn in concept_names(expr):
            if not t.is_declared(cn):
                raise UndefinedNameError(cn)
        for rn in role_names(expr):
            if rn not in t.roles:
                raise UndefinedNameError(rn)
    return expr


# ---------------------------------------------------------------------------
# domain file
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainLine:
    no: int
    kind: str
    payload: tuple


_ROLE_DECL_RE = re.compile(
    r"^role\s+(\w+)\s*:\s*(\w+)\s+x\s+(\w+)\s*$"
)
_QUESTION_RE = re.compile(r'^question\s+(\w+)\s*=\s*"(.*)"\s*$')


def scan_domain_lines(source: str) -> list[DomainLine]:
    """Split a domain description into tagged directives.

    Comments run from '#' to end of line.  Lexicon lines are passed through
    untouched for the lexicon loader; everything else is parsed here.
    """
    out: list[DomainLine] = []
    for no, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split(None, 1)[0]
        rest = line[len(head):].strip()
        if head == "concept":
            if not re.fullmatch(r"\w+", rest):
                raise DomainSyntaxError(no, f"bad concept declaration: {line!r}")
            out.append(DomainLine(no, "concept", (rest,)))
        elif head == "role":
            m = _ROLE_DECL_RE.match(line)
            if not m:
                raise DomainSyntaxError(no, f"bad role declaration: {line!r}")
            out.append(DomainLine(no, "role", (m.group(1), m.group(2), m.group(3))))
        elif head == "define":
            m = re.match(r"^define\s+(\w+)\s*=\s*(.+)$", line)
            if not m:
                raise DomainSyntaxError(no, f"bad definition: {line!r}")
            body = parse_concept_expr(m.group(2), line_no=no)
            out.append(DomainLine(no, "define", (m.group(1), body)))
        elif head == "synonym":
            m = re.match(r"^synonym\s+(\S+)\s*=>\s*(\w+)$", line)
            if not m:
                raise DomainSyntaxError(no, f"bad synonym: {line!r}")
            out.append(DomainLine(no, "synonym", (m.group(1).lower(), m.group(2))))
        elif head == "question":
            m = _QUESTION_RE.match(line)
            if not m:
                raise DomainSyntaxError(no, f"bad question template: {line!r}")
            out.append(DomainLine(no, "question", (m.group(1), m.group(2))))
        elif head == "user-concept":
            if not re.fullmatch(r"\w+", rest):
                raise DomainSyntaxError(no, f"bad user-concept: {line!r}")
            out.append(DomainLine(no, "user-concept", (rest,)))
        elif head == "lex":
            out.append(DomainLine(no, "lex", (rest,)))
        else:
            raise DomainSyntaxError(no, f"unknown directive {head!r}")
    return out


def load_terminology(source: str) -> Terminology:
    """Parse and validate a domain description.

    Validation order: names resolve, the definition graph is acyclic, and
    each definition body has a small model.
    """
    primitives: list[str] = []
    roles: dict[str, RoleDecl] = {}
    role_lines: dict[str, tuple[int, str, str]] = {}
    definitions: dict[str, ConceptExpr] = {}
    synonyms: dict[str, str] = {}
    questions: dict[str, str] = {}
    user_concepts: list[str] = []

    lines = scan_domain_lines(source)
    for ln in lines:
        if ln.kind == "concept":
            (name,) = ln.payload
            if name in primitives:
                raise DomainSyntaxError(ln.no, f"duplicate concept {name}")
            primitives.append(name)
        elif ln.kind == "role":
            name, dom, rng = ln.payload
            if name in role_lines:
                raise DomainSyntaxError(ln.no, f"duplicate role {name}")
            role_lines[name] = (ln.no, dom, rng)
        elif ln.kind == "define":
            name, body = ln.payload
            if name in definitions:
                raise DomainSyntaxError(ln.no, f"duplicate definition {name}")
            definitions[name] = body
        elif ln.kind == "synonym":
            surface, target = ln.payload
            synonyms[surface] = target
        elif ln.kind == "question":
            role, text = ln.payload
            questions[role] = text
        elif ln.kind == "user-concept":
            user_concepts.append(ln.payload[0])

    if len(user_concepts) != 1:
        no = lines[-1].no if lines else 0
        raise DomainSyntaxError(no, "exactly one user-concept line is required")
    user_concept = user_concepts[0]

    declared_concepts = set(primitives) | set(definitions) | {user_concept}
    for name in sorted(declared_concepts & set(role_lines)):
        raise DomainSyntaxError(
            role_lines[name][0], f"{name} declared as both concept and role"
        )

    for name, (_, dom, rng) in role_lines.items():
        for c in (dom, rng):
            if c not in declared_concepts:
                raise UndefinedNameError(c)
        roles[name] = RoleDecl(name, Atomic(dom), Atomic(rng))

    t = Terminology(
        primitive_concepts=tuple(primitives),
        roles=roles,
        definitions=definitions,
        user_concept=user_concept,
        synonym_axioms=synonyms,
        question_templates=questions,
    )

    # name resolution inside bodies, synonym targets, question roles
    for name, body in definitions.items():
        for cn in concept_names(body):
            if cn not in declared_concepts:
                raise UndefinedNameError(cn)
        for rn in role_names(body):
            if rn not in roles:
                raise UndefinedNameError(rn)
    for target in synonyms.values():
        if target not in declared_concepts and target not in roles:
            raise UndefinedNameError(target)
    for role in questions:
        if role not in roles:
            raise UndefinedNameError(role)

    _check_acyclic(definitions)
    for name, body in definitions.items():
        if not _has_small_model(unfold(body, t), max_universe=3):
            raise UnsatisfiableDefinitionError(name)
    return t


def _check_acyclic(definitions: Mapping[str, ConceptExpr]) -> None:
    color: dict[str, int] = {}  # 0 in progress, 1 done
    stack: list[str] = []

    def visit(name: str) -> None:
        if color.get(name) == 1:
            return
        if color.get(name) == 0:
            cycle = stack[stack.index(name):] + [name]
            raise CyclicTerminologyError(cycle)
        color[name] = 0
        stack.append(name)
        for dep in sorted(concept_names(definitions[name]) & set(definitions)):
            visit(dep)
        stack.pop()
        color[name] = 1

    for name in definitions:
        visit(name)


# ---------------------------------------------------------------------------
# unfolding
# ---------------------------------------------------------------------------

def unfold(c: ConceptExpr, t: Terminology) -> ConceptExpr:
    """Replace defined names by their bodies until only primitives remain.

    Terminates because the definition graph is acyclic; nested conjunctions
    and disjunctions are flattened left to right.
    """
    if isinstance(c, Atomic):
        body = t.definitions.get(c.name)
        if body is None:
            return c
        return unfold(body, t)
    if isinstance(c, Top):
        return c
    if isinstance(c, Conjunction):
        return conj(unfold(p, t) for p in c.parts)
    if isinstance(c, Disjunction):
        return disj(unfold(p, t) for p in c.parts)
    if isinstance(c, Exists):
        return Exists(c.role, unfold(c.filler, t))
    if isinstance(c, Forall):
        return Forall(c.role, unfold(c.filler, t))
    raise TypeError(f"not a concept: {c!r}")


# ---------------------------------------------------------------------------
# instance checking
# ---------------------------------------------------------------------------

def _role_pairs(r: RoleExpr, kb: FactBase) -> Iterator[tuple[str, str]]:
    if isinstance(r, AtomicRole):
        for s, role, o in kb.role_assertions:
            if role == r.name:
                yield (s, o)
    elif isinstance(r, Inverse):
        for s, o in _role_pairs(r.role, kb):
            yield (o, s)
    elif isinstance(r, RoleUnion):
        for p in r.parts:
            yield from _role_pairs(p, kb)
    else:
        raise TypeError(f"not a role: {r!r}")


def role_successors(a: str, r: RoleExpr, kb: FactBase) -> list[str]:
    return sorted({o for s, o in _role_pairs(r, kb) if s == a})


def instance_check(
    a: str, c: ConceptExpr, t: Terminology, kb: FactBase
) -> ProofStatus:
    """Open-world membership: PROVED if the facts entail a member, else
    UNPROVED.  Value restrictions are judged over the role successors the
    fact base knows about."""
    c = unfold(c, t)
    return PROVED if _proved(a, c, kb) else UNPROVED


def _proved(a: str, c: ConceptExpr, kb: FactBase) -> bool:
    if isinstance(c, Atomic):
        return kb.holds_concept(a, c.name)
    if isinstance(c, Top):
        return True
    if isinstance(c, Conjunction):
        return all(_proved(a, p, kb) for p in c.parts)
    if isinstance(c, Disjunction):
        return any(_proved(a, p, kb) for p in c.parts)
    if isinstance(c, Exists):
        return any(
            _proved(b, c.filler, kb) for b in role_successors(a, c.role, kb)
        )
    if isinstance(c, Forall):
        return all(
            _proved(b, c.filler, kb) for b in role_successors(a, c.role, kb)
        )
    raise TypeError(f"not a concept: {c!r}")


# ---------------------------------------------------------------------------
# user relations
# ---------------------------------------------------------------------------

def compute_user_rel(t: Terminology) -> set[str]:
    """Roles that touch the user: declared domain or range unfolds into a
    conjunction with the designated user concept as a conjunct.  These are
    the places where missing information must come from the dialog partner
    rather than from the database."""
    out: set[str] = set()
    user = Atomic(t.user_concept)
    for name, decl in t.roles.items():
        for side in (decl.domain, decl.range):
            if user in conjuncts(unfold(side, t)):
                out.add(name)
                break
    return out


# ---------------------------------------------------------------------------
# bounded model search
# ---------------------------------------------------------------------------

def _holds_total(
    a: str,
    c: ConceptExpr,
    concept_ext: Mapping[str, frozenset[str]],
    role_ext: Mapping[str, frozenset[tuple[str, str]]],
    universe: tuple[str, ...],
) -> bool:
    if isinstance(c, Atomic):
        return a in concept_ext.get(c.name, frozenset())
    if isinstance(c, Top):
        return True
    if isinstance(c, Conjunction):
        return all(_holds_total(a, p, concept_ext, role_ext, universe) for p in c.parts)
    if isinstance(c, Disjunction):
        return any(_holds_total(a, p, concept_ext, role_ext, universe) for p in c.parts)
    if isinstance(c, (Exists, Forall)):
        def linked(b: str) -> bool:
            return _role_holds_total(a, b, c.role, role_ext)

        if isinstance(c, Exists):
            return any(
                linked(b) and _holds_total(b, c.filler, concept_ext, role_ext, universe)
                for b in universe
            )
        return all(
            _holds_total(b, c.filler, concept_ext, role_ext, universe)
            for b in universe
            if linked(b)
        )
    raise TypeError(f"not a concept: {c!r}")


def _role_holds_total(
    a: str,
    b: str,
    r: RoleExpr,
    role_ext: Mapping[str, frozenset[tuple[str, str]]],
) -> bool:
    if isinstance(r, AtomicRole):
        return (a, b) in role_ext.get(r.name, frozenset())
    if isinstance(r, Inverse):
        return _role_holds_total(b, a, r.role, role_ext)
    if isinstance(r, RoleUnion):
        return any(_role_holds_total(a, b, p, role_ext) for p in r.parts)
    raise TypeError(f"not a role: {r!r}")


def _has_small_model(c: ConceptExpr, max_universe: int = 3) -> bool:
    """Search total models over the vocabulary mentioned in c.

    Enumeration starts from the everything-true assignment, which satisfies
    any expression in this negation-free fragment, so the search is cheap;
    it exists as a load-time safety net should the language ever grow.
    """
    cnames = sorted(concept_names(c))
    rnames = sorted(role_names(c))
    for size in range(1, max_universe + 1):
        universe = tuple(f"d{i}" for i in range(size))
        pairs = tuple(itertools.product(universe, universe))
        concept_spaces = [
            [frozenset(s) for s in _subsets(universe)] for _ in cnames
        ]
        role_spaces = [
            [frozenset(s) for s in _subsets(pairs)] for _ in rnames
        ]
        for c_ext in itertools.product(*concept_spaces):
            concept_ext = dict(zip(cnames, c_ext))
            for r_ext in itertools.product(*role_spaces):
                role_ext = dict(zip(rnames, r_ext))
                if any(
                    _holds_total(a, c, concept_ext, role_ext, universe)
                    for a in universe
                ):
                    return True
    return False


def _subsets(items: tuple) -> Iterator[tuple]:
    # largest first so the everything-true candidate is tried immediately
    for size in range(len(items), -1, -1):
        yield from itertools.combinations(items, size)
