"""Conjunctive query answering over a ground fact base.

The problem solver is the database side of the engine: once the dialog has
gathered enough constraints, they are compiled into a conjunctive query
(e.g. At(t,x) & From(t,Milan) & To(t,Rome)) and joined against the
timetable facts.  Answers are deduplicated bindings of the answer
variables, in lexicographic order so runs are reproducible.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Mapping, Protocol

from .dl import FactBase, Terminology
from .errors import DomainSyntaxError, UnboundVariableError, UndefinedNameError
from .fil import Atom, Const, Term, Var


@dataclass(frozen=True)
class ConjunctiveQuery:
    atoms: tuple[Atom, ...]
    answer_vars: tuple[str, ...]


class SolverBackend(Protocol):
    def eval_query(self, q: ConjunctiveQuery) -> list[dict[str, str]]: ...


def _atom_vars(a: Atom) -> set[str]:
    return {t.name for t in a.args if isinstance(t, Var)}


def eval_query(
    q: ConjunctiveQuery,
    facts: FactBase,
    terminology: Terminology | None = None,
) -> list[dict[str, str]]:
    """Backtracking join of the query atoms against the facts.

    Unary atoms match concept assertions, binary atoms role assertions.
    With a terminology at hand, predicates must be declared there."""
    covered: set[str] = set()
    for atom in q.atoms:
        if len(atom.args) not in (1, 2):
            raise DomainSyntaxError(0, f"query atom arity {len(atom.args)} unsupported")
        if terminology is not None and not terminology.is_declared(atom.pred):
            raise UndefinedNameError(atom.pred)
        covered |= _atom_vars(atom)
    for v in q.answer_vars:
        if v not in covered:
            raise UnboundVariableError(v)

    results: list[tuple[str, ...]] = []
    seen: set[tuple[str, ...]] = set()

    def match(atom: Atom, env: dict[str, str]) -> Iterable[dict[str, str]]:
        if len(atom.args) == 1:
            rows: Iterable[tuple[str, ...]] = (
                (ind,) for ind, concept in facts.concept_assertions if concept == atom.pred
            )
        else:
            rows = (
                (s, o) for s, role, o in facts.role_assertions if role == atom.pred
            )
        for row in rows:
            new = dict(env)
            ok = True
            for term, value in zip(atom.args, row):
                if isinstance(term, Const):
                    if term.name != value:
                        ok = False
                        break
                elif term.name in new:
                    if new[term.name] != value:
                        ok = False
                        break
                else:
                    new[term.name] = value
            if ok:
                yield new

    def search(i: int, env: dict[str, str]) -> None:
        if i == len(q.atoms):
            key = tuple(env[v] for v in q.answer_vars)
            if key not in seen:
                seen.add(key)
                results.append(key)
            return
        for new in match(q.atoms[i], env):
            search(i + 1, new)

    search(0, {})
    results.sort()
    return [dict(zip(q.answer_vars, row)) for row in results]


class TimetableSolver:
    """Reference backend: joins directly against an in-memory fact base."""

    def __init__(self, facts: FactBase, terminology: Terminology | None = None):
        self.facts = facts
        self.terminology = terminology

    def eval_query(self, q: ConjunctiveQuery) -> list[dict[str, str]]:
        return eval_query(q, self.facts, self.terminology)


# ---------------------------------------------------------------------------
# facts file
# ---------------------------------------------------------------------------

_FACT_RE = re.compile(r"^fact\s+(\w+)\s*\(\s*([^)]*)\s*\)\s*$")


def load_facts(source: str, terminology: Terminology | None = None) -> FactBase:
    """Parse ``fact Pred(a)`` / ``fact Role(a, b)`` lines.

    Predicates must be declared when a terminology is supplied; arity must
    match the declaration kind either way."""
    kb = FactBase()
    for no, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = _FACT_RE.match(line)
        if not m:
            raise DomainSyntaxError(no, f"bad fact line: {line!r}")
        pred = m.group(1)
        args = [a.strip() for a in m.group(2).split(",")] if m.group(2).strip() else []
        if terminology is not None:
            if pred in terminology.roles:
                if len(args) != 2:
                    raise DomainSyntaxError(no, f"role {pred} takes 2 arguments")
            elif pred in terminology.declared_concepts():
                if len(args) != 1:
                    raise DomainSyntaxError(no, f"concept {pred} takes 1 argument")
            else:
                raise UndefinedNameError(pred)
        if len(args) == 1:
            kb.assert_concept(args[0], pred)
        elif len(args) == 2:
            kb.assert_role(args[0], pred, args[1])
        else:
            raise DomainSyntaxError(no, f"facts take 1 or 2 arguments: {line!r}")
    return kb


def parse_query(text: str, facts: FactBase) -> ConjunctiveQuery:
    """CLI query syntax: atoms joined by '&'.

    A term naming a known individual is a constant, as is any term that
    looks like one (leading capital or digit) — so a misspelt station
    gives an empty join rather than an accidental variable.  Everything
    else is a variable; answer variables in first-appearance order."""
    atoms: list[Atom] = []
    answer_vars: list[str] = []
    for chunk in text.split("&"):
        chunk = chunk.strip()
        m = re.match(r"^(\w+)\s*\(\s*([^)]+)\s*\)$", chunk)
        if not m:
            raise DomainSyntaxError(0, f"bad query atom: {chunk!r}")
        names = [a.strip() for a in m.group(2).split(",")]
        terms: list[Term] = []
        for name in names:
            if name in facts.individuals or name[0].isupper() or name[0].isdigit():
                terms.append(Const(name))
            else:
                terms.append(Var(name))
                if name not in answer_vars:
                    answer_vars.append(name)
        atoms.append(Atom(m.group(1), tuple(terms)))
    return ConjunctiveQuery(tuple(atoms), tuple(answer_vars))


def display_constant(c: str) -> str:
    """Human rendering of fixture constants: tHHMM prints as HH:MM."""
    m = re.fullmatch(r"t(\d{2})(\d{2})", c)
    if m:
        return f"{m.group(1)}:{m.group(2)}"
    return c
