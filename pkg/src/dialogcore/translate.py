"""Compilation of concept expressions into the partial logic.

Roles whose declared domain or range reaches the designated user concept
stand for information only the dialog partner can supply.  Their atoms are
wrapped in an ionic justification context, so that evaluating a compiled
concept surfaces exactly the questions the system still has to ask.  All
other constructors map structurally: conjunction and disjunction pointwise,
qualified quantifiers to sorted-free quantified formulas, role inverse by
argument swap, role union pointwise to disjunction.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from . import dl
from .fil import (
    And,
    Atom,
    Const,
    Exists,
    FilFormula,
    Forall,
    Iff,
    Implies,
    Ionic,
    Or,
    Term,
    Var,
    formula_text,
    substitute,
)


@dataclass(frozen=True)
class FilLambda:
    """A formula abstracted over typed parameters."""

    params: tuple[tuple[str, str | None], ...]
    body: FilFormula

    def apply(self, *terms: Term | str) -> FilFormula:
        if len(terms) != len(self.params):
            raise ValueError(
                f"arity mismatch: {len(self.params)} params, {len(terms)} args"
            )
        mapping: dict[str, Term] = {}
        for (name, sort), term in zip(self.params, terms):
            if isinstance(term, str):
                term = Const(term)
            if isinstance(term, Var) and term.sort is None and sort is not None:
                term = Var(term.name, sort)
            mapping[name] = term
        return substitute(self.body, mapping)


class _NameGen:
    def __init__(self, used: Iterable[str] = ()):  # reserve names already taken
        self.used = set(used)

    def fresh(self, base: str) -> str:
        name = base
        i = 0
        while name in self.used:
            i += 1
            name = f"{base}{i}"
        self.used.add(name)
        return name


def _sort_name(c: dl.ConceptExpr) -> str | None:
    """The atomic name a declared domain or range boils down to, if any."""
    if isinstance(c, dl.Atomic):
        return c.name
    for part in dl.conjuncts(c):
        if isinstance(part, dl.Atomic):
            return part.name
    return None


def _subject_base(c: dl.ConceptExpr, t: dl.Terminology | None) -> str:
    """Variable stem for an element of concept c: first atomic conjunct of
    the unfolded form, lowercased initial."""
    if t is not None:
        c = dl.unfold(c, t)
    for part in dl.conjuncts(c):
        if isinstance(part, dl.Atomic):
            return part.name[0].lower()
    return "x"


def translate_role(
    r: dl.RoleExpr,
    user_rel: set[str],
    decls: Mapping[str, dl.RoleDecl] | None = None,
    params: tuple[str, str] = ("x", "y"),
) -> FilLambda:
    """Binary compilation of a role expression.

    Atoms of user relations come out wrapped in an ionic context whose one
    justification is the atom itself; argument positions carry the declared
    domain and range sorts so later binding steps know what to ask for.
    """
    x, y = params
    if isinstance(r, dl.AtomicRole):
        dom_sort = rng_sort = None
        if decls and r.name in decls:
            dom_sort = _sort_name(decls[r.name].domain)
            rng_sort = _sort_name(decls[r.name].range)
        atom = Atom(r.name, (Var(x, dom_sort), Var(y, rng_sort)))
        body: FilFormula = atom
        if r.name in user_rel:
            body = Ionic((atom,), atom)
        return FilLambda(((x, dom_sort), (y, rng_sort)), body)
    if isinstance(r, dl.Inverse):
        inner = translate_role(r.role, user_rel, decls, params=(f"{x}_", f"{y}_"))
        (_, inner_dom), (_, inner_rng) = inner.params
        return FilLambda(
            ((x, inner_rng), (y, inner_dom)),
            inner.apply(Var(y), Var(x)),
        )
    if isinstance(r, dl.RoleUnion):
        parts = [
            translate_role(p, user_rel, decls, params=(f"{x}_{i}", f"{y}_{i}"))
            for i, p in enumerate(r.parts)
        ]
        dom_sorts = {p.params[0][1] for p in parts}
        rng_sorts = {p.params[1][1] for p in parts}
        dom = dom_sorts.pop() if len(dom_sorts) == 1 else None
        rng = rng_sorts.pop() if len(rng_sorts) == 1 else None
        return FilLambda(
            ((x, dom), (y, rng)),
            Or(tuple(p.apply(Var(x), Var(y)) for p in parts)),
        )
    raise TypeError(f"not a role: {r!r}")


def translate_concept(
    c: dl.ConceptExpr,
    t: dl.Terminology,
    user_rel: set[str] | None = None,
    param: str | None = None,
    _namer: _NameGen | None = None,
) -> FilLambda:
    """Unary compilation of a concept expression.

    Defined names are kept as predicates (the terminology's biconditionals
    relate them to their bodies); unfold first when the internal structure
    should be visible to evaluation.
    """
    if user_rel is None:
        user_rel = dl.compute_user_rel(t)
    if param is None:
        param = _subject_base(c, t)
    namer = _namer or _NameGen({param})
    namer.used.add(param)
    body = _translate(c, t, user_rel, param, namer)
    return FilLambda(((param, None),), body)


def _translate(
    c: dl.ConceptExpr,
    t: dl.Terminology,
    user_rel: set[str],
    subject: str,
    namer: _NameGen,
) -> FilFormula:
    if isinstance(c, dl.Atomic):
        return Atom(c.name, (Var(subject),))
    if isinstance(c, dl.Top):
        return And(())
    if isinstance(c, dl.Conjunction):
        return And(tuple(_translate(p, t, user_rel, subject, namer) for p in c.parts))
    if isinstance(c, dl.Disjunction):
        return Or(tuple(_translate(p, t, user_rel, subject, namer) for p in c.parts))
    if isinstance(c, (dl.Exists, dl.Forall)):
        y = namer.fresh(_subject_base(c.filler, t))
        role = translate_role(c.role, user_rel, t.roles)
        link = role.apply(Var(subject), Var(y))
        filler = _translate(c.filler, t, user_rel, y, namer)
        if isinstance(c, dl.Exists):
            return Exists(y, None, And((link, filler)))
        return Forall(y, None, Implies(link, filler))
    raise TypeError(f"not a concept: {c!r}")


@dataclass(frozen=True)
class TheoryFormula:
    name: str
    formula: FilFormula


def translate_terminology(t: dl.Terminology) -> list[TheoryFormula]:
    """One universally closed biconditional per definition, in declaration
    order, followed by one implication per synonym target."""
    user_rel = dl.compute_user_rel(t)
    out: list[TheoryFormula] = []
    for name, body in t.definitions.items():
        s = _subject_base(dl.Atomic(name), t)
        lam = translate_concept(body, t, user_rel, param=s)
        out.append(
            TheoryFormula(
                name,
                Forall(s, None, Iff(Atom(name, (Var(s),)), lam.body)),
            )
        )
    out.extend(_synonym_formulas(t))
    return out


def _synonym_formulas(t: dl.Terminology) -> list[TheoryFormula]:
    grouped: dict[str, list[str]] = {}
    for surface, target in t.synonym_axioms.items():
        grouped.setdefault(target, []).append(surface)
    out = []
    for target, surfaces in grouped.items():
        if target in t.roles:
            args: tuple[Term, ...] = (Var("x"), Var("y"))
            head = Atom(target, args)
            alts = tuple(Atom(s, args) for s in surfaces)
            left: FilFormula = alts[0] if len(alts) == 1 else Or(alts)
            formula: FilFormula = Forall(
                "x", None, Forall("y", None, Implies(left, head))
            )
        else:
            args = (Var("x"),)
            head = Atom(target, args)
            alts = tuple(Atom(s, args) for s in surfaces)
            left = alts[0] if len(alts) == 1 else Or(alts)
            formula = Forall("x", None, Implies(left, head))
        out.append(TheoryFormula(f"syn_{target}", formula))
    return out


def theory_text(items: Sequence[TheoryFormula]) -> str:
    return "\n".join(f"{it.name}: {formula_text(it.formula)}" for it in items)
