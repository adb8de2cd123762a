"""Discourse representation structures.

A box holds discourse referents (variables with sorts, plus any constants
the discourse introduced) and positive atomic conditions.  A LambdaDRS
abstracts a box over parameters still waiting for a filler, e.g. the
variable a wh-word opens.  Boxes map into the partial logic by existential
closure of the variable referents.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import dl
from .errors import SortMismatchError
from .fil import And, Atom, Const, Exists, FilFormula, Term, Var, substitute


@dataclass(frozen=True)
class DRS:
    referents: tuple[Term, ...]
    conditions: tuple[Atom, ...]

    def var_names(self) -> set[str]:
        return {t.name for t in self.referents if isinstance(t, Var)}


@dataclass(frozen=True)
class LambdaDRS:
    params: tuple[tuple[str, str | None], ...]
    body: DRS

    def __post_init__(self) -> None:
        bound = self.body.var_names() | {p for p, _ in self.params}
        for cond in self.body.conditions:
            for t in cond.args:
                if isinstance(t, Var) and t.name not in bound:
                    raise ValueError(
                        f"condition variable {t.name} is neither a referent nor a parameter"
                    )


def merge(a: DRS, b: DRS) -> DRS:
    """Union of two boxes; colliding variable referents of b are renamed."""
    taken = {t.name for t in a.referents}
    renaming: dict[str, Term] = {}
    new_refs: list[Term] = list(a.referents)
    for t in b.referents:
        if isinstance(t, Var) and t.name in taken:
            i = 1
            while f"{t.name}{i}" in taken:
                i += 1
            fresh = f"{t.name}{i}"
            renaming[t.name] = Var(fresh, t.sort)
            taken.add(fresh)
            new_refs.append(Var(fresh, t.sort))
        elif isinstance(t, Const) and t in new_refs:
            continue  # same constant, same discourse entity
        else:
            taken.add(t.name)
            new_refs.append(t)
    conds = list(a.conditions)
    for cond in b.conditions:
        renamed = substitute(cond, renaming)
        if renamed not in conds:
            conds.append(renamed)
    return DRS(tuple(new_refs), tuple(conds))


def apply(
    f: LambdaDRS,
    *args: Term | str,
    terminology: dl.Terminology | None = None,
    kb: dl.FactBase | None = None,
) -> LambdaDRS | DRS:
    """Fill leading parameters with arguments.

    When a terminology and fact base are at hand and the argument is a
    constant they know, the argument must prove the parameter's sort;
    otherwise the application is rejected with a sort mismatch.
    """
    if len(args) > len(f.params):
        raise ValueError("more arguments than parameters")
    mapping: dict[str, Term] = {}
    for (name, sort), arg in zip(f.params, args):
        term: Term = Const(arg) if isinstance(arg, str) else arg
        if (
            sort is not None
            and isinstance(term, Const)
            and terminology is not None
            and kb is not None
            and term.name in kb.individuals
        ):
            proved = dl.instance_check(term.name, dl.Atomic(sort), terminology, kb)
            if proved is not dl.PROVED:
                raise SortMismatchError(term.name, sort)
        mapping[name] = term
    body = DRS(
        f.body.referents,
        tuple(substitute(c, mapping) for c in f.body.conditions),
    )
    rest = f.params[len(args):]
    if rest:
        return LambdaDRS(rest, body)
    return body


def drs_to_fil(d: DRS | LambdaDRS) -> FilFormula:
    """Existential closure of the variable referents over the conditions.

    Lambda parameters stay free; constants are never quantified."""
    box = d.body if isinstance(d, LambdaDRS) else d
    formula: FilFormula = And(box.conditions)
    for t in reversed(box.referents):
        if isinstance(t, Var):
            formula = Exists(t.name, t.sort, formula)
    return formula


def atom_text(a: Atom) -> str:
    return f"{a.pred}({', '.join(t.name for t in a.args)})"


def box_text(d: DRS | LambdaDRS) -> str:
    """Classic box rendering: referent line, rule, one condition per line."""
    lines: list[str] = []
    if isinstance(d, LambdaDRS):
        if d.params:
            lines.append("lambda " + ", ".join(p for p, _ in d.params) + ".")
        box = d.body
    else:
        box = d
    ref_line = " ".join(t.name for t in box.referents)
    cond_lines = [atom_text(c) for c in box.conditions]
    width = max([len(ref_line), 3] + [len(c) for c in cond_lines])
    lines.append(ref_line)
    lines.append("-" * width)
    lines.extend(cond_lines)
    return "\n".join(lines)
