"""Three-valued logic over partial interpretations, with ionic formulas.

A partial interpretation assigns each predicate a set of tuples known to hold
(plus) and a set known not to hold (minus); everything else is undefined.
Connectives follow the strong Kleene tables, so a formula that is defined
stays defined (with the same value) in every extension of the interpretation.

Ionic formulas carry a justification context: ``*({phi_1..phi_k}, xi)``
concludes xi by default as long as current knowledge cannot refute any
``phi_i``.  ``ionic_status`` reports whether such a formula is concluded,
blocked, or still open because a variable in a justification cannot be bound.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

from .errors import (
    InconsistentExtensionError,
    IonicInClassicalContextError,
    UnboundVariableError,
)


# ---------------------------------------------------------------------------
# truth values
# ---------------------------------------------------------------------------

class TruthValue(Enum):
    TRUE = "T"
    FALSE = "F"
    UNDEF = "U"

    def __repr__(self) -> str:  # keeps test output short
        return self.value


T = TruthValue.TRUE
F = TruthValue.FALSE
U = TruthValue.UNDEF

# strength order used by the Kleene tables: F < U < T
_RANK = {F: 0, U: 1, T: 2}


def kleene_not(v: TruthValue) -> TruthValue:
    if v is T:
        return F
    if v is F:
        return T
    return U


def kleene_and(values: Iterable[TruthValue]) -> TruthValue:
    """Minimum under F < U < T; empty conjunction is T."""
    out = T
    for v in values:
        if _RANK[v] < _RANK[out]:
            out = v
        if out is F:
            break
    return out


def kleene_or(values: Iterable[TruthValue]) -> TruthValue:
    """Maximum under F < U < T; empty disjunction is F."""
    out = F
    for v in values:
        if _RANK[v] > _RANK[out]:
            out = v
        if out is T:
            break
    return out


def kleene_implies(a: TruthValue, b: TruthValue) -> TruthValue:
    return kleene_or((kleene_not(a), b))


def kleene_iff(a: TruthValue, b: TruthValue) -> TruthValue:
    return kleene_and((kleene_implies(a, b), kleene_implies(b, a)))


# ---------------------------------------------------------------------------
# terms and formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str
    sort: str | None = None


@dataclass(frozen=True)
class Const:
    name: str


Term = Var | Const


class FilFormula:
    """Base class; every node is a frozen dataclass below."""

    __slots__ = ()


@dataclass(frozen=True)
class Atom(FilFormula):
    pred: str
    args: tuple[Term, ...]


@dataclass(frozen=True)
class Not(FilFormula):
    sub: FilFormula


@dataclass(frozen=True)
class And(FilFormula):
    parts: tuple[FilFormula, ...]


@dataclass(frozen=True)
class Or(FilFormula):
    parts: tuple[FilFormula, ...]


@dataclass(frozen=True)
class Implies(FilFormula):
    left: FilFormula
    right: FilFormula


@dataclass(frozen=True)
class Iff(FilFormula):
    left: FilFormula
    right: FilFormula


@dataclass(frozen=True)
class Exists(FilFormula):
    var: str
    sort: str | None
    body: FilFormula


@dataclass(frozen=True)
class Forall(FilFormula):
    var: str
    sort: str | None
    body: FilFormula


@dataclass(frozen=True)
class Ionic(FilFormula):
    """Default formula: conclude ``conclusion`` unless a justification fails.

    Justification contexts do not nest; an ionic formula inside another one
    has no defined semantics here and is rejected at construction time.
    """

    justifications: tuple[FilFormula, ...]
    conclusion: FilFormula

    def __post_init__(self) -> None:
        for sub in self.justifications + (self.conclusion,):
            if _contains_ionic(sub):
                raise ValueError("nested ionic formulas are not supported")


def _contains_ionic(f: FilFormula) -> bool:
    return any(isinstance(g, Ionic) for g in walk(f))


def walk(f: FilFormula) -> Iterator[FilFormula]:
    """Yield every subformula of f, including f itself (preorder)."""
    yield f
    if isinstance(f, Not):
        yield from walk(f.sub)
    elif isinstance(f, (And, Or)):
        for p in f.parts:
            yield from walk(p)
    elif isinstance(f, (Implies, Iff)):
        yield from walk(f.left)
        yield from walk(f.right)
    elif isinstance(f, (Exists, Forall)):
        yield from walk(f.body)
    elif isinstance(f, Ionic):
        for j in f.justifications:
            yield from walk(j)
        yield from walk(f.conclusion)


def free_vars(f: FilFormula) -> set[str]:
    if isinstance(f, Atom):
        return {t.name for t in f.args if isinstance(t, Var)}
    if isinstance(f, Not):
        return free_vars(f.sub)
    if isinstance(f, (And, Or)):
        out: set[str] = set()
        for p in f.parts:
            out |= free_vars(p)
        return out
    if isinstance(f, (Implies, Iff)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    if isinstance(f, Ionic):
        out = free_vars(f.conclusion)
        for j in f.justifications:
            out |= free_vars(j)
        return out
    raise TypeError(f"not a formula: {f!r}")


def substitute(f: FilFormula, mapping: Mapping[str, Term]) -> FilFormula:
    """Replace free variables by terms.

    When a sorted variable position is filled by an unsorted variable, the
    position's sort is kept; role signatures recorded at translation time
    survive beta reduction that way.
    """
    if not mapping:
        return f
    if isinstance(f, Atom):
        args = []
        for t in f.args:
            if isinstance(t, Var) and t.name in mapping:
                rep = mapping[t.name]
                if isinstance(rep, Var) and rep.sort is None and t.sort is not None:
                    rep = Var(rep.name, t.sort)
                args.append(rep)
            else:
                args.append(t)
        return Atom(f.pred, tuple(args))
    if isinstance(f, Not):
        return Not(substitute(f.sub, mapping))
    if isinstance(f, And):
        return And(tuple(substitute(p, mapping) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(substitute(p, mapping) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, Iff):
        return Iff(substitute(f.left, mapping), substitute(f.right, mapping))
    if isinstance(f, (Exists, Forall)):
        inner = {k: v for k, v in mapping.items() if k != f.var}
        cls = type(f)
        return cls(f.var, f.sort, substitute(f.body, inner))
    if isinstance(f, Ionic):
        return Ionic(
            tuple(substitute(j, mapping) for j in f.justifications),
            substitute(f.conclusion, mapping),
        )
    raise TypeError(f"not a formula: {f!r}")


def term_text(t: Term) -> str:
    return t.name


def formula_text(f: FilFormula) -> str:
    """Compact prefix rendering, one line."""
    if isinstance(f, Atom):
        return f"{f.pred}({', '.join(term_text(t) for t in f.args)})"
    if isinstance(f, Not):
        return f"not({formula_text(f.sub)})"
    if isinstance(f, And):
        return f"and({', '.join(formula_text(p) for p in f.parts)})"
    if isinstance(f, Or):
        return f"or({', '.join(formula_text(p) for p in f.parts)})"
    if isinstance(f, Implies):
        return f"implies({formula_text(f.left)}, {formula_text(f.right)})"
    if isinstance(f, Iff):
        return f"iff({formula_text(f.left)}, {formula_text(f.right)})"
    if isinstance(f, Exists):
        v = f.var if f.sort is None else f"{f.var}:{f.sort}"
        return f"exists({v}, {formula_text(f.body)})"
    if isinstance(f, Forall):
        v = f.var if f.sort is None else f"{f.var}:{f.sort}"
        return f"forall({v}, {formula_text(f.body)})"
    if isinstance(f, Ionic):
        js = ", ".join(formula_text(j) for j in f.justifications)
        return f"ionic([{js}], {formula_text(f.conclusion)})"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# partial interpretations
# ---------------------------------------------------------------------------

def _freeze_table(table: Mapping[str, Iterable[tuple[str, ...]]]) -> dict[str, frozenset[tuple[str, ...]]]:
    return {p: frozenset(tuple(t) for t in ts) for p, ts in table.items() if ts}


@dataclass(frozen=True)
class PartialInterpretation:
    """Universe plus per-predicate positive and negative tuple sets."""

    universe: frozenset[str]
    plus: Mapping[str, frozenset[tuple[str, ...]]] = field(default_factory=dict)
    minus: Mapping[str, frozenset[tuple[str, ...]]] = field(default_factory=dict)

    @staticmethod
    def build(
        universe: Iterable[str],
        plus: Mapping[str, Iterable[tuple[str, ...]]] | None = None,
        minus: Mapping[str, Iterable[tuple[str, ...]]] | None = None,
    ) -> "PartialInterpretation":
        uni = frozenset(universe)
        p = _freeze_table(plus or {})
        m = _freeze_table(minus or {})
        for table in (p, m):
            for pred, tuples in table.items():
                for tup in tuples:
                    for el in tup:
                        if el not in uni:
                            raise ValueError(f"{el} not in universe ({pred}{tup})")
        for pred in set(p) & set(m):
            clash = p[pred] & m[pred]
            if clash:
                raise ValueError(f"plus and minus overlap on {pred}: {sorted(clash)}")
        return PartialInterpretation(uni, p, m)

    def value_of(self, pred: str, args: tuple[str, ...]) -> TruthValue:
        if args in self.plus.get(pred, ()):
            return T
        if args in self.minus.get(pred, ()):
            return F
        return U

    def sorted_universe(self) -> list[str]:
        return sorted(self.universe)


@dataclass(frozen=True)
class SignedAtom:
    """A ground literal used to extend an interpretation."""

    positive: bool
    pred: str
    args: tuple[str, ...]


def interp_leq(i: PartialInterpretation, j: PartialInterpretation) -> bool:
    """Information order: j knows at least everything i knows."""
    if not i.universe <= j.universe:
        return False
    for pred, tuples in i.plus.items():
        if not tuples <= j.plus.get(pred, frozenset()):
            return False
    for pred, tuples in i.minus.items():
        if not tuples <= j.minus.get(pred, frozenset()):
            return False
    return True


def extend_interpretation(
    i: PartialInterpretation, literal: SignedAtom
) -> PartialInterpretation:
    """Return i plus one ground literal; reject contradictions."""
    opposite = i.minus if literal.positive else i.plus
    if literal.args in opposite.get(literal.pred, ()):
        raise InconsistentExtensionError(literal.pred, literal.args)
    side = dict(i.plus if literal.positive else i.minus)
    side[literal.pred] = side.get(literal.pred, frozenset()) | {literal.args}
    universe = i.universe | set(literal.args)
    if literal.positive:
        return PartialInterpretation(universe, side, dict(i.minus))
    return PartialInterpretation(universe, dict(i.plus), side)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _resolve(t: Term, bindings: Mapping[str, str]) -> str:
    if isinstance(t, Const):
        return t.name
    if t.name in bindings:
        return bindings[t.name]
    raise UnboundVariableError(t.name)


def eval_formula(
    f: FilFormula,
    interp: PartialInterpretation,
    bindings: Mapping[str, str] | None = None,
) -> TruthValue:
    """Strong Kleene evaluation; quantifiers range over the whole universe.

    Sort annotations on quantified variables are metadata for witness search
    and question generation, not range restrictions; the translation already
    carries every sort constraint as an explicit conjunct where one matters.
    """
    b = dict(bindings or {})
    return _eval(f, interp, b)


def _eval(f: FilFormula, interp: PartialInterpretation, b: dict[str, str]) -> TruthValue:
    if isinstance(f, Atom):
        args = tuple(_resolve(t, b) for t in f.args)
        return interp.value_of(f.pred, args)
    if isinstance(f, Not):
        return kleene_not(_eval(f.sub, interp, b))
    if isinstance(f, And):
        return kleene_and(_eval(p, interp, b) for p in f.parts)
    if isinstance(f, Or):
        return kleene_or(_eval(p, interp, b) for p in f.parts)
    if isinstance(f, Implies):
        return kleene_implies(_eval(f.left, interp, b), _eval(f.right, interp, b))
    if isinstance(f, Iff):
        return kleene_iff(_eval(f.left, interp, b), _eval(f.right, interp, b))
    if isinstance(f, Exists):
        return kleene_or(
            _eval(f.body, interp, {**b, f.var: d}) for d in interp.sorted_universe()
        )
    if isinstance(f, Forall):
        return kleene_and(
            _eval(f.body, interp, {**b, f.var: d}) for d in interp.sorted_universe()
        )
    if isinstance(f, Ionic):
        raise IonicInClassicalContextError()
    raise TypeError(f"not a formula: {f!r}")


def eval_ionic_as_conclusion(
    f: FilFormula,
    interp: PartialInterpretation,
    bindings: Mapping[str, str] | None = None,
) -> TruthValue:
    """Evaluate with every ionic node read as its bare conclusion.

    Used where established knowledge must carry the formula on its own and
    no default may fire, e.g. when instantiating database queries.
    """
    return eval_formula(strip_ionic(f), interp, bindings)


def strip_ionic(f: FilFormula) -> FilFormula:
    if isinstance(f, Ionic):
        return strip_ionic(f.conclusion)
    if isinstance(f, Not):
        return Not(strip_ionic(f.sub))
    if isinstance(f, And):
        return And(tuple(strip_ionic(p) for p in f.parts))
    if isinstance(f, Or):
        return Or(tuple(strip_ionic(p) for p in f.parts))
    if isinstance(f, Implies):
        return Implies(strip_ionic(f.left), strip_ionic(f.right))
    if isinstance(f, Iff):
        return Iff(strip_ionic(f.left), strip_ionic(f.right))
    if isinstance(f, Exists):
        return Exists(f.var, f.sort, strip_ionic(f.body))
    if isinstance(f, Forall):
        return Forall(f.var, f.sort, strip_ionic(f.body))
    return f


# ---------------------------------------------------------------------------
# ionic status
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Concluded:
    """All justifications are supportable; the default conclusion stands."""

    bindings: Mapping[str, str]

    kind = "concluded"


@dataclass(frozen=True)
class Blocked:
    """Some justification is refuted however its variables are completed."""

    failing: FilFormula

    kind = "blocked"


@dataclass(frozen=True)
class Open:
    """Some justification variable cannot be bound from current knowledge."""

    variables: Mapping[str, str | None]  # var -> sort (may be None)

    kind = "open"


IonicStatus = Concluded | Blocked | Open


def atom_var_sorts(f: FilFormula) -> dict[str, str | None]:
    """Sorts of variables as recorded on atom argument positions."""
    sorts: dict[str, str | None] = {}
    for g in walk(f):
        if isinstance(g, Atom):
            for t in g.args:
                if isinstance(t, Var) and sorts.get(t.name) is None:
                    sorts[t.name] = t.sort
    return sorts


def _candidates(
    sort: str | None, interp: PartialInterpretation
) -> list[str]:
    """Constants an open variable may range over.

    A sort excludes only the constants known *not* to carry it; an element
    whose sort membership is undefined could still turn out to qualify in
    some extension, so it stays a candidate.
    """
    if sort is None:
        return interp.sorted_universe()
    return [
        d
        for d in interp.sorted_universe()
        if interp.value_of(sort, (d,)) is not F
    ]


def _completions(
    unbound: list[str],
    sorts: Mapping[str, str | None],
    interp: PartialInterpretation,
) -> Iterator[dict[str, str]]:
    pools = [_candidates(sorts.get(v), interp) for v in unbound]
    for combo in itertools.product(*pools):
        yield dict(zip(unbound, combo))


def ionic_status(
    f: Ionic,
    interp: PartialInterpretation,
    bindings: Mapping[str, str] | None = None,
) -> IonicStatus:
    """Classify a default formula against current knowledge.

    A justification refuted under every completion of its variables blocks
    the default.  Otherwise, a justification whose variables have no
    positively supported completion leaves the formula open, reported with
    the variables still wanted and their sorts.  Otherwise the default is
    concluded, with one witnessing completion merged into the bindings.
    """
    b = dict(bindings or {})
    sorts = atom_var_sorts(And(f.justifications))

    open_vars: dict[str, str | None] = {}
    needs_witness: list[tuple[FilFormula, list[str]]] = []
    for just in f.justifications:
        unbound = sorted(free_vars(just) - set(b))
        completions = list(_completions(unbound, sorts, interp))
        values = [eval_formula(just, interp, {**b, **c}) for c in completions]
        if values and all(v is F for v in values):
            # refuted no matter how the variables are filled in; report the
            # fully instantiated justification when it is unambiguous
            env = dict(b)
            if len(completions) == 1:
                env.update(completions[0])
            failing = substitute(just, {k: Const(v) for k, v in env.items()})
            return Blocked(failing)
        if unbound:
            if not any(v is T for v in values):
                for v in unbound:
                    open_vars.setdefault(v, sorts.get(v))
            else:
                needs_witness.append((just, unbound))
    if open_vars:
        return Open(open_vars)

    # joint witness: one assignment making every variable-bearing
    # justification true and refuting no ground one
    all_unbound = sorted({v for _, vs in needs_witness for v in vs})
    for combo in _completions(all_unbound, sorts, interp):
        env = {**b, **combo}
        if all(eval_formula(j, interp, env) is T for j, _ in needs_witness):
            return Concluded({**b, **combo})
    if all_unbound:
        # each justification is individually supportable but no single
        # assignment fits them all; hand the variables back to the dialog
        return Open({v: sorts.get(v) for v in all_unbound})
    return Concluded(dict(b))


# ---------------------------------------------------------------------------
# acceptance positions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PositionReport:
    """The four stances a justification context supports at once."""

    value: TruthValue
    accepted: bool
    inacceptable: bool
    not_acceptable: bool
    not_inacceptable: bool


def justification_position(
    justifications: Iterable[FilFormula],
    interp: PartialInterpretation,
    bindings: Mapping[str, str] | None = None,
) -> PositionReport:
    """Evaluate a justification set and report its acceptance positions.

    accepted and inacceptable are the two definite stances (value T and F);
    the negated stances hold whenever the value is merely not T (resp. not
    F), so an undefined context is both not-acceptable and not-inacceptable.
    """
    v = kleene_and(
        eval_formula(j, interp, bindings) for j in tuple(justifications)
    )
    return PositionReport(
        value=v,
        accepted=v is T,
        inacceptable=v is F,
        not_acceptable=v is not T,
        not_inacceptable=v is not F,
    )
