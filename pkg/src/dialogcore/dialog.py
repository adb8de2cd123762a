"""Clarification dialog management.

One turn works like this: the utterance is parsed into a discourse box and
a speech act.  A query establishes a focus, the most specific defined
concept the box supports; the concept's compiled formula is evaluated
against shared knowledge, and every ionic subformula still open becomes a
goal, i.e. a question the system may ask.  Answers extend shared knowledge
monotonically and the focus is re-evaluated: remaining goals produce the
next question, a justification refuted under every completion produces a
negative inform, and a goal-free focus is compiled into a conjunctive
query for the problem solver, whose bindings produce the answer inform.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from . import dl
from .drs import LambdaDRS, box_text
from .errors import DialogError, SortMismatchError
from .fil import (
    Atom,
    Const,
    Ionic,
    Open,
    PartialInterpretation,
    SignedAtom,
    T,
    U,
    Var,
    atom_var_sorts,
    eval_formula,
    eval_ionic_as_conclusion,
    extend_interpretation,
    free_vars,
    ionic_status,
    substitute,
    walk,
)
from .semparser import ActContext, Lexicon, ParseResult, parse_utterance
from .solver import ConjunctiveQuery, TimetableSolver, display_constant
from .translate import FilLambda, translate_concept

log = logging.getLogger("dialog")


# ---------------------------------------------------------------------------
# state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Goal:
    """An open question: a user-relation atom with at least one unbound
    variable, typed by the sorts still wanted."""

    justification: Atom
    var_sorts: Mapping[str, str | None]
    origin_role: str


@dataclass(frozen=True)
class Focus:
    drs: LambdaDRS
    target: str
    root: str  # name of the event referent, used as the query subject


@dataclass(frozen=True)
class TurnRecord:
    turn: int
    speaker: str
    act: str
    text: str


@dataclass(frozen=True)
class DialogState:
    shared: PartialInterpretation
    agenda: tuple[Goal, ...] = ()
    focus: Focus | None = None
    history: tuple[TurnRecord, ...] = ()
    user_const: str = "u"
    turn: int = 0
    pending_suggestion: Atom | None = None
    last_system_act: str | None = None
    last_drs: LambdaDRS | None = None


# ---------------------------------------------------------------------------
# system actions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AskQuestion:
    goal: Goal
    text: str

    act = "query"


@dataclass(frozen=True)
class Suggest:
    atom: Atom  # ground candidate the user may confirm
    text: str

    act = "suggest"


@dataclass(frozen=True)
class Inform:
    results: tuple[Mapping[str, str], ...]
    text: str

    act = "inform"


@dataclass(frozen=True)
class Clarify:
    reason: str
    text: str

    act = "clarify"


SystemAction = AskQuestion | Suggest | Inform | Clarify

NO_CONNECTION_TEXT = "No connection satisfies your constraints."
NO_RESULTS_TEXT = "I found nothing matching your request."


# ---------------------------------------------------------------------------
# goal extraction
# ---------------------------------------------------------------------------

def extract_goals(
    formula,
    shared: PartialInterpretation,
    user_rel: set[str],
    user_concept: str = "User",
) -> list[Goal]:
    """Walk the compiled focus formula; every ionic subformula whose status
    is open contributes one goal, in traversal order.

    Variables whose recorded sort is the user concept are bound to the
    session user up front: the dialog partner is a known constant, not
    something to ask about."""
    user_consts = sorted(
        c for c in shared.universe if shared.value_of(user_concept, (c,)) is T
    )
    uc = user_consts[0] if len(user_consts) == 1 else None
    goals: list[Goal] = []
    seen: set[tuple[str, tuple[str, ...]]] = set()
    for node in walk(formula):
        if not isinstance(node, Ionic):
            continue
        pre: dict[str, str] = {}
        if uc is not None:
            for v, sort in atom_var_sorts(node).items():
                if sort == user_concept:
                    pre[v] = uc
        status = ionic_status(node, shared, pre)
        if not isinstance(status, Open):
            continue
        just = next(
            (
                j
                for j in node.justifications
                if free_vars(j) & set(status.variables)
            ),
            node.justifications[0],
        )
        atom = substitute(just, {k: Const(v) for k, v in pre.items()})
        if not isinstance(atom, Atom):
            continue
        key = (atom.pred, tuple(sorted(status.variables)))
        if key in seen:
            continue
        seen.add(key)
        goals.append(Goal(atom, dict(status.variables), atom.pred))
    return goals


def generate_question(goal: Goal, t: dl.Terminology) -> str:
    template = t.question_templates.get(goal.origin_role)
    var = next(iter(goal.var_sorts), "?")
    sort = goal.var_sorts.get(var)
    if template is not None:
        return template.replace("{var}", var).replace("{sort}", sort or "?")
    if sort is not None:
        return f"Please specify: {goal.origin_role} ({sort})."
    return f"Please specify: {goal.origin_role}."


# ---------------------------------------------------------------------------
# target inference
# ---------------------------------------------------------------------------

def _skolemize(drs: LambdaDRS, kb: dl.FactBase) -> dl.FactBase:
    """Fact base extended with the box's conditions, variables read as
    fresh constants."""
    out = kb.copy()
    for p, _ in drs.params:
        out.individuals.add(p)
    for r in drs.body.referents:
        out.individuals.add(r.name)
    for cond in drs.body.conditions:
        names = [a.name for a in cond.args]
        if len(names) == 1:
            out.assert_concept(names[0], cond.pred)
        elif len(names) == 2:
            out.assert_role(names[0], cond.pred, names[1])
    return out


def _mentions_user_rel(c: dl.ConceptExpr, user_rel: set[str]) -> bool:
    return bool(dl.role_names(c) & user_rel)


def infer_target(
    drs: LambdaDRS,
    t: dl.Terminology,
    kb: dl.FactBase,
    user_rel: set[str],
) -> tuple[str, str] | None:
    """Most specific defined concept the box supports, with its root term.

    A definition qualifies at a root when each conjunct of its unfolded
    body either is proved from the box plus the facts, or depends on a user
    relation (such conjuncts are exactly what the dialog can still
    establish).  Specificity is the unfolded conjunct count; declaration
    order breaks ties."""
    extended = _skolemize(drs, kb)
    roots = [r.name for r in drs.body.referents]
    best: tuple[int, int, str, str] | None = None  # (-count, decl_idx, name, root)
    for idx, name in enumerate(t.definitions):
        body = dl.unfold(dl.Atomic(name), t)
        parts = dl.conjuncts(body)
        for root in roots:
            proved = 0
            ok = True
            for part in parts:
                if dl.instance_check(root, part, t, extended) is dl.PROVED:
                    proved += 1
                elif not _mentions_user_rel(part, user_rel):
                    ok = False
                    break
            if ok and proved > 0:
                key = (-len(parts), idx, name, root)
                if best is None or key < best:
                    best = key
    if best is None:
        return None
    return best[2], best[3]


# ---------------------------------------------------------------------------
# engine
# ---------------------------------------------------------------------------

class DialogEngine:
    """Holds the immutable domain configuration; states flow through."""

    def __init__(
        self,
        terminology: dl.Terminology,
        lexicon: Lexicon,
        kb: dl.FactBase,
        solver=None,
    ):
        self.t = terminology
        self.lexicon = lexicon
        self.kb = kb
        self.user_rel = dl.compute_user_rel(terminology)
        self.solver = solver or TimetableSolver(kb, terminology)
        self._compiled: dict[str, FilLambda] = {}
        self._kb_interp = _kb_as_interpretation(kb)

    # -- state ------------------------------------------------------------

    def fresh_state(self, user_const: str = "u") -> DialogState:
        shared = PartialInterpretation.build(
            {user_const}, {self.t.user_concept: {(user_const,)}}, {}
        )
        return DialogState(shared=shared, user_const=user_const)

    # -- main entry -------------------------------------------------------

    def interpret_turn(
        self, text: str, state: DialogState
    ) -> tuple[DialogState, SystemAction]:
        turn_no = state.turn + 1
        context = ActContext(
            last_system_act=state.last_system_act,
            open_goal_roles=frozenset(g.origin_role for g in state.agenda),
            user_rel=frozenset(self.user_rel),
            user_const=state.user_const,
        )
        try:
            parse = parse_utterance(text, self.lexicon, self.t, self.kb, context)
        except DialogError as err:
            action = Clarify(err.code, _clarify_text(err))
            return self._record(state, turn_no, text, "query", action, None)

        try:
            if parse.act == "accept":
                state2, action = self._on_accept(state)
            elif parse.act == "reject":
                state2, action = self._on_reject(state)
            elif parse.act == "inform" and state.agenda:
                state2, action = self._on_inform(parse, state)
            else:
                state2, action = self._on_query(parse, state)
        except DialogError as err:
            action = Clarify(err.code, _clarify_text(err))
            state2 = state
        return self._record(state2, turn_no, text, parse.act, action, parse.drs)

    def _record(
        self,
        state: DialogState,
        turn_no: int,
        user_text: str,
        user_act: str,
        action: SystemAction,
        parsed: LambdaDRS | None,
    ) -> tuple[DialogState, SystemAction]:
        records = (
            TurnRecord(turn_no, "user", user_act, user_text),
            TurnRecord(turn_no, "system", action.act, action.text),
        )
        for rec in records:
            log.info("%d\t%s\t%s\t%s", rec.turn, rec.speaker, rec.act, rec.text)
        if parsed is not None:
            log.debug("drs:\n%s", box_text(parsed))
        pending = action.atom if isinstance(action, Suggest) else None
        new = replace(
            state,
            history=state.history + records,
            turn=turn_no,
            last_system_act=action.act,
            pending_suggestion=pending,
            last_drs=parsed if parsed is not None else state.last_drs,
        )
        return new, action

    # -- turn kinds -------------------------------------------------------

    def _on_query(
        self, parse: ParseResult, state: DialogState
    ) -> tuple[DialogState, SystemAction]:
        target = infer_target(parse.drs, self.t, self.kb, self.user_rel)
        if target is None:
            return state, Clarify(
                "NoTarget", "I cannot relate that to anything I know about."
            )
        name, root = target
        state = replace(state, focus=Focus(parse.drs, name, root))
        # facts volunteered inside the query bind immediately
        state = self._absorb_assertions(parse.user_assertions, state)
        return self._advance(state)

    def _on_inform(
        self, parse: ParseResult, state: DialogState
    ) -> tuple[DialogState, SystemAction]:
        matched = False
        for atom in parse.user_assertions:
            for goal in state.agenda:
                if goal.origin_role == atom.pred:
                    state = self._bind_goal(goal, atom, state)
                    matched = True
                    break
        if not matched:
            # an inform that answers no open goal is treated as a fresh query
            return self._on_query(parse, state)
        if state.focus is None:
            return state, Inform((), "Noted.")
        return self._advance(state)

    def _on_accept(self, state: DialogState) -> tuple[DialogState, SystemAction]:
        atom = state.pending_suggestion
        if atom is None:
            return state, Clarify("NoSuggestion", "There is nothing to confirm.")
        args = tuple(a.name for a in atom.args)
        shared = extend_interpretation(
            state.shared, SignedAtom(True, atom.pred, args)
        )
        state = replace(state, shared=shared, pending_suggestion=None)
        return self._advance(state)

    def _on_reject(self, state: DialogState) -> tuple[DialogState, SystemAction]:
        atom = state.pending_suggestion
        if atom is None:
            return state, Clarify("NoSuggestion", "There is nothing to reject.")
        args = tuple(a.name for a in atom.args)
        shared = extend_interpretation(
            state.shared, SignedAtom(False, atom.pred, args)
        )
        state = replace(state, shared=shared, pending_suggestion=None)
        return self._advance(state)

    # -- binding ----------------------------------------------------------

    def _absorb_assertions(
        self, assertions: Sequence[Atom], state: DialogState
    ) -> DialogState:
        for atom in assertions:
            role = atom.pred
            rng = self.t.roles[role].range
            const = atom.args[1].name
            self._check_sort(const, rng)
            shared = extend_interpretation(
                state.shared,
                SignedAtom(True, role, tuple(a.name for a in atom.args)),
            )
            state = replace(state, shared=shared)
        return state

    def _bind_goal(
        self, goal: Goal, atom: Atom, state: DialogState
    ) -> DialogState:
        var = next(iter(goal.var_sorts), None)
        sort = goal.var_sorts.get(var) if var else None
        const = atom.args[1].name
        if sort is not None:
            self._check_sort(const, dl.Atomic(sort))
        shared = extend_interpretation(
            state.shared,
            SignedAtom(True, atom.pred, tuple(a.name for a in atom.args)),
        )
        agenda = tuple(g for g in state.agenda if g is not goal)
        return replace(state, shared=shared, agenda=agenda)

    def _check_sort(self, const: str, sort_expr: dl.ConceptExpr) -> None:
        if const not in self.kb.individuals:
            return  # nothing known, nothing to contradict
        if dl.instance_check(const, sort_expr, self.t, self.kb) is not dl.PROVED:
            name = sort_expr.name if isinstance(sort_expr, dl.Atomic) else dl.concept_text(sort_expr)
            raise SortMismatchError(const, name)

    # -- focus pipeline ---------------------------------------------------

    def _compiled_target(self, name: str) -> FilLambda:
        lam = self._compiled.get(name)
        if lam is None:
            body = dl.unfold(dl.Atomic(name), self.t)
            lam = translate_concept(body, self.t, self.user_rel)
            self._compiled[name] = lam
        return lam

    def _advance(self, state: DialogState) -> tuple[DialogState, SystemAction]:
        focus = state.focus
        assert focus is not None
        formula = self._compiled_target(focus.target).apply(Const(focus.root))
        goals = extract_goals(
            formula, state.shared, self.user_rel, self.t.user_concept
        )
        if goals:
            state = replace(state, agenda=tuple(goals))
            goal = goals[0]
            candidates = self._suggestion_candidates(goal, state.shared)
            if len(candidates) == 1:
                var = next(iter(goal.var_sorts))
                atom = substitute(goal.justification, {var: Const(candidates[0])})
                text = _suggest_text(goal, candidates[0])
                return state, Suggest(atom, text)
            return state, AskQuestion(goal, generate_question(goal, self.t))

        # no goals left: blocked defaults end the dialog, otherwise solve
        state = replace(state, agenda=())
        if self._blocked(formula, state.shared):
            return state, Inform((), NO_CONNECTION_TEXT)
        results = self._solve(state)
        if not results:
            return state, Inform((), NO_RESULTS_TEXT)
        text = _inform_text(results, state)
        return state, Inform(tuple(results), text)

    def _suggestion_candidates(
        self, goal: Goal, shared: PartialInterpretation
    ) -> list[str]:
        """Constants of intrinsic sort already in shared knowledge for which
        the justification is undecided; exactly one makes a suggestion."""
        var = next(iter(goal.var_sorts), None)
        if var is None:
            return []
        sort = goal.var_sorts[var]
        if sort is None:
            return []
        out = []
        for d in shared.sorted_universe():
            if shared.value_of(sort, (d,)) is not T:
                continue
            value = eval_formula(
                substitute(goal.justification, {var: Const(d)}), shared
            )
            if value is U:
                out.append(d)
        return out

    def _blocked(self, formula, shared: PartialInterpretation) -> bool:
        user_consts = sorted(
            c
            for c in shared.universe
            if shared.value_of(self.t.user_concept, (c,)) is T
        )
        uc = user_consts[0] if len(user_consts) == 1 else None
        for node in walk(formula):
            if isinstance(node, Ionic):
                pre: dict[str, str] = {}
                if uc is not None:
                    for v, sort in atom_var_sorts(node).items():
                        if sort == self.t.user_concept:
                            pre[v] = uc
                if ionic_status(node, shared, pre).kind == "blocked":
                    return True
        return False

    # -- solving ----------------------------------------------------------

    def _solve(self, state: DialogState) -> list[dict[str, str]]:
        focus = state.focus
        assert focus is not None
        queries = self._build_queries(state)
        merged: list[dict[str, str]] = []
        seen = set()
        for q in queries:
            for row in self.solver.eval_query(q):
                key = tuple(sorted(row.items()))
                if key not in seen:
                    seen.add(key)
                    merged.append(row)
        merged.sort(key=lambda row: sorted(row.items()))
        return merged

    def _build_queries(self, state: DialogState) -> list[ConjunctiveQuery]:
        """Compile the focus into conjunctive queries.

        Database role conjuncts take their object from the box when it has
        one; otherwise the object is any constant that the merged knowledge
        proves to fit the filler (no defaults fire here).  Several fitting
        constants fan out into alternative queries."""
        focus = state.focus
        conjs = dl.conjuncts(dl.unfold(dl.Atomic(focus.target), self.t))
        root = focus.root
        answer_vars = [root] + [p for p, _ in focus.drs.params]
        conditions = focus.drs.body.conditions
        merged_interp = self._merged_interpretation(state.shared)

        fixed_atoms: list[Atom] = []
        alternative_sets: list[list[Atom]] = []
        for conj in conjs:
            if not isinstance(conj, dl.Exists):
                continue
            rnames = dl.role_names(conj.role)
            if rnames & self.user_rel:
                continue  # established through the dialog, not the database
            cond = next(
                (
                    c
                    for c in conditions
                    if c.pred in rnames and c.args and c.args[0].name == root
                ),
                None,
            )
            if cond is not None:
                fixed_atoms.append(Atom(cond.pred, cond.args))
                continue
            witnesses = self._filler_witnesses(conj.filler, merged_interp)
            if witnesses:
                rname = sorted(rnames)[0]
                alternative_sets.append(
                    [Atom(rname, (Var(root), Const(w))) for w in witnesses]
                )

        if not fixed_atoms and not alternative_sets:
            return []
        queries: list[ConjunctiveQuery] = []
        for combo in itertools.product(*alternative_sets):
            atoms = tuple(fixed_atoms) + tuple(combo)
            vars_in_atoms = {
                t.name for a in atoms for t in a.args if isinstance(t, Var)
            }
            queries.append(
                ConjunctiveQuery(
                    atoms,
                    tuple(v for v in answer_vars if v in vars_in_atoms),
                )
            )
        return queries

    def _filler_witnesses(
        self, filler: dl.ConceptExpr, merged: PartialInterpretation
    ) -> list[str]:
        lam = translate_concept(dl.unfold(filler, self.t), self.t, self.user_rel)
        out = []
        for d in merged.sorted_universe():
            if eval_ionic_as_conclusion(lam.apply(Const(d)), merged) is T:
                out.append(d)
        return out

    def _merged_interpretation(
        self, shared: PartialInterpretation
    ) -> PartialInterpretation:
        plus: dict[str, set[tuple[str, ...]]] = {
            pred: set(tuples) for pred, tuples in self._kb_interp.items()
        }
        for pred, tuples in shared.plus.items():
            plus.setdefault(pred, set()).update(tuples)
        # shared denials win over stale overlap, which regular dialogs
        # cannot produce anyway
        for pred, tuples in shared.minus.items():
            if pred in plus:
                plus[pred] -= set(tuples)
        universe = set(shared.universe) | self.kb.individuals
        return PartialInterpretation.build(universe, plus, dict(shared.minus))


def _kb_as_interpretation(kb: dl.FactBase) -> dict[str, frozenset[tuple[str, ...]]]:
    plus: dict[str, set[tuple[str, ...]]] = {}
    for ind, concept in kb.concept_assertions:
        plus.setdefault(concept, set()).add((ind,))
    for s, role, o in kb.role_assertions:
        plus.setdefault(role, set()).add((s, o))
    return {pred: frozenset(tuples) for pred, tuples in plus.items()}


# ---------------------------------------------------------------------------
# texts
# ---------------------------------------------------------------------------

def _clarify_text(err: DialogError) -> str:
    from .errors import (
        AttachmentRejectedError,
        EmptyUtteranceError,
        SortMismatchError as SortErr,
        UnknownLexemeError,
    )

    if isinstance(err, UnknownLexemeError):
        return f"Sorry, I did not understand {err.token!r}."
    if isinstance(err, SortErr):
        return f"Sorry, I expected a {err.expected_sort}, not {display_constant(err.value)}."
    if isinstance(err, AttachmentRejectedError):
        if err.obj is None:
            return f"Something is missing after that {err.role.lower()} phrase."
        return f"{display_constant(err.obj)} does not fit there ({err.restriction})."
    if isinstance(err, EmptyUtteranceError):
        return "Please say something."
    return f"Sorry, I could not process that ({err.code})."


def _suggest_text(goal: Goal, candidate: str) -> str:
    return (
        f"Should I take {display_constant(candidate)} for {goal.origin_role}?"
    )


def _inform_text(results: Sequence[Mapping[str, str]], state: DialogState) -> str:
    focus = state.focus
    params = [p for p, _ in focus.drs.params] if focus else []
    rows = []
    for row in results:
        main = [display_constant(row[p]) for p in params if p in row]
        rest = [
            display_constant(v) for k, v in sorted(row.items()) if k not in params
        ]
        if main and rest:
            rows.append(f"{', '.join(main)} ({', '.join(rest)})")
        elif main:
            rows.append(", ".join(main))
        else:
            rows.append(", ".join(rest))
    return "Answer: " + "; ".join(rows) + "."


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def build_engine(domain_text: str, facts_text: str) -> DialogEngine:
    from .semparser import load_lexicon
    from .solver import load_facts

    t = dl.load_terminology(domain_text)
    lex = load_lexicon(domain_text, t)
    kb = load_facts(facts_text, t)
    return DialogEngine(t, lex, kb)
