"""Conjunctive query answering: fixture joins, a naive enumeration oracle
on random fact bases, facts-file loading, and the CLI query syntax."""

import itertools
import random

import pytest

from dialogcore.dl import FactBase
from dialogcore.errors import (
    DomainSyntaxError,
    UnboundVariableError,
    UndefinedNameError,
)
from dialogcore.fil import Atom, Const, Var
from dialogcore.solver import (
    ConjunctiveQuery,
    TimetableSolver,
    display_constant,
    eval_query,
    load_facts,
    parse_query,
)

GOLDEN = ConjunctiveQuery(
    (
        Atom("At", (Var("t"), Var("x"))),
        Atom("From", (Var("t"), Const("Milan"))),
        Atom("To", (Var("t"), Const("Rome"))),
    ),
    ("t", "x"),
)


# ---------------------------------------------------------------------------
# fixture joins
# ---------------------------------------------------------------------------

class TestFixtureQueries:
    def test_golden_join(self, kb):
        assert eval_query(GOLDEN, kb) == [{"t": "ic101", "x": "t0915"}]

    def test_unknown_destination_gives_empty_join(self, kb):
        q = ConjunctiveQuery(
            (Atom("To", (Var("t"), Const("Venice"))),), ("t",)
        )
        assert eval_query(q, kb) == []

    def test_fully_free_role_enumerates_all_pairs(self, kb):
        q = ConjunctiveQuery((Atom("From", (Var("t"), Var("s"))),), ("t", "s"))
        assert eval_query(q, kb) == [
            {"t": "ic101", "s": "Milan"},
            {"t": "ic205", "s": "Turin"},
        ]

    def test_unary_atom_matches_concept_assertions(self, kb):
        q = ConjunctiveQuery((Atom("Train", (Var("t"),)),), ("t",))
        assert eval_query(q, kb) == [{"t": "ic101"}, {"t": "ic205"}]

    def test_ground_query_returns_single_empty_binding(self, kb):
        q = ConjunctiveQuery((Atom("From", (Const("ic101"), Const("Milan"))),), ())
        assert eval_query(q, kb) == [{}]
        q2 = ConjunctiveQuery((Atom("From", (Const("ic101"), Const("Rome"))),), ())
        assert eval_query(q2, kb) == []

    def test_results_invariant_under_atom_reordering(self, kb):
        expected = eval_query(GOLDEN, kb)
        for perm in itertools.permutations(GOLDEN.atoms):
            assert eval_query(ConjunctiveQuery(perm, GOLDEN.answer_vars), kb) == expected

    def test_adding_facts_only_adds_bindings(self, kb):
        before = eval_query(GOLDEN, kb)
        bigger = kb.copy()
        bigger.assert_role("ic999", "At", "t1130")
        bigger.assert_role("ic999", "From", "Milan")
        bigger.assert_role("ic999", "To", "Rome")
        after = eval_query(GOLDEN, bigger)
        assert all(row in after for row in before)
        assert {"t": "ic999", "x": "t1130"} in after

    def test_backend_delegates(self, kb, terminology):
        solver = TimetableSolver(kb, terminology)
        assert solver.eval_query(GOLDEN) == eval_query(GOLDEN, kb)


class TestQueryValidation:
    def test_arity_above_two_rejected(self, kb):
        q = ConjunctiveQuery(
            (Atom("Triple", (Var("a"), Var("b"), Var("c"))),), ("a",)
        )
        with pytest.raises(DomainSyntaxError):
            eval_query(q, kb)

    def test_undeclared_predicate_rejected_with_terminology(self, kb, terminology):
        q = ConjunctiveQuery((Atom("Serves", (Var("t"), Var("m"))),), ("t",))
        with pytest.raises(UndefinedNameError):
            eval_query(q, kb, terminology)
        assert eval_query(q, kb) == []  # without one, it is just an empty join

    def test_answer_variable_must_occur_in_some_atom(self, kb):
        q = ConjunctiveQuery((Atom("Train", (Var("t"),)),), ("t", "ghost"))
        with pytest.raises(UnboundVariableError):
            eval_query(q, kb)


# ---------------------------------------------------------------------------
# naive enumeration oracle on random instances
# ---------------------------------------------------------------------------

def _oracle(q: ConjunctiveQuery, facts: FactBase) -> list[dict[str, str]]:
    """Try every total assignment of constants to the query's variables."""
    variables = sorted({t.name for a in q.atoms for t in a.args if isinstance(t, Var)})
    concept_facts = set(facts.concept_assertions)
    role_facts = set(facts.role_assertions)
    rows = set()
    for combo in itertools.product(sorted(facts.individuals), repeat=len(variables)):
        env = dict(zip(variables, combo))

        def value(term):
            return env[term.name] if isinstance(term, Var) else term.name

        ok = True
        for a in q.atoms:
            if len(a.args) == 1:
                ok = (value(a.args[0]), a.pred) in concept_facts
            else:
                ok = (value(a.args[0]), a.pred, value(a.args[1])) in role_facts
            if not ok:
                break
        if ok:
            rows.add(tuple(env[v] for v in q.answer_vars))
    return [dict(zip(q.answer_vars, row)) for row in sorted(rows)]


def _random_instance(rng: random.Random) -> tuple[ConjunctiveQuery, FactBase]:
    constants = [f"c{k}" for k in range(rng.randint(1, 5))]
    kb = FactBase()
    for c in constants:
        kb.individuals.add(c)
        for concept in ("P", "Q"):
            if rng.random() < 0.5:
                kb.assert_concept(c, concept)
    for s in constants:
        for o in constants:
            for role in ("R", "S"):
                if rng.random() < 0.3:
                    kb.assert_role(s, role, o)

    def term():
        if rng.random() < 0.3:
            return Const(rng.choice(constants))
        return Var(rng.choice(["x", "y", "z"]))

    atoms = []
    for _ in range(rng.randint(1, 3)):
        if rng.random() < 0.4:
            atoms.append(Atom(rng.choice(["P", "Q"]), (term(),)))
        else:
            atoms.append(Atom(rng.choice(["R", "S"]), (term(), term())))
    used = sorted({t.name for a in atoms for t in a.args if isinstance(t, Var)})
    answer = tuple(v for v in used if rng.random() < 0.8) or tuple(used[:1])
    return ConjunctiveQuery(tuple(atoms), answer), kb


def test_matches_enumeration_oracle_on_random_instances():
    rng = random.Random(20260823)
    for _ in range(300):
        q, kb = _random_instance(rng)
        if not q.answer_vars and not any(
            isinstance(t, Var) for a in q.atoms for t in a.args
        ):
            continue  # ground queries covered by their own unit test
        assert eval_query(q, kb) == _oracle(q, kb)


# ---------------------------------------------------------------------------
# facts file
# ---------------------------------------------------------------------------

class TestLoadFacts:
    def test_bundled_fixture_counts(self, facts_text, terminology):
        kb = load_facts(facts_text, terminology)
        trains = {i for i, c in kb.concept_assertions if c == "Train"}
        stations = {i for i, c in kb.concept_assertions if c == "Station"}
        assert len(trains) == 2
        assert len(stations) == 3
        assert ("ic101", "At", "t0915") in kb.role_assertions

    def test_empty_source(self):
        kb = load_facts("")
        assert not kb.individuals
        assert not kb.concept_assertions
        assert not kb.role_assertions

    def test_comments_and_blank_lines_skipped(self):
        kb = load_facts("# header\n\nfact P(a)  # trailing\n")
        assert ("a", "P") in kb.concept_assertions

    def test_undeclared_predicate_rejected(self, terminology):
        with pytest.raises(UndefinedNameError):
            load_facts("fact Serves(ic101, pasta)", terminology)

    def test_role_arity_enforced(self, terminology):
        with pytest.raises(DomainSyntaxError):
            load_facts("fact At(ic101)", terminology)

    def test_concept_arity_enforced(self, terminology):
        with pytest.raises(DomainSyntaxError):
            load_facts("fact Train(a, b)", terminology)

    def test_bad_line_reports_its_number(self):
        with pytest.raises(DomainSyntaxError) as exc:
            load_facts("fact P(a)\nnonsense here\n")
        assert exc.value.line_no == 2

    def test_without_terminology_any_predicate_loads(self):
        kb = load_facts("fact Anything(one, other)")
        assert ("one", "Anything", "other") in kb.role_assertions


# ---------------------------------------------------------------------------
# CLI query syntax
# ---------------------------------------------------------------------------

class TestParseQuery:
    def test_golden_text_form(self, kb):
        q = parse_query("At(t, x) & From(t, Milan) & To(t, Rome)", kb)
        assert q == GOLDEN

    def test_known_individuals_are_constants(self, kb):
        q = parse_query("At(ic101, when)", kb)
        assert q.atoms[0].args[0] == Const("ic101")
        assert q.atoms[0].args[1] == Var("when")
        assert q.answer_vars == ("when",)

    def test_capitalised_unknowns_are_constants(self, kb):
        q = parse_query("To(t, Venice)", kb)
        assert q.atoms[0].args[1] == Const("Venice")
        assert eval_query(q, kb) == []

    def test_leading_digit_is_a_constant(self, kb):
        q = parse_query("At(t, 42)", kb)
        assert q.atoms[0].args[1] == Const("42")

    def test_answer_vars_in_first_appearance_order(self, kb):
        q = parse_query("From(t, s) & At(t, x)", kb)
        assert q.answer_vars == ("t", "s", "x")

    def test_malformed_atom(self, kb):
        with pytest.raises(DomainSyntaxError):
            parse_query("From(t", kb)


def test_display_constant_renders_clock_times():
    assert display_constant("t0915") == "09:15"
    assert display_constant("t1130") == "11:30"
    assert display_constant("Milan") == "Milan"
    assert display_constant("ic101") == "ic101"
    assert display_constant("t091") == "t091"
