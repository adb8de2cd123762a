"""Concept language and terminology layer: expression parsing, domain-file
loading with its validation errors, definition unfolding, open-world
instance checking against a brute-force oracle, and the user-role set."""

import random

import pytest

from dialogcore.dl import (
    Atomic,
    AtomicRole,
    Conjunction,
    Disjunction,
    Exists,
    FactBase,
    Forall,
    Inverse,
    PROVED,
    RoleUnion,
    Top,
    UNPROVED,
    compute_user_rel,
    concept_text,
    conjuncts,
    instance_check,
    load_terminology,
    parse_concept_expr,
    unfold,
)
from dialogcore.errors import (
    CyclicTerminologyError,
    DomainSyntaxError,
    UndefinedNameError,
)

MINIMAL = """\
concept Train
concept Depart
concept Time
concept Station
user-concept User
role At : Train x Time
role To : Train x Station
role From : Train x Station
role DepartFrom : User x Station
define DepStation = exists inv(DepartFrom).User and Station
define TrainFrom = exists From.DepStation and Train and Depart
define TrainAtFrom = exists At.Time and TrainFrom
define TrainAtFromTo = exists To.Station and TrainAtFrom
"""


# ---------------------------------------------------------------------------
# expression parsing
# ---------------------------------------------------------------------------

class TestExpressionParser:
    def setup_method(self):
        self.t = load_terminology(MINIMAL)

    def test_operator_precedence_and_over_or(self):
        e = parse_concept_expr("Train and Time or Station", self.t)
        assert isinstance(e, Disjunction)

    def test_quantifier_binds_tighter_than_and(self):
        e = parse_concept_expr("exists At.Time and Train", self.t)
        assert isinstance(e, Conjunction)
        assert isinstance(e.parts[0], Exists)

    def test_inverse_and_union_roles(self):
        e = parse_concept_expr("exists inv(At).Train", self.t)
        assert isinstance(e.role, Inverse)
        e = parse_concept_expr("exists (To or From).Station", self.t)
        assert isinstance(e.role, RoleUnion)

    def test_double_inverse_cancels(self):
        e = parse_concept_expr("exists inv(inv(At)).Time", self.t)
        assert e.role == AtomicRole("At")

    def test_parenthesized_filler(self):
        e = parse_concept_expr("forall inv(At).(Time or Station)", self.t)
        assert isinstance(e, Forall)
        assert concept_text(e) == "forall inv(At).(Time or Station)"

    def test_top_concept(self):
        e = parse_concept_expr("top", self.t)
        assert isinstance(e, Top)

    def test_undeclared_name_rejected(self):
        with pytest.raises(UndefinedNameError):
            parse_concept_expr("Train and Blimp", self.t)

    def test_malformed_expression_rejected(self):
        for bad in ["Train and", "exists At", "exists At.", "(Train", "and Train"]:
            with pytest.raises(DomainSyntaxError):
                parse_concept_expr(bad, self.t)

    def test_text_round_trip(self):
        for src in [
            "Train and Depart",
            "exists To.Station",
            "exists inv(DepartFrom).User and Station",
            "forall At.Time",
            "Train or Time or Station",
        ]:
            e = parse_concept_expr(src, self.t)
            assert concept_text(e) == src
            assert parse_concept_expr(concept_text(e), self.t) == e


# ---------------------------------------------------------------------------
# domain-file loading
# ---------------------------------------------------------------------------

class TestLoadTerminology:
    def test_counts_for_the_core_train_domain(self):
        t = load_terminology(MINIMAL)
        assert len(t.primitive_concepts) == 4
        assert len(t.roles) == 4
        assert len(t.definitions) >= 4

    def test_self_reference_is_a_cycle(self):
        src = MINIMAL + "define Loop = exists At.Loop\n"
        with pytest.raises(CyclicTerminologyError) as exc:
            load_terminology(src)
        assert "Loop" in str(exc.value)

    def test_mutual_reference_is_a_cycle(self):
        src = (
            "concept A\nuser-concept User\nrole R : A x A\n"
            "define B = exists R.C\ndefine C = exists R.B\n"
        )
        with pytest.raises(CyclicTerminologyError):
            load_terminology(src)

    def test_undeclared_name_in_body(self):
        src = "concept A\nuser-concept User\ndefine C = A and B\n"
        with pytest.raises(UndefinedNameError) as exc:
            load_terminology(src)
        assert "B" in str(exc.value)

    def test_duplicate_definition_rejected(self):
        src = MINIMAL + "define DepStation = Station\n"
        with pytest.raises(DomainSyntaxError):
            load_terminology(src)

    def test_exactly_one_user_concept_required(self):
        with pytest.raises(DomainSyntaxError):
            load_terminology("concept A\n")
        with pytest.raises(DomainSyntaxError):
            load_terminology("concept A\nuser-concept U1\nuser-concept U2\n")

    def test_concept_role_name_clash_rejected(self):
        src = "concept A\nuser-concept User\nrole A : A x A\n"
        with pytest.raises(DomainSyntaxError):
            load_terminology(src)

    def test_syntax_error_carries_line_number(self):
        src = "concept A\nuser-concept User\nwibble wobble\n"
        with pytest.raises(DomainSyntaxError) as exc:
            load_terminology(src)
        assert exc.value.line_no == 3

    def test_comments_and_blank_lines_ignored(self):
        src = "# header\n\nconcept A\n  # indented comment\nuser-concept User\n"
        t = load_terminology(src)
        assert t.primitive_concepts == ("A",)


# ---------------------------------------------------------------------------
# unfolding
# ---------------------------------------------------------------------------

class TestUnfold:
    def setup_method(self):
        self.t = load_terminology(MINIMAL)

    def test_primitive_is_identity(self):
        assert unfold(Atomic("Train"), self.t) == Atomic("Train")

    def test_single_level_definition(self):
        e = unfold(Atomic("DepStation"), self.t)
        assert concept_text(e) == "exists inv(DepartFrom).User and Station"

    def test_deep_definition_flattens_left_to_right(self):
        e = unfold(Atomic("TrainAtFromTo"), self.t)
        assert concept_text(e) == (
            "exists To.Station and exists At.Time and "
            "exists From.(exists inv(DepartFrom).User and Station) "
            "and Train and Depart"
        )

    def test_idempotent(self):
        for name in ["DepStation", "TrainFrom", "TrainAtFrom", "TrainAtFromTo"]:
            once = unfold(Atomic(name), self.t)
            assert unfold(once, self.t) == once

    def test_no_defined_names_remain(self):
        e = unfold(Atomic("TrainAtFromTo"), self.t)
        names = {c.name for c in conjuncts(e) if isinstance(c, Atomic)}
        assert not names & set(self.t.definitions)


# ---------------------------------------------------------------------------
# the user-role set
# ---------------------------------------------------------------------------

class TestUserRel:
    def test_departure_role_is_the_only_user_role(self):
        t = load_terminology(MINIMAL)
        assert compute_user_rel(t) == {"DepartFrom"}

    def test_no_roles_no_user_roles(self):
        t = load_terminology("concept A\nuser-concept User\n")
        assert compute_user_rel(t) == set()

    def test_range_position_counts_too(self):
        src = (
            "concept Meal\nuser-concept User\n"
            "role Prefers : Meal x User\n"
        )
        assert compute_user_rel(load_terminology(src)) == {"Prefers"}

    def test_defined_domain_unfolding_to_user_counts(self):
        src = (
            "concept Meal\nuser-concept User\n"
            "concept Vip\n"
            "define Guest = User and Vip\n"
            "role Prefers : Guest x Meal\n"
        )
        assert compute_user_rel(load_terminology(src)) == {"Prefers"}

    def test_invariant_under_renaming_other_concepts(self):
        a = load_terminology(MINIMAL)
        renamed = MINIMAL.replace("Station", "Halt").replace("Train", "Loco")
        b = load_terminology(renamed)
        assert compute_user_rel(a) == compute_user_rel(b) == {"DepartFrom"}


# ---------------------------------------------------------------------------
# instance checking vs a brute-force oracle
# ---------------------------------------------------------------------------

def _oracle_pairs(role, kb):
    if isinstance(role, AtomicRole):
        return {(s, o) for s, r, o in kb.role_assertions if r == role.name}
    if isinstance(role, Inverse):
        return {(o, s) for s, o in _oracle_pairs(role.role, kb)}
    pairs = set()
    for part in role.parts:
        pairs |= _oracle_pairs(part, kb)
    return pairs


def _oracle_holds(d, c, t, kb):
    """Positive-query evaluation written from scratch: definitions expanded
    by direct lookup, quantifiers by explicit enumeration of role pairs."""
    if isinstance(c, Atomic):
        if c.name in t.definitions:
            return _oracle_holds(d, t.definitions[c.name], t, kb)
        return (d, c.name) in kb.concept_assertions
    if isinstance(c, Top):
        return True
    if isinstance(c, Conjunction):
        return all(_oracle_holds(d, p, t, kb) for p in c.parts)
    if isinstance(c, Disjunction):
        return any(_oracle_holds(d, p, t, kb) for p in c.parts)
    pairs = _oracle_pairs(c.role, kb)
    successors = [o for s, o in pairs if s == d]
    if isinstance(c, Exists):
        return any(_oracle_holds(o, c.filler, t, kb) for o in successors)
    return all(_oracle_holds(o, c.filler, t, kb) for o in successors)


def _fixture_kb(t):
    kb = FactBase()
    kb.assert_concept("ic101", "Train")
    kb.assert_concept("ic101", "Depart")
    kb.assert_concept("t0915", "Time")
    for s in ["Milan", "Rome", "Turin"]:
        kb.assert_concept(s, "Station")
    kb.assert_concept("u", "User")
    kb.assert_role("ic101", "At", "t0915")
    kb.assert_role("ic101", "From", "Milan")
    kb.assert_role("ic101", "To", "Rome")
    return kb


class TestInstanceCheck:
    def setup_method(self):
        self.t = load_terminology(MINIMAL)
        self.kb = _fixture_kb(self.t)

    def test_station_fact_proves_departure_station_after_user_link(self):
        kb = self.kb.copy()
        assert instance_check("Milan", Atomic("DepStation"), self.t, kb) is UNPROVED
        kb.assert_role("u", "DepartFrom", "Milan")
        assert instance_check("Milan", Atomic("DepStation"), self.t, kb) is PROVED

    def test_unsupported_concept_is_unproved_not_false(self):
        assert instance_check("Rome", Atomic("Time"), self.t, self.kb) is UNPROVED

    def test_full_train_concept_proved_once_departure_known(self):
        kb = self.kb.copy()
        assert (
            instance_check("ic101", Atomic("TrainAtFromTo"), self.t, kb)
            is UNPROVED
        )
        kb.assert_role("u", "DepartFrom", "Milan")
        assert (
            instance_check("ic101", Atomic("TrainAtFromTo"), self.t, kb)
            is PROVED
        )

    def test_value_restriction_trivially_proved_without_successors(self):
        e = parse_concept_expr("forall At.Time", self.t)
        assert instance_check("Milan", e, self.t, self.kb) is PROVED

    def test_value_restriction_checks_known_successors(self):
        e = parse_concept_expr("forall At.Station", self.t)
        assert instance_check("ic101", e, self.t, self.kb) is UNPROVED

    def test_conjunct_elimination(self):
        kb = self.kb.copy()
        kb.assert_role("u", "DepartFrom", "Milan")
        e = parse_concept_expr("exists inv(DepartFrom).User and Station", self.t)
        assert instance_check("Milan", e, self.t, kb) is PROVED
        for part in conjuncts(e):
            assert instance_check("Milan", part, self.t, kb) is PROVED

    def test_monotone_under_fact_growth(self):
        kb = self.kb.copy()
        kb.assert_role("u", "DepartFrom", "Milan")
        bigger = kb.copy()
        bigger.assert_concept("extra", "Station")
        bigger.assert_role("ic101", "To", "Turin")
        for name in ["DepStation", "TrainFrom", "TrainAtFromTo"]:
            for ind in sorted(kb.individuals):
                if instance_check(ind, Atomic(name), self.t, kb) is PROVED:
                    assert (
                        instance_check(ind, Atomic(name), self.t, bigger)
                        is PROVED
                    )


def _random_expr(rng, t, depth):
    concepts = list(t.primitive_concepts) + list(t.definitions)
    if depth == 0 or rng.random() < 0.35:
        return Atomic(rng.choice(concepts))
    kind = rng.choice(["and", "or", "exists", "forall"])
    if kind in ("and", "or"):
        parts = tuple(_random_expr(rng, t, depth - 1) for _ in range(rng.randint(2, 3)))
        return Conjunction(parts) if kind == "and" else Disjunction(parts)
    role = AtomicRole(rng.choice(list(t.roles)))
    if rng.random() < 0.3:
        role = Inverse(role)
    filler = _random_expr(rng, t, depth - 1)
    return Exists(role, filler) if kind == "exists" else Forall(role, filler)


def _random_domain(rng):
    concepts = [f"C{k}" for k in range(rng.randint(2, 5))]
    roles = [f"R{k}" for k in range(rng.randint(1, 3))]
    lines = [f"concept {c}" for c in concepts] + ["user-concept User"]
    for r in roles:
        lines.append(
            f"role {r} : {rng.choice(concepts)} x {rng.choice(concepts)}"
        )
    src = "\n".join(lines) + "\n"
    t = load_terminology(src)
    # layer one or two definitions on top, acyclic by construction
    for k in range(rng.randint(0, 2)):
        body = concept_text(_random_expr(rng, t, 2))
        src += f"define D{k} = {body}\n"
        t = load_terminology(src)
    return t


def _random_kb(rng, t):
    kb = FactBase()
    individuals = [f"i{k}" for k in range(rng.randint(1, 4))]
    for ind in individuals:
        for c in t.primitive_concepts:
            if rng.random() < 0.4:
                kb.assert_concept(ind, c)
    for r in t.roles:
        for s in individuals:
            for o in individuals:
                if rng.random() < 0.3:
                    kb.assert_role(s, r, o)
    if not kb.individuals:
        kb.assert_concept(individuals[0], t.primitive_concepts[0])
    return kb


def test_instance_check_agrees_with_enumeration_oracle():
    rng = random.Random(20260823)
    for _ in range(150):
        t = _random_domain(rng)
        kb = _random_kb(rng, t)
        expr = _random_expr(rng, t, 2)
        for ind in sorted(kb.individuals):
            expected = PROVED if _oracle_holds(ind, expr, t, kb) else UNPROVED
            assert instance_check(ind, expr, t, kb) is expected, (
                f"disagreement on {ind} : {concept_text(expr)}"
            )
