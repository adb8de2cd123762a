"""Lexicon-driven semantic parsing of utterances into discourse boxes.

The parser is deliberately shallow: every content token must carry a
lexicon entry, and composition is deterministic.  A wh-word opens a lambda
parameter of its sort; verb-class words assert their concept on the single
event referent; a preposition attaches its role between the event referent
and the following proper name, after that name passes the preposition's
object restriction against the fact base; an answer preposition builds a
bare user assertion for fragments like "From Milan".
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping

from . import dl
from .drs import DRS, LambdaDRS
from .errors import (
    AttachmentRejectedError,
    DomainSyntaxError,
    EmptyUtteranceError,
    UndefinedNameError,
    UnknownLexemeError,
)
from .fil import Atom, Const, Var

# ---------------------------------------------------------------------------
# lexicon
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VerbConcept:
    concept: str


@dataclass(frozen=True)
class PrepRole:
    role: str
    restriction: dl.ConceptExpr


@dataclass(frozen=True)
class ProperName:
    constant: str
    concept: str


@dataclass(frozen=True)
class WhWord:
    sort: str


@dataclass(frozen=True)
class AnswerPrep:
    role: str


LexEntry = VerbConcept | PrepRole | ProperName | WhWord | AnswerPrep


@dataclass
class Lexicon:
    entries: dict[str, LexEntry] = field(default_factory=dict)

    def resolve(self, token: str, t: dl.Terminology) -> LexEntry | None:
        """Entry for a token: direct hit first, then through the synonym
        axioms.  A synonym resolves to whichever entry already targets the
        canonical name, or to a plain concept word if the name is a declared
        concept."""
        entry = self.entries.get(token)
        if entry is not None:
            return entry
        canonical = normalize_token(token, t)
        if canonical == token:
            return None
        for other in self.entries.values():
            if isinstance(other, VerbConcept) and other.concept == canonical:
                return other
            if isinstance(other, (PrepRole, AnswerPrep)) and other.role == canonical:
                return other
        if canonical in t.declared_concepts():
            return VerbConcept(canonical)
        return None


def normalize_token(token: str, t: dl.Terminology) -> str:
    return t.synonym_axioms.get(token, token)


_LEX_PATTERNS = {
    "verb": re.compile(r"^verb\s+(\S+)\s*=>\s*concept\s+(\w+)$"),
    "prep": re.compile(r"^prep\s+(\S+)\s*=>\s*role\s+(\w+)\s+restrict\s+(.+)$"),
    "name": re.compile(r"^name\s+(\S+)\s*=>\s*(\w+)\s*:\s*(\w+)$"),
    "wh": re.compile(r"^wh\s+(\S+)\s*=>\s*sort\s+(\w+)$"),
    "answerprep": re.compile(r"^answerprep\s+(\S+)\s*=>\s*role\s+(\w+)$"),
}


def load_lexicon(source: str, t: dl.Terminology) -> Lexicon:
    """Read the lex lines out of a domain description."""
    lex = Lexicon()
    for ln in dl.scan_domain_lines(source):
        if ln.kind != "lex":
            continue
        (rest,) = ln.payload
        kind = rest.split(None, 1)[0] if rest.split() else ""
        pat = _LEX_PATTERNS.get(kind)
        m = pat.match(rest) if pat else None
        if m is None:
            raise DomainSyntaxError(ln.no, f"bad lexicon line: lex {rest!r}")
        surface = m.group(1).lower()
        if surface in lex.entries:
            raise DomainSyntaxError(ln.no, f"duplicate lexicon surface {surface!r}")
        if kind == "verb":
            concept = m.group(2)
            if concept not in t.declared_concepts():
                raise UndefinedNameError(concept)
            lex.entries[surface] = VerbConcept(concept)
        elif kind == "prep":
            role = m.group(2)
            if role not in t.roles:
                raise UndefinedNameError(role)
            restriction = dl.parse_concept_expr(m.group(3), t, line_no=ln.no)
            lex.entries[surface] = PrepRole(role, restriction)
        elif kind == "name":
            concept = m.group(3)
            if concept not in t.declared_concepts():
                raise UndefinedNameError(concept)
            lex.entries[surface] = ProperName(m.group(2), concept)
        elif kind == "wh":
            sort = m.group(2)
            if sort not in t.declared_concepts():
                raise UndefinedNameError(sort)
            lex.entries[surface] = WhWord(sort)
        elif kind == "answerprep":
            role = m.group(2)
            if role not in t.roles:
                raise UndefinedNameError(role)
            lex.entries[surface] = AnswerPrep(role)
    return lex


# ---------------------------------------------------------------------------
# utterance parsing
# ---------------------------------------------------------------------------

STOP_WORDS = {
    "a", "an", "the", "do", "does", "did", "is", "are", "am", "was", "were",
    "will", "would", "can", "could", "shall", "should", "please", "there", "it",
}

AFFIRMATIVE = {"yes", "yeah", "yep", "sure", "ok", "okay", "right", "correct"}
NEGATIVE = {"no", "nope", "wrong"}


@dataclass(frozen=True)
class ActContext:
    """What the classifier may look at besides the utterance itself."""

    last_system_act: str | None = None
    open_goal_roles: frozenset[str] = frozenset()
    user_rel: frozenset[str] = frozenset()
    user_const: str = "u"


@dataclass(frozen=True)
class ParseResult:
    drs: LambdaDRS
    act: str
    user_assertions: tuple[Atom, ...] = ()


def tokenize(text: str) -> list[str]:
    return re.findall(r"[\w:']+", text.lower())


def parse_utterance(
    text: str,
    lexicon: Lexicon,
    t: dl.Terminology,
    kb: dl.FactBase,
    context: ActContext | None = None,
) -> ParseResult:
    context = context or ActContext()
    tokens = tokenize(text)
    if not tokens:
        raise EmptyUtteranceError()

    # bare confirmations never reach the lexicon
    if context.last_system_act == "suggest" and all(
        tok in AFFIRMATIVE | NEGATIVE for tok in tokens
    ):
        act = "accept" if tokens[0] in AFFIRMATIVE else "reject"
        return ParseResult(LambdaDRS((), DRS((), ())), act)

    content = [tok for tok in tokens if tok not in STOP_WORDS]
    if not content:
        raise EmptyUtteranceError()
    entries: list[tuple[str, LexEntry]] = []
    for tok in content:
        entry = lexicon.resolve(tok, t)
        if entry is None:
            raise UnknownLexemeError(tok)
        entries.append((tok, entry))

    drs, assertions = _compose(entries, t, kb, context.user_const)
    act = classify_speech_act(text, drs, assertions, context)
    return ParseResult(drs, act, assertions)


def _compose(
    entries: list[tuple[str, LexEntry]],
    t: dl.Terminology,
    kb: dl.FactBase,
    user_const: str,
) -> tuple[LambdaDRS, tuple[Atom, ...]]:
    # claim each preposition's object: the nearest proper name to its right
    consumed: set[int] = set()
    objects: dict[int, tuple[int, ProperName]] = {}
    for i, (_, entry) in enumerate(entries):
        if isinstance(entry, (PrepRole, AnswerPrep)):
            for j in range(i + 1, len(entries)):
                if j in consumed:
                    continue
                candidate = entries[j][1]
                if isinstance(candidate, ProperName):
                    consumed.add(j)
                    objects[i] = (j, candidate)
                    break

    event_var: Var | None = None
    for _, entry in entries:
        if isinstance(entry, VerbConcept):
            event_var = Var("t", entry.concept)
            break

    params: list[tuple[str, str | None]] = []
    wh_vars: list[Var] = []
    used_params: set[str] = set()
    for _, entry in entries:
        if isinstance(entry, WhWord):
            name = "x"
            i = 0
            while name in used_params:
                i += 1
                name = f"x{i}"
            used_params.add(name)
            v = Var(name, entry.sort)
            wh_vars.append(v)
            params.append((name, entry.sort))

    conditions: list[Atom] = []
    referents: list = []
    assertions: list[Atom] = []

    # phase 1: concept words assert on the event referent
    for _, entry in entries:
        if isinstance(entry, VerbConcept):
            conditions.append(Atom(entry.concept, (event_var,)))

    # phase 2: wh sorts
    for v in wh_vars:
        conditions.append(Atom(v.sort, (v,)))

    # phase 3: preposition objects pass their restriction, then take the
    # role's range concept
    prep_objects: list[Const] = []
    for i, (_, entry) in enumerate(entries):
        if isinstance(entry, PrepRole):
            if i not in objects:
                raise AttachmentRejectedError(
                    entry.role, None, dl.concept_text(entry.restriction)
                )
            _, name = objects[i]
            if (
                dl.instance_check(name.constant, entry.restriction, t, kb)
                is not dl.PROVED
            ):
                raise AttachmentRejectedError(
                    entry.role, name.constant, dl.concept_text(entry.restriction)
                )
            range_concept = _range_concept(t, entry.role)
            obj = Const(name.constant)
            if range_concept is not None:
                conditions.append(Atom(range_concept, (obj,)))
            prep_objects.append(obj)

    # phase 4: link each wh variable to the event referent through the role
    # whose signature fits
    for v in wh_vars:
        if event_var is None:
            continue
        role = _link_role(t, v.sort, event_var.sort)
        if role is not None:
            conditions.append(Atom(role, (event_var, v)))

    # phase 5: preposition role atoms
    for i, (_, entry) in enumerate(entries):
        if isinstance(entry, PrepRole):
            _, name = objects[i]
            if event_var is None:
                raise AttachmentRejectedError(
                    entry.role, name.constant, "no event referent to attach to"
                )
            conditions.append(Atom(entry.role, (event_var, Const(name.constant))))

    # phase 6: answer prepositions assert about the dialog user
    for i, (_, entry) in enumerate(entries):
        if isinstance(entry, AnswerPrep):
            if i not in objects:
                raise AttachmentRejectedError(entry.role, None, "missing object")
            _, name = objects[i]
            atom = Atom(entry.role, (Const(user_const), Const(name.constant)))
            conditions.append(atom)
            assertions.append(atom)

    # phase 7: proper names no preposition claimed
    stray: list[Const] = []
    for j, (_, entry) in enumerate(entries):
        if isinstance(entry, ProperName) and j not in consumed:
            obj = Const(entry.constant)
            conditions.append(Atom(entry.concept, (obj,)))
            stray.append(obj)

    if event_var is not None:
        referents.append(event_var)
    for obj in prep_objects + stray:
        if obj not in referents:
            referents.append(obj)

    drs = LambdaDRS(tuple(params), DRS(tuple(referents), tuple(conditions)))
    return drs, tuple(assertions)


def _range_concept(t: dl.Terminology, role: str) -> str | None:
    rng = t.roles[role].range
    if isinstance(rng, dl.Atomic):
        return rng.name
    for part in dl.conjuncts(rng):
        if isinstance(part, dl.Atomic):
            return part.name
    return None


def _domain_concept(t: dl.Terminology, role: str) -> str | None:
    dom = t.roles[role].domain
    if isinstance(dom, dl.Atomic):
        return dom.name
    return None


def _link_role(t: dl.Terminology, wh_sort: str, event_concept: str | None) -> str | None:
    """The declared role connecting the event concept to the queried sort.

    Declaration order decides when several fit; in practice domains keep
    this unambiguous (one role per queried sort)."""
    fallback = None
    for name, decl in t.roles.items():
        if _range_concept(t, name) != wh_sort:
            continue
        if event_concept is not None and _domain_concept(t, name) == event_concept:
            return name
        if fallback is None:
            fallback = name
    return fallback


def classify_speech_act(
    text: str,
    drs: LambdaDRS,
    user_assertions: tuple[Atom, ...],
    context: ActContext,
) -> str:
    """Rule cascade over surface shape and dialog context."""
    if drs.params or text.rstrip().endswith("?"):
        return "query"
    tokens = tokenize(text)
    if context.last_system_act == "suggest" and tokens:
        if all(tok in AFFIRMATIVE for tok in tokens):
            return "accept"
        if all(tok in NEGATIVE for tok in tokens):
            return "reject"
    for atom in user_assertions:
        if atom.pred in context.open_goal_roles or atom.pred in context.user_rel:
            return "inform"
    return "query"
