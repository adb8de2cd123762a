"""Dialog engine for definitional domains over partial information.

The package splits into layers:

- :mod:`dialogcore.dl` — concept language, terminologies, instance checking
- :mod:`dialogcore.fil` — three-valued formulas, partial interpretations,
  ionic (defaulted) formulas and their status
- :mod:`dialogcore.translate` — compiles concepts into the formula language
- :mod:`dialogcore.drs` — discourse representation structures
- :mod:`dialogcore.semparser` — lexicon-driven utterance parsing
- :mod:`dialogcore.dialog` — the clarification dialog manager
- :mod:`dialogcore.solver` — conjunctive queries over fact bases
- :mod:`dialogcore.service` / :mod:`dialogcore.cli` — HTTP and terminal front ends
"""

from .dialog import DialogEngine, DialogState, build_engine
from .dl import (
    FactBase,
    ProofStatus,
    Terminology,
    compute_user_rel,
    instance_check,
    load_terminology,
    parse_concept_expr,
    unfold,
)
from .drs import DRS, LambdaDRS, apply, drs_to_fil, merge
from .errors import DialogError
from .fil import (
    F,
    PartialInterpretation,
    T,
    TruthValue,
    U,
    eval_formula,
    ionic_status,
    justification_position,
)
from .semparser import Lexicon, load_lexicon, parse_utterance
from .solver import ConjunctiveQuery, TimetableSolver, eval_query, load_facts
from .translate import translate_concept, translate_role, translate_terminology

__all__ = [
    "DRS",
    "ConjunctiveQuery",
    "DialogEngine",
    "DialogError",
    "DialogState",
    "F",
    "FactBase",
    "LambdaDRS",
    "Lexicon",
    "PartialInterpretation",
    "ProofStatus",
    "T",
    "Terminology",
    "TimetableSolver",
    "TruthValue",
    "U",
    "apply",
    "build_engine",
    "compute_user_rel",
    "drs_to_fil",
    "eval_formula",
    "eval_query",
    "instance_check",
    "ionic_status",
    "justification_position",
    "load_facts",
    "load_lexicon",
    "load_terminology",
    "merge",
    "parse_concept_expr",
    "parse_utterance",
    "translate_concept",
    "translate_role",
    "translate_terminology",
    "unfold",
]

__version__ = "0.1.0"
