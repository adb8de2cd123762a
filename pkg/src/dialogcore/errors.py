"""Shared error types raised across the engine.

Every error that crosses a module boundary lives here so that callers (the
dialog manager, the CLI, the HTTP service) can dispatch on one taxonomy.
"""

from __future__ import annotations


class DialogError(Exception):
    """Base class for all engine errors."""

    code = "DialogError"


class DomainSyntaxError(DialogError):
    """Malformed line in a domain description or facts file."""

    code = "SyntaxError"

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class UndefinedNameError(DialogError):
    """A concept or role is referenced but never declared."""

    code = "UndefinedName"

    def __init__(self, name: str):
        super().__init__(f"undefined name: {name}")
        self.name = name


class CyclicTerminologyError(DialogError):
    """The definition graph contains a cycle; unfolding would not terminate."""

    code = "CyclicTerminology"

    def __init__(self, cycle: list[str]):
        super().__init__("cyclic definitions: " + " -> ".join(cycle))
        self.cycle = cycle


class UnsatisfiableDefinitionError(DialogError):
    """A definition body admits no model within the search bound."""

    code = "UnsatisfiableDefinition"

    def __init__(self, name: str):
        super().__init__(f"definition {name} has no small model")
        self.name = name


class InconsistentExtensionError(DialogError):
    """Extending an interpretation would put a tuple in both plus and minus."""

    code = "InconsistentExtension"

    def __init__(self, predicate: str, args: tuple):
        super().__init__(f"contradictory literal {predicate}{args!r}")
        self.predicate = predicate
        self.args = args


class UnboundVariableError(DialogError):
    """Evaluation reached a variable with no binding in scope."""

    code = "UnboundVariable"

    def __init__(self, var: str):
        super().__init__(f"unbound variable: {var}")
        self.var = var


class IonicInClassicalContextError(DialogError):
    """An ionic formula showed up where plain three-valued evaluation runs."""

    code = "IonicInClassicalContext"

    def __init__(self) -> None:
        super().__init__("ionic formula in classical evaluation context")


class UnknownLexemeError(DialogError):
    """A token has no lexicon entry, even after synonym normalization."""

    code = "UnknownLexeme"

    def __init__(self, token: str):
        super().__init__(f"unknown word: {token!r}")
        self.token = token


class AttachmentRejectedError(DialogError):
    """A preposition's object failed its subcategorization restriction."""

    code = "AttachmentRejected"

    def __init__(self, role: str, obj: str | None, restriction: str):
        what = obj if obj is not None else "<missing object>"
        super().__init__(f"cannot attach {what} via {role} ({restriction})")
        self.role = role
        self.obj = obj
        self.restriction = restriction


class EmptyUtteranceError(DialogError):
    """The utterance contained no content tokens."""

    code = "EmptyUtterance"

    def __init__(self) -> None:
        super().__init__("empty utterance")


class SortMismatchError(DialogError):
    """A constant fails the sort expected at its position."""

    code = "SortMismatch"

    def __init__(self, value: str, expected_sort: str):
        super().__init__(f"{value} is not a {expected_sort}")
        self.value = value
        self.expected_sort = expected_sort


class UnknownSessionError(DialogError):
    """A session id does not exist in the session store."""

    code = "UnknownSession"

    def __init__(self, session_id: str):
        super().__init__(f"no such session: {session_id}")
        self.session_id = session_id
