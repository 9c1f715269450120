"""Exception types shared across the interpreter."""

from __future__ import annotations


class ScimError(Exception):
    """Base class for every error raised by the package."""


class LocatedError(ScimError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column


# front end
class UnterminatedLiteral(LocatedError):
    pass


class IllegalCharacter(LocatedError):
    pass


class ScimSyntaxError(LocatedError):
    def __init__(self, message, line=0, column=0, expected=()):
        super().__init__(message, line, column)
        self.expected = tuple(sorted(set(expected)))


class DuplicateBlock(LocatedError):
    pass


class ValidationError(ScimError):
    """Raised by ``validate``; carries every diagnostic found."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# type system
class UnknownType(ScimError):
    pass


class UnresolvedRolePath(ScimError):
    pass


class AmbiguousRole(ScimError):
    pass


# working memory
class TypeMismatch(ScimError):
    pass


class PlaceKindMismatch(ScimError):
    pass


class AlreadySituatedHere(ScimError):
    pass


class NotSituated(ScimError):
    pass


class ImmutableRole(ScimError):
    pass


class UnknownRelation(ScimError):
    pass


class UnknownOperation(ScimError):
    pass


class EmptyResult(ScimError):
    pass


class UnknownInstance(ScimError):
    pass


# constraints and engine
class UnknownPredicate(ScimError):
    pass


class CyclicStructure(ScimError):
    pass


class PostConstraintViolated(ScimError):
    pass


# scenario kit
class SceneParseError(ScimError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class UnknownWord(ScimError):
    def __init__(self, words):
        self.words = list(words)
        super().__init__("unknown word(s): " + ", ".join(self.words))


class NoInterpretation(ScimError):
    pass


class EmptyCandidateSet(ScimError):
    pass
