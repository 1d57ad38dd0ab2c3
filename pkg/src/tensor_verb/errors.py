"""Exception hierarchy.

Every error carries a short ``code`` that the CLI prints as a greppable prefix
and maps to an exit status.
"""

from __future__ import annotations


class TensorVerbError(Exception):
    code = "E_USAGE"


class LengthMismatchError(TensorVerbError, ValueError):
    def __init__(self, len_a: int, len_b: int):
        super().__init__(f"vector length mismatch: {len_a} != {len_b}")
        self.lengths = (len_a, len_b)


class ShapeMismatchError(TensorVerbError, ValueError):
    def __init__(self, shape_a, shape_b):
        super().__init__(f"shape mismatch: {tuple(shape_a)} != {tuple(shape_b)}")
        self.shapes = (tuple(shape_a), tuple(shape_b))


class IncomparableMeaningsError(TensorVerbError, TypeError):
    pass


class ParseError(TensorVerbError, ValueError):
    code = "E_PARSE"

    def __init__(self, message: str, path=None, line: int | None = None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.path = path
        self.line = line


class FormatVersionError(ParseError):
    pass


class ValidationError(ParseError):
    """Well-formed input carrying an out-of-range value."""


class OutOfVocabularyError(TensorVerbError, KeyError):
    code = "E_OOV"

    def __init__(self, word: str):
        super().__init__(word)
        self.word = word

    def __str__(self) -> str:
        return f"out-of-vocabulary word: {self.word!r}"


class NoObservationsError(TensorVerbError, LookupError):
    code = "E_OOV"


class EmptyBasisError(TensorVerbError, ValueError):
    code = "E_DEGENERATE"


class EmptyCountsError(TensorVerbError, ValueError):
    code = "E_DEGENERATE"


class UndefinedCorrelationError(TensorVerbError, ArithmeticError):
    code = "E_DEGENERATE"
