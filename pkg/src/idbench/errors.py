"""Exception hierarchy shared by all idbench modules."""

from __future__ import annotations


class IdBenchError(Exception):
    """Base class for all idbench errors."""


class ParseError(IdBenchError):
    """Malformed input file; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(IdBenchError):
    """Well-formed input with a value outside its contract."""


class MissingDataError(IdBenchError):
    """An operation needed data (ratings, scores) that is absent."""


class UndefinedAgreementError(IdBenchError):
    """Krippendorff's alpha is undefined for the given table."""


class UndefinedSimilarityError(IdBenchError):
    """A similarity is undefined for the given inputs (e.g. two empty strings)."""


class UndefinedCorrelationError(IdBenchError):
    """Rank correlation is undefined (constant input)."""


class OutOfVocabularyError(IdBenchError):
    """A token cannot be resolved to a vector, even via subword composition."""


class InsufficientDataError(IdBenchError):
    """Too few comparable data points for a meaningful result."""


class SamplingError(IdBenchError):
    """A sampling quota cannot be satisfied."""


class ConflictError(IdBenchError):
    """An already-answered question was submitted again."""


class NotFoundError(IdBenchError):
    """Unknown session or question index."""


class ConfigError(IdBenchError):
    """Invalid configuration."""
