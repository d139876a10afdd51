"""Exception types shared across the package."""


class WordcqError(Exception):
    """Base class for all package errors."""


class ParseError(WordcqError):
    """Syntax error in a query, regex, or spanner expression."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class RangeError(WordcqError, ValueError):
    """A position or span lies outside the indexed word."""


class ContractError(WordcqError, ValueError):
    """An operation was called outside its stated precondition."""


class BudgetError(WordcqError, RuntimeError):
    """A brute-force oracle exceeded its configured search budget."""
