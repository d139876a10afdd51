"""Abstract syntax for conjunctive queries over word equations.

A pattern is a sequence of variables (plain strings) and terminal letters
(`Terminal`). The distinguished universe variable is ``windex.UNIVERSE``;
by convention it always denotes the whole input word and never occurs free.
Fresh machine-generated variables carry a ``$`` prefix, which user
identifiers cannot.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from wordcq.errors import ContractError
from wordcq.regexlang import Regex, regex_matches
from wordcq.windex import UNIVERSE, Span


@dataclass(frozen=True)
class Terminal:
    ch: str


Symbol = str | Terminal
Pattern = tuple[Symbol, ...]


@dataclass(frozen=True)
class WordEquation:
    lhs: str
    rhs: Pattern


@dataclass(frozen=True)
class RegexConstraint:
    var: str
    regex: Regex


@dataclass(frozen=True)
class Query:
    """Conjunctive query: head tuple, word-equation atoms, and regular
    constraints. Evaluation semantics are over factor values of the word."""

    head: tuple[str, ...]
    equations: tuple[WordEquation, ...]
    constraints: tuple[RegexConstraint, ...] = ()

    def body_vars(self) -> set[str]:
        """All variables of the body, universe excluded."""
        seen: set[str] = set()
        for eq in self.equations:
            if eq.lhs != UNIVERSE:
                seen.add(eq.lhs)
            seen.update(pattern_vars(eq.rhs))
        for c in self.constraints:
            if c.var != UNIVERSE:
                seen.add(c.var)
        return seen

    def is_boolean(self) -> bool:
        return not self.head


def pattern_vars(p: Pattern) -> set[str]:
    return {s for s in p if isinstance(s, str) and s != UNIVERSE}


def pattern_var_list(p: Pattern) -> list[str]:
    return [s for s in p if isinstance(s, str)]


def equation_vars(eq: WordEquation) -> set[str]:
    """Variables of an equation with the universe excluded (it is treated
    as a constant in all acyclicity analysis)."""
    vs = pattern_vars(eq.rhs)
    if eq.lhs != UNIVERSE:
        vs.add(eq.lhs)
    return vs


def is_terminal_free(p: Pattern) -> bool:
    return all(isinstance(s, str) for s in p)


def fresh_names(used: set[str], prefix: str = "$n"):
    """Generator of fresh variable names disjoint from `used`."""
    counter = 0
    while True:
        counter += 1
        name = f"{prefix}{counter}"
        if name not in used:
            used.add(name)
            yield name


@dataclass
class Substitution:
    """Span assignment over a fixed word; the universe maps to the whole
    word and every assigned span denotes one of its factors."""

    word: str
    assignment: dict[str, Span] = field(default_factory=dict)

    def value(self, var: str) -> str:
        if var == UNIVERSE and var not in self.assignment:
            return self.word
        if var not in self.assignment:
            raise ContractError(f"variable {var!r} unbound")
        s = self.assignment[var]
        return self.word[s.start - 1 : s.end - 1]

    def apply(self, p: Pattern) -> str:
        parts = []
        for sym in p:
            parts.append(sym.ch if isinstance(sym, Terminal) else self.value(sym))
        return "".join(parts)


def satisfies(sigma: Substitution, query: Query) -> bool:
    """Reference semantics of one substitution against a query body."""
    w = sigma.word
    if UNIVERSE in sigma.assignment:
        s = sigma.assignment[UNIVERSE]
        if (s.start, s.end) != (1, len(w) + 1):
            raise ContractError("universe variable must denote the whole word")
    for var in query.body_vars():
        if var not in sigma.assignment:
            raise ContractError(f"variable {var!r} unbound in substitution")
    for eq in query.equations:
        if sigma.value(eq.lhs) != sigma.apply(eq.rhs):
            return False
    for c in query.constraints:
        if not regex_matches(c.regex, sigma.value(c.var)):
            return False
    return True
