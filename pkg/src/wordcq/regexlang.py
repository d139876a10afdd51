"""Classical regular expressions: AST, parser, printer, NFA matcher.

Concrete syntax (shared by query constraints and spanner formulas):
``|`` union, ``*`` star, ``( )`` grouping, juxtaposition for concatenation,
``_`` for the empty word, ``%`` for the empty language, ``S`` for "any
alphabet letter". Every other non-space character is a literal.
"""

from __future__ import annotations

from dataclasses import dataclass

from wordcq.errors import ParseError

RESERVED = set("|*()_%S{}/")


@dataclass(frozen=True)
class Empty:
    pass


@dataclass(frozen=True)
class Eps:
    pass


@dataclass(frozen=True)
class Lit:
    ch: str


@dataclass(frozen=True)
class AnyLetter:
    pass


@dataclass(frozen=True)
class Cat:
    left: "Regex"
    right: "Regex"


@dataclass(frozen=True)
class Alt:
    left: "Regex"
    right: "Regex"


@dataclass(frozen=True)
class Star:
    inner: "Regex"


Regex = Empty | Eps | Lit | AnyLetter | Cat | Alt | Star


def cat_all(parts: list[Regex]) -> Regex:
    if not parts:
        return Eps()
    node = parts[0]
    for part in parts[1:]:
        node = Cat(node, part)
    return node


class _RegexParser:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.pos = 0
        self.offset = offset

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.offset + self.pos)

    def peek(self) -> str | None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        if self.pos < len(self.text):
            return self.text[self.pos]
        return None

    def parse(self) -> Regex:
        node = self.parse_alt()
        if self.peek() is not None:
            raise self.error(f"unexpected {self.text[self.pos]!r} in regex")
        return node

    def parse_alt(self) -> Regex:
        node = self.parse_cat()
        while self.peek() == "|":
            self.pos += 1
            node = Alt(node, self.parse_cat())
        return node

    def parse_cat(self) -> Regex:
        parts: list[Regex] = []
        while True:
            ch = self.peek()
            if ch is None or ch in "|)":
                break
            parts.append(self.parse_rep())
        return cat_all(parts)

    def parse_rep(self) -> Regex:
        node = self.parse_atom()
        while self.peek() == "*":
            self.pos += 1
            node = Star(node)
        return node

    def parse_atom(self) -> Regex:
        ch = self.peek()
        if ch is None:
            raise self.error("unexpected end of regex")
        if ch == "(":
            self.pos += 1
            node = self.parse_alt()
            if self.peek() != ")":
                raise self.error("missing ')' in regex")
            self.pos += 1
            return node
        if ch == "_":
            self.pos += 1
            return Eps()
        if ch == "%":
            self.pos += 1
            return Empty()
        if ch == "S":
            self.pos += 1
            return AnyLetter()
        if ch in RESERVED:
            raise self.error(f"unexpected {ch!r} in regex")
        self.pos += 1
        return Lit(ch)


def parse_regex(text: str, offset: int = 0) -> Regex:
    return _RegexParser(text, offset).parse()


def regex_to_text(node: Regex, _parent: str = "alt") -> str:
    if isinstance(node, Empty):
        return "%"
    if isinstance(node, Eps):
        return "_"
    if isinstance(node, Lit):
        return node.ch
    if isinstance(node, AnyLetter):
        return "S"
    if isinstance(node, Star):
        inner = regex_to_text(node.inner, "atom")
        return f"{inner}*"
    if isinstance(node, Cat):
        text = regex_to_text(node.left, "cat") + regex_to_text(node.right, "cat")
        return f"({text})" if _parent == "atom" else text
    if isinstance(node, Alt):
        text = regex_to_text(node.left, "alt") + "|" + regex_to_text(node.right, "alt")
        return f"({text})" if _parent != "alt" else text
    raise TypeError(f"not a regex node: {node!r}")


class Matcher:
    """Thompson NFA simulation; membership is O(|word| * |regex|)."""

    def __init__(self, regex: Regex):
        self.eps: list[list[int]] = []
        self.step: list[tuple[str | None, int] | None] = []
        start = self._new()
        accept = self._build(regex, start)
        self.start = start
        self.accept = accept

    def _new(self) -> int:
        self.eps.append([])
        self.step.append(None)
        return len(self.eps) - 1

    def _build(self, node: Regex, entry: int) -> int:
        if isinstance(node, Empty):
            return self._new()
        if isinstance(node, Eps):
            return entry
        if isinstance(node, (Lit, AnyLetter)):
            out = self._new()
            label = node.ch if isinstance(node, Lit) else None
            self.step[entry] = (label, out)
            return out
        if isinstance(node, Cat):
            mid = self._build(node.left, entry)
            return self._build(node.right, mid)
        if isinstance(node, Alt):
            left_in = self._new()
            right_in = self._new()
            self.eps[entry] += [left_in, right_in]
            out = self._new()
            self.eps[self._build(node.left, left_in)].append(out)
            self.eps[self._build(node.right, right_in)].append(out)
            return out
        if isinstance(node, Star):
            hub = self._new()
            self.eps[entry].append(hub)
            inner_in = self._new()
            self.eps[hub].append(inner_in)
            inner_out = self._build(node.inner, inner_in)
            self.eps[inner_out].append(hub)
            return hub
        raise TypeError(f"not a regex node: {node!r}")

    def _closure(self, states: set[int]) -> set[int]:
        stack = list(states)
        seen = set(states)
        while stack:
            s = stack.pop()
            for t in self.eps[s]:
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        return seen

    def match(self, word: str) -> bool:
        current = self._closure({self.start})
        for ch in word:
            moved = set()
            for s in current:
                edge = self.step[s]
                if edge is not None and (edge[0] is None or edge[0] == ch):
                    moved.add(edge[1])
            if not moved:
                return False
            current = self._closure(moved)
        return self.accept in current


_matcher_cache: dict[Regex, Matcher] = {}


def matcher_for(regex: Regex) -> Matcher:
    m = _matcher_cache.get(regex)
    if m is None:
        m = Matcher(regex)
        _matcher_cache[regex] = m
    return m


def regex_matches(regex: Regex, word: str) -> bool:
    return matcher_for(regex).match(word)
