"""Concrete query syntax: parser and printer.

    query := "Ans(" varlist? ")" ":-" atom ("," atom)*
    atom  := var "=" term ("." term)*  |  var "in" "/" regex "/"
    term  := var | quoted-terminal-string

Identifiers are [a-zA-Z][a-zA-Z0-9_]*; a leading ``$`` marks
machine-generated names (accepted on input, never user-written). ``U`` is
the universe variable: it may appear in bodies but not in the head.
"""

from __future__ import annotations

import re

from wordcq.errors import ParseError
from wordcq.model import Pattern, Query, RegexConstraint, Terminal, WordEquation
from wordcq.regexlang import parse_regex, regex_to_text
from wordcq.windex import UNIVERSE

_IDENT = re.compile(r"[$]?[a-zA-Z][a-zA-Z0-9_]*")


class _Cursor:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expect(self, token: str) -> None:
        self.skip_ws()
        if not self.text.startswith(token, self.pos):
            raise self.error(f"expected {token!r}")
        self.pos += len(token)

    def ident(self) -> str:
        self.skip_ws()
        m = _IDENT.match(self.text, self.pos)
        if not m:
            raise self.error("expected an identifier")
        self.pos = m.end()
        return m.group()

    def at_end(self) -> bool:
        self.skip_ws()
        return self.pos >= len(self.text)


def _parse_quoted(cur: _Cursor) -> list[Terminal]:
    cur.expect('"')
    out = []
    while cur.pos < len(cur.text) and cur.text[cur.pos] != '"':
        out.append(Terminal(cur.text[cur.pos]))
        cur.pos += 1
    if cur.pos >= len(cur.text):
        raise cur.error("unterminated terminal string")
    cur.pos += 1
    return out


def _parse_regex_body(cur: _Cursor):
    cur.expect("/")
    end = cur.text.find("/", cur.pos)
    if end < 0:
        raise cur.error("unterminated regex")
    body = cur.text[cur.pos : end]
    node = parse_regex(body, offset=cur.pos)
    cur.pos = end + 1
    return node


def parse_query(text: str) -> Query:
    cur = _Cursor(text)
    cur.expect("Ans")
    cur.expect("(")
    head: list[str] = []
    if cur.peek() != ")":
        head.append(cur.ident())
        while cur.peek() == ",":
            cur.expect(",")
            head.append(cur.ident())
    cur.expect(")")
    if UNIVERSE in head:
        raise cur.error("the universe variable cannot be a head variable")
    if len(set(head)) != len(head):
        raise cur.error("duplicate head variable")
    cur.expect(":-")

    equations: list[WordEquation] = []
    constraints: list[RegexConstraint] = []
    in_kw = re.compile(r"in(?![a-zA-Z0-9_$])")
    while True:
        var = cur.ident()
        cur.skip_ws()
        if in_kw.match(cur.text, cur.pos):
            cur.expect("in")
            constraints.append(RegexConstraint(var, _parse_regex_body(cur)))
        elif cur.peek() == "=":
            cur.expect("=")
            rhs: list = []
            while True:
                if cur.peek() == '"':
                    rhs.extend(_parse_quoted(cur))
                else:
                    rhs.append(cur.ident())
                if cur.peek() == ".":
                    cur.expect(".")
                else:
                    break
            equations.append(WordEquation(var, tuple(rhs)))
        else:
            raise cur.error("expected '=' or 'in' after variable")
        if cur.peek() == ",":
            cur.expect(",")
        else:
            break
    if not cur.at_end():
        raise cur.error("trailing input after query body")

    query = Query(tuple(head), tuple(equations), tuple(constraints))
    body = query.body_vars()
    for v in head:
        if v not in body:
            raise ParseError(f"head variable {v!r} does not occur in the body")
    return query


def pattern_to_text(p: Pattern) -> str:
    if not p:
        return '""'
    parts: list[str] = []
    run: list[str] = []
    for sym in p:
        if isinstance(sym, Terminal):
            run.append(sym.ch)
        else:
            if run:
                parts.append('"' + "".join(run) + '"')
                run = []
            parts.append(sym)
    if run:
        parts.append('"' + "".join(run) + '"')
    return ".".join(parts)


def query_to_text(q: Query) -> str:
    atoms = [f"{eq.lhs} = {pattern_to_text(eq.rhs)}" for eq in q.equations]
    atoms += [f"{c.var} in /{regex_to_text(c.regex)}/" for c in q.constraints]
    return f"Ans({','.join(q.head)}) :- " + ", ".join(atoms)
