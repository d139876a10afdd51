"""Regex formulas with capture variables and their conjunctive-query
compilation.

A spanner query joins regex formulas, filters by string-equality pairs,
and projects. Compilation emits a word-equation query whose answers encode
each captured span as a prefix variable `x_P` and a content variable
`x_C`; the suffix helper `x_S` appears only on the direct (pseudo-acyclic)
path. Machine-generated node variables live in the reserved `$s`/`$p`
namespaces.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from wordcq.errors import BudgetError, ContractError, ParseError
from wordcq.model import Query, RegexConstraint, Substitution, WordEquation
from wordcq.querydecomp import QueryDecomposition, decompose_query
from wordcq.regexlang import (
    Alt,
    AnyLetter,
    Cat,
    Empty,
    Eps,
    Lit,
    Regex,
    Star,
    cat_all,
    regex_to_text,
)
from wordcq.windex import UNIVERSE, Span


@dataclass(frozen=True)
class Bind:
    var: str
    inner: "Formula"


Formula = Regex | Bind


def p_var(x: str) -> str:
    return f"{x}_P"


def c_var(x: str) -> str:
    return f"{x}_C"


def s_var(x: str) -> str:
    return f"{x}_S"


# -- structural analysis --------------------------------------------------


def simplify(node: Formula) -> Formula:
    """Prune the empty language so the structural checks see only
    reachable subexpressions."""
    if isinstance(node, (Empty, Eps, Lit, AnyLetter)):
        return node
    if isinstance(node, Bind):
        inner = simplify(node.inner)
        return Empty() if isinstance(inner, Empty) else Bind(node.var, inner)
    if isinstance(node, Cat):
        left, right = simplify(node.left), simplify(node.right)
        if isinstance(left, Empty) or isinstance(right, Empty):
            return Empty()
        if isinstance(left, Eps):
            return right
        if isinstance(right, Eps):
            return left
        return Cat(left, right)
    if isinstance(node, Alt):
        left, right = simplify(node.left), simplify(node.right)
        if isinstance(left, Empty):
            return right
        if isinstance(right, Empty):
            return left
        return Alt(left, right)
    if isinstance(node, Star):
        inner = simplify(node.inner)
        if isinstance(inner, (Empty, Eps)):
            return Eps()
        return Star(inner)
    raise TypeError(f"not a formula node: {node!r}")


def bound_vars(node: Formula) -> frozenset[str]:
    if isinstance(node, Bind):
        return bound_vars(node.inner) | {node.var}
    if isinstance(node, (Cat, Alt)):
        return bound_vars(node.left) | bound_vars(node.right)
    if isinstance(node, Star):
        return bound_vars(node.inner)
    return frozenset()


def _functional(node: Formula) -> tuple[bool, frozenset[str]]:
    if isinstance(node, (Empty, Eps, Lit, AnyLetter)):
        return True, frozenset()
    if isinstance(node, Bind):
        ok, bound = _functional(node.inner)
        return ok and node.var not in bound, bound | {node.var}
    if isinstance(node, Cat):
        ok_l, b_l = _functional(node.left)
        ok_r, b_r = _functional(node.right)
        return ok_l and ok_r and not (b_l & b_r), b_l | b_r
    if isinstance(node, Alt):
        ok_l, b_l = _functional(node.left)
        ok_r, b_r = _functional(node.right)
        return ok_l and ok_r and b_l == b_r, b_l
    if isinstance(node, Star):
        ok, bound = _functional(node.inner)
        return ok and not bound, frozenset()
    raise TypeError(f"not a formula node: {node!r}")


def _synchronized(node: Formula) -> bool:
    if isinstance(node, Alt):
        return (
            not bound_vars(node.left)
            and not bound_vars(node.right)
            and _synchronized(node.left)
            and _synchronized(node.right)
        )
    if isinstance(node, (Cat,)):
        return _synchronized(node.left) and _synchronized(node.right)
    if isinstance(node, Bind):
        return _synchronized(node.inner)
    if isinstance(node, Star):
        return _synchronized(node.inner)
    return True


@dataclass(frozen=True)
class RegexFormula:
    """Parsed regex formula plus its structural flags."""

    ast: Formula
    core: Formula
    svars: frozenset[str]
    functional: bool
    synchronized: bool


def analyze_formula(ast: Formula) -> RegexFormula:
    core = simplify(ast)
    ok, _bound = _functional(core)
    return RegexFormula(
        ast=ast,
        core=core,
        svars=bound_vars(core),
        functional=ok,
        synchronized=_synchronized(core),
    )


# -- concrete syntax -------------------------------------------------------

_IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*")


class _FormulaParser:
    def __init__(self, text: str, offset: int = 0):
        self.text = text
        self.pos = 0
        self.offset = offset

    def error(self, message: str) -> ParseError:
        return ParseError(message, self.offset + self.pos)

    def peek(self) -> str | None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else None

    def parse(self) -> Formula:
        node = self.alt()
        if self.peek() is not None:
            raise self.error(f"unexpected {self.text[self.pos]!r} in formula")
        return node

    def alt(self) -> Formula:
        node = self.cat()
        while self.peek() == "|":
            self.pos += 1
            node = Alt(node, self.cat())
        return node

    def cat(self) -> Formula:
        parts = []
        while True:
            ch = self.peek()
            if ch is None or ch in "|)};":
                break
            parts.append(self.rep())
        node = parts[0] if parts else Eps()
        for part in parts[1:]:
            node = Cat(node, part)
        return node

    def rep(self) -> Formula:
        node = self.atom()
        while self.peek() == "*":
            self.pos += 1
            node = Star(node)
        return node

    def atom(self) -> Formula:
        ch = self.peek()
        if ch is None:
            raise self.error("unexpected end of formula")
        if ch == "(":
            self.pos += 1
            node = self.alt()
            if self.peek() != ")":
                raise self.error("missing ')' in formula")
            self.pos += 1
            return node
        if ch == "_":
            self.pos += 1
            return Eps()
        if ch == "%":
            self.pos += 1
            return Empty()
        m = _IDENT.match(self.text, self.pos)
        if m:
            after = m.end()
            while after < len(self.text) and self.text[after].isspace():
                after += 1
            if after < len(self.text) and self.text[after] == "{":
                name = m.group()
                self.pos = after + 1
                inner = self.alt()
                if self.peek() != "}":
                    raise self.error("missing '}' in binding")
                self.pos += 1
                return Bind(name, inner)
        if ch == "S":
            self.pos += 1
            return AnyLetter()
        if ch in "|*(){}/;%_":
            raise self.error(f"unexpected {ch!r} in formula")
        self.pos += 1
        return Lit(ch)


def parse_regex_formula(text: str, offset: int = 0) -> RegexFormula:
    return analyze_formula(_FormulaParser(text, offset).parse())


def formula_to_text(node: Formula, _parent: str = "alt") -> str:
    if isinstance(node, Bind):
        return f"{node.var}{{{formula_to_text(node.inner)}}}"
    if isinstance(node, Star):
        return f"{formula_to_text(node.inner, 'atom')}*"
    if isinstance(node, Cat):
        # spaces keep a literal from fusing with a following binding name
        text = formula_to_text(node.left, "cat") + " " + formula_to_text(node.right, "cat")
        return f"({text})" if _parent == "atom" else text
    if isinstance(node, Alt):
        text = (
            formula_to_text(node.left, "alt") + "|" + formula_to_text(node.right, "alt")
        )
        return f"({text})" if _parent != "alt" else text
    return regex_to_text(node)


@dataclass(frozen=True)
class SpannerQuery:
    """Projection over string-equality selections over a join of regex
    formulas."""

    projection: tuple[str, ...]
    equalities: tuple[tuple[str, str], ...]
    formulas: tuple[RegexFormula, ...]

    def svars(self) -> frozenset[str]:
        out: frozenset[str] = frozenset()
        for f in self.formulas:
            out |= f.svars
        return out

    def synchronized(self) -> bool:
        return all(f.synchronized for f in self.formulas)

    def functional(self) -> bool:
        return all(f.functional for f in self.formulas)


def parse_spanner_query(text: str) -> SpannerQuery:
    """Syntax: ``proj[x,y] eq[x1,y1] eq[...] join( F1 ; F2 ; ... )``."""
    pos = 0

    def skip():
        nonlocal pos
        while pos < len(text) and text[pos].isspace():
            pos += 1

    def expect(tok: str):
        nonlocal pos
        skip()
        if not text.startswith(tok, pos):
            raise ParseError(f"expected {tok!r}", pos)
        pos += len(tok)

    def ident_list(closing: str) -> list[str]:
        nonlocal pos
        out = []
        skip()
        while not text.startswith(closing, pos):
            m = _IDENT.match(text, pos)
            if not m:
                raise ParseError("expected an identifier", pos)
            out.append(m.group())
            pos = m.end()
            skip()
            if text.startswith(",", pos):
                pos += 1
                skip()
        pos += len(closing)
        return out

    expect("proj")
    expect("[")
    projection = ident_list("]")
    equalities = []
    while True:
        skip()
        if text.startswith("eq", pos) and text[pos + 2 :].lstrip().startswith("["):
            expect("eq")
            expect("[")
            pair = ident_list("]")
            if len(pair) != 2:
                raise ParseError("eq[...] takes exactly two variables", pos)
            equalities.append((pair[0], pair[1]))
        else:
            break
    expect("join")
    expect("(")
    formulas = []
    while True:
        skip()
        end = pos
        depth = 0
        while end < len(text):
            ch = text[end]
            if ch in "({":
                depth += 1
            elif ch in ")}":
                if depth == 0:
                    break
                depth -= 1
            elif ch == ";" and depth == 0:
                break
            end += 1
        if end >= len(text):
            raise ParseError("unterminated join(...)", pos)
        formulas.append(parse_regex_formula(text[pos:end], offset=pos))
        pos = end
        if text[pos] == ";":
            pos += 1
            continue
        expect(")")
        break
    skip()
    if pos < len(text):
        raise ParseError("trailing input after spanner query", pos)
    q = SpannerQuery(tuple(projection), tuple(equalities), tuple(formulas))
    known = q.svars()
    for v in projection:
        if v not in known:
            raise ParseError(f"projected variable {v!r} is never bound")
    for a, b in equalities:
        if a not in known or b not in known:
            raise ParseError(f"equality over unbound variable in ({a},{b})")
    return q


# -- reference semantics ---------------------------------------------------


def _merge_bindings(b1: tuple, b2: tuple) -> tuple:
    merged = sorted(b1 + b2)
    out = []
    counts: dict[str, int] = {}
    for var, span in merged:
        if counts.get(var, 0) >= 2:
            continue
        counts[var] = counts.get(var, 0) + 1
        out.append((var, span))
    return tuple(out)


class _FormulaMatcher:
    """Interval DP: match set of every subformula, bindings included.
    Binding multiplicity is capped at two, enough to witness any
    functionality violation."""

    def __init__(self, w: str, budget: int = 500_000):
        self.w = w
        self.n = len(w)
        self.budget = budget
        self.cost = 0

    def _charge(self, amount: int) -> None:
        self.cost += amount
        if self.cost > self.budget:
            raise BudgetError(f"spanner oracle budget of {self.budget} exceeded")

    def matches(self, node: Formula) -> set[tuple[int, int, tuple]]:
        n = self.n
        if isinstance(node, Empty):
            return set()
        if isinstance(node, Eps):
            return {(i, i, ()) for i in range(1, n + 2)}
        if isinstance(node, Lit):
            return {
                (i, i + 1, ())
                for i in range(1, n + 1)
                if self.w[i - 1] == node.ch
            }
        if isinstance(node, AnyLetter):
            return {(i, i + 1, ()) for i in range(1, n + 1)}
        if isinstance(node, Bind):
            inner = self.matches(node.inner)
            self._charge(len(inner))
            return {
                (i, j, _merge_bindings(b, ((node.var, (i, j)),)))
                for i, j, b in inner
            }
        if isinstance(node, Cat):
            left = self.matches(node.left)
            right = self.matches(node.right)
            by_start: dict[int, list] = {}
            for i, j, b in right:
                by_start.setdefault(i, []).append((j, b))
            out = set()
            for i, k, b1 in left:
                for j, b2 in by_start.get(k, ()):
                    self._charge(1)
                    out.add((i, j, _merge_bindings(b1, b2)))
            return out
        if isinstance(node, Alt):
            return self.matches(node.left) | self.matches(node.right)
        if isinstance(node, Star):
            inner = self.matches(node.inner)
            by_start = {}
            for i, j, b in inner:
                by_start.setdefault(i, []).append((j, b))
            result = {(i, i, ()) for i in range(1, n + 2)}
            frontier = set(result)
            while frontier:
                new = set()
                for i, k, b1 in frontier:
                    for j, b2 in by_start.get(k, ()):
                        if j == k and not b2:
                            continue
                        self._charge(1)
                        cand = (i, j, _merge_bindings(b1, b2))
                        if cand not in result:
                            new.add(cand)
                result |= new
                frontier = new
            return result
        raise TypeError(f"not a formula node: {node!r}")


def formula_matches(
    formula: RegexFormula, w: str, budget: int = 500_000
) -> set[tuple[int, int, tuple]]:
    return _FormulaMatcher(w, budget).matches(formula.core)


def formula_span_tuples(
    formula: RegexFormula, w: str, budget: int = 500_000
) -> set[tuple]:
    """Whole-word matches as sorted (var, span) tuples; requires a
    functional formula."""
    if not formula.functional:
        raise ContractError("formula is not functional")
    out = set()
    for i, j, b in formula_matches(formula, w, budget):
        if i == 1 and j == len(w) + 1:
            out.add(tuple(sorted(b)))
    return out


def semantically_functional(
    formula: RegexFormula, w: str, budget: int = 500_000
) -> bool:
    """Every whole-word match assigns every captured variable exactly
    once (the brute-force reading of functionality)."""
    svars = bound_vars(formula.core)
    for i, j, b in formula_matches(formula, w, budget):
        if (i, j) != (1, len(w) + 1):
            continue
        seen: dict[str, int] = {}
        for var, _span in b:
            seen[var] = seen.get(var, 0) + 1
        if any(c != 1 for c in seen.values()) or set(seen) != set(svars):
            return False
    return True


def spanner_eval_oracle(
    p: SpannerQuery, w: str, budget: int = 500_000
) -> set[tuple]:
    """Exact span-tuple set of the spanner query by enumeration, joining,
    equality filtering, and projection. Tuples are sorted (var, span)
    pairs over the projected variables."""
    if not p.functional():
        raise ContractError("all joined formulas must be functional")
    joined: list[dict] = [{}]
    for f in p.formulas:
        rows = [dict(t) for t in formula_span_tuples(f, w, budget)]
        merged = []
        for acc in joined:
            for row in rows:
                if all(acc[v] == s for v, s in row.items() if v in acc):
                    new = dict(acc)
                    new.update(row)
                    merged.append(new)
                    if len(merged) > budget:
                        raise BudgetError("spanner join budget exceeded")
        joined = merged
    out = set()
    for mu in joined:
        ok = True
        for a, b in p.equalities:
            sa, sb = mu[a], mu[b]
            if w[sa[0] - 1 : sa[1] - 1] != w[sb[0] - 1 : sb[1] - 1]:
                ok = False
                break
        if ok:
            out.add(tuple(sorted((v, mu[v]) for v in p.projection)))
    return out


def express(mu: dict[str, tuple[int, int]], w: str) -> Substitution:
    """Prefix/content encoding of a span tuple."""
    assignment = {}
    for x, (i, j) in mu.items():
        assignment[p_var(x)] = Span(1, i)
        assignment[c_var(x)] = Span(i, j)
    return Substitution(w, assignment)


# -- compilation to word-equation queries ----------------------------------


@dataclass
class _PNode:
    kind: str  # "cat" | "bind" | "leaf"
    var: str
    payload: object
    children: list


def _has_bind(node: Formula) -> bool:
    return bool(bound_vars(node))


def sercq_to_fccq(p: SpannerQuery) -> Query:
    """Realizing query: each captured span is encoded by its prefix and
    content variables; every parse-tree node of every formula contributes
    one equation or constraint."""
    if not p.synchronized():
        raise ContractError("spanner query is not synchronized")
    if not p.functional():
        raise ContractError("spanner query is not functional")
    equations: list[WordEquation] = []
    constraints: list[RegexConstraint] = []
    counter = 0

    def fresh() -> str:
        nonlocal counter
        counter += 1
        return f"$s{counter}"

    def build(node: Formula) -> _PNode:
        if isinstance(node, Bind):
            child = build(node.inner)
            return _PNode("bind", c_var(node.var), node.var, [child])
        if isinstance(node, Cat) and (_has_bind(node.left) or _has_bind(node.right)):
            left = build(node.left)
            right = build(node.right)
            return _PNode("cat", fresh(), None, [left, right])
        return _PNode("leaf", fresh(), node, [])

    def emit(node: _PNode, prefix: tuple[str, ...]) -> None:
        if node.kind == "cat":
            left, right = node.children
            equations.append(WordEquation(node.var, (left.var, right.var)))
            emit(left, prefix)
            emit(right, prefix + (left.var,))
        elif node.kind == "bind":
            (child,) = node.children
            equations.append(WordEquation(node.var, (child.var,)))
            if prefix:
                equations.append(WordEquation(p_var(node.payload), prefix))
            else:
                constraints.append(RegexConstraint(p_var(node.payload), Eps()))
            emit(child, prefix)
        else:
            constraints.append(RegexConstraint(node.var, node.payload))

    for f in p.formulas:
        root = build(f.core)
        if root.kind == "cat":
            left, right = root.children
            equations.append(WordEquation(UNIVERSE, (left.var, right.var)))
            emit(left, ())
            emit(right, (left.var,))
        elif root.kind == "bind":
            equations.append(WordEquation(UNIVERSE, (root.var,)))
            (child,) = root.children
            equations.append(WordEquation(root.var, (child.var,)))
            constraints.append(RegexConstraint(p_var(root.payload), Eps()))
            emit(child, ())
        else:
            constraints.append(RegexConstraint(UNIVERSE, root.payload))

    for a, b in p.equalities:
        if a != b:
            equations.append(WordEquation(c_var(a), (c_var(b),)))
    head = []
    for x in p.projection:
        head += [p_var(x), c_var(x)]
    return Query(tuple(head), tuple(equations), tuple(constraints))


# -- the direct acyclic construction ---------------------------------------


def _flatten_cat(node: Formula) -> list[Formula]:
    if isinstance(node, Cat):
        return _flatten_cat(node.left) + _flatten_cat(node.right)
    return [node]


def pseudo_acyclic_shape(formula: RegexFormula):
    """(before, var, inner, after) when the formula is a variable-free
    prefix, one binding of a plain regex, and a variable-free suffix."""
    parts = _flatten_cat(formula.ast)
    binds = [i for i, part in enumerate(parts) if isinstance(part, Bind)]
    if len(binds) != 1:
        return None
    at = binds[0]
    bind = parts[at]
    if bound_vars(bind.inner):
        return None
    if any(bound_vars(part) for i, part in enumerate(parts) if i != at):
        return None
    before = cat_all(parts[:at])
    after = cat_all(parts[at + 1 :])
    return before, bind.var, bind.inner, after


def is_pseudo_acyclic(p: SpannerQuery) -> bool:
    return all(pseudo_acyclic_shape(f) is not None for f in p.formulas)


def _spanning_forest(
    pairs: tuple[tuple[str, str], ...]
) -> list[tuple[str, str]]:
    root: dict[str, str] = {}

    def find(v: str) -> str:
        while root.get(v, v) != v:
            root[v] = root.get(root[v], root[v])
            v = root[v]
        return v

    kept = []
    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            root[ra] = rb
            kept.append((a, b))
    return kept


def pseudo_acyclic_query(p: SpannerQuery) -> Query:
    """Realizing query of a pseudo-acyclic spanner query: per variable a
    universe split into prefix/content/suffix, three constraints per
    formula, and one content copy per spanning-forest equality."""
    shapes = []
    for f in p.formulas:
        shape = pseudo_acyclic_shape(f)
        if shape is None:
            raise ContractError("spanner query is not pseudo-acyclic")
        shapes.append(shape)
    equations: list[WordEquation] = []
    constraints: list[RegexConstraint] = []
    seen: list[str] = []
    for before, var, inner, after in shapes:
        if var not in seen:
            seen.append(var)
    for i, x in enumerate(seen):
        z = f"$p{i + 1}"
        equations.append(WordEquation(UNIVERSE, (p_var(x), z)))
        equations.append(WordEquation(z, (c_var(x), s_var(x))))
    for before, var, inner, after in shapes:
        constraints.append(RegexConstraint(p_var(var), before))
        constraints.append(RegexConstraint(c_var(var), inner))
        constraints.append(RegexConstraint(s_var(var), after))
    for a, b in _spanning_forest(p.equalities):
        equations.append(WordEquation(c_var(a), (c_var(b),)))
    head = []
    for x in p.projection:
        head += [p_var(x), c_var(x)]
    return Query(tuple(head), tuple(equations), tuple(constraints))


def pseudo_acyclic_to_fccq(p: SpannerQuery) -> QueryDecomposition:
    """Decomposed form of the direct construction; always acyclic."""
    query = pseudo_acyclic_query(p)
    qd = decompose_query(query)
    if qd is None:
        raise AssertionError("direct construction produced a cyclic query")
    return qd
