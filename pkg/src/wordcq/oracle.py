"""Reference evaluator: exhaustive, string-based, index-free.

Answers are computed by backtracking over factor values with direct string
comparison, so this path shares nothing with the suffix-index engine and
serves as its oracle. Guarded by a node budget; intended for small words.
"""

from __future__ import annotations

from wordcq.errors import BudgetError
from wordcq.model import Query, Terminal, WordEquation, pattern_vars
from wordcq.regexlang import matcher_for
from wordcq.windex import UNIVERSE

DEFAULT_BUDGET = 2_000_000


def all_factors(w: str) -> list[str]:
    """Distinct substrings of w, shortlex-sorted."""
    out = {""}
    for i in range(len(w)):
        for j in range(i + 1, len(w) + 1):
            out.add(w[i:j])
    return sorted(out, key=lambda s: (len(s), s))


class _Search:
    def __init__(self, query: Query, w: str, budget: int):
        self.w = w
        self.budget = budget
        self.steps = 0
        self.factors = all_factors(w)
        matchers: dict[str, list] = {}
        for c in query.constraints:
            matchers.setdefault(c.var, []).append(matcher_for(c.regex))
        self.domains: dict[str, list[str]] = {}
        self._domain_sets: dict[str, set[str]] = {}
        for var, ms in matchers.items():
            if var == UNIVERSE:
                continue
            dom = [f for f in self.factors if all(m.match(f) for m in ms)]
            self.domains[var] = dom
            self._domain_sets[var] = set(dom)
        self.universe_ok = all(m.match(w) for m in matchers.get(UNIVERSE, []))

    def tick(self) -> None:
        self.steps += 1
        if self.steps > self.budget:
            raise BudgetError(f"oracle budget of {self.budget} steps exceeded")

    def domain(self, var: str) -> list[str]:
        return self.domains.get(var, self.factors)

    def in_domain(self, var: str, value: str) -> bool:
        dom = self._domain_sets.get(var)
        return dom is None or value in dom

    def match_pattern(self, target: str, rhs, k: int, sigma: dict[str, str]):
        """Extend sigma so that rhs[k:] spells exactly `target`."""
        self.tick()
        if k == len(rhs):
            if not target:
                yield sigma
            return
        sym = rhs[k]
        if isinstance(sym, Terminal):
            if target.startswith(sym.ch):
                yield from self.match_pattern(target[1:], rhs, k + 1, sigma)
            return
        if sym == UNIVERSE:
            if target.startswith(self.w):
                yield from self.match_pattern(target[len(self.w):], rhs, k + 1, sigma)
            return
        bound = sigma.get(sym)
        if bound is not None:
            if target.startswith(bound):
                yield from self.match_pattern(target[len(bound):], rhs, k + 1, sigma)
            return
        for cut in range(len(target) + 1):
            piece = target[:cut]
            if not self.in_domain(sym, piece):
                continue
            sigma[sym] = piece
            yield from self.match_pattern(target[cut:], rhs, k + 1, sigma)
            del sigma[sym]

    def solve(self, equations: list[WordEquation], sigma: dict[str, str]):
        self.tick()
        if not equations:
            yield dict(sigma)
            return
        # Prefer an equation whose left side is already known: its right
        # side then only needs to split a fixed target string.
        pick = None
        for idx, eq in enumerate(equations):
            if eq.lhs == UNIVERSE or eq.lhs in sigma:
                pick = idx
                break
        if pick is None:
            pick = 0
        eq = equations[pick]
        rest = equations[:pick] + equations[pick + 1 :]
        if eq.lhs == UNIVERSE or eq.lhs in sigma:
            target = self.w if eq.lhs == UNIVERSE else sigma[eq.lhs]
            for s2 in self.match_pattern(target, eq.rhs, 0, sigma):
                yield from self.solve(rest, s2)
        else:
            for value in self.domain(eq.lhs):
                sigma[eq.lhs] = value
                for s2 in self.match_pattern(value, eq.rhs, 0, sigma):
                    yield from self.solve(rest, s2)
                del sigma[eq.lhs]


def oracle_eval(
    query: Query, w: str, budget: int = DEFAULT_BUDGET
) -> set[tuple[str, ...]]:
    """Exact answer set of the query on w, as tuples of factor strings in
    head order. Boolean queries return {()} or the empty set."""
    search = _Search(query, w, budget)
    if not search.universe_ok:
        return set()
    answers: set[tuple[str, ...]] = set()
    loose = sorted(query.body_vars() - _equation_vars(query))
    for sigma in search.solve(list(query.equations), {}):
        if any(not search.in_domain(v, val) for v, val in sigma.items()):
            continue
        stack = [sigma]
        for var in loose:
            if var in sigma:
                continue
            grown = []
            for s in stack:
                for val in search.domain(var):
                    search.tick()
                    grown.append(dict(s, **{var: val}))
            stack = grown
        for full in stack:
            answers.add(tuple(full[v] for v in query.head))
    return answers


def _equation_vars(query: Query) -> set[str]:
    vs: set[str] = set()
    for eq in query.equations:
        if eq.lhs != UNIVERSE:
            vs.add(eq.lhs)
        vs.update(pattern_vars(eq.rhs))
    return vs


def oracle_nonempty(query: Query, w: str, budget: int = DEFAULT_BUDGET) -> bool:
    return bool(oracle_eval(query, w, budget))
