"""Index-backed evaluation of acyclic binary queries.

Atom relations are materialized over factor *values* (canonical spans of
the word index), regex constraints filter variable domains during
materialization, and a full semi-join reduction over the join tree makes
every surviving tuple extendable; answers are then enumerated by
backtracking with projection dedup and emitted in lexicographic order of
the head factor strings.
"""

from __future__ import annotations

from dataclasses import dataclass

from wordcq.errors import ContractError
from wordcq.model import RegexConstraint, WordEquation
from wordcq.querydecomp import QueryDecomposition
from wordcq.regexlang import matcher_for
from wordcq.windex import UNIVERSE, BinaryShape, ValueKey, WordIndex

Domains = dict[str, "set[ValueKey] | None"]


@dataclass
class AtomRelation:
    """Materialized relation of one atom; columns are the distinct
    non-universe variables of the atom."""

    columns: tuple[str, ...]
    tuples: set[tuple[ValueKey, ...]]


def _domain_ok(domains: Domains, var: str, key: ValueKey) -> bool:
    dom = domains.get(var)
    return dom is None or key in dom


def materialize(
    eq: WordEquation | RegexConstraint,
    idx: WordIndex,
    domains: Domains | None = None,
) -> AtomRelation:
    """Relation of a binary equation, copy equation, or regex constraint,
    with per-variable domain filters fused into the enumeration."""
    domains = domains or {}
    if isinstance(eq, RegexConstraint):
        m = matcher_for(eq.regex)
        if eq.var == UNIVERSE:
            return AtomRelation((), {()} if m.match(idx.word) else set())
        tuples = {
            (key,)
            for key, span in idx.factor_values()
            if m.match(idx.factor(span)) and _domain_ok(domains, eq.var, key)
        }
        return AtomRelation((eq.var,), tuples)
    if len(eq.rhs) == 2:
        shape = BinaryShape(eq.lhs, eq.rhs[0], eq.rhs[1])
        columns = []
        for v in (shape.lhs, shape.rhs1, shape.rhs2):
            if v != UNIVERSE and v not in columns:
                columns.append(v)
        columns = tuple(columns)
        tuples = {
            tuple(asg[c] for c in columns)
            for asg in idx.enumerate_binary_keys(shape, domains)
        }
        return AtomRelation(columns, tuples)
    if len(eq.rhs) != 1 or not isinstance(eq.rhs[0], str):
        raise ContractError(f"not a binary or copy atom: {eq}")
    lhs, rhs = eq.lhs, eq.rhs[0]
    whole = idx.value_key(idx.whole_span())
    if lhs == UNIVERSE and rhs == UNIVERSE:
        return AtomRelation((), {()})
    if lhs == UNIVERSE or rhs == UNIVERSE:
        other = rhs if lhs == UNIVERSE else lhs
        tuples = {(whole,)} if _domain_ok(domains, other, whole) else set()
        return AtomRelation((other,), tuples)
    if lhs == rhs:
        tuples = {
            (key,)
            for key, _span in idx.factor_values()
            if _domain_ok(domains, lhs, key)
        }
        return AtomRelation((lhs,), tuples)
    tuples = {
        (key, key)
        for key, _span in idx.factor_values()
        if _domain_ok(domains, lhs, key) and _domain_ok(domains, rhs, key)
    }
    return AtomRelation((lhs, rhs), tuples)


class _Evaluation:
    def __init__(self, qd: QueryDecomposition, idx: WordIndex):
        self.qd = qd
        self.idx = idx
        self.feasible = True
        query = qd.query2

        matchers: dict[str, list] = {}
        for c in query.constraints:
            matchers.setdefault(c.var, []).append(matcher_for(c.regex))
        for m in matchers.pop(UNIVERSE, []):
            if not m.match(idx.word):
                self.feasible = False
        self.domains: Domains = {}
        if self.feasible:
            for var, ms in matchers.items():
                self.domains[var] = {
                    key
                    for key, span in idx.factor_values()
                    if all(m.match(idx.factor(span)) for m in ms)
                }

        atom_vars: set[str] = set()
        for eq in query.equations:
            if eq.lhs != UNIVERSE:
                atom_vars.add(eq.lhs)
            atom_vars.update(v for v in eq.rhs if v != UNIVERSE)
        self.loose = sorted(
            (query.body_vars() - atom_vars), key=str
        )
        for var in self.loose:
            if self.domains.get(var) is None:
                self.domains[var] = {key for key, _ in idx.factor_values()}
            if not self.domains[var]:
                self.feasible = False

        self.relations: list[AtomRelation] = []
        if self.feasible:
            for eq in query.equations:
                rel = materialize(eq, idx, self.domains)
                if not rel.tuples:
                    self.feasible = False
                self.relations.append(rel)
        self._ordered = None

    def _order(self) -> list[int]:
        """BFS order of the join tree from node 0; parents precede children."""
        if self._ordered is not None:
            return self._ordered
        tree = self.qd.tree
        n = len(tree.atoms)
        if n == 0:
            self._ordered = []
            self.parent = []
            return []
        adj = tree.neighbors()
        parent = [-1] * n
        order = [0]
        seen = {0}
        qpos = 0
        while qpos < len(order):
            v = order[qpos]
            qpos += 1
            for u in adj[v]:
                if u not in seen:
                    seen.add(u)
                    parent[u] = v
                    order.append(u)
        if len(order) != n:
            raise ContractError("join tree is not connected")
        self._ordered = order
        self.parent = parent
        return order

    def _semijoin_reduce(self, full: bool) -> bool:
        """Bottom-up pass (and top-down when `full`); False when some
        relation empties."""
        order = self._order()
        rels = self.relations
        parent = self.parent

        def shared(v: int) -> tuple[str, ...]:
            p = parent[v]
            if p < 0:
                return ()
            pv = set(rels[p].columns)
            return tuple(c for c in rels[v].columns if c in pv)

        for v in reversed(order):
            p = parent[v]
            if p < 0:
                continue
            cols = shared(v)
            vi = [rels[v].columns.index(c) for c in cols]
            pi = [rels[p].columns.index(c) for c in cols]
            allowed = {tuple(t[i] for i in vi) for t in rels[v].tuples}
            rels[p].tuples = {
                t for t in rels[p].tuples if tuple(t[i] for i in pi) in allowed
            }
            if not rels[p].tuples:
                return False
        if full:
            for v in order:
                p = parent[v]
                if p < 0:
                    continue
                cols = shared(v)
                vi = [rels[v].columns.index(c) for c in cols]
                pi = [rels[p].columns.index(c) for c in cols]
                allowed = {tuple(t[i] for i in pi) for t in rels[p].tuples}
                rels[v].tuples = {
                    t for t in rels[v].tuples if tuple(t[i] for i in vi) in allowed
                }
                if not rels[v].tuples:
                    return False
        return True

    def model_check(self) -> bool:
        if not self.feasible:
            return False
        if not self.qd.tree.atoms:
            return True
        return self._semijoin_reduce(full=False)

    def answers(self) -> list[tuple[str, ...]]:
        if not self.feasible:
            return []
        head = self.qd.query2.head
        if self.qd.tree.atoms and not self._semijoin_reduce(full=True):
            return []

        order = self._order()
        rels = self.relations
        parent = self.parent
        head_set = set(head)

        # Subtrees without head variables are already guaranteed to extend
        # by the full reduction, so enumeration can skip them.
        children: list[list[int]] = [[] for _ in order] if order else []
        for v in order:
            if parent and parent[v] >= 0:
                children[parent[v]].append(v)
        useful = [False] * len(order)
        for v in reversed(order):
            mine = bool(head_set & set(rels[v].columns))
            useful[v] = mine or any(useful[c] for c in children[v])

        indexes: dict[int, dict] = {}
        shared_cols: dict[int, tuple[int, ...]] = {}
        for v in order:
            p = parent[v]
            if p < 0:
                continue
            pv = set(rels[p].columns)
            cols = tuple(c for c in rels[v].columns if c in pv)
            vi = tuple(rels[v].columns.index(c) for c in cols)
            shared_cols[v] = vi
            bucket: dict = {}
            pcols = tuple(rels[p].columns.index(c) for c in cols)
            indexes[v] = (pcols, bucket)
            for t in rels[v].tuples:
                bucket.setdefault(tuple(t[i] for i in vi), []).append(t)

        visit = [v for v in order if useful[v]] if order else []
        results: set[tuple[ValueKey, ...]] = set()
        assignment: dict[str, ValueKey] = {}

        loose_head = [v for v in self.loose if v in head_set]

        def walk(pos: int) -> None:
            if pos == len(visit):
                if loose_head:
                    self._loose_product(loose_head, 0, assignment, results)
                else:
                    results.add(tuple(assignment[h] for h in head))
                return
            v = visit[pos]
            p = parent[v]
            if p < 0 or not useful[p]:
                candidates = rels[v].tuples
            else:
                pcols, bucket = indexes[v]
                key = tuple(
                    assignment[rels[v].columns[i]] for i in shared_cols[v]
                )
                candidates = bucket.get(key, ())
            cols = rels[v].columns
            for t in candidates:
                bound = []
                ok = True
                for c, val in zip(cols, t):
                    prev = assignment.get(c)
                    if prev is None:
                        assignment[c] = val
                        bound.append(c)
                    elif prev != val:
                        ok = False
                        break
                if ok:
                    walk(pos + 1)
                for c in bound:
                    del assignment[c]

        if self.qd.tree.atoms or self.loose:
            walk(0)
        else:
            results.add(())
        strings = {}

        def to_str(key: ValueKey) -> str:
            s = strings.get(key)
            if s is None:
                s = self.idx.value_str(key)
                strings[key] = s
            return s

        answers = sorted(tuple(to_str(k) for k in row) for row in results)
        return answers

    def _loose_product(self, loose_head, i: int, assignment, results) -> None:
        if i == len(loose_head):
            head = self.qd.query2.head
            results.add(tuple(assignment[h] for h in head))
            return
        var = loose_head[i]
        for key in self.domains[var]:
            assignment[var] = key
            self._loose_product(loose_head, i + 1, assignment, results)
            del assignment[var]


def model_check(qd: QueryDecomposition, word: str | WordIndex) -> bool:
    """Nonemptiness of the decomposed query on the word."""
    idx = word if isinstance(word, WordIndex) else WordIndex(word)
    return _Evaluation(qd, idx).model_check()


def enumerate_answers(qd: QueryDecomposition, word: str | WordIndex):
    """All distinct head tuples as factor strings, lexicographically."""
    idx = word if isinstance(word, WordIndex) else WordIndex(word)
    return iter(_Evaluation(qd, idx).answers())
