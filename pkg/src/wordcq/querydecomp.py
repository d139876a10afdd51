"""Query-level acyclicity: ear-removal join trees, the four cyclicity
preconditions, constrained per-atom decomposition driven by weak-join-tree
edge labels, and assembly of the global binary query plus its join tree.

The universe variable is a constant everywhere here: it never enters a
hyperedge and is exempt from join-tree connectedness.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from wordcq.errors import ContractError
from wordcq.model import Query, WordEquation, equation_vars
from wordcq.normalize import NormalizedQuery, normalize
from wordcq.patterns import Atom2, Decomposition, atom_decompose, find_acyclic_bracketing
from wordcq.windex import UNIVERSE


def gyo(hyperedges: list[frozenset[str]]) -> list[tuple[int, int]] | None:
    """Ear removal over variable sets. Returns join-tree edges over edge
    indices when the hypergraph is acyclic, else None. Deterministic:
    nodes are scanned in input order and the first eligible ear is marked.
    """
    n = len(hyperedges)
    if n == 0:
        return []
    live_vars = [set(e) for e in hyperedges]
    unmarked = [True] * n
    edges: list[tuple[int, int]] = []
    while True:
        changed = False
        found = None
        for i in range(n):
            if not unmarked[i]:
                continue
            for j in range(n):
                if i == j or not unmarked[j]:
                    continue
                if live_vars[i] <= live_vars[j]:
                    found = (i, j)
                    break
            if found:
                break
        if found:
            i, j = found
            unmarked[i] = False
            edges.append((i, j))
            changed = True
        counts: dict[str, int] = {}
        for i in range(n):
            if unmarked[i]:
                for v in live_vars[i]:
                    counts[v] = counts.get(v, 0) + 1
        solo = {v for v, c in counts.items() if c == 1}
        if solo:
            for i in range(n):
                if unmarked[i] and live_vars[i] & solo:
                    live_vars[i] -= solo
                    changed = True
        if not changed:
            break
    if sum(unmarked) != 1:
        return None
    return edges


@dataclass
class WeakJoinTree:
    """Join tree over whole (undecomposed) equations; edge labels are the
    shared original variable sets."""

    edges: list[tuple[int, int]]
    labels: dict[tuple[int, int], frozenset[str]]


def weak_join_tree(nq: Query) -> WeakJoinTree | None:
    var_sets = [frozenset(equation_vars(eq)) for eq in nq.equations]
    edges = gyo(var_sets)
    if edges is None:
        return None
    labels = {
        (i, j): frozenset(var_sets[i] & var_sets[j]) for i, j in edges
    }
    return WeakJoinTree(edges, labels)


@dataclass
class CyclicityReport:
    """Which of the four sufficient cyclicity conditions fired."""

    weakly_cyclic: bool
    cyclic_patterns: list[int]
    overshared: list[tuple[int, int]]
    three_shared_long: list[tuple[int, int]]

    def fired(self) -> list[int]:
        out = []
        if self.weakly_cyclic:
            out.append(1)
        if self.cyclic_patterns:
            out.append(2)
        if self.overshared:
            out.append(3)
        if self.three_shared_long:
            out.append(4)
        return out

    def any(self) -> bool:
        return bool(self.fired())


def cyclicity_conditions(nq: Query) -> CyclicityReport:
    """The four conditions, each sufficient for the query to be cyclic:
    weak cyclicity; a cyclic right-hand pattern; two atoms sharing more
    than three variables; two atoms sharing exactly three with either
    equation longer than three."""
    eqs = nq.equations
    weakly_cyclic = weak_join_tree(nq) is None
    cyclic_patterns = [
        i
        for i, eq in enumerate(eqs)
        if len(eq.rhs) > 1 and find_acyclic_bracketing(eq.rhs) is None
    ]
    overshared = []
    three_shared_long = []
    for i in range(len(eqs)):
        for j in range(i + 1, len(eqs)):
            shared = equation_vars(eqs[i]) & equation_vars(eqs[j])
            if len(shared) > 3:
                overshared.append((i, j))
            elif len(shared) == 3 and (
                1 + len(eqs[i].rhs) > 3 or 1 + len(eqs[j].rhs) > 3
            ):
                three_shared_long.append((i, j))
    return CyclicityReport(
        weakly_cyclic, cyclic_patterns, overshared, three_shared_long
    )


@dataclass
class JoinTree:
    """Tree over the binary atoms of a decomposition. `block_of` maps each
    node to the source equation it decomposes (the skeleton map)."""

    atoms: list[Atom2]
    edges: list[tuple[int, int]]
    block_of: list[int]

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.atoms]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


@dataclass
class QueryDecomposition:
    """An equivalent binary query with its join tree and bookkeeping."""

    query2: Query
    tree: JoinTree
    per_atom: list[Decomposition]
    normalized: NormalizedQuery
    weak: WeakJoinTree


@dataclass
class AnalysisResult:
    normalized: NormalizedQuery
    report: CyclicityReport
    weak: WeakJoinTree | None
    decomposition: QueryDecomposition | None
    failed_atoms: list[int] = field(default_factory=list)

    @property
    def acyclic(self) -> bool:
        return self.decomposition is not None


def analyze_query(query: Query) -> AnalysisResult:
    """Normalize, test the cyclicity conditions, then build an acyclic
    binary decomposition with the weak join tree as skeleton, or report
    why none exists."""
    nq = normalize(query)
    report = cyclicity_conditions(nq.query)
    if report.any():
        weak = weak_join_tree(nq.query)
        return AnalysisResult(nq, report, weak, None)
    weak = weak_join_tree(nq.query)
    eqs = nq.query.equations

    requirements: list[set[frozenset[str]]] = [set() for _ in eqs]
    for (i, j), label in weak.labels.items():
        if len(label) == 2:
            requirements[i].add(label)
            requirements[j].add(label)

    per_atom: list[Decomposition] = []
    failed: list[int] = []
    for i, eq in enumerate(eqs):
        d = atom_decompose(eq, requirements[i], prefix=f"$q{i}_")
        if d is None:
            failed.append(i)
        else:
            per_atom.append(d)
    if failed:
        return AnalysisResult(nq, report, weak, None, failed)

    atoms: list[Atom2] = []
    block_of: list[int] = []
    edges: list[tuple[int, int]] = []
    offsets: list[int] = []
    for i, d in enumerate(per_atom):
        offsets.append(len(atoms))
        block_edges = gyo([frozenset(a.vars()) for a in d.atoms])
        if block_edges is None:
            raise AssertionError("per-atom decomposition is not acyclic")
        for a, b in block_edges:
            edges.append((offsets[i] + a, offsets[i] + b))
        atoms.extend(d.atoms)
        block_of.extend([i] * len(d.atoms))

    for (i, j), label in weak.labels.items():
        ni = _anchor(per_atom[i], label, offsets[i])
        nj = _anchor(per_atom[j], label, offsets[j])
        edges.append((ni, nj))

    query2 = Query(
        query.head,
        tuple(a.to_equation() for a in atoms),
        nq.query.constraints,
    )
    tree = JoinTree(atoms, edges, block_of)
    qd = QueryDecomposition(query2, tree, per_atom, nq, weak)
    return AnalysisResult(nq, report, weak, qd)


def _anchor(d: Decomposition, label: frozenset[str], offset: int) -> int:
    """First atom of the block containing every shared variable."""
    for idx, atom in enumerate(d.atoms):
        if label <= atom.vars():
            return offset + idx
    raise AssertionError(f"no atom carries the shared variables {set(label)}")


def decompose_query(query: Query) -> QueryDecomposition | None:
    return analyze_query(query).decomposition


def validate_join_tree(tree: JoinTree, query2: Query) -> bool:
    """Connectedness check: for every variable except the universe, the
    atoms containing it induce a connected subtree."""
    if [a.to_equation() for a in tree.atoms] != list(query2.equations):
        raise ContractError("join-tree nodes do not match the query atoms")
    if len(tree.atoms) == 0:
        return True
    if len(tree.edges) != len(tree.atoms) - 1:
        return False
    adj = tree.neighbors()
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    if len(seen) != len(tree.atoms):
        return False
    all_vars = set().union(*(a.vars() for a in tree.atoms)) if tree.atoms else set()
    for var in all_vars:
        holders = {i for i, a in enumerate(tree.atoms) if var in a.vars()}
        if len(holders) <= 1:
            continue
        start = next(iter(holders))
        reached = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if u in holders and u not in reached:
                    reached.add(u)
                    stack.append(u)
        if reached != holders:
            return False
    return True


def skeleton_of(tree: JoinTree) -> set[frozenset[int]]:
    """Block pairs connected by a cross edge (contract each block)."""
    out = set()
    for a, b in tree.edges:
        if tree.block_of[a] != tree.block_of[b]:
            out.add(frozenset((tree.block_of[a], tree.block_of[b])))
    return out


def join_tree_dot(tree: JoinTree) -> str:
    lines = ["graph join_tree {"]
    for i, atom in enumerate(tree.atoms):
        rhs = ".".join(atom.rhs)
        lines.append(f'  n{i} [label="{atom.lhs} = {rhs}"];')
    for a, b in sorted(tree.edges):
        lines.append(f"  n{a} -- n{b};")
    lines.append("}")
    return "\n".join(lines)


def prefactor(query: Query) -> Query:
    """Optional pass: repeatedly pull the longest variable subpattern
    (length at least two) occurring in two different equations into a
    fresh shared definition."""
    equations = list(query.equations)
    used = set()
    for eq in equations:
        used.add(eq.lhs)
        used.update(s for s in eq.rhs if isinstance(s, str))
    used |= set(query.head) | {UNIVERSE}
    counter = 0
    while True:
        best = None
        for i in range(len(equations)):
            rhs_i = equations[i].rhs
            for j in range(i + 1, len(equations)):
                rhs_j = equations[j].rhs
                for length in range(min(len(rhs_i), len(rhs_j)), 1, -1):
                    if best and length <= best[0]:
                        break
                    for a in range(len(rhs_i) - length + 1):
                        piece = rhs_i[a : a + length]
                        if any(not isinstance(s, str) for s in piece):
                            continue
                        for b in range(len(rhs_j) - length + 1):
                            if rhs_j[b : b + length] == piece:
                                if not best or length > best[0]:
                                    best = (length, piece)
                                break
        if not best:
            return Query(query.head, tuple(equations), query.constraints)
        piece = best[1]
        counter += 1
        z = f"$f{counter}"
        while z in used:
            counter += 1
            z = f"$f{counter}"
        used.add(z)

        def replace(rhs: tuple) -> tuple:
            out: list = []
            pos = 0
            while pos < len(rhs):
                if tuple(rhs[pos : pos + len(piece)]) == piece:
                    out.append(z)
                    pos += len(piece)
                else:
                    out.append(rhs[pos])
                    pos += 1
            return tuple(out)

        equations = [WordEquation(eq.lhs, replace(eq.rhs)) for eq in equations]
        equations.append(WordEquation(z, piece))
