"""Rewriting of queries into the normalized form the decomposition needs:
terminal-free right-hand sides, no left side recurring in its own right
side, no universe variable in right sides, pairwise distinct right sides.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from wordcq.model import (
    Query,
    RegexConstraint,
    Terminal,
    WordEquation,
    fresh_names,
)
from wordcq.regexlang import Eps, Lit, cat_all
from wordcq.windex import UNIVERSE

ORIGIN_TERMINAL_BLOCK = "terminal-block"
ORIGIN_SELF_OCCURRENCE = "self-occurrence"
ORIGIN_UNIVERSE_OCCURRENCE = "universe-occurrence"


@dataclass
class NormalizedQuery:
    """A normalized query plus the origin of every introduced variable."""

    query: Query
    provenance: dict[str, str] = field(default_factory=dict)


def is_normalized(query: Query) -> bool:
    seen_rhs = set()
    for eq in query.equations:
        if not eq.rhs or any(isinstance(s, Terminal) for s in eq.rhs):
            return False
        if eq.lhs in eq.rhs or UNIVERSE in eq.rhs:
            return False
        if eq.rhs in seen_rhs:
            return False
        seen_rhs.add(eq.rhs)
    return True


def _all_names(query: Query) -> set[str]:
    names = set(query.head) | {UNIVERSE}
    for eq in query.equations:
        names.add(eq.lhs)
        names.update(s for s in eq.rhs if isinstance(s, str))
    for c in query.constraints:
        names.add(c.var)
    return names


def normalize(query: Query) -> NormalizedQuery:
    """Equivalent normalized query; deterministic, fresh names from the
    reserved ``$n`` namespace, each rule applied to a fixed point."""
    equations = list(query.equations)
    constraints = list(query.constraints)
    provenance: dict[str, str] = {}
    fresh = fresh_names(_all_names(query))

    def eps_constraints(vars_in_order):
        seen = set()
        for sym in vars_in_order:
            if isinstance(sym, Terminal) or sym in seen:
                continue
            seen.add(sym)
            constraints.append(RegexConstraint(sym, Eps()))

    # Empty right sides denote the empty word; expressed as a constraint.
    kept = []
    for eq in equations:
        if eq.rhs:
            kept.append(eq)
        else:
            constraints.append(RegexConstraint(eq.lhs, Eps()))
    equations = kept

    # Rule 1: each maximal terminal block becomes a fresh constrained variable.
    for i, eq in enumerate(equations):
        if all(isinstance(s, str) for s in eq.rhs):
            continue
        out: list = []
        block: list[str] = []
        for sym in list(eq.rhs) + [None]:
            if isinstance(sym, Terminal):
                block.append(sym.ch)
                continue
            if block:
                z = next(fresh)
                provenance[z] = ORIGIN_TERMINAL_BLOCK
                constraints.append(
                    RegexConstraint(z, cat_all([Lit(ch) for ch in block]))
                )
                out.append(z)
                block = []
            if sym is not None:
                out.append(sym)
        equations[i] = WordEquation(eq.lhs, tuple(out))

    rounds = 0
    limit = 8 * (len(equations) + 2) ** 2 + sum(len(eq.rhs) for eq in equations)
    changed = True
    while changed:
        rounds += 1
        if rounds > limit:
            raise AssertionError("normalization failed to reach a fixed point")
        changed = False

        # Rule 2: left side occurring in its own right side.
        for i, eq in enumerate(equations):
            if eq.lhs in eq.rhs:
                rest = tuple(s for s in eq.rhs if s != eq.lhs)
                extra = len([s for s in eq.rhs if s == eq.lhs]) - 1
                z = next(fresh)
                provenance[z] = ORIGIN_SELF_OCCURRENCE
                equations[i] = WordEquation(eq.lhs, (z,))
                eps_constraints(rest)
                if extra:
                    # Further copies of the left side must also be empty.
                    eps_constraints([eq.lhs])
                changed = True
                break
        if changed:
            continue

        # Rule 3: universe variable occurring in a right side.
        for i, eq in enumerate(equations):
            if UNIVERSE in eq.rhs:
                rest = tuple(s for s in eq.rhs if s != UNIVERSE)
                extra = len([s for s in eq.rhs if s == UNIVERSE]) - 1
                if eq.lhs == UNIVERSE:
                    z = next(fresh)
                    provenance[z] = ORIGIN_UNIVERSE_OCCURRENCE
                    equations[i] = WordEquation(UNIVERSE, (z,))
                else:
                    equations[i] = WordEquation(UNIVERSE, (eq.lhs,))
                eps_constraints(rest)
                if extra:
                    eps_constraints([UNIVERSE])
                changed = True
                break
        if changed:
            continue

        # Rule 4: duplicate right sides. Identical atoms collapse; atoms
        # agreeing only on the right side become copy equations.
        seen: dict[tuple, int] = {}
        for i, eq in enumerate(equations):
            j = seen.get(eq.rhs)
            if j is None:
                seen[eq.rhs] = i
                continue
            other = equations[j]
            if other.lhs == eq.lhs:
                del equations[i]
            else:
                equations[i] = WordEquation(eq.lhs, (other.lhs,))
            changed = True
            break

    unique_constraints = list(dict.fromkeys(constraints))
    return NormalizedQuery(
        Query(query.head, tuple(equations), tuple(unique_constraints)), provenance
    )
