"""Shared brute-force oracles and corpus generators for the test suite.

Everything here is deliberately index-free and straightforward: direct
string slicing, explicit enumeration, bitmask ear removal. These are the
reference implementations the package is tested against.
"""

from __future__ import annotations

import itertools
import random

from wordcq.model import Query, Terminal, WordEquation
from wordcq.patterns import decompose_bracketing
from wordcq.windex import UNIVERSE, Span


def all_substrings(w: str) -> list[str]:
    out = {""}
    for i in range(len(w)):
        for j in range(i + 1, len(w) + 1):
            out.add(w[i:j])
    return sorted(out)


def all_spans(n: int) -> list[Span]:
    return [Span(i, j) for i in range(1, n + 2) for j in range(i, n + 2)]


def binary_words(max_len: int, alphabet: str = "ab"):
    yield ""
    for length in range(1, max_len + 1):
        for bits in itertools.product(alphabet, repeat=length):
            yield "".join(bits)


def brute_binary_relation(w: str, lhs: str, rhs1: str, rhs2: str):
    """Solution set of lhs = rhs1.rhs2 over factors of w, as string tuples
    over the distinct non-universe variables (in first-occurrence order)."""
    columns = []
    for v in (lhs, rhs1, rhs2):
        if v != UNIVERSE and v not in columns:
            columns.append(v)
    facs = all_substrings(w)
    out = set()
    for combo in itertools.product(facs, repeat=len(columns)):
        val = dict(zip(columns, combo))
        val[UNIVERSE] = w
        if val[lhs] == val[rhs1] + val[rhs2]:
            out.add(tuple(val[c] for c in columns))
    return columns, out


def gyo_bitmask(hyperedges: list[int]) -> bool:
    """Ear-removal acyclicity over variable bitmasks."""
    edges = list(hyperedges)
    n = len(edges)
    if n <= 1:
        return True
    alive = [True] * n
    while True:
        changed = False
        counts: dict[int, int] = {}
        for i in range(n):
            if alive[i]:
                m = edges[i]
                while m:
                    b = m & -m
                    counts[b] = counts.get(b, 0) + 1
                    m ^= b
        solo = 0
        for b, c in counts.items():
            if c == 1:
                solo |= b
        if solo:
            for i in range(n):
                if alive[i] and edges[i] & solo:
                    edges[i] &= ~solo
                    changed = True
        removed = False
        for i in range(n):
            if not alive[i]:
                continue
            for j in range(n):
                if i != j and alive[j] and edges[i] & ~edges[j] == 0:
                    alive[i] = False
                    changed = True
                    removed = True
                    break
            if removed:
                break
        if not changed:
            break
    return sum(alive) == 1


def bracketing_acyclic_gyo(b, root: str = UNIVERSE) -> bool:
    """Independent route: decompose, then bitmask ear removal."""
    d = decompose_bracketing(b, root)
    ids: dict[str, int] = {}
    masks = []
    for atom in d.atoms:
        m = 0
        for v in atom.vars():
            if v not in ids:
                ids[v] = len(ids)
            m |= 1 << ids[v]
        masks.append(m)
    return gyo_bitmask(masks)


def canonical_pattern(pat) -> tuple[str, ...]:
    ren: dict[str, str] = {}
    return tuple(ren.setdefault(v, f"v{len(ren)}") for v in pat)


def patterns_over(max_len: int, alphabet: str = "abc"):
    """Canonical representatives of the patterns over the alphabet."""
    seen = set()
    for length in range(1, max_len + 1):
        for pat in itertools.product(alphabet, repeat=length):
            canon = canonical_pattern(pat)
            if canon not in seen:
                seen.add(canon)
                yield canon


def naive_boolean_search(query: Query, w: str) -> bool:
    """Independent satisfiability check: plain product over factor values."""
    facs = all_substrings(w)
    variables = sorted(query.body_vars())

    def value(sigma, sym):
        if isinstance(sym, Terminal):
            return sym.ch
        if sym == UNIVERSE:
            return w
        return sigma[sym]

    from wordcq.regexlang import regex_matches

    for combo in itertools.product(facs, repeat=len(variables)):
        sigma = dict(zip(variables, combo))
        ok = True
        for eq in query.equations:
            rhs = "".join(value(sigma, s) for s in eq.rhs)
            if value(sigma, eq.lhs) != rhs:
                ok = False
                break
        if ok:
            for c in query.constraints:
                if not regex_matches(c.regex, value(sigma, c.var)):
                    ok = False
                    break
        if ok:
            return True
    return False


def random_normalized_query(
    rng: random.Random, max_atoms=3, max_rhs=5, max_vars=6, project=False
):
    """Normalized-by-construction equation set (no constraints)."""
    pool = [f"v{i}" for i in range(rng.randint(2, max_vars))]
    eqs = []
    seen_rhs = set()
    for _ in range(rng.randint(1, max_atoms)):
        for _attempt in range(60):
            lhs = rng.choice(pool + [UNIVERSE])
            rhs = tuple(rng.choice(pool) for _ in range(rng.randint(1, max_rhs)))
            if lhs in rhs or rhs in seen_rhs:
                continue
            seen_rhs.add(rhs)
            eqs.append(WordEquation(lhs, rhs))
            break
    head: tuple[str, ...] = ()
    if project:
        used = sorted({v for eq in eqs for v in (eq.lhs,) + eq.rhs if v != UNIVERSE})
        head = tuple(rng.sample(used, min(len(used), rng.randint(0, 3))))
    return Query(head, tuple(eqs), ())


def random_general_query(rng: random.Random, max_atoms=4, max_vars=5):
    """Arbitrary pre-normalization query: terminals, self and universe
    occurrences, duplicate right sides all allowed."""
    pool = [f"v{i}" for i in range(rng.randint(1, max_vars))]
    syms = pool + [UNIVERSE, Terminal("a"), Terminal("b")]
    eqs = []
    for _ in range(rng.randint(1, max_atoms)):
        lhs = rng.choice(pool + [UNIVERSE])
        rhs = tuple(rng.choice(syms) for _ in range(rng.randint(0, 4)))
        eqs.append(WordEquation(lhs, rhs))
    head_pool = sorted({e.lhs for e in eqs if e.lhs != UNIVERSE})
    head = tuple(rng.sample(head_pool, min(len(head_pool), rng.randint(0, 2))))
    return Query(head, tuple(eqs), ())


SERCQ_CORPUS = [
    # The first two entries are the running golden examples.
    "proj[x,y] join( S* x{a|(b)*} y{S*} S* )",
    "proj[x1,x2] eq[x1,x2] join( S* x1{SS*} a S* ; S* x2{SS*} b S* )",
    "proj[x] join( S* x{SS*} a S* )",
    "proj[x] join( x{S*} )",
    "proj[x] join( x{a*} S* )",
    "proj[x] join( S* x{(ab)*} S* )",
    "proj[x,y] join( S* x{a} S* y{b} S* )",
    "proj[x,y] join( x{S*} y{S*} )",
    "proj[x] eq[x,y] join( x{S*} y{S*} )",
    "proj[x,y] eq[x,y] join( S* x{SS*} S* ; S* y{SS*} S* )",
    "proj[x] join( a x{S*} b )",
    "proj[x] join( x{ab|ba} S* )",
    "proj[x,y] join( S* x{y{a*}b} S* )",
    "proj[x] join( S* x{aa*bb*} S* )",
    "proj[x,y,z] join( x{a*} y{b*} z{a*} )",
    "proj[x] eq[x,y] eq[y,z] join( x{S*} y{S*} z{S*} )",
    "proj[x] eq[x,y] eq[y,z] eq[z,x] join( x{SS*} y{SS*} z{SS*} )",
    "proj[x,z] eq[x,y] join( S* x{SS*} S* ; y{S*} z{S*} )",
    "proj[x] join( (a|b)* x{ab} (a|b)* )",
    "proj[x] join( S* x{_} S* )",
    "proj[x] join( x{S*} ; a S* )",
    "proj[x,y] join( S* x{SS*} a S* ; S* y{SS*} a S* )",
    "proj[x] eq[x,x] join( S* x{SS*} S* )",
    "proj[x,y] join( S* x{a(ba)*} S* ; b y{S*} )",
    "proj[x] join( S* a x{S*b} )",
    "proj[x,y] eq[x,y] join( x{S*} a ; S* y{S*} )",
    "proj[x] join( ((ab)|(ba))* x{S} S* )",
    "proj[x,y] join( S* x{aS*} y{bS*} )",
    "proj[x] join( x{(a|b)(a|b)} S* )",
    "proj[x,w] eq[x,w] join( S* x{SS*} S* w{SS*} S* )",
]

PSEUDO_ACYCLIC_CORPUS = [
    "proj[x1,x2] eq[x1,x2] join( S* x1{SS*} a S* ; S* x2{SS*} b S* )",
    "proj[x] join( S* x{SS*} a S* )",
    "proj[x] join( x{S*} )",
    "proj[x] join( x{a*} S* )",
    "proj[x] join( S* x{(ab)*} S* )",
    "proj[x] eq[x,y] join( x{S*} ; y{S*} )",
    "proj[x] eq[x,y] eq[y,z] eq[z,x] join( x{SS*} ; y{SS*} ; z{SS*} )",
    "proj[x] join( a x{S*} b )",
    "proj[x,y] eq[x,y] join( x{S*} a ; S* y{S*} )",
    "proj[x] join( S* a x{S*b} )",
]
