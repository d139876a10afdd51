"""Word index: factor algebra over a fixed input word.

Backed by the suffix kernel (suffix array + LCP + RMQ). Positions and spans
are 1-based; a span [start, end) denotes the factor word[start-1:end-1].
Factor *values* are identified by a key (block, length) where block is the
leftmost suffix-array slot whose suffix starts with the value; the canonical
span of a value is the prefix of that lexicographically least suffix.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, NamedTuple

from wordcq.errors import ContractError, RangeError
from wordcq.kernel import SuffixKernel

UNIVERSE = "U"

ValueKey = tuple[int, int]
EMPTY_KEY: ValueKey = (-1, 0)


class Span(NamedTuple):
    start: int
    end: int

    @property
    def length(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class BinaryShape:
    """Shape of a word equation lhs = rhs1 . rhs2; variables may coincide
    and any of them may be the universe variable."""

    lhs: str
    rhs1: str
    rhs2: str


class WordIndex:
    """Immutable index over one word; all query methods are read-only."""

    def __init__(self, word: str):
        self.word = word
        self.n = len(word)
        if self.n:
            vocab = {ch: c for c, ch in enumerate(sorted(set(word)))}
            self._kernel = SuffixKernel([vocab[ch] for ch in word])
        else:
            self._kernel = None
        self._values: list[tuple[ValueKey, Span]] | None = None

    # -- basic queries ----------------------------------------------------

    def _check_pos(self, i: int) -> None:
        if not 1 <= i <= self.n:
            raise RangeError(f"position {i} outside [1, {self.n}]")

    def _check_span(self, s: Span) -> None:
        if not (1 <= s.start <= s.end <= self.n + 1):
            raise RangeError(f"span {s} outside word of length {self.n}")

    def factor(self, s: Span) -> str:
        self._check_span(s)
        return self.word[s.start - 1 : s.end - 1]

    def lcp(self, i: int, j: int) -> int:
        """Length of the longest common prefix of the suffixes at i and j."""
        self._check_pos(i)
        self._check_pos(j)
        return self._kernel.suffix_lcp(i - 1, j - 1)

    def factor_eq(self, s1: Span, s2: Span) -> bool:
        """Value equality of two factors: length check plus one LCP query."""
        self._check_span(s1)
        self._check_span(s2)
        length = s1.length
        if length != s2.length:
            return False
        if length == 0:
            return True
        return self._kernel.suffix_lcp(s1.start - 1, s2.start - 1) >= length

    # -- factor values ----------------------------------------------------

    def value_key(self, s: Span) -> ValueKey:
        """Stable identifier of the factor value denoted by a span."""
        self._check_span(s)
        length = s.length
        if length == 0:
            return EMPTY_KEY
        return (self._kernel.block_lo(s.start - 1, length), length)

    def canonical_span(self, key: ValueKey) -> Span:
        block, length = key
        if length == 0:
            return Span(1, 1)
        pos = self._kernel.sa[block] + 1
        return Span(pos, pos + length)

    def canonicalize(self, s: Span) -> Span:
        return self.canonical_span(self.value_key(s))

    def value_str(self, key: ValueKey) -> str:
        return self.factor(self.canonical_span(key))

    def whole_span(self) -> Span:
        return Span(1, self.n + 1)

    # -- enumerations ------------------------------------------------------

    def enumerate_factors(self) -> Iterator[Span]:
        """All distinct factors, one canonical span each, in lexicographic
        order of the factor strings (the empty factor first)."""
        yield Span(1, 1)
        if not self.n:
            return
        sa = self._kernel.sa
        lcp = self._kernel.lcp
        n = self.n
        for t in range(n):
            pos = sa[t] + 1
            first = 1 if t == 0 else lcp[t] + 1
            for length in range(first, n - sa[t] + 1):
                yield Span(pos, pos + length)

    def factor_values(self) -> list[tuple[ValueKey, Span]]:
        """Distinct factor values with canonical spans, lexicographic."""
        if self._values is None:
            values = [(EMPTY_KEY, Span(1, 1))]
            if self.n:
                sa = self._kernel.sa
                lcp = self._kernel.lcp
                n = self.n
                for t in range(n):
                    pos = sa[t] + 1
                    first = 1 if t == 0 else lcp[t] + 1
                    for length in range(first, n - sa[t] + 1):
                        values.append(((t, length), Span(pos, pos + length)))
            self._values = values
        return self._values

    def enumerate_squares(self) -> Iterator[Span]:
        """All distinct factors of shape v.v (the empty factor included),
        one canonical span each, in lexicographic order."""
        keys = {EMPTY_KEY}
        n = self.n
        for half in range(1, n // 2 + 1):
            for i0 in range(n - 2 * half + 1):
                if self._kernel.suffix_lcp(i0, i0 + half) >= half:
                    keys.add(self.value_key(Span(i0 + 1, i0 + 1 + 2 * half)))
        for key in sorted(keys):
            yield self.canonical_span(key)

    # -- the implicit relation of a binary word equation -------------------

    def holds_binary(
        self, shape: BinaryShape, assignment: dict[str, Span]
    ) -> bool:
        """Membership test for lhs = rhs1 . rhs2 under a span assignment,
        via length arithmetic and two LCP queries."""
        spans = []
        for var in (shape.lhs, shape.rhs1, shape.rhs2):
            if var not in assignment:
                raise ContractError(f"variable {var!r} unbound in assignment")
            s = assignment[var]
            self._check_span(s)
            if var == UNIVERSE and s != self.whole_span():
                raise ContractError("universe variable must denote the whole word")
            spans.append(s)
        s, s1, s2 = spans
        l1 = s1.length
        l2 = s2.length
        if s.length != l1 + l2:
            return False
        if l1 and self._kernel.suffix_lcp(s.start - 1, s1.start - 1) < l1:
            return False
        if l2 and self._kernel.suffix_lcp(s.start - 1 + l1, s2.start - 1) < l2:
            return False
        return True

    def enumerate_binary_keys(
        self, shape: BinaryShape, domains: dict[str, set | None] | None = None
    ) -> Iterator[dict[str, ValueKey]]:
        """Like enumerate_binary but over value keys, with optional
        per-variable value filters applied inside the enumeration (so a
        rejected left value skips all its splits)."""
        domains = domains or {}

        def ok(var: str, key: ValueKey) -> bool:
            dom = domains.get(var)
            return dom is None or key in dom

        x, y, z = shape.lhs, shape.rhs1, shape.rhs2
        n = self.n
        if y == UNIVERSE or z == UNIVERSE:
            other = z if y == UNIVERSE else y
            if other == UNIVERSE:
                # lhs = U.U (or symmetric): solvable only on the empty word.
                if n == 0:
                    if x == UNIVERSE:
                        yield {}
                    elif ok(x, EMPTY_KEY):
                        yield {x: EMPTY_KEY}
                return
            whole = self.value_key(self.whole_span())
            if x == UNIVERSE:
                if ok(other, EMPTY_KEY):
                    yield {other: EMPTY_KEY}
            elif x == other:
                if n == 0 and ok(x, EMPTY_KEY):
                    yield {x: EMPTY_KEY}
            elif ok(x, whole) and ok(other, EMPTY_KEY):
                yield {x: whole, other: EMPTY_KEY}
        elif x == UNIVERSE:
            if y == z:
                half, odd = divmod(n, 2)
                if not odd and (n == 0 or self._kernel.suffix_lcp(0, half) >= half):
                    key = self.value_key(Span(1, 1 + half))
                    if ok(y, key):
                        yield {y: key}
            else:
                for split in range(n + 1):
                    ykey = self.value_key(Span(1, 1 + split))
                    if not ok(y, ykey):
                        continue
                    zkey = self.value_key(Span(1 + split, n + 1))
                    if ok(z, zkey):
                        yield {y: ykey, z: zkey}
        elif x == y == z:
            if ok(x, EMPTY_KEY):
                yield {x: EMPTY_KEY}
        elif x == y or x == z:
            eps_var = z if x == y else y
            if ok(eps_var, EMPTY_KEY):
                for key, _span in self.factor_values():
                    if ok(x, key):
                        yield {x: key, eps_var: EMPTY_KEY}
        elif y == z:
            for u in self.enumerate_squares():
                key = self.value_key(u)
                if not ok(x, key):
                    continue
                half = self.value_key(Span(u.start, u.start + u.length // 2))
                if ok(y, half):
                    yield {x: key, y: half}
        else:
            for key, span in self.factor_values():
                if not ok(x, key):
                    continue
                for split in range(span.length + 1):
                    ykey = self.value_key(Span(span.start, span.start + split))
                    if not ok(y, ykey):
                        continue
                    zkey = self.value_key(Span(span.start + split, span.end))
                    if ok(z, zkey):
                        yield {x: key, y: ykey, z: zkey}

    def enumerate_binary(self, shape: BinaryShape) -> Iterator[dict[str, Span]]:
        """All solutions of lhs = rhs1 . rhs2 over factors of the word,
        one assignment per solution, as canonical spans over the ordinary
        (non-universe) variables of the shape.

        Order: factor-lexicographic on the left-hand value, then split
        position ascending. Degenerate coincidence patterns follow the
        length-arithmetic case analysis.
        """
        for assignment in self.enumerate_binary_keys(shape):
            yield {v: self.canonical_span(k) for v, k in assignment.items()}


def build_index(word: str) -> WordIndex:
    return WordIndex(word)
